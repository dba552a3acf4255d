import numpy as np
import pytest

from rfkcert import (
    Ball,
    BoundaryCondition,
    ConcentricAnnulus,
    ProblemParams,
    RadialProblem,
    Side,
    solve_first_radial,
)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Force jit compilation of the shooting kernels before any timed test."""
    prob = RadialProblem(ProblemParams(2, 2.0), 0.0, 1.0,
                         BoundaryCondition.neumann(), BoundaryCondition.dirichlet())
    solve_first_radial(prob, tol=1e-8)


@pytest.fixture(scope="session")
def disk_dirichlet_p2():
    prob = RadialProblem(ProblemParams(2, 2.0), 0.0, 1.0,
                         BoundaryCondition.neumann(), BoundaryCondition.dirichlet())
    return solve_first_radial(prob)


@pytest.fixture(scope="session")
def annulus12():
    return ConcentricAnnulus(1.0, 2.0, N=2)


def radial_problem(params, domain, bc_inner, bc_outer, mode="first"):
    r0 = 0.0 if isinstance(domain, Ball) else domain.R0
    return RadialProblem(params, r0, domain.R1, bc_inner, bc_outer, mode=mode)

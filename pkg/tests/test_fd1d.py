"""Cross-validation of the finite element radial oracle against shooting."""
import numpy as np
import pytest

from rfkcert import (
    BoundaryCondition,
    ProblemParams,
    RadialProblem,
    fd1d_eigenvalue,
    fd1d_eigenvalues,
    solve_first_radial,
    solve_second_radial,
)

D = BoundaryCondition.dirichlet
Nm = BoundaryCondition.neumann
Rb = BoundaryCondition.robin

PATTERNS = {
    "DD": (D(), D()),
    "DN": (D(), Nm()),
    "ND": (Nm(), D()),
}


@pytest.mark.parametrize("pattern", sorted(PATTERNS))
@pytest.mark.parametrize("N", [2, 3])
def test_first_mode_agrees_with_shooting(pattern, N):
    bc0, bc1 = PATTERNS[pattern]
    prob = RadialProblem(ProblemParams(N, 2.0), 1.0, 2.0, bc0, bc1)
    lam_fe = fd1d_eigenvalue(prob, n=4096)
    lam_sh = solve_first_radial(prob).lam
    assert lam_fe == pytest.approx(lam_sh, rel=1e-8)


@pytest.mark.parametrize("N", [2, 3])
def test_second_neumann_mode_agrees(N):
    prob = RadialProblem(ProblemParams(N, 2.0), 1.0, 2.0, Nm(), Nm(), mode="second")
    lam_fe = fd1d_eigenvalue(prob, n=4096, mode=2)
    lam_sh = solve_second_radial(prob).lam
    assert lam_fe == pytest.approx(lam_sh, rel=1e-8)


def test_robin_agrees_with_shooting():
    par = ProblemParams(2, 2.0, robin_k=2.5)
    prob = RadialProblem(par, 1.0, 2.0, Nm(), Rb(2.5))
    lam_fe = fd1d_eigenvalue(prob, n=4096)
    lam_sh = solve_first_radial(prob).lam
    assert lam_fe == pytest.approx(lam_sh, rel=1e-8)


def test_ball_regularity():
    prob = RadialProblem(ProblemParams(3, 2.0), 0.0, 1.0, Nm(), D())
    assert fd1d_eigenvalue(prob, n=4096) == pytest.approx(np.pi**2, rel=1e-8)


def test_eigenvalue_ordering():
    prob = RadialProblem(ProblemParams(2, 2.0), 1.0, 2.0, D(), D())
    lams = fd1d_eigenvalues(prob, n=2048, count=3)
    assert len(lams) == 3
    assert lams[0] < lams[1] < lams[2]
    # raw discrete value vs the extrapolated one
    assert lams[0] == pytest.approx(fd1d_eigenvalue(prob, n=2048), rel=1e-5)


def test_refinement_converges():
    # second order in h for the raw discrete eigenvalue; the extrapolated
    # variant is already at the shooting oracle's accuracy floor
    prob = RadialProblem(ProblemParams(3, 2.0), 0.5, 2.0, Nm(), D())
    truth = solve_first_radial(prob).lam
    err_coarse = abs(fd1d_eigenvalues(prob, n=512, count=1)[0] - truth)
    err_fine = abs(fd1d_eigenvalues(prob, n=2048, count=1)[0] - truth)
    assert err_fine < err_coarse / 8.0


def test_p_must_be_two():
    prob = RadialProblem(ProblemParams(2, 3.0), 1.0, 2.0, D(), D())
    with pytest.raises(ValueError):
        fd1d_eigenvalue(prob)

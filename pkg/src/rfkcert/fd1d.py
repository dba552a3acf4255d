"""Independent p = 2 oracle for the radial problems.

P1 finite elements on a uniform grid in r with the r^{N-1} weight.  The
stiffness entries are integrated exactly, the mass entries with a Gauss rule
that is exact for the integrands in every dimension used here.  Nothing is
shared with the shooting code beyond the problem description, so agreement
between the two is a genuine cross-check.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .radial import DIRICHLET, ROBIN, RadialProblem

_GAUSS_X = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GAUSS_W = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


def radial_fem_matrices(N: int, r0: float, r1: float, n: int):
    """Stiffness and mass for -(r^{N-1} u')' = lam r^{N-1} u on (r0, r1).

    Returns (K, M, nodes) with both matrices over all n+1 nodes; boundary
    conditions are applied by the caller.
    """
    if n < 4:
        raise ValueError("need at least 4 elements")
    nodes = np.linspace(r0, r1, n + 1)
    h = (r1 - r0) / n
    a, b = nodes[:-1], nodes[1:]
    # integral of r^{N-1} over each element, exact
    kw = (b**N - a**N) / N
    ke = kw / h**2

    mid = 0.5 * (a + b)
    xg = mid[:, None] + 0.5 * h * _GAUSS_X[None, :]
    wg = 0.5 * h * _GAUSS_W[None, :]
    t = (xg - a[:, None]) / h  # local coordinate in [0, 1]
    wr = wg * xg ** (N - 1)
    m00 = np.sum(wr * (1 - t) ** 2, axis=1)
    m01 = np.sum(wr * (1 - t) * t, axis=1)
    m11 = np.sum(wr * t**2, axis=1)

    d_k = np.zeros(n + 1)
    d_k[:-1] += ke
    d_k[1:] += ke
    d_m = np.zeros(n + 1)
    d_m[:-1] += m00
    d_m[1:] += m11
    K = sp.diags([-ke, d_k, -ke], offsets=[-1, 0, 1], format="csr")
    M = sp.diags([m01, d_m, m01], offsets=[-1, 0, 1], format="csr")
    return K, M, nodes


def fd1d_eigenvalues(problem: RadialProblem, n: int = 4096, count: int = 2) -> np.ndarray:
    """Lowest eigenvalues of the discrete problem, ascending."""
    if problem.params.p != 2.0:
        raise ValueError("the finite element oracle is limited to p = 2")
    N = problem.params.N
    r_start = problem.r0  # a ball keeps the full interval, weight kills r = 0
    K, M, _ = radial_fem_matrices(N, r_start, problem.r1, n)
    K = sp.lil_matrix(K)
    if problem.bc_inner.kind == ROBIN and problem.r0 > 0:
        K[0, 0] += problem.bc_inner.k * problem.r0 ** (N - 1)
    if problem.bc_outer.kind == ROBIN:
        K[-1, -1] += problem.bc_outer.k * problem.r1 ** (N - 1)
    lo = 1 if problem.bc_inner.kind == DIRICHLET and problem.r0 > 0 else 0
    hi = n if problem.bc_outer.kind == DIRICHLET else n + 1
    K = sp.csr_matrix(K)[lo:hi, lo:hi]
    M = sp.csr_matrix(M)[lo:hi, lo:hi]
    size = hi - lo
    # shift-invert about a negative pole keeps the operator definite even for
    # the Neumann-Neumann case where 0 is an eigenvalue
    vals = eigsh(
        K,
        k=count,
        M=M,
        sigma=-1.0,
        which="LM",
        v0=np.ones(size),
        return_eigenvectors=False,
    )
    return np.sort(vals)


def fd1d_eigenvalue(problem: RadialProblem, n: int = 4096, mode: int = 1) -> float:
    """Richardson-extrapolated eigenvalue; mode 1 is the smallest."""
    coarse = fd1d_eigenvalues(problem, n, count=mode)[mode - 1]
    fine = fd1d_eigenvalues(problem, 2 * n, count=mode)[mode - 1]
    return fine + (fine - coarse) / 3.0

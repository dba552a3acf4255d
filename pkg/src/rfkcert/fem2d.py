"""Planar P1 eigenvalue oracle.

Independent of the shooting pipeline: assembles piecewise-linear stiffness
and mass forms on a triangle mesh, then runs a deterministic shift-invert
power iteration at p = 2 or a preconditioned Rayleigh-quotient descent for
general p.  Everything here is pure given (mesh, flags, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import Mesh2D, boundary_edges

FIRST = "first"
SECOND_NEUMANN = "second_neumann"

# K + shift*M stays positive definite even with no Dirichlet constraint
_SHIFT = 1.0
_POWER_TOL = 1e-12
_POWER_CAP = 400


class SolverStagnation(RuntimeError):
    """Iteration failed to reach its tolerance within the cap."""


@dataclass
class Eigenpair2D:
    eigenvalue: float
    values: np.ndarray
    dirichlet_tags: tuple
    residual: float
    meta: dict = field(default_factory=dict)


def _tri_geometry(mesh: Mesh2D):
    t = mesh.tris
    x = mesh.nodes[t, 0]
    y = mesh.nodes[t, 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    return b, c, area


def assemble_p1(mesh: Mesh2D):
    """Stiffness, consistent mass, and lumped mass for P1 elements.

    Gradients of the hat functions are constant per triangle, so both forms
    are exact; the lumped mass puts one third of each triangle on each vertex.
    """
    t = mesh.tris
    b, c, area = _tri_geometry(mesh)
    n = mesh.n_nodes
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()

    kv = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    kv = (kv / (4.0 * area)[:, None, None]).ravel()
    K = sp.coo_matrix((kv, (rows, cols)), shape=(n, n)).tocsr()

    mloc = (np.ones((3, 3)) + np.eye(3)) / 12.0
    mv = (area[:, None, None] * mloc[None, :, :]).ravel()
    M = sp.coo_matrix((mv, (rows, cols)), shape=(n, n)).tocsr()

    lump = np.zeros(n)
    np.add.at(lump, t.ravel(), np.repeat(area / 3.0, 3))
    return K, M, lump


def robin_edge_mass(mesh: Mesh2D, tag: int) -> sp.csr_matrix:
    """Boundary mass over the edges whose endpoints both carry `tag`."""
    edges = boundary_edges(mesh)
    keep = (mesh.tags[edges[:, 0]] == tag) & (mesh.tags[edges[:, 1]] == tag)
    edges = edges[keep]
    n = mesh.n_nodes
    if len(edges) == 0:
        return sp.csr_matrix((n, n))
    d = mesh.nodes[edges[:, 1]] - mesh.nodes[edges[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    loc = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    vals = (length[:, None, None] * loc[None, :, :]).ravel()
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _free_mask(mesh: Mesh2D, dirichlet_tags) -> np.ndarray:
    mask = np.ones(mesh.n_nodes, dtype=bool)
    for tag in dirichlet_tags:
        mask &= mesh.tags != tag
    return mask


def p2_eig(mesh: Mesh2D, dirichlet_tags=(), mode: str = FIRST,
           robin: dict | None = None, lumped: bool = False) -> Eigenpair2D:
    """First (or second pure-Neumann) eigenvalue of the P1 pencil at p = 2.

    `robin` maps a boundary tag to an elasticity constant k; the matching
    edge mass times k is added to the stiffness form.  `lumped` swaps the
    consistent mass for the diagonal one, matching the p-norm the descent
    solver uses.  The solver is a shift-invert power iteration with a fixed
    start vector, so repeated runs are bitwise identical.
    """
    dirichlet_tags = tuple(dirichlet_tags)
    if mode == SECOND_NEUMANN and dirichlet_tags:
        raise ValueError("second Neumann mode is defined without Dirichlet constraints")
    K, M, lump = assemble_p1(mesh)
    if lumped:
        M = sp.diags(lump).tocsr()
    if robin:
        for tag in sorted(robin):
            K = K + robin[tag] * robin_edge_mass(mesh, tag)
    free = _free_mask(mesh, dirichlet_tags)
    nf = int(free.sum())
    if nf == 0:
        raise ValueError("no free vertices")
    pure_neumann = bool(free.all()) and not robin

    if mode == FIRST and pure_neumann:
        # constants solve the unconstrained problem exactly
        return Eigenpair2D(0.0, np.ones(mesh.n_nodes), dirichlet_tags, 0.0,
                           {"iterations": 0, "mode": mode})

    Kf = K[free][:, free].tocsc()
    Mf = M[free][:, free].tocsc()
    lu = splu((Kf + _SHIFT * Mf).tocsc())

    deflate = mode == SECOND_NEUMANN
    if deflate:
        ones = np.ones(nf)
        cM = Mf @ ones
        cMc = float(ones @ cM)
        # deterministic start overlapping angular and radial candidates
        xy = mesh.nodes[free]
        v = xy[:, 0] + 0.37 * xy[:, 1] + 0.11 * (xy[:, 0] ** 2 + xy[:, 1] ** 2)
    else:
        v = np.ones(nf)

    lam = 0.0
    lam_prev = np.inf
    converged = False
    it = 0
    for it in range(1, _POWER_CAP + 1):
        if deflate:
            v = v - ((cM @ v) / cMc) * np.ones(nf)
        z = lu.solve(Mf @ v)
        if deflate:
            z = z - ((cM @ z) / cMc) * np.ones(nf)
        mz = Mf @ z
        z = z / np.sqrt(z @ mz)
        lam = float(z @ (Kf @ z))
        v = z
        if abs(lam - lam_prev) <= _POWER_TOL * (1.0 + abs(lam)):
            converged = True
            break
        lam_prev = lam
    if not converged and abs(lam - lam_prev) > 1e-10 * (1.0 + abs(lam)):
        raise SolverStagnation(
            "power iteration stalled at %.12e after %d steps" % (lam, it))

    mv = Mf @ v
    res = float(np.linalg.norm(Kf @ v - lam * mv) / ((1.0 + lam) * np.linalg.norm(mv)))
    values = np.zeros(mesh.n_nodes)
    values[free] = v
    if values.sum() < 0:
        values = -values
    return Eigenpair2D(lam, values, dirichlet_tags, res,
                       {"iterations": it, "mode": mode, "free": nf,
                        "robin": dict(robin) if robin else None})


def richardson(coarse: float, fine: float):
    """Eliminate the leading O(h^2) error from values at h and h/2.

    Returns the extrapolated value and a discretization tolerance equal to
    the correction magnitude.
    """
    lam = fine + (fine - coarse) / 3.0
    return lam, abs(fine - coarse) / 3.0


def plap_eig_descent(mesh: Mesh2D, dirichlet_tags, p: float, seed: int = 0,
                     max_iter: int = 800, tol: float = 1e-11) -> Eigenpair2D:
    """Upper bound for the first eigenvalue at general p > 1.

    Minimizes J(u)/||u||_p^p with one-point gradient quadrature per triangle
    and a vertex-lumped p-norm, starting from all ones on the free vertices.
    Search directions are preconditioned by the (fixed) p = 2 stiffness plus
    lumped mass, and an Armijo backtracking line search keeps the quotient
    monotone.  The seed only feeds stagnation-escape perturbations.
    """
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    dirichlet_tags = tuple(dirichlet_tags)
    t = mesh.tris
    b, c, area = _tri_geometry(mesh)
    n = mesh.n_nodes
    rows = np.repeat(np.arange(len(t)), 3)
    Gx = sp.coo_matrix(((b / (2.0 * area[:, None])).ravel(), (rows, t.ravel())),
                       shape=(len(t), n)).tocsr()
    Gy = sp.coo_matrix(((c / (2.0 * area[:, None])).ravel(), (rows, t.ravel())),
                       shape=(len(t), n)).tocsr()
    K, _, lump = assemble_p1(mesh)
    free = _free_mask(mesh, dirichlet_tags)
    if not free.any():
        raise ValueError("no free vertices")
    idx = np.flatnonzero(free)
    Kf = K[free][:, free].tocsc()
    lu = splu((Kf + sp.diags(lump[free])).tocsc())

    def split(u_free):
        u = np.zeros(n)
        u[idx] = u_free
        gx = Gx @ u
        gy = Gy @ u
        g2 = gx * gx + gy * gy
        num = float(np.sum(area * g2 ** (p / 2.0)))
        den = float(np.sum(lump * np.abs(u) ** p))
        return u, gx, gy, g2, num, den

    def gradient(u, gx, gy, g2, num, den, q):
        fac = area * p * np.where(g2 > 0.0, g2, 1.0) ** ((p - 2.0) / 2.0)
        fac[g2 == 0.0] = 0.0
        dnum = Gx.T @ (fac * gx) + Gy.T @ (fac * gy)
        dden = lump * p * np.abs(u) ** (p - 1.0) * np.sign(u)
        return (dnum[idx] - q * dden[idx]) / den

    rng = np.random.default_rng(seed)
    uf = np.ones(idx.size)
    _, gx, gy, g2, num, den = split(uf)
    q = num / den
    history = [q]
    escapes = 0
    step = 1.0
    converged = False
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        u, gx, gy, g2, num, den = split(uf)
        grad = gradient(u, gx, gy, g2, num, den, q)
        d = lu.solve(grad)
        slope = float(grad @ d)
        if slope <= 0.0:
            d = grad
            slope = float(grad @ grad)
        accepted = False
        tstep = min(step * 2.0, 1.0)
        for _ in range(50):
            trial = uf - tstep * d
            _, _, _, _, num_t, den_t = split(trial)
            if den_t > 0.0 and num_t / den_t <= q - 1e-4 * tstep * slope:
                accepted = True
                break
            tstep *= 0.5
        if accepted:
            uf = trial / (den_t ** (1.0 / p))
            q_new = num_t / den_t
            step = tstep
            rel = abs(q - q_new) / (1.0 + abs(q_new))
            q = q_new
            history.append(q)
            stall = stall + 1 if rel <= tol else 0
            if stall >= 3:
                converged = True
                break
        else:
            # flat to line-search precision: nudge off the point and retry
            if escapes >= 3:
                converged = True
                break
            uf = uf + 1e-8 * np.abs(uf).max() * rng.standard_normal(uf.size)
            escapes += 1
            step = 1.0
    if not converged:
        raise SolverStagnation(
            "descent still moving after %d iterations (q=%.12e)" % (it, q))

    u = np.zeros(n)
    u[idx] = uf
    if u.sum() < 0:
        u = -u
    positive = bool(u.min() >= -1e-8 * np.abs(u).max())
    return Eigenpair2D(q, u, dirichlet_tags, abs(history[-1] - history[-2]) if len(history) > 1 else 0.0,
                       {"iterations": it, "p": p, "seed": seed, "positive": positive,
                        "escapes": escapes, "monotone": bool(np.all(np.diff(history) <= 1e-15))})

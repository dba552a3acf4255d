"""Structured triangle meshes for the plane oracle.

Annulus meshes are built on rays from the hole centre so that both circles
are meshed exactly; disk meshes grow concentric rings stitched ring to ring.
Boundary vertices carry a tag so the assembly can apply a different
condition on each circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INTERIOR, OUTER, INNER = 0, 1, 2


class MeshError(ValueError):
    pass


@dataclass
class Mesh2D:
    nodes: np.ndarray  # (n, 2)
    tris: np.ndarray  # (m, 3) int
    tags: np.ndarray  # (n,) int, INTERIOR / OUTER / INNER
    h_max: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        a = self.areas()
        if (a <= 0.0).any():
            bad = int(np.sum(a <= 0.0))
            raise MeshError(f"{bad} non-positive triangle areas")

    def areas(self) -> np.ndarray:
        p = self.nodes[self.tris]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


def _max_edge(nodes: np.ndarray, tris: np.ndarray) -> float:
    p = nodes[tris]
    d = np.concatenate([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
    return float(np.hypot(d[:, 0], d[:, 1]).max())


def _orient(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p = nodes[tris]
    cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    flip = cross < 0.0
    tris = tris.copy()
    tris[flip, 1], tris[flip, 2] = tris[flip, 2], tris[flip, 1].copy()
    return tris


def annulus_mesh(R0: float, R1: float, e: float = 0.0, h: float = 0.05) -> Mesh2D:
    """Mesh of {|x| < R1} minus the hole {|x - (e,0)| < R0}.

    Rays start on the hole circle and end on the outer circle, so both
    boundaries are polygonal inscriptions with every vertex exactly on its
    circle (up to one multiplicative snap).
    """
    if h <= 0.0:
        raise MeshError(f"spacing must be positive, got {h}")
    if not (0.0 < R0 < R1) or e < 0.0 or e + R0 >= R1:
        raise MeshError("need 0 < R0, e >= 0 and e + R0 < R1")
    gap_max = R1 + e - R0
    if h >= 0.5 * (R1 - R0 - e):
        raise MeshError(f"h = {h} too large for gap {R1 - R0 - e}")
    n_t = max(16, int(math.ceil(2.0 * math.pi * R1 / h)))
    n_r = max(2, int(math.ceil(gap_max / h)))
    theta = 2.0 * math.pi * np.arange(n_t) / n_t
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    ec = e * np.cos(theta)
    t_out = -ec + np.sqrt(ec**2 + R1**2 - e**2)

    frac = np.arange(n_r + 1)[:, None] / n_r
    rad = R0 + (t_out[None, :] - R0) * frac  # (n_r+1, n_t)
    nodes = np.empty((n_r + 1, n_t, 2))
    nodes[:, :, 0] = e + rad * u[None, :, 0]
    nodes[:, :, 1] = rad * u[None, :, 1]
    # snap the outer ring onto the circle exactly
    outer = nodes[-1]
    outer *= (R1 / np.hypot(outer[:, 0], outer[:, 1]))[:, None]
    nodes = nodes.reshape(-1, 2)

    tags = np.full(len(nodes), INTERIOR, dtype=np.int32)
    tags[:n_t] = INNER
    tags[-n_t:] = OUTER

    tris = []
    for i in range(n_r):
        base = i * n_t
        nxt = base + n_t
        j = np.arange(n_t)
        jp = (j + 1) % n_t
        a, b, c, d = base + j, nxt + j, nxt + jp, base + jp
        tris.append(np.stack([a, b, c], axis=1))
        tris.append(np.stack([a, c, d], axis=1))
    tris = _orient(nodes, np.concatenate(tris).astype(np.int64))
    meta = {"kind": "annulus", "R0": R0, "R1": R1, "e": e, "h": h, "n_r": n_r, "n_t": n_t}
    return Mesh2D(nodes, tris, tags, _max_edge(nodes, tris), meta)


def disk_mesh(R1: float, h: float = 0.05) -> Mesh2D:
    """Concentric-ring disk mesh; ring k carries about 2 pi r_k / h nodes."""
    if R1 <= 0.0:
        raise MeshError("radius must be positive")
    if h <= 0.0:
        raise MeshError(f"spacing must be positive, got {h}")
    n = max(2, int(math.ceil(R1 / h)))
    counts = [1]
    starts = [0]
    pts = [np.zeros((1, 2))]
    for k in range(1, n + 1):
        r = R1 * k / n
        m = max(6, int(math.ceil(2.0 * math.pi * r / h)))
        ang = 2.0 * math.pi * np.arange(m) / m
        pts.append(np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1))
        starts.append(starts[-1] + counts[-1])
        counts.append(m)
    nodes = np.concatenate(pts)
    tags = np.full(len(nodes), INTERIOR, dtype=np.int32)
    tags[starts[-1] :] = OUTER

    tris = []
    for k in range(1, n + 1):
        s_in, m_in = starts[k - 1], counts[k - 1]
        s_out, m_out = starts[k], counts[k]
        if m_in == 1:
            for j in range(m_out):
                tris.append((s_in, s_out + j, s_out + (j + 1) % m_out))
            continue
        # walk both rings advancing whichever pointer trails in angle
        i = j = 0
        while i < m_in or j < m_out:
            ang_i = (i + 1) / m_in
            ang_j = (j + 1) / m_out
            vi = s_in + i % m_in
            vj = s_out + j % m_out
            if j < m_out and (i >= m_in or ang_j <= ang_i):
                tris.append((vi, vj, s_out + (j + 1) % m_out))
                j += 1
            else:
                tris.append((vi, vj, s_in + (i + 1) % m_in))
                i += 1
    tris = _orient(nodes, np.asarray(tris, dtype=np.int64))
    meta = {"kind": "disk", "R1": R1, "h": h, "rings": n}
    return Mesh2D(nodes, tris, tags, _max_edge(nodes, tris), meta)


def rectangle_mesh(a: float, b: float, h: float = 0.05) -> Mesh2D:
    """Structured mesh of (0,a) x (0,b); every boundary vertex tagged OUTER."""
    if a <= 0.0 or b <= 0.0 or h <= 0.0:
        raise MeshError("rectangle sides and spacing must be positive")
    nx = max(2, int(math.ceil(a / h)))
    ny = max(2, int(math.ceil(b / h)))
    x = np.linspace(0.0, a, nx + 1)
    y = np.linspace(0.0, b, ny + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel()], axis=1)
    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    tris = []
    for i in range(nx):
        a0, b0 = idx[i, :-1], idx[i + 1, :-1]
        c0, d0 = idx[i + 1, 1:], idx[i, 1:]
        tris.append(np.stack([a0, b0, c0], axis=1))
        tris.append(np.stack([a0, c0, d0], axis=1))
    tags = np.full(len(nodes), INTERIOR, dtype=np.int32)
    on_edge = (
        (nodes[:, 0] == 0.0) | (nodes[:, 0] == a) | (nodes[:, 1] == 0.0) | (nodes[:, 1] == b)
    )
    tags[on_edge] = OUTER
    tris = _orient(nodes, np.concatenate(tris).astype(np.int64))
    return Mesh2D(nodes, tris, tags, _max_edge(nodes, tris), {"kind": "rectangle", "a": a, "b": b, "h": h})


def boundary_edges(mesh: Mesh2D) -> np.ndarray:
    """Edges owned by exactly one triangle, as (k, 2) vertex index pairs."""
    e = np.concatenate(
        [mesh.tris[:, [0, 1]], mesh.tris[:, [1, 2]], mesh.tris[:, [2, 0]]]
    )
    key = np.sort(e, axis=1)
    _, inv, cnt = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    return e[cnt[inv] == 1]

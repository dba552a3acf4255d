"""Interior-parallel measure profiles s(δ), v(δ) and their references S, V.

FromOuter profiles measure the part of the sphere {dist(x, Γ₀) = δ} lying in
Ω; FromInner profiles do the same for spheres around the hole.  The reference
pair (S, V) is the full parallel sphere of the matching concentric annulus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .domains import Ball, ConcentricAnnulus, Domain, EccentricAnnulus, PolygonWithHoles, measures
from .params import Side, ball_volume, sphere_measure, unit_ball_volume


@dataclass
class ParallelProfile:
    side: Side
    delta: np.ndarray
    s: np.ndarray
    v: np.ndarray
    S: np.ndarray
    V: np.ndarray
    delta_omega: float
    domain_volume: float
    boundary_measure: float
    N: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.delta)
        if not (len(self.s) == len(self.v) == len(self.S) == len(self.V) == n):
            raise ValueError("profile arrays must share one grid")


def _sin_power_integral(theta: float, m: int) -> float:
    """∫₀^θ sin^m t dt by adaptive Simpson, absolute tolerance 1e-12."""

    def f(t):
        return math.sin(t) ** m

    def simp(a, b, fa, fm, fb):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m1 = 0.5 * (a + 0.5 * (a + b))
        m2 = 0.5 * (0.5 * (a + b) + b)
        f1, f2 = f(m1), f(m2)
        mid = 0.5 * (a + b)
        left = simp(a, mid, fa, f1, fm)
        right = simp(mid, b, fm, f2, fb)
        if depth > 40 or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, mid, fa, f1, fm, left, tol / 2.0, depth + 1) + rec(
            mid, b, fm, f2, fb, right, tol / 2.0, depth + 1
        )

    if theta <= 0.0:
        return 0.0
    fa, fb = f(0.0), f(theta)
    fm = f(theta / 2.0)
    whole = simp(0.0, theta, fa, fm, fb)
    return rec(0.0, theta, fa, fm, fb, whole, 1e-12, 0)


def cap_area(N: int, rho: float, theta: float) -> float:
    """Surface measure of the polar cap of half-angle theta on a sphere of
    radius rho in R^N.  Closed forms for N=2,3; quadrature above."""
    if rho == 0.0 or theta <= 0.0:
        return 0.0
    if N == 2:
        return 2.0 * rho * theta
    if N == 3:
        return 2.0 * math.pi * rho**2 * (1.0 - math.cos(theta))
    sigma = (N - 1) * unit_ball_volume(N - 1)
    return rho ** (N - 1) * sigma * _sin_power_integral(theta, N - 2)


def _clip_angle(arg: float) -> float:
    # roundoff at tangency can push the cosine a hair outside [-1, 1]
    return math.acos(min(1.0, max(-1.0, arg)))


def exhaustion_depth(domain: Domain, side: Side) -> float:
    if isinstance(domain, Ball):
        if side == Side.FromInner:
            raise ValueError("ball has no inner boundary")
        return domain.R1
    if isinstance(domain, ConcentricAnnulus):
        return domain.R1 - domain.R0
    if isinstance(domain, EccentricAnnulus):
        if side == Side.FromOuter:
            return domain.R1 if domain.e >= domain.R0 else domain.R1 - (domain.R0 - domain.e)
        return domain.R1 + domain.e - domain.R0
    raise TypeError("exhaustion depth is closed-form for spherical domains only")


def parallel_profile_exact(
    domain: Ball | ConcentricAnnulus | EccentricAnnulus,
    side: Side,
    grid_size: int = 2048,
) -> ParallelProfile:
    """Exact spherical-cap profile on a uniform δ-grid.

    The cumulative volume v is the closed-form reference V minus the
    trapezoid integral of the cap deficit, so concentric inputs reproduce
    the closed forms bit-for-bit.
    """
    if isinstance(domain, PolygonWithHoles):
        raise TypeError("polygon domains use the distance-field profile path")
    if grid_size < 16:
        raise ValueError(f"grid_size must be at least 16, got {grid_size}")
    N = domain.N
    if N < 2:
        raise ValueError("profiles are defined for N >= 2")
    om = unit_ball_volume(N)
    m = measures(domain)
    d_om = exhaustion_depth(domain, side)
    delta = np.linspace(0.0, d_om, grid_size)

    if side == Side.FromOuter:
        R1 = domain.R1
        rho = R1 - delta
        S = N * om * rho ** (N - 1)
        V = om * (R1**N - rho**N)
        R0 = 0.0 if isinstance(domain, Ball) else domain.R0
        e = domain.e if isinstance(domain, EccentricAnnulus) else 0.0
        cap = np.zeros(grid_size)
        if e > 0.0:
            for i, p in enumerate(rho):
                if p <= 0.0:
                    continue
                arg = (p * p + e * e - R0 * R0) / (2.0 * p * e)
                cap[i] = cap_area(N, p, _clip_angle(arg))
        elif R0 > 0.0:
            # concentric: the parallel sphere either misses the hole or is it
            cap[rho < R0] = S[rho < R0]
        s = S - cap
        np.maximum(s, 0.0, out=s)
        s[rho <= 0.0] = 0.0
        v = V - cumulative_trapezoid(cap, delta, initial=0.0)
        bd = m.outer_measure
    else:
        if isinstance(domain, Ball):
            raise ValueError("ball has no inner boundary")
        R0, R1 = domain.R0, domain.R1
        e = domain.e if isinstance(domain, EccentricAnnulus) else 0.0
        rho = R0 + delta
        S = N * om * rho ** (N - 1)
        V = om * (rho**N - R0**N)
        if e == 0.0:
            s = S.copy()
            v = V.copy()
        else:
            s = np.empty(grid_size)
            for i, p in enumerate(rho):
                # polar angle about the direction from the hole center to the
                # outer center; a >= cos(angle) keeps the point inside B_{R1}
                arg = (e * e + p * p - R1 * R1) / (2.0 * p * e)
                s[i] = cap_area(N, p, _clip_angle(arg))
            np.minimum(s, S, out=s)
            v = V - cumulative_trapezoid(S - s, delta, initial=0.0)
        bd = m.gamma1_measure

    meta = {"estimator": "exact", "grid_size": grid_size, "domain": describe_domain(domain)}
    return ParallelProfile(side, delta, s, v, S, V, d_om, m.volume, bd, N, meta)


def describe_domain(domain: Domain) -> dict:
    if isinstance(domain, Ball):
        return {"kind": "ball", "R1": domain.R1, "N": domain.N}
    if isinstance(domain, ConcentricAnnulus):
        return {"kind": "concentric", "R0": domain.R0, "R1": domain.R1, "N": domain.N}
    if isinstance(domain, EccentricAnnulus):
        return {"kind": "eccentric", "R0": domain.R0, "R1": domain.R1, "e": domain.e, "N": domain.N}
    return {
        "kind": "polygon",
        "loops": 1 + len(domain.holes),
        "outer_vertices": int(len(domain.outer)),
        "N": 2,
    }


def _hole_center(domain: Domain) -> np.ndarray:
    e = domain.e if isinstance(domain, EccentricAnnulus) else 0.0
    c = np.zeros(domain.N)
    c[0] = e
    return c


def _mc_distances(domain: Domain, side: Side, samples: int, seed: int, block: int = 65536):
    """Rejection-sample Ω and return boundary distances of accepted points.

    Per-block generators derived from one SeedSequence keep the stream
    independent of any internal batching.
    """
    if isinstance(domain, PolygonWithHoles):
        from .polygon import polyline_distance

        lo = domain.outer.min(axis=0)
        hi = domain.outer.max(axis=0)
        vol_box = float(np.prod(hi - lo))

        def draw(rng, n):
            pts = lo + rng.random((n, 2)) * (hi - lo)
            from .domains import points_in_loop

            keep = points_in_loop(pts, domain.outer)
            for h in domain.holes:
                keep &= ~points_in_loop(pts, h)
            pts = pts[keep]
            loop = domain.outer if side == Side.FromOuter else domain.holes[0]
            return polyline_distance(pts, loop)

    else:
        N = domain.N
        R1 = domain.R1
        R0 = 0.0 if isinstance(domain, Ball) else domain.R0
        c = _hole_center(domain)
        vol_box = (2.0 * R1) ** N

        def draw(rng, n):
            pts = (rng.random((n, N)) * 2.0 - 1.0) * R1
            rr = np.linalg.norm(pts, axis=1)
            keep = rr < R1
            if R0 > 0.0:
                keep &= np.linalg.norm(pts - c, axis=1) > R0
            pts, rr = pts[keep], rr[keep]
            if side == Side.FromOuter:
                return R1 - rr
            return np.linalg.norm(pts - c, axis=1) - R0

    ss = np.random.SeedSequence(seed)
    dists = []
    accepted = 0
    n_cand = 0
    b = 0
    while accepted < samples:
        rng = np.random.Generator(np.random.Philox(ss.spawn(1)[0]))
        d = draw(rng, block)
        dists.append(d)
        accepted += len(d)
        n_cand += block
        b += 1
        if b > 4096:
            raise ValueError("rejection sampling failed to fill the sample budget")
    return np.concatenate(dists), n_cand, vol_box


def parallel_profile_mc(
    domain: Domain,
    side: Side,
    grid_size: int = 256,
    samples: int = 200_000,
    seed: int = 0,
) -> ParallelProfile:
    """Monte Carlo profile: v from the empirical distance distribution, s by
    centered differences, with per-bin standard errors in meta."""
    if samples < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {samples}")
    m = measures(domain)
    if m.volume <= 0:
        raise ValueError("degenerate domain")
    if side == Side.FromInner and m.gamma1_measure <= 0:
        raise ValueError("no inner boundary")

    d, n_cand, vol_box = _mc_distances(domain, side, samples, seed)
    d.sort()
    d_om = float(d[-1])
    delta = np.linspace(0.0, d_om, grid_size)
    counts = np.searchsorted(d, delta, side="right").astype(float)
    frac = counts / n_cand
    v = vol_box * frac
    sigma_v = vol_box * np.sqrt(np.maximum(frac * (1.0 - frac), 0.0) / n_cand)

    s = np.gradient(v, delta)
    # shell-count error for the centered difference
    lo = np.clip(np.arange(grid_size) - 1, 0, grid_size - 1)
    hi = np.clip(np.arange(grid_size) + 1, 0, grid_size - 1)
    shell = (counts[hi] - counts[lo]) / n_cand
    width = delta[hi] - delta[lo]
    sigma_s = vol_box * np.sqrt(np.maximum(shell * (1.0 - shell), 0.0) / n_cand) / np.maximum(
        width, 1e-300
    )

    S, V = reference_pair(domain, side, delta)
    meta = {
        "estimator": "mc",
        "seed": seed,
        "samples": int(len(d)),
        "candidates": int(n_cand),
        "grid_size": grid_size,
        "sigma_v": sigma_v,
        "sigma_s": sigma_s,
        "domain": describe_domain(domain),
    }
    bd = m.outer_measure if side == Side.FromOuter else m.gamma1_measure
    return ParallelProfile(side, delta, s, v, S, V, d_om, m.volume, bd, domain.N, meta)


def reference_pair(domain: Domain, side: Side, delta: np.ndarray):
    """Reference full-parallel measure S and its cumulative V on a grid.

    Spherical domains use the sphere formulas; planar polygons use the
    two-sided length bounds |Γ₀| - 2πδ and |Γ₁| + 2πδ.
    """
    m = measures(domain)
    if isinstance(domain, PolygonWithHoles):
        if side == Side.FromOuter:
            S = np.maximum(m.outer_measure - 2.0 * math.pi * delta, 0.0)
        else:
            S = m.gamma1_measure + 2.0 * math.pi * delta
        V = cumulative_trapezoid(S, delta, initial=0.0)
        return S, V
    N = domain.N
    om = unit_ball_volume(N)
    if side == Side.FromOuter:
        rho = np.maximum(domain.R1 - delta, 0.0)
        return N * om * rho ** (N - 1), om * (domain.R1**N - rho**N)
    rho = domain.R0 + delta
    return N * om * rho ** (N - 1), om * (rho**N - domain.R0**N)

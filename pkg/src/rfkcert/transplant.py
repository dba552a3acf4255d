"""Transplanted Rayleigh quotients and the monotone map battery.

The certification pattern is the same on both sides: solve the radial
problem on the matching concentric annulus, pull its eigenfunction back to
the general domain through a measure-preserving radial map, and compare the
resulting Rayleigh quotient against the reference quotient computed by the
same discrete formulas on the reference's own profile.  A concentric input
reproduces the reference bit for bit, so the equality case carries no
quadrature bias; for anything else the margin is the certificate.

Each quotient is evaluated on two different grids (the depth grid and the
volume or length grid).  The two routes discretize the same integral and
their gap is a quadrature consistency control; they are reported separately
and never merged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .domains import (
    Ball,
    ConcentricAnnulus,
    Domain,
    reference_annulus_from_measures,
)
from .params import ProblemParams, Side, unit_ball_volume
from .profiles import ParallelProfile, describe_domain, parallel_profile_exact
from .radial import BoundaryCondition, RadialEigenpair, RadialProblem, solve_first_radial
from .report import (
    VERDICT_HOLDS,
    VERDICT_INCONCLUSIVE,
    VerificationReport,
    classify,
)

S_CLIP_REL = 1e-10


@dataclass
class ParamMaps:
    """Discrete Hersch length and volume maps of one profile."""

    side: Side
    delta: np.ndarray
    s_eff: np.ndarray
    t: np.ndarray
    T: np.ndarray
    v: np.ndarray
    V: np.ndarray
    t_omega: float
    T_sharp: float
    depth_sharp: float
    reference: Ball | ConcentricAnnulus
    clip_count: int
    meta: dict = field(default_factory=dict)


def _clip_small(a: np.ndarray) -> tuple[np.ndarray, int]:
    level = S_CLIP_REL * float(np.max(a))
    mask = a < level
    if not mask.any():
        return a, 0
    out = a.copy()
    out[mask] = level
    return out, int(mask.sum())


def build_maps(profile: ParallelProfile, params: ProblemParams) -> ParamMaps:
    if profile.N != params.N:
        raise ValueError("profile and parameters disagree on the dimension")
    pp = params.p_prime
    s_eff, ns = _clip_small(profile.s)
    S_eff, nS = _clip_small(profile.S)
    t = cumulative_trapezoid(s_eff ** (1.0 - pp), profile.delta, initial=0.0)
    T = cumulative_trapezoid(S_eff ** (1.0 - pp), profile.delta, initial=0.0)
    ref = reference_annulus_from_measures(
        profile.boundary_measure, profile.domain_volume, params.N, profile.side
    )
    if profile.side == Side.FromOuter:
        depth = ref.R1 if isinstance(ref, Ball) else ref.R1 - ref.R0
    else:
        depth = ref.R1 - ref.R0
    clipped_depth = min(depth, float(profile.delta[-1]))
    T_sharp = float(np.interp(clipped_depth, profile.delta, T))
    meta = {"s_clipped": ns, "S_clipped": nS}
    if clipped_depth < depth:
        meta["depth_clipped"] = depth - clipped_depth
    return ParamMaps(
        profile.side,
        profile.delta,
        s_eff,
        t,
        T,
        profile.v,
        profile.V,
        float(t[-1]),
        T_sharp,
        clipped_depth,
        ref,
        ns + nS,
        meta,
    )


def _reference_radius_profile(maps: ParamMaps, alpha: np.ndarray) -> np.ndarray:
    """Radius of the reference sphere enclosing volume alpha from the far end."""
    ref = maps.reference
    n = ref.N
    om = unit_ball_volume(n)
    if maps.side == Side.FromOuter:
        rad = ref.R1**n - alpha / om
    else:
        rad = ref.R0**n + alpha / om
    np.maximum(rad, 0.0, out=rad)
    return rad ** (1.0 / n)


def check_map_lemmas(profile: ParallelProfile, params: ProblemParams) -> dict:
    """Pointwise inequalities the transplant rests on, one report each.

    r_prime_bound   |r'| <= 1, equivalently s(delta) <= reference area at
                    the same enclosed volume
    g_vs_reference  transplanted area g = s о t^{-1} below the reference
                    area on [0, T_sharp]
    depth_order     T_sharp <= t_omega
    volume_identity int g^{p'} dx over [0, t_omega] recovers the volume
    area_radius_form (N = 2 only) closed form of the reference area in
                    terms of enclosed volume
    """
    maps = build_maps(profile, params)
    n = params.N
    om = unit_ball_volume(n)
    eq_tol = 1e-9

    H = n * om * _reference_radius_profile(maps, maps.v) ** (n - 1)
    scale = profile.boundary_measure
    out: dict[str, VerificationReport] = {}

    m_r = (H - profile.s) / scale
    out["r_prime_bound"] = VerificationReport(
        "r_prime_bound",
        maps.delta.copy(),
        m_r,
        1e-8,
        classify(m_r, 1e-8, eq_tol),
        {"side": profile.side.value},
    )

    sel = maps.delta <= maps.depth_sharp
    xg = maps.T[sel]
    g = np.interp(xg, maps.t, maps.s_eff)
    # the reference transplant area on its own length grid is just S
    m_g = (profile.S[sel] - g) / scale
    out["g_vs_reference"] = VerificationReport(
        "g_vs_reference",
        maps.delta[sel].copy(),
        m_g,
        1e-8,
        classify(m_g, 1e-8, eq_tol),
        {"side": profile.side.value, "T_sharp": maps.T_sharp},
    )

    m_d = np.array([(maps.t_omega - maps.T_sharp) / max(maps.t_omega, 1e-300)])
    out["depth_order"] = VerificationReport(
        "depth_order",
        np.array([0.0]),
        m_d,
        1e-10,
        classify(m_d, 1e-10, eq_tol),
        {"t_omega": maps.t_omega, "T_sharp": maps.T_sharp},
    )

    # the full length range blows up where s was clipped, so test the
    # change of variables on [0, T_sharp] where the integrand is regular
    pp = params.p_prime
    xs = np.linspace(0.0, maps.T_sharp, len(maps.delta))
    gx = np.interp(xs, maps.t, maps.s_eff)
    vol2 = float(np.trapezoid(gx**pp, xs))
    v_at = float(np.interp(maps.T_sharp, maps.t, maps.v))
    m_v = np.array([1e-3 - abs(vol2 - v_at) / float(maps.v[-1])])
    out["volume_identity"] = VerificationReport(
        "volume_identity",
        np.array([0.0]),
        m_v,
        0.0,
        classify(m_v, 0.0, 0.0),
        {"delta_route": v_at, "length_route": vol2, "tolerance": 1e-3},
    )

    if n == 2 and profile.side == Side.FromOuter:
        ref = maps.reference
        lhs = H**2
        rhs = (2.0 * np.pi * ref.R1) ** 2 - 4.0 * np.pi * maps.v
        m_c = 1e-10 - np.abs(lhs - rhs) / scale**2
        out["area_radius_form"] = VerificationReport(
            "area_radius_form",
            maps.delta.copy(),
            m_c,
            0.0,
            classify(m_c, 0.0, 0.0),
            {"tolerance": 1e-10},
        )
    return out


def _pair_values(pair: RadialEigenpair, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = np.clip(r, pair.r[0], pair.r[-1])
    return np.interp(r, pair.r, pair.phi), np.interp(r, pair.r, pair.dphi)


def _outer_quotient(
    profile: ParallelProfile,
    pair: RadialEigenpair,
    params: ProblemParams,
    reference: Ball | ConcentricAnnulus,
) -> tuple[float, float]:
    """Rayleigh quotient of the pulled-back eigenfunction, two routes.

    Route a integrates on the depth grid, route b on the enclosed-volume
    grid; the volume form absorbs one factor of s, so the two trapezoid
    sums weight the same data differently.
    """
    n, p = params.N, params.p
    om = unit_ball_volume(n)
    rad = reference.R1**n - profile.v / om
    np.maximum(rad, 0.0, out=rad)
    r = rad ** (1.0 / n)
    phi, dphi = _pair_values(pair, r)
    area = n * om * np.maximum(r, 1e-12 * reference.R1) ** (n - 1)
    rprime = profile.s / area
    grad_p = np.abs(dphi) ** p * rprime**p

    bnd = 0.0
    if params.robin_k is not None:
        bnd = params.robin_k * profile.boundary_measure * abs(phi[0]) ** p

    num_a = float(np.trapezoid(grad_p * profile.s, profile.delta)) + bnd
    den_a = float(np.trapezoid(np.abs(phi) ** p * profile.s, profile.delta))
    num_b = float(np.trapezoid(grad_p, profile.v)) + bnd
    den_b = float(np.trapezoid(np.abs(phi) ** p, profile.v))
    return num_a / den_a, num_b / den_b


def _inner_quotient(
    profile: ParallelProfile,
    ref_profile: ParallelProfile,
    pair: RadialEigenpair,
    params: ProblemParams,
) -> tuple[float, float, float, float, dict]:
    """FromInner quotients (route a, route b, reference a, reference b).

    The gradient integral in the length variable does not see the domain at
    all; only the weight g^{p'} in the denominator does, plus the volume
    tail past T_sharp where the test function is frozen at its outer value.
    Each route carries a reference computed by the same quadrature on the
    reference's own profile, so a concentric domain cancels bit for bit.
    """
    p = params.p
    pp = params.p_prime
    s_eff, _ = _clip_small(profile.s)
    S_ref, _ = _clip_small(ref_profile.s)
    t = cumulative_trapezoid(s_eff ** (1.0 - pp), profile.delta, initial=0.0)
    T = cumulative_trapezoid(S_ref ** (1.0 - pp), ref_profile.delta, initial=0.0)
    T_sharp = float(T[-1])

    rho = pair.problem.r0 + ref_profile.delta
    phi, dphi = _pair_values(pair, rho)
    psi_prime = dphi * S_ref ** (pp - 1.0)

    bnd = 0.0
    if params.robin_k is not None:
        bnd = params.robin_k * profile.boundary_measure * abs(phi[0]) ** p

    num = float(np.trapezoid(np.abs(psi_prime) ** p, T)) + bnd
    den_ref_a = float(np.trapezoid(np.abs(phi) ** p * S_ref**pp, T))
    den_ref_b = float(np.trapezoid(np.abs(phi) ** p * ref_profile.s, ref_profile.delta))

    # route a: the reference length grid, domain data pulled through t^{-1}
    g_x = np.interp(T, t, s_eff)
    v_at = float(np.interp(T_sharp, t, profile.v))
    tail = max(float(profile.v[-1]) - v_at, 0.0)
    den_a = float(np.trapezoid(np.abs(phi) ** p * g_x**pp, T)) + tail * abs(phi[-1]) ** p

    # route b: the domain depth grid up to t^{-1}(T_sharp)
    delta_c = float(np.interp(T_sharp, t, profile.delta))
    psi_d = np.interp(t, T, phi)
    sel = profile.delta <= delta_c
    xs = profile.delta[sel]
    ys = np.abs(psi_d[sel]) ** p * profile.s[sel]
    den_b = float(np.trapezoid(ys, xs))
    if len(xs) and xs[-1] < delta_c:
        # close the last partial cell
        s_c = float(np.interp(delta_c, profile.delta, profile.s))
        den_b += 0.5 * (delta_c - xs[-1]) * (ys[-1] + abs(phi[-1]) ** p * s_c)
    tail_b = max(float(profile.v[-1]) - float(np.interp(delta_c, profile.delta, profile.v)), 0.0)
    den_b += tail_b * abs(phi[-1]) ** p

    extras = {"tail": tail, "tail_b": tail_b, "T_sharp": T_sharp, "delta_c": delta_c}
    return num / den_a, num / den_b, num / den_ref_a, num / den_ref_b, extras


@dataclass
class TransplantReport:
    side: Side
    quotient: float
    reference: float
    reference_solver: float
    lower_anchor: float | None
    margins: dict
    verdict: str
    grids: dict
    domain: dict
    params: dict
    meta: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return min(self.margins["route_a"], self.margins["route_b"])

    def to_dict(self) -> dict:
        return {
            "side": self.side.value,
            "quotient": self.quotient,
            "reference": self.reference,
            "reference_solver": self.reference_solver,
            "lower_anchor": self.lower_anchor,
            "margins": dict(self.margins),
            "verdict": self.verdict,
            "grids": dict(self.grids),
            "domain": dict(self.domain),
            "params": dict(self.params),
            "meta": dict(self.meta),
        }


def reference_problem(
    reference: Ball | ConcentricAnnulus, params: ProblemParams, side: Side
) -> RadialProblem:
    if params.robin_k is not None:
        fixed = BoundaryCondition.robin(params.robin_k)
    else:
        fixed = BoundaryCondition.dirichlet()
    free = BoundaryCondition.neumann()
    if side == Side.FromOuter:
        r0 = 0.0 if isinstance(reference, Ball) else reference.R0
        return RadialProblem(params, r0, reference.R1, free, fixed)
    return RadialProblem(params, reference.R0, reference.R1, fixed, free)


def verify_rfk(
    domain: Domain | None,
    params: ProblemParams,
    side: Side,
    grid_size: int = 2048,
    profile: ParallelProfile | None = None,
    anchor: float | None = None,
    anchor_rel_tol: float = 5e-3,
    solver_tol: float = 1e-10,
) -> TransplantReport:
    """Certify the reverse comparison for one domain and parameter set.

    The certified statement is quotient <= reference, where quotient is an
    upper bound for the domain eigenvalue and reference approximates the
    concentric annulus eigenvalue by the identical discrete formulas.  An
    anchor, when given, is an independent lower leg for the sandwich
    anchor <= quotient and turns an inconsistent run into Inconclusive
    rather than a false certificate.
    """
    if profile is None:
        if domain is None:
            raise ValueError("need a domain or a precomputed profile")
        profile = parallel_profile_exact(domain, side, grid_size)
    if params.N != profile.N:
        raise ValueError("profile and parameters disagree on the dimension")
    ref = reference_annulus_from_measures(
        profile.boundary_measure, profile.domain_volume, params.N, side
    )
    ref_profile = parallel_profile_exact(ref, side, grid_size=len(profile.delta))
    prob = reference_problem(ref, params, side)
    pair = solve_first_radial(prob, tol=solver_tol)

    if side == Side.FromOuter:
        q_a, q_b = _outer_quotient(profile, pair, params, ref)
        ref_a, ref_b = _outer_quotient(ref_profile, pair, params, ref)
        extras = {}
    else:
        q_a, q_b, ref_a, ref_b, extras = _inner_quotient(profile, ref_profile, pair, params)

    margins = {
        "route_a": ref_a - q_a,
        "route_b": ref_b - q_b,
        "route_gap": abs(q_a - q_b),
        "solver_gap": abs(ref_a - pair.lam),
    }
    eq_tol = 1e-8 * ref_a
    verdict = classify(
        np.array([margins["route_a"], margins["route_b"]]), eq_tol, eq_tol
    )
    if margins["route_gap"] > 1e-3 * ref_a:
        verdict = VERDICT_INCONCLUSIVE
    if anchor is not None:
        margins["anchor"] = min(q_a, q_b) - anchor
        if margins["anchor"] < -anchor_rel_tol * max(anchor, 1e-300):
            verdict = VERDICT_INCONCLUSIVE

    meta = dict(extras)
    meta["profile"] = profile.meta.get("estimator", "exact")
    return TransplantReport(
        side,
        q_a,
        ref_a,
        pair.lam,
        anchor,
        margins,
        verdict,
        {"profile": len(profile.delta), "eigen": len(pair.r)},
        profile.meta.get("domain", describe_domain(domain) if domain else {}),
        {"N": params.N, "p": params.p, "robin_k": params.robin_k},
        meta,
    )

"""Pointwise inequality checks on parallel profiles."""
from __future__ import annotations

import numpy as np

from .params import ProblemParams, Side
from .profiles import ParallelProfile
from .report import VerificationReport, classify, first_strict_index

EQUALITY_TOL = 1e-9


def _stochastic_tol(profile: ParallelProfile, scale: float) -> np.ndarray | None:
    sig = profile.meta.get("sigma_s")
    if sig is None:
        return None
    return 3.0 * np.asarray(sig) / scale


def check_nagy(profile: ParallelProfile, params: ProblemParams) -> VerificationReport:
    """s(δ) ≤ |Γ₀| − 2πδ inward, s(δ) ≤ |Γ₁| + 2πδ outward.

    For spherical boundaries in any dimension the right-hand side is the full
    parallel sphere S(δ); in the plane the two agree.  Margins are normalized
    by the boundary measure.  Stochastic profiles get a 3-standard-error
    allowance per point.
    """
    if params.N != profile.N:
        raise ValueError("profile and parameters disagree on the dimension")
    scale = max(profile.boundary_measure, 1e-300)
    margins = (profile.S - profile.s) / scale
    tols = _stochastic_tol(profile, scale)
    base_tol = float(profile.meta.get("tolerance", 1e-9))
    point_tol = tols if tols is not None else np.full(len(margins), base_tol)
    verdict = classify(margins, base_tol, EQUALITY_TOL, point_tolerances=point_tol)
    meta = {
        "side": profile.side.value,
        "estimator": profile.meta.get("estimator"),
        "domain": profile.meta.get("domain"),
        "grid_size": len(profile.delta),
        "stochastic": tols is not None,
        "delta0": first_strict_index(margins, EQUALITY_TOL),
    }
    return VerificationReport(
        "nagy", profile.delta, margins, float(np.max(point_tol)), verdict, meta
    )


def check_isoperimetric(profile: ParallelProfile, params: ProblemParams) -> VerificationReport:
    """s(δ)^{N'} ≤ |Γ₀|^{N'} − C(N)·v(δ) on the grid, margins normalized by
    |Γ₀|^{N'}; flags the first δ after which the inequality is strict."""
    if profile.side != Side.FromOuter:
        raise ValueError("isoperimetric form applies to outer-parallel profiles")
    if params.N != profile.N:
        raise ValueError("profile and parameters disagree on the dimension")
    np_exp = params.n_prime
    C = params.iso_constant
    scale = profile.boundary_measure**np_exp
    margins = (scale - C * profile.v - profile.s**np_exp) / scale
    sig = profile.meta.get("sigma_s")
    if sig is not None:
        # first-order error propagation through s^{N'} plus the v term
        sv = np.asarray(profile.meta.get("sigma_v", np.zeros_like(margins)))
        prop = np_exp * np.maximum(profile.s, 0.0) ** (np_exp - 1.0) * np.asarray(sig) + C * sv
        point_tol = 3.0 * prop / scale
    else:
        point_tol = np.full(len(margins), float(profile.meta.get("tolerance", 1e-10)))
    verdict = classify(margins, float(np.max(point_tol)), EQUALITY_TOL, point_tolerances=point_tol)
    delta0 = first_strict_index(margins, EQUALITY_TOL)
    meta = {
        "side": profile.side.value,
        "estimator": profile.meta.get("estimator"),
        "domain": profile.meta.get("domain"),
        "grid_size": len(profile.delta),
        "N_prime": np_exp,
        "iso_constant": C,
        "delta0": delta0,
        "delta0_value": None if delta0 is None else float(profile.delta[delta0]),
    }
    return VerificationReport(
        "isoperimetric", profile.delta, margins, float(np.max(point_tol)), verdict, meta
    )

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rfkcert import (
    BoundaryCondition,
    ProblemParams,
    RadialProblem,
    rayleigh_radial,
    solve_first_radial,
    solve_second_radial,
)
from rfkcert.radial import BracketingError, shoot

D = BoundaryCondition.dirichlet
Nm = BoundaryCondition.neumann
Rb = BoundaryCondition.robin

# first positive roots of J0, J0', and the cross products on [1, 2]
J0_ZERO = 2.404825557695773
J0P_ZERO = 3.8317059702075125
DD_ANNULUS_12 = 3.123030919736778  # J0(k)Y0(2k) = J0(2k)Y0(k)


def pi_p(p: float) -> float:
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_interval_closed_form(p):
    """First Dirichlet eigenvalue of the 1D p-Laplacian on a unit interval."""
    prob = RadialProblem(ProblemParams(1, p), 1.0, 2.0, D(), D())
    want = (p - 1.0) * pi_p(p) ** p
    assert solve_first_radial(prob).lam == pytest.approx(want, rel=1e-8)


def test_disk_and_ball_p2():
    disk = RadialProblem(ProblemParams(2, 2.0), 0.0, 1.0, Nm(), D())
    assert solve_first_radial(disk).lam == pytest.approx(J0_ZERO**2, rel=1e-9)
    ball = RadialProblem(ProblemParams(3, 2.0), 0.0, 1.0, Nm(), D())
    assert solve_first_radial(ball).lam == pytest.approx(math.pi**2, rel=1e-9)


def test_annulus_dirichlet_p2():
    prob = RadialProblem(ProblemParams(2, 2.0), 1.0, 2.0, D(), D())
    assert solve_first_radial(prob).lam == pytest.approx(DD_ANNULUS_12**2, rel=1e-9)


def test_interval_scaling_law():
    # lam(c * domain) = lam(domain) / c^p
    par = ProblemParams(3, 2.5)
    base = solve_first_radial(RadialProblem(par, 0.5, 1.5, Nm(), D())).lam
    scaled = solve_first_radial(RadialProblem(par, 1.0, 3.0, Nm(), D())).lam
    assert scaled == pytest.approx(base / 2.0**2.5, rel=1e-8)


def test_dirichlet_at_origin_rejected():
    with pytest.raises(ValueError):
        RadialProblem(ProblemParams(2, 2.0), 0.0, 1.0, D(), D())


def test_robin_bridges_neumann_and_dirichlet():
    par = lambda k: ProblemParams(2, 2.0, robin_k=k)
    lam_d = solve_first_radial(RadialProblem(ProblemParams(2, 2.0), 1.0, 2.0, Nm(), D())).lam
    prev = 0.0
    for k in (0.01, 1.0, 100.0):
        lam_k = solve_first_radial(RadialProblem(par(k), 1.0, 2.0, Nm(), Rb(k))).lam
        assert prev < lam_k < lam_d
        prev = lam_k
    lam_inf = solve_first_radial(RadialProblem(par(1e8), 1.0, 2.0, Nm(), Rb(1e8))).lam
    assert lam_inf == pytest.approx(lam_d, rel=1e-6)


def test_robin_small_k_vanishes():
    # lam ~ k |Γ_R| / |Ω| as k -> 0; stay above the bracket scan floor
    k = 1e-3
    lam = solve_first_radial(RadialProblem(ProblemParams(2, 2.0, robin_k=k), 1.0, 2.0, Nm(), Rb(k))).lam
    assert lam == pytest.approx(k * 4.0 / 3.0, rel=0.05)


def test_second_mode_structure():
    prob = RadialProblem(ProblemParams(2, 2.0), 0.0, 1.0, Nm(), Nm(), mode="second")
    pair = solve_second_radial(prob)
    assert pair.lam == pytest.approx(J0P_ZERO**2, rel=1e-9)
    assert pair.zero_count == 1
    assert 0.0 < pair.r_star < 1.0
    # the profile changes sign exactly once, at r_star
    sign_changes = np.sum(np.diff(np.sign(pair.phi[np.abs(pair.phi) > 1e-12])) != 0)
    assert sign_changes == 1


def test_second_exceeds_first():
    par = ProblemParams(3, 2.5)
    prob1 = RadialProblem(par, 1.0, 2.0, D(), D())
    prob2 = RadialProblem(par, 1.0, 2.0, D(), D(), mode="second")
    lam1 = solve_first_radial(prob1).lam
    lam2 = solve_second_radial(prob2).lam
    assert lam2 > lam1 * 1.5


def test_rayleigh_consistency():
    prob = RadialProblem(ProblemParams(2, 3.0), 1.0, 2.0, D(), Nm())
    pair = solve_first_radial(prob)
    assert rayleigh_radial(pair) == pytest.approx(pair.lam, rel=1e-6)


def test_first_mode_positive_profile():
    prob = RadialProblem(ProblemParams(3, 1.5), 0.5, 2.0, Nm(), D())
    pair = solve_first_radial(prob)
    interior = pair.phi[:-1]
    assert np.all(interior > 0) or np.all(interior < 0)
    assert pair.zero_count == 0


def test_bracketing_failure_reported():
    prob = RadialProblem(ProblemParams(2, 2.0), 1.0, 2.0, D(), D())
    with pytest.raises(BracketingError):
        solve_first_radial(prob, lam_max=1.0)


def test_shoot_endpoint_sign():
    """The shooting residual changes sign across the first eigenvalue."""
    prob = RadialProblem(ProblemParams(2, 2.0), 1.0, 2.0, D(), D())
    lam = DD_ANNULUS_12**2
    lo = shoot(prob, 0.8 * lam)
    hi = shoot(prob, 1.2 * lam)
    assert np.sign(lo.residual) != np.sign(hi.residual)


@settings(max_examples=10, deadline=None)
@given(
    r0=st.floats(0.3, 1.0),
    width=st.floats(0.5, 2.0),
    p=st.floats(1.4, 3.5),
    N=st.integers(2, 3),
    c=st.floats(1.2, 2.5),
)
def test_scaling_property(r0, width, p, N, c):
    par = ProblemParams(N, p)
    lam = solve_first_radial(RadialProblem(par, r0, r0 + width, Nm(), D())).lam
    lam_c = solve_first_radial(RadialProblem(par, c * r0, c * (r0 + width), Nm(), D())).lam
    assert lam_c == pytest.approx(lam / c**p, rel=1e-7)


@settings(max_examples=10, deadline=None)
@given(
    r0=st.floats(0.3, 1.0),
    width=st.floats(0.5, 1.5),
    extra=st.floats(0.2, 1.0),
    p=st.floats(1.4, 3.5),
)
def test_domain_monotonicity_property(r0, width, extra, p):
    """Dirichlet eigenvalues shrink when the domain grows."""
    par = ProblemParams(2, p)
    lam = solve_first_radial(RadialProblem(par, r0, r0 + width, D(), D())).lam
    lam_big = solve_first_radial(RadialProblem(par, r0, r0 + width + extra, D(), D())).lam
    assert lam_big < lam

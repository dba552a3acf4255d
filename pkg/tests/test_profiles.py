import numpy as np
import pytest

from rfkcert import (
    Ball,
    ConcentricAnnulus,
    EccentricAnnulus,
    Side,
    parallel_profile_exact,
    parallel_profile_mc,
)
from rfkcert.domains import measures
from rfkcert.params import ball_volume
from rfkcert.profiles import cap_area, exhaustion_depth


def test_ball_profile_closed_form():
    prof = parallel_profile_exact(Ball(1.0, N=2), Side.FromOuter, grid_size=256)
    d = prof.delta
    r = np.clip(1.0 - d, 0.0, None)
    assert np.max(np.abs(prof.s - 2.0 * np.pi * r)) == 0.0
    assert np.max(np.abs(prof.v - np.pi * (1.0 - r**2))) == 0.0
    # the ball is its own reference
    assert np.array_equal(prof.S, prof.s)
    assert np.array_equal(prof.V, prof.v)
    assert prof.delta_omega == 1.0


def test_concentric_profile_is_its_own_reference():
    dom = ConcentricAnnulus(1.0, 2.0, N=3)
    for side in Side:
        prof = parallel_profile_exact(dom, side, grid_size=256)
        assert np.array_equal(prof.s, prof.S)
        assert np.array_equal(prof.v, prof.V)
        assert prof.delta_omega == pytest.approx(1.0, abs=0.0)


def test_zero_offset_matches_concentric_bitwise():
    conc = parallel_profile_exact(ConcentricAnnulus(1.0, 2.0, N=3), Side.FromInner, grid_size=256)
    ecc = parallel_profile_exact(EccentricAnnulus(1.0, 2.0, 0.0, N=3), Side.FromInner, grid_size=256)
    for f in ("delta", "s", "v", "S", "V"):
        assert np.array_equal(getattr(ecc, f), getattr(conc, f)), f


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("N", [2, 3])
def test_eccentric_profile_exhausts_volume(side, N):
    dom = EccentricAnnulus(0.5, 2.0, 0.7, N=N)
    prof = parallel_profile_exact(dom, side, grid_size=1024)
    vol = measures(dom).volume
    # trapezoid accumulation over the grid, so only O(grid^-2) here
    assert prof.v[-1] == pytest.approx(vol, rel=1e-5)
    # V tracks the full parallel sphere of the reference, not the domain
    d = prof.delta
    if side is Side.FromOuter:
        V_true = ball_volume(N, dom.R1) - ball_volume(N, np.clip(dom.R1 - d[-1], 0.0, None))
    else:
        V_true = ball_volume(N, dom.R0 + d[-1]) - ball_volume(N, dom.R0)
    assert prof.V[-1] == pytest.approx(V_true, rel=1e-5)
    assert np.all(np.diff(prof.v) >= 0)
    assert np.all(np.diff(prof.V) >= 0)
    assert np.all(prof.s >= 0)
    assert prof.delta_omega == pytest.approx(exhaustion_depth(dom, side), rel=1e-14)


def test_profile_grid_shape():
    prof = parallel_profile_exact(EccentricAnnulus(1.0, 2.0, 0.3, N=2), Side.FromOuter, grid_size=333)
    assert len(prof.delta) == 333
    assert prof.delta[0] == 0.0
    with pytest.raises(ValueError):
        parallel_profile_exact(EccentricAnnulus(1.0, 2.0, 0.3, N=2), Side.FromOuter, grid_size=1)


def test_cap_area_limits():
    # polar cap of the full sphere and the whole sphere
    assert cap_area(2, 1.0, np.pi) == pytest.approx(2.0 * np.pi, rel=1e-12)
    assert cap_area(3, 1.0, np.pi) == pytest.approx(4.0 * np.pi, rel=1e-12)
    assert cap_area(3, 1.0, np.pi / 2) == pytest.approx(2.0 * np.pi, rel=1e-12)
    assert cap_area(2, 2.0, 0.0) == 0.0


def test_mc_profile_agrees_with_exact():
    dom = EccentricAnnulus(1.0, 2.0, 0.5, N=2)
    exact = parallel_profile_exact(dom, Side.FromOuter, grid_size=256)
    mc = parallel_profile_mc(dom, Side.FromOuter, grid_size=256, samples=100000, seed=1)
    vol = exact.domain_volume
    assert np.max(np.abs(mc.v - exact.v)) / vol < 0.01
    # the shell estimator for s is noisier than the volume one
    assert np.max(np.abs(mc.s - exact.s)) / exact.boundary_measure < 0.15
    assert mc.meta["estimator"] == "mc"
    assert "sigma_v" in mc.meta


def test_mc_profile_seed_reproducible():
    dom = EccentricAnnulus(1.0, 2.0, 0.5, N=3)
    a = parallel_profile_mc(dom, Side.FromInner, grid_size=128, samples=20000, seed=7)
    b = parallel_profile_mc(dom, Side.FromInner, grid_size=128, samples=20000, seed=7)
    c = parallel_profile_mc(dom, Side.FromInner, grid_size=128, samples=20000, seed=8)
    assert np.array_equal(a.v, b.v)
    assert not np.array_equal(a.v, c.v)

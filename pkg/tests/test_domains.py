import math

import pytest

from rfkcert import Ball, ConcentricAnnulus, EccentricAnnulus, PolygonWithHoles, Side
from rfkcert.domains import (
    InfeasibleReferenceError,
    loop_area,
    loop_length,
    measures,
    points_in_loop,
    reference_annulus,
    reference_annulus_from_measures,
)
from rfkcert.polygon import unit_square

import numpy as np


def test_ball_measures():
    m = measures(Ball(2.0, N=3))
    assert m.volume == pytest.approx(4.0 / 3.0 * math.pi * 8.0, rel=1e-14)
    assert m.outer_measure == pytest.approx(16.0 * math.pi, rel=1e-14)
    assert m.inner_measure == 0.0


def test_annulus_measures():
    m = measures(ConcentricAnnulus(1.0, 2.0, N=2))
    assert m.volume == pytest.approx(3.0 * math.pi, rel=1e-14)
    assert m.outer_measure == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert m.gamma1_measure == pytest.approx(2.0 * math.pi, rel=1e-14)


def test_translation_leaves_measures_alone():
    mc = measures(ConcentricAnnulus(0.5, 2.0, N=3))
    me = measures(EccentricAnnulus(0.5, 2.0, 0.75, N=3))
    assert me == mc


def test_invalid_annuli():
    with pytest.raises(ValueError):
        ConcentricAnnulus(2.0, 1.0)
    with pytest.raises(ValueError):
        ConcentricAnnulus(0.0, 1.0)
    # hole must stay strictly inside: e + R0 < R1
    with pytest.raises(ValueError):
        EccentricAnnulus(0.5, 2.0, 1.5)
    with pytest.raises(ValueError):
        EccentricAnnulus(0.5, 2.0, -0.1)
    EccentricAnnulus(0.5, 2.0, 1.4999)


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("N", [2, 3])
def test_reference_annulus_roundtrip(side, N):
    """An annulus is its own reference: same pinned boundary, same volume."""
    dom = ConcentricAnnulus(0.7, 1.9, N=N)
    m = measures(dom)
    bm = m.outer_measure if side is Side.FromOuter else m.gamma1_measure
    ref = reference_annulus_from_measures(bm, m.volume, N, side)
    assert isinstance(ref, ConcentricAnnulus)
    assert ref.R0 == pytest.approx(dom.R0, rel=1e-12)
    assert ref.R1 == pytest.approx(dom.R1, rel=1e-12)


def test_reference_preserves_measures_for_eccentric():
    dom = EccentricAnnulus(0.5, 2.0, 0.5, N=3)
    md = measures(dom)
    for side in Side:
        ref = reference_annulus(dom, side)
        mr = measures(ref)
        assert mr.volume == pytest.approx(md.volume, rel=1e-12)
        if side is Side.FromOuter:
            assert mr.outer_measure == pytest.approx(md.outer_measure, rel=1e-12)
        else:
            assert mr.gamma1_measure == pytest.approx(md.gamma1_measure, rel=1e-12)


def test_reference_degenerates_to_ball():
    # ball's own measures admit no annulus: the hole radius collapses to zero
    mb = measures(Ball(1.0, N=2))
    ref = reference_annulus_from_measures(mb.outer_measure, mb.volume, 2, Side.FromOuter)
    assert isinstance(ref, Ball)
    assert ref.R1 == pytest.approx(1.0, rel=1e-12)


def test_reference_infeasible():
    with pytest.raises(InfeasibleReferenceError):
        # more volume than the ball with that outer measure can hold
        reference_annulus_from_measures(2.0 * math.pi, 2.0 * math.pi, 2, Side.FromOuter)
    with pytest.raises(InfeasibleReferenceError):
        reference_annulus(Ball(1.0, N=2), Side.FromInner)


def test_polygon_measures():
    m = measures(unit_square())
    assert m.volume == pytest.approx(1.0, rel=1e-12)
    assert m.outer_measure == pytest.approx(4.0, rel=1e-12)
    assert m.inner_measure == 0.0


def test_polygon_hole_bookkeeping():
    sq = unit_square().outer
    m = measures(PolygonWithHoles(sq, (0.25 + 0.5 * sq,)))
    assert m.volume == pytest.approx(0.75, rel=1e-12)
    assert m.gamma1_measure == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(ValueError):
        PolygonWithHoles(sq, (sq + 5.0,))


def test_loop_helpers():
    sq = unit_square().outer
    assert loop_area(sq) == pytest.approx(1.0, rel=1e-14)
    assert loop_length(sq) == pytest.approx(4.0, rel=1e-14)
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [-0.2, 0.1]])
    assert points_in_loop(pts, sq).tolist() == [True, False, False]

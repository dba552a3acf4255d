import numpy as np
import pytest

from rfkcert import (
    ConcentricAnnulus,
    EccentricAnnulus,
    ProblemParams,
    Side,
    check_isoperimetric,
    check_nagy,
    parallel_profile_exact,
)
from rfkcert.report import (
    VERDICT_EQUALITY,
    VERDICT_HOLDS,
    VERDICT_INCONCLUSIVE,
    VERDICT_VIOLATED,
    VerificationReport,
    classify,
    first_strict_index,
)


def test_classify():
    assert classify(np.array([1.0, 2.0]), 1e-9, 1e-12) == VERDICT_HOLDS
    assert classify(np.array([0.0, 1e-13]), 1e-9, 1e-12) == VERDICT_EQUALITY
    assert classify(np.array([0.0, -1e-3]), 1e-9, 1e-12) == VERDICT_VIOLATED
    assert classify(np.array([1e-13, 1.0, -1e-3]), 1e-9, 1e-12) == VERDICT_VIOLATED
    # per-point allowances widen the violation band pointwise
    assert classify(np.array([-0.5, 1.0]), 1e-9, 1e-12,
                    point_tolerances=np.array([1.0, 1e-9])) == VERDICT_HOLDS


def test_first_strict_index():
    # index where the terminal strictly-positive run begins
    m = np.array([0.0, 1e-12, 0.5, 1.0])
    assert first_strict_index(m, 1e-9) == 2
    assert first_strict_index(np.array([1.0, 0.0, 2.0]), 1e-9) == 2
    assert first_strict_index(np.zeros(3), 1e-9) is None


def test_report_serialization_roundtrip():
    rep = VerificationReport(
        check="demo",
        points=np.array([0.0, 0.5]),
        margins=np.array([0.0, 0.25]),
        tolerance=1e-9,
        verdict=VERDICT_HOLDS,
        meta={"grid": 2},
    )
    d = rep.to_dict()
    assert d["check"] == "demo"
    assert d["worst_margin"] == 0.0
    assert d["verdict"] == VERDICT_HOLDS
    assert rep.worst_margin == 0.0


@pytest.mark.parametrize("side", list(Side))
def test_nagy_equality_on_concentric(side):
    prof = parallel_profile_exact(ConcentricAnnulus(1.0, 2.0, N=2), side, grid_size=512)
    rep = check_nagy(prof, ProblemParams(2, 2.0))
    assert rep.verdict == VERDICT_EQUALITY
    assert np.max(np.abs(rep.margins)) <= rep.tolerance


@pytest.mark.parametrize("side", list(Side))
def test_nagy_strict_on_eccentric(side):
    prof = parallel_profile_exact(EccentricAnnulus(1.0, 2.0, 0.5, N=2), side, grid_size=512)
    rep = check_nagy(prof, ProblemParams(2, 2.0))
    assert rep.verdict == VERDICT_HOLDS
    assert np.min(rep.margins) >= -rep.tolerance
    assert np.max(rep.margins) > 0


def test_isoperimetric_equality_iff_concentric():
    conc = parallel_profile_exact(ConcentricAnnulus(1.0, 2.0, N=3), Side.FromOuter, grid_size=512)
    rep = check_isoperimetric(conc, ProblemParams(3, 2.0))
    assert rep.verdict == VERDICT_EQUALITY

    ecc = parallel_profile_exact(EccentricAnnulus(1.0, 2.0, 0.4, N=3), Side.FromOuter, grid_size=512)
    rep = check_isoperimetric(ecc, ProblemParams(3, 2.0))
    assert rep.verdict == VERDICT_HOLDS
    assert np.min(rep.margins) >= -1e-10


def test_isoperimetric_rejects_inner_profiles():
    prof = parallel_profile_exact(ConcentricAnnulus(1.0, 2.0, N=2), Side.FromInner, grid_size=128)
    with pytest.raises(ValueError):
        check_isoperimetric(prof, ProblemParams(2, 2.0))


def test_dimension_mismatch_rejected():
    prof = parallel_profile_exact(ConcentricAnnulus(1.0, 2.0, N=2), Side.FromOuter, grid_size=128)
    with pytest.raises(ValueError):
        check_nagy(prof, ProblemParams(3, 2.0))

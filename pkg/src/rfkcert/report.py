"""Pass/fail records for inequality checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VERDICT_HOLDS = "Holds"
VERDICT_EQUALITY = "HoldsWithEquality"
VERDICT_VIOLATED = "Violated"
VERDICT_INCONCLUSIVE = "Inconclusive"


@dataclass
class VerificationReport:
    """Outcome of a pointwise inequality check.

    margins are signed slacks (negative = violation) on a dimensionless scale;
    tolerance is the violation threshold on the same scale.  verdict is
    Violated iff the worst margin is below -tolerance.
    """

    check: str
    points: np.ndarray
    margins: np.ndarray
    tolerance: float
    verdict: str
    meta: dict = field(default_factory=dict)

    @property
    def worst_margin(self) -> float:
        return float(np.min(self.margins)) if len(self.margins) else 0.0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "meta": self.meta,
        }


def classify(
    margins: np.ndarray,
    tolerance: float,
    equality_tol: float,
    point_tolerances: np.ndarray | None = None,
) -> str:
    """Map pointwise margins to a verdict.

    A point violates when its margin is below -tolerance (or its own
    per-point allowance when given).  If nothing violates and every margin
    stays within the equality band the check is an equality case.
    """
    m = np.asarray(margins, dtype=float)
    tol = point_tolerances if point_tolerances is not None else tolerance
    if np.any(m < -np.asarray(tol)):
        return VERDICT_VIOLATED
    if np.all(np.abs(m) <= equality_tol):
        return VERDICT_EQUALITY
    return VERDICT_HOLDS


def first_strict_index(margins: np.ndarray, equality_tol: float) -> int | None:
    """Start of the terminal run where the margin stays strictly positive.

    Returns None when no such terminal run exists (equality through the end).
    """
    m = np.asarray(margins, dtype=float)
    if len(m) == 0 or m[-1] <= equality_tol:
        return None
    i = len(m) - 1
    while i > 0 and m[i - 1] > equality_tol:
        i -= 1
    return i

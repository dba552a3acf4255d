"""Domain specifications, boundary/volume measures, and reference annuli."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import Side, ball_volume, sphere_measure, unit_ball_volume


class InfeasibleReferenceError(ValueError):
    """No concentric annulus matches the requested boundary measure and volume."""


@dataclass(frozen=True)
class Ball:
    R1: float
    N: int = 2

    def __post_init__(self) -> None:
        if not self.R1 > 0:
            raise ValueError(f"ball radius must be positive, got {self.R1}")
        if self.N < 1:
            raise ValueError(f"bad dimension {self.N}")


@dataclass(frozen=True)
class ConcentricAnnulus:
    R0: float
    R1: float
    N: int = 2

    def __post_init__(self) -> None:
        if not (0 < self.R0 < self.R1):
            raise ValueError(f"need 0 < R0 < R1, got R0={self.R0}, R1={self.R1}")
        if self.N < 1:
            raise ValueError(f"bad dimension {self.N}")


@dataclass(frozen=True)
class EccentricAnnulus:
    """Ball of radius R1 about the origin minus a ball of radius R0 centered
    at distance e from the origin along the first axis."""

    R0: float
    R1: float
    e: float
    N: int = 2

    def __post_init__(self) -> None:
        if not (0 < self.R0 < self.R1):
            raise ValueError(f"need 0 < R0 < R1, got R0={self.R0}, R1={self.R1}")
        if self.e < 0:
            raise ValueError(f"offset must be nonnegative, got {self.e}")
        if not self.e + self.R0 < self.R1:
            raise ValueError(
                f"hole not strictly inside: e + R0 = {self.e + self.R0} >= R1 = {self.R1}"
            )
        if self.N < 1:
            raise ValueError(f"bad dimension {self.N}")


def _loop_array(loop) -> np.ndarray:
    a = np.asarray(loop, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 3:
        raise ValueError("polygon loop must be an (n, 2) array with n >= 3")
    return a


def loop_length(loop: np.ndarray) -> float:
    d = np.diff(np.vstack([loop, loop[:1]]), axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def loop_area(loop: np.ndarray) -> float:
    """Unsigned shoelace area of a closed loop."""
    x, y = loop[:, 0], loop[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return abs(float(np.dot(x, yn) - np.dot(xn, y))) / 2.0


def points_in_loop(pts: np.ndarray, loop: np.ndarray) -> np.ndarray:
    """Even-odd crossing test, vectorized over pts (m, 2)."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(loop)
    for i in range(n):
        x0, y0 = loop[i]
        x1, y1 = loop[(i + 1) % n]
        crosses = (y0 > y) != (y1 > y)
        if not crosses.any():
            continue
        # x-coordinate where the edge crosses the horizontal ray
        xc = x0 + (y[crosses] - y0) * (x1 - x0) / (y1 - y0)
        hit = np.zeros(len(pts), dtype=bool)
        hit[crosses] = xc > x[crosses]
        inside ^= hit
    return inside


@dataclass(frozen=True)
class PolygonWithHoles:
    """Planar polygon with polygonal holes; first hole is the designated Γ₁."""

    outer: np.ndarray
    holes: tuple = ()
    N: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "outer", _loop_array(self.outer))
        object.__setattr__(self, "holes", tuple(_loop_array(h) for h in self.holes))
        if self.N != 2:
            raise ValueError("polygon domains are planar only")
        for h in self.holes:
            if not points_in_loop(h, self.outer).all():
                raise ValueError("hole loop not strictly inside the outer loop")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolygonWithHoles):
            return NotImplemented
        return (
            np.array_equal(self.outer, other.outer)
            and len(self.holes) == len(other.holes)
            and all(np.array_equal(a, b) for a, b in zip(self.holes, other.holes))
        )

    def __hash__(self) -> int:
        return hash((self.outer.tobytes(), tuple(h.tobytes() for h in self.holes)))


Domain = Ball | ConcentricAnnulus | EccentricAnnulus | PolygonWithHoles


@dataclass(frozen=True)
class Measures:
    volume: float
    outer_measure: float
    inner_measure: float  # total over all holes
    gamma1_measure: float  # designated hole only


def measures(domain: Domain) -> Measures:
    """Volume and boundary measures; closed forms for spherical variants,
    shoelace/edge sums for polygons."""
    N = domain.N
    if isinstance(domain, Ball):
        return Measures(ball_volume(N, domain.R1), sphere_measure(N, domain.R1), 0.0, 0.0)
    if isinstance(domain, (ConcentricAnnulus, EccentricAnnulus)):
        hole = sphere_measure(N, domain.R0)
        return Measures(
            ball_volume(N, domain.R1) - ball_volume(N, domain.R0),
            sphere_measure(N, domain.R1),
            hole,
            hole,
        )
    if isinstance(domain, PolygonWithHoles):
        vol = loop_area(domain.outer) - sum(loop_area(h) for h in domain.holes)
        if vol <= 0:
            raise ValueError("polygon has nonpositive area after removing holes")
        inner = sum(loop_length(h) for h in domain.holes)
        g1 = loop_length(domain.holes[0]) if domain.holes else 0.0
        return Measures(vol, loop_length(domain.outer), inner, g1)
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def reference_annulus_from_measures(
    boundary_measure: float, volume: float, N: int, side: Side
) -> ConcentricAnnulus | Ball:
    """Concentric annulus with the given volume and the given outer (FromOuter)
    or inner (FromInner) boundary measure.

    Radii solve N*omega_N*R^{N-1} = boundary measure together with
    omega_N*(R1^N - R0^N) = volume.
    """
    if N < 2:
        raise InfeasibleReferenceError("reference annuli are defined for N >= 2")
    if boundary_measure <= 0 or volume <= 0:
        raise InfeasibleReferenceError(
            f"need positive measure and volume, got |Γ|={boundary_measure}, |Ω|={volume}"
        )
    om = unit_ball_volume(N)
    R = (boundary_measure / (N * om)) ** (1.0 / (N - 1))
    if side == Side.FromOuter:
        inner_pow = R**N - volume / om
        if inner_pow < -1e-12 * R**N:
            raise InfeasibleReferenceError(
                f"volume {volume} exceeds the ball of outer measure {boundary_measure}"
            )
        if inner_pow <= 1e-12 * R**N:
            return Ball(R1=R, N=N)
        return ConcentricAnnulus(R0=inner_pow ** (1.0 / N), R1=R, N=N)
    return ConcentricAnnulus(R0=R, R1=(R**N + volume / om) ** (1.0 / N), N=N)


def reference_annulus(domain: Domain, side: Side) -> ConcentricAnnulus | Ball:
    """Ω# (side=FromOuter) or Ω_# (side=FromInner) for the given domain."""
    m = measures(domain)
    if side == Side.FromInner and m.gamma1_measure <= 0:
        raise InfeasibleReferenceError("domain has no inner boundary to match")
    bd = m.outer_measure if side == Side.FromOuter else m.gamma1_measure
    return reference_annulus_from_measures(bd, m.volume, domain.N, side)

"""Problem parameters and dimension-dependent constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Side(str, Enum):
    """Which boundary the parallel sets are measured from."""

    FromOuter = "FromOuter"
    FromInner = "FromInner"


def unit_ball_volume(N: int) -> float:
    """Volume of the unit ball in dimension N (omega_N)."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def sphere_measure(N: int, r: float) -> float:
    """Surface measure of the sphere of radius r: N * omega_N * r^(N-1)."""
    return N * unit_ball_volume(N) * r ** (N - 1)


def ball_volume(N: int, r: float) -> float:
    return unit_ball_volume(N) * r**N


@dataclass(frozen=True)
class ProblemParams:
    """Exponent p in (1, inf) and spatial dimension N.

    Derived quantities: the Hölder conjugate p' = p/(p-1), the dimension
    conjugate N' = N/(N-1) (N >= 2), and the isoperimetric constant
    C(N) = N^{N'} * omega_N^{N'-1}.  In the plane C(2) = 4*pi, which is the
    constant appearing in the planar length-area inequality.
    """

    N: int
    p: float
    robin_k: float | None = None

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError(f"dimension must be >= 1, got {self.N}")
        if not (self.p > 1.0):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        if self.robin_k is not None and not (self.robin_k > 0.0):
            raise ValueError(f"Robin constant must be positive, got {self.robin_k}")

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def n_prime(self) -> float:
        if self.N < 2:
            raise ValueError("N' is defined for N >= 2 only")
        return self.N / (self.N - 1.0)

    @property
    def omega_N(self) -> float:
        return unit_ball_volume(self.N)

    @property
    def iso_constant(self) -> float:
        """C(N) = N^{N'} * omega_N^{N'-1}; satisfies C(N)*omega_N = (N*omega_N)^{N'}."""
        return self.N ** self.n_prime * self.omega_N ** (self.n_prime - 1.0)

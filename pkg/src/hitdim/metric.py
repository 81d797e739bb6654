"""Point spaces, metrics, dyadic schedules and scaling-exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

import numpy as np

FIXED_BITS = 64
ONE = 1 << FIXED_BITS
MASK = ONE - 1


class InsufficientDataError(ValueError):
    """Raised when a scaling fit has fewer than four usable samples."""

    def __init__(self, message: str, n_censored: int = 0):
        super().__init__(message)
        self.n_censored = n_censored


def to_fixed(x) -> int:
    """Fixed-point numerator (over 2**64) of ``x`` reduced modulo 1."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x) * ONE & MASK
    q = Fraction(x)
    return (q.numerator * ONE // q.denominator) & MASK


def fixed_to_fraction(n: int) -> Fraction:
    return Fraction(int(n), ONE)


def fixed_to_float(n: int) -> float:
    return int(n) / ONE


def is_dyadic(q: Fraction) -> bool:
    """True when ``q`` is exactly representable as a 64-bit fixed-point value."""
    den = Fraction(q).denominator
    return den & (den - 1) == 0 and den <= ONE


def radius_threshold(r) -> int:
    """Integer threshold ``t`` with ``dist < r`` iff ``dist_fixed < t``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    q = Fraction(r)
    t = -((-q.numerator * ONE) // q.denominator)
    return min(t, MASK)


@dataclass(frozen=True)
class SpacePoint:
    """A point of the circle/interval (one coordinate) or 2-torus (two).

    Coordinates are fixed-point numerators over 2**64.  ``stream`` carries the
    ``(seed, offset)`` of the lazily generated digits that continue a point of
    the symbolic doubling map; other systems leave it ``None``.
    """

    coords: tuple[int, ...]
    stream: tuple[int, int] | None = None

    def __post_init__(self):
        if len(self.coords) not in (1, 2):
            raise ValueError("points have one or two coordinates")
        object.__setattr__(self, "coords", tuple(int(c) & MASK for c in self.coords))

    @classmethod
    def of(cls, *values, stream: tuple[int, int] | None = None) -> "SpacePoint":
        return cls(tuple(to_fixed(v) for v in values), stream)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(fixed_to_fraction(c) for c in self.coords)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(fixed_to_float(c) for c in self.coords)


def circle_distance(a, b):
    """Arc distance on R/Z; works for floats, Fractions and ints."""
    t = abs(a - b) % 1
    return min(t, 1 - t)


def interval_distance(a, b):
    return abs(a - b)


def torus_distance(a: Sequence, b: Sequence):
    """Sup metric on the 2-torus, so balls are squares."""
    return max(circle_distance(a[0], b[0]), circle_distance(a[1], b[1]))


@dataclass(frozen=True)
class DyadicSchedule:
    k_min: int
    k_max: int

    def __post_init__(self):
        if self.k_min < 1:
            raise ValueError("k_min must be >= 1")
        if self.k_max - self.k_min < 3:
            raise ValueError("a schedule needs at least four scales")

    @property
    def ks(self) -> list[int]:
        return list(range(self.k_min, self.k_max + 1))

    @property
    def radii(self) -> list[Fraction]:
        return [Fraction(1, 1 << k) for k in self.ks]

    def thresholds(self) -> np.ndarray:
        return np.array([1 << (FIXED_BITS - k) for k in self.ks], dtype=np.uint64)

    def __len__(self):
        return self.k_max - self.k_min + 1


@dataclass(frozen=True)
class ScalingEstimate:
    slope_ols: float
    slope_tail_min: float
    slope_tail_max: float
    tail_fraction: float
    n_points_used: int
    n_censored: int


def _usable(v) -> bool:
    return v is not None and isinstance(v, Real) and math.isfinite(v)


def fit_scaling(samples: Iterable[tuple[int, float | None]],
                tail_fraction: float = 0.5) -> ScalingEstimate:
    """Slope statistics of ``v`` against the scale index ``k``.

    ``slope_ols`` is the least-squares slope.  The tail statistics are the
    extremes of ``v(k)/k`` over the largest ``ceil(tail_fraction * N)`` usable
    scales and stand in for liminf / limsup of the ratio.  Samples whose value
    is ``None`` or non-finite count as censored.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    samples = sorted((int(k), v) for k, v in samples)
    ks = [k for k, _ in samples]
    if len(set(ks)) != len(ks):
        raise ValueError("scale indices must be distinct")
    if ks and ks[0] < 1:
        raise ValueError("scale indices must be >= 1")
    good = [(k, float(v)) for k, v in samples if _usable(v)]
    n_censored = len(samples) - len(good)
    if len(good) < 4:
        raise InsufficientDataError(
            f"need at least 4 usable samples, got {len(good)}", n_censored)

    k = np.array([g[0] for g in good], dtype=np.float64)
    v = np.array([g[1] for g in good], dtype=np.float64)
    kc = k - k.mean()
    slope = float(np.dot(kc, v - v.mean()) / np.dot(kc, kc))

    n_tail = math.ceil(tail_fraction * len(good))
    ratios = v[-n_tail:] / k[-n_tail:]
    return ScalingEstimate(
        slope_ols=slope,
        slope_tail_min=float(ratios.min()),
        slope_tail_max=float(ratios.max()),
        tail_fraction=tail_fraction,
        n_points_used=len(good),
        n_censored=n_censored,
    )

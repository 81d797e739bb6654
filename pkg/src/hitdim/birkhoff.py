"""Birkhoff sums of observables with a power-law pole and their growth exponent."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .metric import InsufficientDataError, ScalingEstimate, SpacePoint, fit_scaling
from .systems import MapSystem

DEFAULT_FLOOR = 2.0 ** -60


class UndefinedBoundError(ValueError):
    pass


@dataclass(frozen=True)
class SingularObservable:
    """f(x) = dist(x, x0) ** -alpha.

    ``floor`` is the distance substituted when the orbit lands exactly on the
    pole, so such a step contributes ``floor ** -alpha``.  ``alpha = 0`` gives
    the constant observable 1.
    """

    x0: SpacePoint
    alpha: float
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.floor <= 0:
            raise ValueError("floor must be positive")

    def __call__(self, system: MapSystem, x: SpacePoint) -> float:
        if self.alpha == 0:
            return 1.0
        d = system.distance(x, self.x0)
        return (d / 2.0 ** 64 if d else self.floor) ** -self.alpha


@dataclass(frozen=True)
class BirkhoffTrace:
    checkpoints: tuple[int, ...]  # n_j = 2**j
    sums: tuple[float, ...]  # S_{n_j} = sum_{i=0}^{n_j} f(T^i x)
    pole_hits: int = 0

    @property
    def flag(self) -> str:
        return "POLE_HIT" if self.pole_hits else ""


def birkhoff_trace(system: MapSystem, x: SpacePoint, obs: SingularObservable,
                   N: int) -> BirkhoffTrace:
    if N < 2 ** 8:
        raise ValueError("N must be >= 2**8")
    s = system.state(x)
    t0, t1 = system.target(obs.x0)
    sums, hits = K.birkhoff_sums(system.kind, system.metric, system.params(),
                                 np.uint64(s[0]), np.uint64(s[1]), np.uint64(s[2]),
                                 np.uint64(t0), np.uint64(t1),
                                 float(obs.alpha), float(obs.floor), N)
    return BirkhoffTrace(tuple(1 << j for j in range(len(sums))),
                         tuple(float(v) for v in sums), int(hits))


def birkhoff_traces(system: MapSystem, states: np.ndarray, poles: np.ndarray,
                    alpha: float, N: int, floor: float = DEFAULT_FLOOR) -> list[BirkhoffTrace]:
    sums, hits = K.birkhoff_batch(system.kind, system.metric, system.params(),
                                  np.ascontiguousarray(states, dtype=np.uint64),
                                  np.ascontiguousarray(poles, dtype=np.uint64),
                                  float(alpha), float(floor), N)
    cps = tuple(1 << j for j in range(sums.shape[1]))
    return [BirkhoffTrace(cps, tuple(float(v) for v in row), int(h))
            for row, h in zip(sums, hits)]


def growth_exponent(trace: BirkhoffTrace, tail_fraction: float = 0.5) -> ScalingEstimate:
    """Fit log2 S_{2^j} against j (j >= 1); the tail max is the limsup surrogate."""
    samples = [(j, math.log2(s)) for j, s in enumerate(trace.sums) if j >= 1 and s > 0]
    if len(samples) < 4:
        raise InsufficientDataError("need at least 4 checkpoints beyond n = 1")
    return fit_scaling(samples, tail_fraction)


@dataclass(frozen=True)
class SandwichVerdict:
    exponent: float
    lower: float  # alpha / R_upper
    upper: float  # alpha / R_lower + 1
    tol: float
    passed: bool


def sandwich_check(exponent: ScalingEstimate, R_estimate: ScalingEstimate,
                   alpha: float, tol: float = 0.25) -> SandwichVerdict:
    """alpha / R_upper - tol <= growth exponent <= alpha / R_lower + 1 + tol."""
    if alpha <= 1:
        raise ValueError("the sandwich bound needs alpha > 1")
    if R_estimate.slope_tail_min <= 0 or R_estimate.slope_tail_max <= 0:
        raise UndefinedBoundError("hitting indicator estimate must be positive")
    g = exponent.slope_tail_max
    lower = alpha / R_estimate.slope_tail_max
    upper = alpha / R_estimate.slope_tail_min + 1
    return SandwichVerdict(g, lower, upper, tol, lower - tol <= g <= upper + tol)

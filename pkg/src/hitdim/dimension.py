"""Local dimension of invariant measures from analytic or orbit-frequency ball measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .metric import (ONE, DyadicSchedule, ScalingEstimate, SpacePoint, fit_scaling,
                     radius_threshold)
from .systems import MapSystem, MeasureModel, entropy_dimension

__all__ = [
    "MeasureModel", "DimensionEstimate", "bernoulli_cdf", "ball_measure_analytic",
    "ball_measure_empirical", "ball_measures_empirical", "estimate_local_dimension",
    "entropy_dimension",
]


def bernoulli_cdf(p, t: int):
    """mu_p([0, t / 2**64)) by walking the 64 binary digits of ``t``.

    A 1-digit adds the mass of the sibling cylinder with digit 0 (weight 1-p);
    ``p`` may be a Fraction for exact results.
    """
    if t <= 0:
        return 0 * p
    if t >= ONE:
        return 1 + 0 * p
    acc = 0 * p
    w = 1 + 0 * p
    q = 1 - p
    for i in range(63, -1, -1):
        if (t >> i) & 1:
            acc += w * q
            w *= p
        else:
            w *= q
    return acc


def _bernoulli_ball(p, y: int, r) -> tuple[float, float]:
    q = Fraction(r)
    lo_exact = Fraction(y, ONE) - q
    hi_exact = Fraction(y, ONE) + q
    lo = math.floor(lo_exact * ONE)
    hi = math.floor(hi_exact * ONE)
    exact = lo == lo_exact * ONE and hi == hi_exact * ONE
    err = 0.0 if exact else 2 * max(float(p), 1 - float(p)) ** 64
    if lo < 0:
        m = bernoulli_cdf(p, hi) + 1 - bernoulli_cdf(p, lo + ONE)
    elif hi > ONE:
        m = 1 - bernoulli_cdf(p, lo) + bernoulli_cdf(p, hi - ONE)
    else:
        m = bernoulli_cdf(p, hi) - bernoulli_cdf(p, lo)
    return m, err


def ball_measure_analytic(model: MeasureModel, y: SpacePoint, r, *,
                          metric: int = K.METRIC_CIRCLE, with_error: bool = False):
    """Exact (or error-bounded) measure of the open ball B(y, r)."""
    if r <= 0:
        raise ValueError("radius must be positive")
    err = 0.0
    if model.kind == "lebesgue-2d":
        m = min(2 * r, 1) ** 2
    elif model.kind == "lebesgue-1d":
        if metric == K.METRIC_INTERVAL:
            c = Fraction(y.coords[0], ONE)
            m = float(min(c + Fraction(r), 1) - max(c - Fraction(r), 0))
        else:
            m = min(2 * r, 1)
    elif 2 * r >= 1:
        m = 1.0
    else:
        p = model.p
        m, err = _bernoulli_ball(p, y.coords[0], r)
    if with_error:
        return m, err
    return m


def ball_measures_empirical(system: MapSystem, y: SpacePoint, radii, N: int,
                            seed: int) -> np.ndarray:
    """Visit frequencies of nested balls along one measure-sampled orbit."""
    if N < 10 ** 4:
        raise ValueError("N must be >= 10**4")
    radii = list(radii)
    if any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    start = system.sample_states(np.random.default_rng(seed), 1)[0]
    t0, t1 = system.target(y)
    thresholds = np.array([radius_threshold(r) for r in radii], dtype=np.uint64)
    counts = K.ball_counts(system.kind, system.metric, system.params(),
                           start[0], start[1], start[2], np.uint64(t0), np.uint64(t1),
                           thresholds, N)
    return counts / N


def ball_measure_empirical(system: MapSystem, y: SpacePoint, r, N: int, seed: int) -> float:
    return float(ball_measures_empirical(system, y, [r], N, seed)[0])


@dataclass(frozen=True)
class DimensionEstimate:
    scaling: ScalingEstimate
    measures: tuple[tuple[int, float], ...] = ()
    dropped: tuple[tuple[int, str], ...] = field(default=())

    @property
    def d_lower(self) -> float:
        return self.scaling.slope_tail_min

    @property
    def d_upper(self) -> float:
        return self.scaling.slope_tail_max


def estimate_local_dimension(source: MeasureModel | MapSystem, y: SpacePoint,
                             schedule: DyadicSchedule, *, tail_fraction: float = 0.5,
                             metric: int = K.METRIC_CIRCLE, N: int | None = None,
                             seed: int = 0, min_hits: int = 100) -> DimensionEstimate:
    """Fit -log2 mu(B(y, 2^-k)) against k.

    A ``MeasureModel`` gives analytic ball measures.  A ``MapSystem`` with an
    orbit length ``N`` gives Birkhoff frequencies; scales where the analytic
    proxy predicts fewer than ``min_hits`` visits, or that receive none, are
    dropped and reported in ``dropped``.
    """
    measures = []
    dropped = []
    if isinstance(source, MeasureModel):
        for k in schedule.ks:
            measures.append((k, ball_measure_analytic(source, y, Fraction(1, 1 << k),
                                                      metric=metric)))
    else:
        if N is None:
            raise ValueError("empirical estimation needs an orbit length N")
        freqs = ball_measures_empirical(source, y, schedule.radii, N, seed)
        for k, f in zip(schedule.ks, freqs):
            proxy = ball_measure_analytic(source.measure, y, Fraction(1, 1 << k),
                                          metric=source.metric)
            if f == 0:
                dropped.append((k, "EMPTY"))
            elif proxy * N < min_hits:
                dropped.append((k, "FEW_HITS"))
            else:
                measures.append((k, float(f)))
    samples = [(k, -math.log2(m)) for k, m in measures]
    return DimensionEstimate(fit_scaling(samples, tail_fraction),
                             tuple((k, float(m)) for k, m in measures), tuple(dropped))

"""First-entrance times, hitting/recurrence indicators and survival sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .metric import (DyadicSchedule, InsufficientDataError, ScalingEstimate,
                     SpacePoint, fit_scaling, radius_threshold)
from .systems import MapSystem


@dataclass(frozen=True)
class HitRecord:
    k: int
    radius: float
    tau: int | None  # None: censored at n_max
    n_max: int

    @property
    def censored(self) -> bool:
        return self.tau is None


@dataclass(frozen=True)
class HitProfile:
    source: SpacePoint
    target: SpacePoint
    records: tuple[HitRecord, ...]
    mode: str = "hitting"

    @property
    def taus(self) -> list[int | None]:
        return [r.tau for r in self.records]

    @property
    def n_censored(self) -> int:
        return sum(r.censored for r in self.records)


def _u64(*values):
    return tuple(np.uint64(v) for v in values)


def hitting_time(system: MapSystem, x: SpacePoint, y: SpacePoint, r,
                 n_max: int) -> int | None:
    """Least n in [1, n_max] with dist(T^n x, y) < r, or None if censored.

    n = 0 never counts, even when x already lies in the ball.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    radii = np.array([radius_threshold(r)], dtype=np.uint64)
    taus = K.hit_profile(system.kind, system.metric, system.params(), system.power,
                         *_u64(*system.state(x)), *_u64(*system.target(y)),
                         radii, n_max)
    return int(taus[0]) or None


def _records(schedule: DyadicSchedule, taus, n_max: int) -> tuple[HitRecord, ...]:
    return tuple(HitRecord(k, 2.0 ** -k, int(t) or None, n_max)
                 for k, t in zip(schedule.ks, taus))


def hit_profile(system: MapSystem, x: SpacePoint, y: SpacePoint | None,
                schedule: DyadicSchedule, n_max: int,
                mode: str = "hitting") -> HitProfile:
    """Hitting times for every dyadic radius of ``schedule`` in one orbit pass.

    In recurrence mode the target is the source itself and ``y`` is ignored.
    """
    if mode == "recurrence":
        y = x
    elif mode != "hitting":
        raise ValueError(f"unknown mode {mode!r}")
    taus = K.hit_profile(system.kind, system.metric, system.params(), system.power,
                         *_u64(*system.state(x)), *_u64(*system.target(y)),
                         schedule.thresholds(), n_max)
    return HitProfile(x, y, _records(schedule, taus, n_max), mode)


def batch_targets(system: MapSystem, states: np.ndarray) -> np.ndarray:
    """Kernel targets (t0, t1) of an array of states."""
    if system.dim == 2:
        return np.ascontiguousarray(states[:, :2])
    out = np.zeros((states.shape[0], 2), dtype=np.uint64)
    out[:, 0] = states[:, 0]
    return out


def hit_profiles(system: MapSystem, states: np.ndarray, targets: np.ndarray,
                 schedule: DyadicSchedule, n_max: int) -> np.ndarray:
    """Vectorized hit profiles: (n_trials, n_scales) int array, 0 = censored."""
    return K.hit_profiles(system.kind, system.metric, system.params(), system.power,
                          np.ascontiguousarray(states, dtype=np.uint64),
                          np.ascontiguousarray(targets, dtype=np.uint64),
                          schedule.thresholds(), n_max)


def estimate_R(profile: HitProfile | tuple[list[int], list[int | None]],
               tail_fraction: float = 0.5) -> ScalingEstimate:
    """Fit log2(tau) against k.

    ``slope_tail_max`` estimates the upper indicator, ``slope_tail_min`` the
    lower one.  Censored scales are excluded and counted.
    """
    if isinstance(profile, HitProfile):
        ks = [r.k for r in profile.records]
        taus = profile.taus
    else:
        ks, taus = profile
    samples = [(k, math.log2(t) if t else None) for k, t in zip(ks, taus)]
    try:
        return fit_scaling(samples, tail_fraction)
    except InsufficientDataError as exc:
        raise InsufficientDataError(
            f"too few uncensored scales ({exc.n_censored} censored)",
            exc.n_censored) from None


def survival_measure(system: MapSystem, x: SpacePoint, r, n: int,
                     sample_count: int, seed: int) -> float:
    """Monte-Carlo measure of the points whose orbit avoids B(x, r) at steps 0..n."""
    if sample_count < 100:
        raise ValueError("sample_count must be >= 100")
    rng = np.random.default_rng(seed)
    states = system.sample_states(rng, sample_count)
    t0, t1 = system.target(x)
    alive = K.survivors(system.kind, system.metric, system.params(), states,
                        np.uint64(t0), np.uint64(t1), np.uint64(radius_threshold(r)), n)
    return float(alive.mean())


@dataclass(frozen=True)
class SummabilityRow:
    n: int
    ball_measure: float
    horizon: int
    survival: float | None
    partial_sum: float
    flag: str = ""


def summability_diagnostic(system: MapSystem, x: SpacePoint, schedule: DyadicSchedule,
                           epsilon: float, sample_count: int, seed: int,
                           horizon_cap: int = 10 ** 6) -> list[SummabilityRow]:
    """Survival estimates at the horizons mu(B(x, 2^-n))^(-1-epsilon)."""
    from .dimension import ball_measure_analytic

    rows = []
    total = 0.0
    for i, n in enumerate(schedule.ks):
        m = ball_measure_analytic(system.measure, x, 2.0 ** -n, metric=system.metric)
        horizon = math.ceil(m ** (-1.0 - epsilon) - 1e-9)
        if horizon > horizon_cap:
            rows.append(SummabilityRow(n, m, horizon, None, total, "HORIZON_CAPPED"))
            continue
        s = survival_measure(system, x, 2.0 ** -n, horizon, sample_count, seed + i)
        total += s
        rows.append(SummabilityRow(n, m, horizon, s, total))
    return rows

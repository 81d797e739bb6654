"""Compiled orbit kernels.

Every system state is three uint64 words ``(s0, s1, s2)``:

* rotation / IET: ``s0`` is the fixed-point coordinate, the rest unused
* doubling map: ``s0`` is the 64-digit window, ``s1`` the digit-stream seed,
  ``s2`` the stream offset (number of digits already consumed)
* cat map: ``(s0, s1)`` are the torus coordinates

Targets are ``(t0, t1)``; ``t1`` is only read on the torus.  All arithmetic is
modulo 2**64 so every map except the rotation acts exactly on the lattice.
"""

import numpy as np
from numba import njit, prange

KIND_ROTATION = 0
KIND_IET = 1
KIND_DOUBLING = 2
KIND_CAT = 3

METRIC_CIRCLE = 0
METRIC_INTERVAL = 1
METRIC_TORUS = 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ZERO = np.uint64(0)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S63 = np.uint64(63)
_TWO_M64 = 2.0 ** -64


@njit(cache=True)
def splitmix64(z):
    z = z ^ (z >> _S30)
    z = z * _MIX1
    z = z ^ (z >> _S27)
    z = z * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_digit(seed, offset, threshold):
    """Digit number ``offset`` of the Bernoulli stream keyed by ``seed``."""
    u = splitmix64(seed + (offset + _ONE) * _GOLDEN)
    if u < threshold:
        return _ONE
    return _ZERO


@njit(cache=True)
def step(kind, par, s0, s1, s2):
    if kind == KIND_ROTATION:
        return s0 + par[0], s1, s2
    if kind == KIND_IET:
        d = np.int64(par[0])
        j = d
        # par[1..d] are the left endpoints of the domain pieces, par[1] == 0
        while j > 1 and s0 < par[j]:
            j -= 1
        return s0 + par[d + j], s1, s2
    if kind == KIND_DOUBLING:
        bit = stream_digit(s1, s2, par[0])
        return (s0 << _ONE) | bit, s1, s2 + _ONE
    # cat map ((2, 1), (1, 1))
    return _TWO * s0 + s1, s0 + s1, s2


@njit(cache=True)
def step_power(kind, par, power, s0, s1, s2):
    for _ in range(power):
        s0, s1, s2 = step(kind, par, s0, s1, s2)
    return s0, s1, s2


@njit(cache=True)
def circle_gap(a, b):
    u = a - b
    v = b - a
    if u < v:
        return u
    return v


@njit(cache=True)
def distance(metric, s0, s1, t0, t1):
    if metric == METRIC_CIRCLE:
        return circle_gap(s0, t0)
    if metric == METRIC_INTERVAL:
        if s0 >= t0:
            return s0 - t0
        return t0 - s0
    dx = circle_gap(s0, t0)
    dy = circle_gap(s1, t1)
    if dx > dy:
        return dx
    return dy


@njit(cache=True)
def hit_profile(kind, metric, par, power, s0, s1, s2, t0, t1, radii, n_max):
    """First entrance times into nested balls, one orbit pass.

    ``radii`` must be strictly decreasing integer thresholds.  Entry ``i`` of
    the result is 0 when ball ``i`` was not entered within ``n_max`` steps.
    """
    K = radii.shape[0]
    taus = np.zeros(K, dtype=np.int64)
    idx = 0
    for n in range(1, n_max + 1):
        s0, s1, s2 = step_power(kind, par, power, s0, s1, s2)
        d = distance(metric, s0, s1, t0, t1)
        while idx < K and d < radii[idx]:
            taus[idx] = n
            idx += 1
        if idx == K:
            break
    return taus


@njit(cache=True, parallel=True)
def hit_profiles(kind, metric, par, power, states, targets, radii, n_max):
    n = states.shape[0]
    out = np.zeros((n, radii.shape[0]), dtype=np.int64)
    for i in prange(n):
        out[i] = hit_profile(kind, metric, par, power,
                             states[i, 0], states[i, 1], states[i, 2],
                             targets[i, 0], targets[i, 1], radii, n_max)
    return out


@njit(cache=True, parallel=True)
def survivors(kind, metric, par, states, t0, t1, radius, n):
    """Flags for sample states whose orbit avoids the ball at steps 0..n."""
    m = states.shape[0]
    alive = np.ones(m, dtype=np.bool_)
    for i in prange(m):
        s0 = states[i, 0]
        s1 = states[i, 1]
        s2 = states[i, 2]
        for j in range(n + 1):
            if j > 0:
                s0, s1, s2 = step(kind, par, s0, s1, s2)
            if distance(metric, s0, s1, t0, t1) < radius:
                alive[i] = False
                break
    return alive


@njit(cache=True)
def ball_counts(kind, metric, par, s0, s1, s2, t0, t1, radii, n_points):
    """Visits of the first ``n_points`` orbit points to each nested ball."""
    K = radii.shape[0]
    counts = np.zeros(K, dtype=np.int64)
    for n in range(n_points):
        if n > 0:
            s0, s1, s2 = step(kind, par, s0, s1, s2)
        d = distance(metric, s0, s1, t0, t1)
        j = 0
        while j < K and d < radii[j]:
            counts[j] += 1
            j += 1
    return counts


@njit(cache=True)
def birkhoff_sums(kind, metric, par, s0, s1, s2, t0, t1, alpha, floor, n_last):
    """Neumaier-compensated sums of dist(T^i x, x0)**-alpha.

    Returns (sums, pole_hits) where sums[j] = sum_{i=0}^{2**j} f(T^i x) for
    every 2**j <= n_last.  A zero distance contributes ``floor**-alpha``.
    """
    J = 0
    while (1 << (J + 1)) <= n_last:
        J += 1
    sums = np.zeros(J + 1, dtype=np.float64)
    total = 0.0
    comp = 0.0
    pole_hits = 0
    next_j = 0
    for i in range(n_last + 1):
        if i > 0:
            s0, s1, s2 = step(kind, par, s0, s1, s2)
        if alpha == 0.0:
            f = 1.0
        else:
            d = distance(metric, s0, s1, t0, t1)
            if d == _ZERO:
                pole_hits += 1
                f = floor ** (-alpha)
            else:
                f = (float(d) * _TWO_M64) ** (-alpha)
        t = total + f
        if abs(total) >= abs(f):
            comp += (total - t) + f
        else:
            comp += (f - t) + total
        total = t
        if i == (1 << next_j):
            sums[next_j] = total + comp
            next_j += 1
    return sums, pole_hits


@njit(cache=True, parallel=True)
def birkhoff_batch(kind, metric, par, states, targets, alpha, floor, n_last):
    n = states.shape[0]
    J = 0
    while (1 << (J + 1)) <= n_last:
        J += 1
    out = np.zeros((n, J + 1), dtype=np.float64)
    poles = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        sums, hits = birkhoff_sums(kind, metric, par,
                                   states[i, 0], states[i, 1], states[i, 2],
                                   targets[i, 0], targets[i, 1],
                                   alpha, floor, n_last)
        out[i] = sums
        poles[i] = hits
    return out, poles


@njit(cache=True)
def orbit(kind, par, s0, s1, s2, n_points):
    """The first ``n_points`` states of an orbit, as an (n_points, 3) array."""
    out = np.empty((n_points, 3), dtype=np.uint64)
    for n in range(n_points):
        if n > 0:
            s0, s1, s2 = step(kind, par, s0, s1, s2)
        out[n, 0] = s0
        out[n, 1] = s1
        out[n, 2] = s2
    return out

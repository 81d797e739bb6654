"""Dynamical systems under test and samplers for their invariant measures.

Each system exists twice: exact specs (``IETSpec``, ``RotationSpec``) acting
on ``Fraction`` values, and fixed-point ``MapSystem`` wrappers that feed the
compiled orbit kernels.  The pure-Python ``apply`` of a ``MapSystem`` is kept
deliberately separate from the kernels so it can serve as an oracle for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from . import _kernels as K
from .metric import MASK, ONE, SpacePoint, is_dyadic, to_fixed

_GOLDEN = 0x9E3779B97F4A7C15


# --------------------------------------------------------------------------
# exact specs


def is_irreducible(permutation: Sequence[int]) -> bool:
    """No proper prefix {1..k} is mapped onto itself."""
    seen_max = 0
    for k, p in enumerate(permutation[:-1], start=1):
        seen_max = max(seen_max, p)
        if seen_max == k:
            return False
    return True


@dataclass(frozen=True)
class IETSpec:
    """Interval exchange on [0, 1).

    Subinterval ``i`` (1-based, in domain order) is placed at position
    ``permutation[i-1]`` of the image, so ``(3, 2, 1)`` reverses the order.
    """

    permutation: tuple[int, ...]
    lengths: tuple[Fraction, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        lengths = tuple(Fraction(x) for x in self.lengths)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "lengths", lengths)
        d = len(perm)
        if d < 2:
            raise ValueError("an IET needs at least two subintervals")
        if sorted(perm) != list(range(1, d + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{d}")
        if len(lengths) != d:
            raise ValueError("one length per subinterval")
        if any(x <= 0 for x in lengths):
            raise ValueError("lengths must be strictly positive")
        if sum(lengths) != 1:
            raise ValueError("lengths must sum to exactly 1")

    @property
    def d(self) -> int:
        return len(self.permutation)

    @property
    def irreducible(self) -> bool:
        return is_irreducible(self.permutation)

    @property
    def domain_lefts(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for x in self.lengths:
            out.append(acc)
            acc += x
        return out

    @property
    def image_lefts(self) -> list[Fraction]:
        """Left endpoint of the image of each subinterval (domain order)."""
        out = []
        for i in range(self.d):
            pos = self.permutation[i]
            out.append(sum((self.lengths[j] for j in range(self.d)
                            if self.permutation[j] < pos), Fraction(0)))
        return out

    @property
    def translations(self) -> list[Fraction]:
        return [b - a for a, b in zip(self.domain_lefts, self.image_lefts)]

    def apply(self, x) -> Fraction:
        x = Fraction(x) % 1
        lefts = self.domain_lefts
        i = max(j for j in range(self.d) if lefts[j] <= x)
        return x + self.translations[i]

    def inverse_apply(self, x) -> Fraction:
        x = Fraction(x) % 1
        images = self.image_lefts
        i = max((j for j in range(self.d) if images[j] <= x), key=lambda j: images[j])
        return x - self.translations[i]

    def discontinuities(self, direction: str = "forward") -> list[Fraction]:
        if direction == "forward":
            pts = self.domain_lefts[1:]
        elif direction == "backward":
            pts = [p for p in self.image_lefts if p != 0]
        else:
            raise ValueError("direction is 'forward' or 'backward'")
        return sorted(pts)

    def delta_gap(self, n: int) -> tuple[Fraction, bool]:
        """Minimum circular gap among the discontinuities of T^-n.

        Returns ``(gap, degenerate)``; ``degenerate`` is set when two points of
        the set coincide, in which case the gap is 0.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        pts = []
        for b in self.discontinuities("backward"):
            p = b
            for _ in range(n):
                pts.append(p)
                p = self.apply(p)
        return min_circular_gap(pts)

    def kernel_params(self) -> np.ndarray:
        if not all(is_dyadic(x) for x in self.lengths):
            raise ValueError("the fixed-point kernel needs dyadic lengths")
        lefts = [to_fixed(a) if a else 0 for a in self.domain_lefts]
        shifts = [to_fixed(t) for t in self.translations]
        return np.array([self.d] + lefts + shifts, dtype=np.uint64)


def min_circular_gap(points) -> tuple[Fraction, bool]:
    pts = sorted(Fraction(p) % 1 for p in points)
    if len(pts) < 2:
        return Fraction(1), False
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(1 - pts[-1] + pts[0])
    gap = min(gaps)
    return gap, gap == 0


def delta_gap_profile(spec: IETSpec, ns: Sequence[int]) -> list[tuple[int, Fraction]]:
    """delta(n) for increasing ``ns`` using integer numerators over 2**64.

    Used for the Boshernitzan proxy where n reaches 10**4-10**6; the points are
    exact because random IETs have dyadic lengths.
    """
    ns = sorted(ns)
    params = spec.kernel_params()
    starts = [to_fixed(b) for b in spec.discontinuities("backward")]
    n_top = ns[-1]
    tracks = []
    for s in starts:
        orb = K.orbit(K.KIND_IET, params, np.uint64(s), np.uint64(0), np.uint64(0), n_top)
        tracks.append(orb[:, 0])
    allpts = np.stack(tracks, axis=1)
    out = []
    for n in ns:
        pts = np.sort(allpts[:n].ravel())
        gaps = np.diff(pts)
        wrap = ONE - int(pts[-1]) + int(pts[0])
        g = min(int(gaps.min()) if gaps.size else ONE, wrap)
        out.append((n, Fraction(g, ONE)))
    return out


def _continued_fraction(q: Fraction) -> list[int]:
    out = []
    q = Fraction(q)
    q -= math.floor(q)
    while q:
        q = 1 / q
        a = math.floor(q)
        out.append(a)
        q -= a
    return out


@dataclass(frozen=True)
class RotationSpec:
    """Rotation by the final convergent of [0; a_1, a_2, ...]."""

    partial_quotients: tuple[int, ...]

    def __post_init__(self):
        pq = tuple(int(a) for a in self.partial_quotients)
        if not pq or any(a < 1 for a in pq):
            raise ValueError("partial quotients must be positive integers")
        if len(pq) == 1 and pq[0] == 1:
            raise ValueError("[0; 1] is the integer 1, not a rotation number in (0,1)")
        object.__setattr__(self, "partial_quotients", pq)

    @classmethod
    def from_fraction(cls, alpha) -> "RotationSpec":
        return cls(tuple(_continued_fraction(Fraction(alpha))))

    @property
    def convergents(self) -> list[Fraction]:
        out = []
        p0, q0, p1, q1 = 1, 0, 0, 1
        for a in self.partial_quotients:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            out.append(Fraction(p1, q1))
        return out

    @property
    def alpha(self) -> Fraction:
        return self.convergents[-1]

    def apply(self, x) -> Fraction:
        return (Fraction(x) + self.alpha) % 1


def golden_rotation(n_quotients: int = 10) -> RotationSpec:
    return RotationSpec((1,) * n_quotients)


def liouville_rotation(n_quotients: int = 5, base: int = 10) -> RotationSpec:
    """Partial quotients a_k = base**k, k = 1..n_quotients."""
    return RotationSpec(tuple(base ** k for k in range(1, n_quotients + 1)))


def random_iet(d: int, seed: int) -> IETSpec:
    """Lengths uniform on the simplex rounded to 2**-40; irreducible permutation."""
    if not 2 <= d <= 6:
        raise ValueError("d must lie in 2..6")
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(size=d)
    den = 1 << 40
    nums = [max(1, int(round(g / gaps.sum() * den))) for g in gaps]
    nums[int(np.argmax(nums))] += den - sum(nums)
    candidates = [p for p in permutations(range(1, d + 1)) if is_irreducible(p)]
    perm = candidates[int(rng.integers(len(candidates)))]
    return IETSpec(perm, tuple(Fraction(n, den) for n in nums))


# --------------------------------------------------------------------------
# invariant measures


@dataclass(frozen=True)
class MeasureModel:
    """Descriptor of an invariant measure with known ball measures."""

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("lebesgue-1d", "lebesgue-2d", "bernoulli"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "bernoulli" and not (self.p is not None and 0 < self.p < 1):
            raise ValueError("bernoulli measure needs p in (0,1)")

    @property
    def dimension(self) -> float:
        if self.kind == "lebesgue-1d":
            return 1.0
        if self.kind == "lebesgue-2d":
            return 2.0
        return entropy_dimension(self.p)


def entropy_dimension(p: float) -> float:
    """H(p)/log 2: the local dimension of Bernoulli(p) for the doubling map."""
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


# --------------------------------------------------------------------------
# fixed-point systems


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK
    return z ^ (z >> 31)


def bernoulli_threshold(p) -> int:
    return min(MASK, max(1, int(round(Fraction(p) * ONE))))


@dataclass(frozen=True)
class MapSystem:
    """Base class: a map on fixed-point states plus its invariant measure."""

    name: str = field(default="", compare=False)
    power: int = 1

    kind = -1
    metric = K.METRIC_CIRCLE
    dim = 1

    @property
    def measure(self) -> MeasureModel:
        return MeasureModel("lebesgue-1d")

    def params(self) -> np.ndarray:
        return np.zeros(1, dtype=np.uint64)

    def apply(self, x: SpacePoint) -> SpacePoint:
        for _ in range(self.power):
            x = self._apply1(x)
        return x

    def _apply1(self, x: SpacePoint) -> SpacePoint:
        raise NotImplementedError

    def iterate(self, m: int) -> "MapSystem":
        """The same system with the map replaced by its m-th power."""
        from dataclasses import replace
        return replace(self, power=self.power * m)

    def distance(self, a: SpacePoint, b: SpacePoint) -> int:
        """Fixed-point distance (numerator over 2**64)."""
        if self.metric == K.METRIC_INTERVAL:
            return abs(a.coords[0] - b.coords[0])
        gaps = []
        for u, v in zip(a.coords, b.coords):
            t = (u - v) & MASK
            gaps.append(min(t, ONE - t if t else 0))
        return max(gaps)

    def state(self, x: SpacePoint) -> tuple[int, int, int]:
        return (x.coords[0], 0, 0)

    def target(self, y: SpacePoint) -> tuple[int, int]:
        return (y.coords[0], 0)

    def sample_states(self, rng: np.random.Generator, n: int) -> np.ndarray:
        states = np.zeros((n, 3), dtype=np.uint64)
        states[:, 0] = rng.integers(0, ONE, size=n, dtype=np.uint64, endpoint=False)
        return states

    def point_from_state(self, s) -> SpacePoint:
        return SpacePoint((int(s[0]),))

    def sample(self, rng: np.random.Generator) -> SpacePoint:
        return self.point_from_state(self.sample_states(rng, 1)[0])


@dataclass(frozen=True)
class Rotation(MapSystem):
    spec: RotationSpec = RotationSpec((4,))

    kind = K.KIND_ROTATION

    @property
    def alpha_fixed(self) -> int:
        # nearest dyadic approximation; |error| <= 2**-65 per step
        a = self.spec.alpha
        return (a.numerator * ONE + a.denominator // 2) // a.denominator & MASK

    def params(self):
        return np.array([self.alpha_fixed], dtype=np.uint64)

    def _apply1(self, x):
        return SpacePoint(((x.coords[0] + self.alpha_fixed) & MASK,))


@dataclass(frozen=True)
class IET(MapSystem):
    spec: IETSpec = IETSpec((2, 1), (Fraction(1, 2), Fraction(1, 2)))

    kind = K.KIND_IET
    metric = K.METRIC_INTERVAL

    @cached_property
    def _table(self):
        par = [int(v) for v in self.spec.kernel_params()]
        d = par[0]
        return par[1:d + 1], par[d + 1:]

    def params(self):
        return self.spec.kernel_params()

    def _apply1(self, x):
        lefts, shifts = self._table
        i = max(j for j in range(len(lefts)) if lefts[j] <= x.coords[0])
        return SpacePoint(((x.coords[0] + shifts[i]) & MASK,))


@dataclass(frozen=True)
class DoublingMap(MapSystem):
    """x -> 2x mod 1 as a shift on a lazily extended Bernoulli(p) digit stream.

    A point holds 64 materialized digits in its coordinate; the digits that
    follow are drawn deterministically from ``(stream seed, offset)``.
    """

    p: float = 0.5

    kind = K.KIND_DOUBLING

    @property
    def measure(self):
        return MeasureModel("bernoulli", self.p)

    def params(self):
        return np.array([bernoulli_threshold(self.p)], dtype=np.uint64)

    def digit(self, seed: int, offset: int) -> int:
        u = _mix64((seed + (offset + 1) * _GOLDEN) & MASK)
        return int(u < bernoulli_threshold(self.p))

    def _apply1(self, x):
        seed, offset = x.stream if x.stream is not None else (0, 0)
        bit = self.digit(seed, offset)
        return SpacePoint((((x.coords[0] << 1) | bit) & MASK,), (seed, offset + 1))

    def state(self, x):
        seed, offset = x.stream if x.stream is not None else (0, 0)
        return (x.coords[0], seed, offset)

    def sample_states(self, rng, n):
        bits = rng.random((n, 64)) < self.p
        weights = np.uint64(1) << np.arange(63, -1, -1, dtype=np.uint64)
        states = np.zeros((n, 3), dtype=np.uint64)
        states[:, 0] = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        states[:, 1] = rng.integers(0, ONE, size=n, dtype=np.uint64, endpoint=False)
        return states

    def point_from_state(self, s):
        return SpacePoint((int(s[0]),), (int(s[1]), int(s[2])))


@dataclass(frozen=True)
class CatMap(MapSystem):
    kind = K.KIND_CAT
    metric = K.METRIC_TORUS
    dim = 2

    @property
    def measure(self):
        return MeasureModel("lebesgue-2d")

    def _apply1(self, x):
        a, b = x.coords
        return SpacePoint(((2 * a + b) & MASK, (a + b) & MASK))

    def inverse(self, x: SpacePoint) -> SpacePoint:
        a, b = x.coords
        return SpacePoint(((a - b) & MASK, (2 * b - a) & MASK))

    def state(self, x):
        return (x.coords[0], x.coords[1], 0)

    def target(self, y):
        return (y.coords[0], y.coords[1])

    def sample_states(self, rng, n):
        states = np.zeros((n, 3), dtype=np.uint64)
        states[:, :2] = rng.integers(0, ONE, size=(n, 2), dtype=np.uint64, endpoint=False)
        return states

    def point_from_state(self, s):
        return SpacePoint((int(s[0]), int(s[1])))


# spec-level operations ------------------------------------------------------


def iet_apply(spec: IETSpec, x) -> Fraction:
    return spec.apply(x)


def iet_inverse_apply(spec: IETSpec, x) -> Fraction:
    return spec.inverse_apply(x)


def iet_discontinuities(spec: IETSpec, direction: str = "forward") -> list[Fraction]:
    return spec.discontinuities(direction)


def iet_delta_gap(spec: IETSpec, n: int) -> tuple[Fraction, bool]:
    return spec.delta_gap(n)


def rotation_apply(spec: RotationSpec, x) -> Fraction:
    return spec.apply(x)


def catmap_apply(point: SpacePoint) -> SpacePoint:
    return CatMap()._apply1(point)


def bernoulli_apply(system: DoublingMap, point: SpacePoint) -> SpacePoint:
    return system._apply1(point)


def sample_from_measure(system: MapSystem, seed: int) -> SpacePoint:
    return system.sample(np.random.default_rng(seed))

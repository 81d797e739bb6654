"""The recursion a_n = m a_{n-1} + s_n with a_0 = m**2 and its bound."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def _check_m(m):
    if not 0 < m < 1:
        raise ValueError("m must lie in (0, 1)")


def s_term(i):
    return (2 * i + 1) / (i * i * (i + 1) ** 2)


def lemma2_bound(m, n: int):
    """m**floor(n/2) / (1 - m) + 4 / n**2, stated for n >= 2."""
    return m ** (n // 2) / (1 - m) + 4 / n ** 2


def lemma2_sequence(m, n: int):
    """Returns ``(a_n, bound, holds)``; bound and holds are None for n < 2.

    Passing a ``Fraction`` for ``m`` keeps the whole computation exact.
    """
    _check_m(m)
    if n < 0:
        raise ValueError("n must be >= 0")
    s = _s_exact if isinstance(m, Fraction) else s_term
    a = m * m
    for i in range(1, n + 1):
        a = a * m + s(i)
    if n < 2:
        return a, None, None
    bound = lemma2_bound(m, n)
    return a, bound, a <= bound


def _s_exact(i):
    return Fraction(2 * i + 1, i * i * (i + 1) ** 2)


def lemma2_table(m: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """a_n and the bound for n = 0..n_max (bound is NaN below n = 2)."""
    _check_m(m)
    a = np.empty(n_max + 1)
    a[0] = m * m
    for i in range(1, n_max + 1):
        a[i] = a[i - 1] * m + s_term(i)
    n = np.arange(n_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        bound = m ** (np.arange(n_max + 1) // 2) / (1 - m) + 4 / n ** 2
    bound[:2] = math.nan
    return a, bound

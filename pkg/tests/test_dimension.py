import math
from fractions import Fraction as F

import numpy as np
import pytest

from hitdim import _kernels as K
from hitdim.dimension import (MeasureModel, ball_measure_analytic, ball_measure_empirical,
                              ball_measures_empirical, bernoulli_cdf, estimate_local_dimension)
from hitdim.metric import ONE, DyadicSchedule, SpacePoint
from hitdim.systems import CatMap, DoublingMap, entropy_dimension

from .oracles import cylinder_measure

QUARTER = MeasureModel("bernoulli", F(1, 4))


def test_analytic_examples():
    y = SpacePoint.of(F(3, 10))
    assert ball_measure_analytic(MeasureModel("lebesgue-1d"), y, F(1, 8)) == F(1, 4)
    assert ball_measure_analytic(QUARTER, SpacePoint.of(F(1, 8)), F(1, 8)) == F(9, 16)
    assert ball_measure_analytic(MeasureModel("lebesgue-2d"), SpacePoint.of(0, 0), 0.125) == 0.0625
    assert ball_measure_analytic(QUARTER, y, F(1, 2)) == 1


def test_interval_metric_clips_at_edges():
    m = ball_measure_analytic(MeasureModel("lebesgue-1d"), SpacePoint.of(F(1, 16)), F(1, 8),
                              metric=K.METRIC_INTERVAL)
    assert m == pytest.approx(3 / 16)


def test_cdf_endpoints_and_monotone():
    assert bernoulli_cdf(F(1, 3), 0) == 0
    assert bernoulli_cdf(F(1, 3), ONE) == 1
    grid = [bernoulli_cdf(F(1, 3), j << 52) for j in range(1 << 12)]
    assert all(a <= b for a, b in zip(grid, grid[1:]))


@pytest.mark.parametrize("p", [F(1, 4), F(2, 5)])
def test_digit_walk_matches_cylinder_recursion(p):
    rng = np.random.default_rng(0)
    model = MeasureModel("bernoulli", p)
    for _ in range(20):
        y = F(int(rng.integers(0, 1 << 20)), 1 << 20)
        r = F(1, 1 << int(rng.integers(2, 12)))
        got = ball_measure_analytic(model, SpacePoint.of(y), r)
        lo, hi = y - r, y + r
        if lo < 0:
            want = cylinder_measure(p, F(0), hi) + cylinder_measure(p, lo + 1, F(1))
        elif hi > 1:
            want = cylinder_measure(p, lo, F(1)) + cylinder_measure(p, F(0), hi - 1)
        else:
            want = cylinder_measure(p, lo, hi)
        assert got == want


def test_empirical_examples():
    dbl = DoublingMap(p=0.5)
    y = SpacePoint.of(F(1, 3))
    assert ball_measure_empirical(dbl, y, F(3, 4), 10 ** 4, 0) == 1.0
    assert abs(ball_measure_empirical(dbl, y, F(1, 8), 10 ** 6, 1) - 0.25) <= 0.005
    cat = CatMap()
    m = ball_measure_empirical(cat, SpacePoint.of(F(1, 5), F(2, 7)), F(1, 8), 10 ** 6, 2)
    assert abs(m - 0.0625) <= 0.003


@pytest.mark.parametrize("system", [DoublingMap(p=0.5), DoublingMap(p=0.3), CatMap()],
                         ids=["doubling", "bernoulli", "cat"])
def test_empirical_agrees_with_analytic(system):
    rng = np.random.default_rng(9)
    N = 10 ** 6
    for i in range(20):
        y = system.sample(rng)
        k = int(rng.integers(2, 6))
        emp = ball_measure_empirical(system, y, F(1, 1 << k), N, i)
        ana = float(ball_measure_analytic(system.measure, y, F(1, 1 << k), metric=system.metric))
        assert abs(emp - ana) <= 5 * math.sqrt(ana * (1 - ana) / N) + 1e-12


def test_nested_empirical_frequencies():
    dbl = DoublingMap(p=0.3)
    y = dbl.sample(np.random.default_rng(4))
    f = ball_measures_empirical(dbl, y, [F(1, 4), F(1, 8), F(1, 16)], 10 ** 5, 3)
    assert f[0] >= f[1] >= f[2]
    with pytest.raises(ValueError):
        ball_measures_empirical(dbl, y, [F(1, 8), F(1, 4)], 10 ** 5, 3)


def test_lebesgue_dimension_exact():
    sched = DyadicSchedule(3, 12)
    e1 = estimate_local_dimension(MeasureModel("lebesgue-1d"), SpacePoint.of(F(1, 3)), sched)
    assert e1.scaling.slope_ols == pytest.approx(1.0, abs=1e-12)
    e2 = estimate_local_dimension(MeasureModel("lebesgue-2d"), SpacePoint.of(0, 0), sched)
    assert e2.scaling.slope_ols == pytest.approx(2.0, abs=1e-12)


def test_entropy_dimension():
    assert entropy_dimension(0.25) == pytest.approx(0.811278, abs=1e-6)
    assert QUARTER.dimension == pytest.approx(0.811278, abs=1e-6)


def test_bernoulli_dimension_typical_point():
    # digits 0001 repeated have exactly the Bernoulli(1/4) frequencies
    y = SpacePoint((0x1111_1111_1111_1111,))
    e = estimate_local_dimension(QUARTER, y, DyadicSchedule(6, 20))
    assert abs(e.scaling.slope_ols - QUARTER.dimension) <= 0.05
    assert e.d_lower <= e.d_upper


def test_self_similar_lower_upper_gap():
    for model, y in [(MeasureModel("lebesgue-1d"), SpacePoint.of(F(5, 16))),
                     (MeasureModel("bernoulli", F(1, 2)), SpacePoint.of(F(3, 8)))]:
        e = estimate_local_dimension(model, y, DyadicSchedule(6, 16))
        assert e.d_lower <= e.d_upper <= e.d_lower + 0.1


def test_empirical_drops_thin_scales():
    dbl = DoublingMap(p=0.5)
    y = dbl.sample(np.random.default_rng(5))
    e = estimate_local_dimension(dbl, y, DyadicSchedule(2, 14), N=10 ** 5, seed=1)
    kept = [k for k, _ in e.measures]
    assert max(kept) <= 10 and {k for k, _ in e.dropped} == set(range(max(kept) + 1, 15))
    assert abs(e.scaling.slope_ols - 1.0) < 0.1


def test_empirical_start_invariance():
    dbl = DoublingMap(p=0.5)
    y = dbl.sample(np.random.default_rng(6))
    sched = DyadicSchedule(2, 9)
    a = estimate_local_dimension(dbl, y, sched, N=10 ** 6, seed=1).scaling.slope_ols
    b = estimate_local_dimension(dbl, y, sched, N=10 ** 6, seed=2).scaling.slope_ols
    assert abs(a - b) <= 0.1

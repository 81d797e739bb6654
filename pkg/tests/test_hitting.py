import math
from fractions import Fraction as F

import numpy as np
import pytest

from hitdim.hitting import (HitProfile, batch_targets, estimate_R, hit_profile, hit_profiles,
                            hitting_time, summability_diagnostic, survival_measure)
from hitdim.metric import DyadicSchedule, InsufficientDataError, SpacePoint
from hitdim.systems import (IET, CatMap, DoublingMap, Rotation, RotationSpec, golden_rotation,
                            random_iet)

from .oracles import naive_profile

QUARTER = Rotation(spec=RotationSpec.from_fraction(F(1, 4)))


def test_hitting_time_examples():
    assert hitting_time(QUARTER, SpacePoint.of(0), SpacePoint.of(F(1, 2)), F(1, 10), 100) == 2
    third = SpacePoint((0x5555_5555_5555_5555,), (3, 0))
    assert hitting_time(DoublingMap(p=0.5), third, SpacePoint.of(F(2, 3)), F(1, 100), 10) == 1
    cat = CatMap()
    assert hitting_time(cat, SpacePoint.of(0, 0), SpacePoint.of(F(1, 2), F(1, 2)),
                        F(1, 2) - F(1, 1 << 30), 100) is None


def test_step_zero_never_counts():
    # x sits in its own ball, but the period-4 orbit only returns at n = 4
    x = SpacePoint.of(F(1, 8))
    assert hitting_time(QUARTER, x, x, F(1, 16), 100) == 4


def test_full_space_ball():
    rot = Rotation(spec=golden_rotation(12))
    x = SpacePoint.of(F(1, 3))
    assert hitting_time(rot, x, x, F(3, 4), 10) == 1
    # open ball of radius 1/2 misses only the antipode
    prof = hit_profile(rot, x, SpacePoint.of(F(1, 5)), DyadicSchedule(1, 4), 1000)
    assert prof.records[0].tau == 1


def test_golden_recurrence_matches_naive_scan():
    rot = Rotation(spec=RotationSpec.from_fraction(F(55, 89)))
    sched = DyadicSchedule(1, 6)
    x = SpacePoint.of(0)
    prof = hit_profile(rot, x, None, sched, 200, mode="recurrence")
    assert prof.taus == naive_profile(rot, x, x, sched.ks, 200)
    # returns come at denominators of the convergents of 55/89
    assert set(prof.taus) <= {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}


def _random_configs(n):
    rng = np.random.default_rng(2024)
    systems = [Rotation(spec=golden_rotation(15)), IET(spec=random_iet(4, 3)),
               DoublingMap(p=0.5), DoublingMap(p=0.3), CatMap()]
    for i in range(n):
        system = systems[i % len(systems)]
        s = system.sample_states(rng, 2)
        k_min = int(rng.integers(1, 5))
        yield system, system.point_from_state(s[0]), system.point_from_state(s[1]), \
            DyadicSchedule(k_min, k_min + int(rng.integers(3, 9)))


@pytest.mark.parametrize("case", range(4))
def test_single_pass_equals_naive_scan(case):
    for system, x, y, sched in list(_random_configs(100))[case::4]:
        prof = hit_profile(system, x, y, sched, 10_000)
        assert prof.taus == naive_profile(system, x, y, sched.ks, 10_000)


def test_batch_equals_single():
    system = DoublingMap(p=0.4)
    rng = np.random.default_rng(8)
    xs, ys = system.sample_states(rng, 30), system.sample_states(rng, 30)
    sched = DyadicSchedule(3, 10)
    taus = hit_profiles(system, xs, batch_targets(system, ys), sched, 10 ** 5)
    for row, x, y in zip(taus, xs, ys):
        prof = hit_profile(system, system.point_from_state(x), system.point_from_state(y),
                           sched, 10 ** 5)
        assert [t or None for t in row.tolist()] == prof.taus


def test_taus_nondecreasing_in_k():
    system = CatMap()
    rng = np.random.default_rng(3)
    xs, ys = system.sample_states(rng, 50), system.sample_states(rng, 50)
    taus = hit_profiles(system, xs, batch_targets(system, ys), DyadicSchedule(1, 8), 10 ** 6)
    for row in taus:
        hit = [t for t in row if t]
        assert hit == sorted(hit)


@pytest.mark.parametrize("base, slope", [(2, 1.0), (4, 2.0)])
def test_estimate_R_power_law(base, slope):
    ks = list(range(4, 12))
    e = estimate_R((ks, [base ** k for k in ks]))
    assert e.slope_ols == pytest.approx(slope, abs=1e-12)
    assert e.slope_tail_min == e.slope_tail_max == pytest.approx(slope)


def test_estimate_R_censoring():
    ks = [4, 5, 6, 7, 8, 9]
    e = estimate_R((ks, [16, 32, None, 128, None, 512]))
    assert e.n_censored == 2
    with pytest.raises(InsufficientDataError):
        estimate_R((ks, [16, None, None, None, 256]))


def test_estimate_R_doubling_near_one():
    system = DoublingMap(p=0.5)
    rng = np.random.default_rng(17)
    xs, ys = system.sample_states(rng, 40), system.sample_states(rng, 40)
    sched = DyadicSchedule(4, 14)
    taus = hit_profiles(system, xs, batch_targets(system, ys), sched, 10 ** 7)
    slopes = [estimate_R((sched.ks, row.tolist())).slope_ols for row in taus]
    assert abs(np.median(slopes) - 1.0) < 0.15


def test_shift_and_power_identities():
    rng = np.random.default_rng(6)
    for system in (IET(spec=random_iet(4, 9)), DoublingMap(p=0.5), CatMap()):
        for _ in range(100):
            s = system.sample_states(rng, 2)
            x, y = system.point_from_state(s[0]), system.point_from_state(s[1])
            r = F(1, 1 << int(rng.integers(2, 6)))
            tau = hitting_time(system, x, y, r, 10 ** 5)
            if tau is not None and tau >= 2:
                assert hitting_time(system, system.apply(x), y, r, 10 ** 5) == tau - 1
            for m in (2, 3):
                tm = hitting_time(system.iterate(m), x, y, r, 10 ** 5)
                if tm is not None:
                    assert hitting_time(system, x, y, r, m * 10 ** 5) <= m * tm


def test_hit_profile_record_fields():
    prof = hit_profile(QUARTER, SpacePoint.of(0), SpacePoint.of(F(1, 3)), DyadicSchedule(2, 5), 50)
    assert isinstance(prof, HitProfile) and prof.mode == "hitting"
    # 1/3 is at distance 1/12 from the orbit {0, 1/4, 1/2, 3/4}
    assert prof.taus == [1, 1, None, None] and prof.n_censored == 2
    assert prof.records[2].censored and prof.records[2].n_max == 50


def test_survival_examples():
    rot = Rotation(spec=golden_rotation(12))
    x = SpacePoint.of(F(1, 3))
    assert survival_measure(rot, x, F(3, 4), 5, 1000, 1) == 0.0
    s = survival_measure(rot, x, F(1, 8), 0, 10_000, 2)
    assert abs(s - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / 10_000)
    dbl = DoublingMap(p=0.5)
    y = dbl.sample(np.random.default_rng(0))
    assert survival_measure(dbl, y, F(1, 32), 512, 10_000, 3) <= 0.01
    with pytest.raises(ValueError):
        survival_measure(rot, x, F(1, 8), 3, 50, 0)


def test_summability_horizons():
    dbl = DoublingMap(p=0.5)
    y = dbl.sample(np.random.default_rng(1))
    rows = summability_diagnostic(dbl, y, DyadicSchedule(4, 7), 0.2, 1000, 5)
    # ball measure 2^(1-n): horizon ceil(2^((n-1) * 1.2))
    assert [r.horizon for r in rows] == [13, 28, 64, 148]
    assert all(0 <= r.survival <= 1 for r in rows)
    assert rows[-1].partial_sum == pytest.approx(sum(r.survival for r in rows))
    capped = summability_diagnostic(dbl, y, DyadicSchedule(4, 7), 0.2, 1000, 5, horizon_cap=100)
    assert [r.flag for r in capped] == ["", "", "", "HORIZON_CAPPED"]

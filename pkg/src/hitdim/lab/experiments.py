"""Experiment registry: each kind composes the library operations into a check.

Per-trial problems (censoring, pole hits, degenerate IETs) are recorded as
flags on the trial instead of aborting the run.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from ..birkhoff import birkhoff_traces, growth_exponent, sandwich_check
from ..dimension import estimate_local_dimension
from ..hitting import batch_targets, estimate_R, hit_profiles, hitting_time
from ..metric import (ONE, DyadicSchedule, InsufficientDataError, ScalingEstimate,
                      SpacePoint, to_fixed)
from ..systems import IET, delta_gap_profile, random_iet
from .config import ExperimentConfig, build_system
from .lemma2 import lemma2_table
from .report import ExperimentReport, clean, median_iqr, observation

REGISTRY = {}


def experiment(kind):
    def register(fn):
        REGISTRY[kind] = fn
        return fn
    return register


def trial_rngs(seed: int, n: int, salt: int = 0) -> list[np.random.Generator]:
    """Independent generators for trials 0..n-1 (seed-splitting contract)."""
    children = np.random.SeedSequence([seed, salt]).spawn(n)
    return [np.random.default_rng(c) for c in children]


def _sample_pairs(system, rngs):
    xs = np.zeros((len(rngs), 3), dtype=np.uint64)
    ys = np.zeros((len(rngs), 3), dtype=np.uint64)
    for i, rng in enumerate(rngs):
        s = system.sample_states(rng, 2)
        xs[i], ys[i] = s[0], s[1]
    return xs, ys


def _verdict(passed, value, bound, rule):
    return {"passed": bool(passed), "value": clean(value), "bound": bound, "rule": rule}


def _median(values):
    vals = [v for v in values if v is not None]
    return float(np.median(vals)) if vals else math.nan


def _estimate_fields(est: ScalingEstimate | None, prefix: str) -> dict:
    if est is None:
        return {f"{prefix}_ols": None, f"{prefix}_lower": None, f"{prefix}_upper": None}
    return {f"{prefix}_ols": est.slope_ols, f"{prefix}_lower": est.slope_tail_min,
            f"{prefix}_upper": est.slope_tail_max}


def _profile_trial(cfg, trial, system, ks, taus, mode):
    """Estimate R from one row of hit times and build its observation rows."""
    flag = ""
    try:
        est = estimate_R((ks, [int(t) for t in taus]), cfg.tail_fraction)
    except InsufficientDataError:
        est, flag = None, "INSUFFICIENT"
    n_cens = int(sum(1 for t in taus if t == 0))
    if n_cens and not flag:
        flag = "CENSORED"
    obs = [observation(cfg.kind, trial, system.name, mode, k, 2.0 ** -k,
                       int(t) if t else None, t == 0, "log2_tau_over_k",
                       math.log2(t) / k if t else None, "CENSORED" if t == 0 else "")
           for k, t in zip(ks, taus)]
    fields = _estimate_fields(est, "R")
    fields["n_censored"] = n_cens
    return fields, obs, flag


def _summarize(trials, keys, by_system=True):
    groups = {}
    for t in trials:
        groups.setdefault(t["system"] if by_system else "all", []).append(t)
    out = {}
    for name, ts in groups.items():
        out[name] = {key: median_iqr([t["estimates"].get(key) for t in ts]) for key in keys}
        out[name]["n_trials"] = len(ts)
        out[name]["n_flagged"] = sum(1 for t in ts if t["flag"])
    return out


def _reference_dimension(cfg, system):
    return float(cfg.params.get("reference_dimension", system.measure.dimension))


# --------------------------------------------------------------------------


@experiment("theorem2")
def run_theorem2(cfg: ExperimentConfig, rep: ExperimentReport):
    """Hitting indicator vs local dimension (hitting mode) or recurrence bound."""
    system = build_system(cfg.systems[0])
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    mode = cfg.params.get("mode", "hitting")
    xs, ys = _sample_pairs(system, trial_rngs(cfg.seed, cfg.trials))
    centers = xs if mode == "recurrence" else ys
    taus = hit_profiles(system, xs, batch_targets(system, centers), sched, cfg.n_max)
    for i in range(cfg.trials):
        fields, obs, flag = _profile_trial(cfg, i, system, sched.ks, taus[i], mode)
        y = system.point_from_state(centers[i])
        dim = estimate_local_dimension(system.measure, y, sched,
                                       tail_fraction=cfg.tail_fraction, metric=system.metric)
        fields.update(d_ols=dim.scaling.slope_ols, d_lower=dim.d_lower, d_upper=dim.d_upper)
        for k, m in dim.measures:
            obs.append(observation(cfg.kind, i, system.name, "measure", k, 2.0 ** -k, m,
                                   False, "neg_log2_measure_over_k", -math.log2(m) / k))
        rep.trials.append({"trial": i, "system": system.name, "flag": flag,
                           "estimates": {k: clean(v) for k, v in fields.items()},
                           "observations": obs})
    est = [t["estimates"] for t in rep.trials]
    rep.summary = _summarize(rep.trials, ["R_ols", "R_lower", "R_upper", "d_lower", "d_upper"])
    tol = cfg.tolerances
    if mode == "recurrence":
        ref = _reference_dimension(cfg, system)
        med = _median([e["R_upper"] for e in est])
        bound = ref + tol.get("median", 0.15)
        rep.verdicts["recurrence_upper_bound"] = _verdict(
            med <= bound, med, bound, "median(R_upper) <= d + tol")
        return
    med_r = _median([e["R_lower"] for e in est])
    med_d = _median([e["d_lower"] for e in est])
    bound = med_d - tol.get("median", 0.15)
    rep.verdicts["median_lower_bound"] = _verdict(
        med_r >= bound, med_r, bound, "median(R_lower) >= d_lower - tol")
    ok = [e["R_lower"] is not None and e["R_lower"] >= e["d_lower"] - tol.get("trial", 0.3)
          for e in est]
    frac = float(np.mean(ok))
    need = tol.get("trial_fraction", 0.95)
    rep.verdicts["trial_lower_bound"] = _verdict(
        frac >= need, frac, need, "fraction(R_lower >= d_lower - trial_tol) >= trial_fraction")


@experiment("theorem3")
def run_theorem3(cfg: ExperimentConfig, rep: ExperimentReport):
    """Equality of hitting indicator and dimension for hyperbolic systems."""
    system = build_system(cfg.systems[0])
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    xs, ys = _sample_pairs(system, trial_rngs(cfg.seed, cfg.trials))
    taus = hit_profiles(system, xs, batch_targets(system, ys), sched, cfg.n_max)
    for i in range(cfg.trials):
        fields, obs, flag = _profile_trial(cfg, i, system, sched.ks, taus[i], "hitting")
        y = system.point_from_state(ys[i])
        dim = estimate_local_dimension(system.measure, y, sched,
                                       tail_fraction=cfg.tail_fraction, metric=system.metric)
        fields.update(d_ols=dim.scaling.slope_ols, d_lower=dim.d_lower, d_upper=dim.d_upper)
        rep.trials.append({"trial": i, "system": system.name, "flag": flag,
                           "estimates": {k: clean(v) for k, v in fields.items()},
                           "observations": obs})
    est = [t["estimates"] for t in rep.trials]
    rep.summary = _summarize(rep.trials, ["R_ols", "R_lower", "R_upper", "d_ols"])
    d = _reference_dimension(cfg, system)
    rep.summary["reference_dimension"] = d
    rep.summary["measure"] = system.measure.kind
    tol = cfg.tolerances.get("median", 0.25)
    med = _median([e["R_ols"] for e in est])
    rep.verdicts["median_R_ols"] = _verdict(
        abs(med - d) <= tol, med, [d - tol, d + tol], "median(R_ols) within d +- tol")
    # per-target slopes scatter by ~0.3 at these scales, so the cross-check
    # uses one deterministic point with exact digit frequencies instead
    y0 = frequency_typical_point(system.measure, system.dim)
    k_lo, k_hi = cfg.params.get("crosscheck_schedule", [6, 20])
    dim0 = estimate_local_dimension(system.measure, y0, DyadicSchedule(k_lo, k_hi),
                                    tail_fraction=cfg.tail_fraction, metric=system.metric)
    dval = dim0.scaling.slope_ols
    rep.summary["crosscheck_dimension"] = {"point": list(y0.as_floats()), "d_ols": dval,
                                           "d_lower": dim0.d_lower, "d_upper": dim0.d_upper}
    dtol = cfg.tolerances.get("dimension", 0.05)
    rep.verdicts["dimension_crosscheck"] = _verdict(
        abs(dval - d) <= dtol, dval, [d - dtol, d + dtol],
        "analytic ball-measure slope at a frequency-typical point matches the closed form")


def frequency_typical_point(model, dim: int = 1) -> SpacePoint:
    """A point whose binary digits have exactly the model's limiting frequencies.

    For Bernoulli(p) the digits are the balanced (Beatty) sequence
    floor((i+1)p) - floor(ip); Lebesgue models get the golden-mean point.
    """
    if model.kind == "bernoulli":
        p = Fraction(model.p).limit_denominator(1 << 20)
        word = 0
        for i in range(64):
            word = (word << 1) | (math.floor((i + 1) * p) - math.floor(i * p))
        return SpacePoint((word,))
    g = to_fixed(Fraction(math.sqrt(5) - 1) / 2)
    return SpacePoint((g,) * dim)


def boshernitzan_proxy(spec, n_cap: int) -> tuple[float, float, bool]:
    """max over dyadic n <= n_cap of n * delta(n), the final delta, and degeneracy."""
    ns = [1 << j for j in range(int(math.log2(n_cap)) + 1)]
    prof = delta_gap_profile(spec, ns)
    best = max(float(n * g) for n, g in prof)
    last = prof[-1][1]
    return best, float(last), last == 0


@experiment("theorem4")
def run_theorem4(cfg: ExperimentConfig, rep: ExperimentReport):
    """Lower hitting indicator at IET discontinuities."""
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    p = cfg.params
    n_iets, d = int(p.get("n_iets", 20)), int(p.get("d", 4))
    n_cap = int(p.get("n_cap", 1 << 14))
    if "iet_seeds" in p:
        iet_seeds = [int(s) for s in p["iet_seeds"]]
    else:
        iet_seeds = np.random.SeedSequence([cfg.seed, 4]).generate_state(n_iets)
    trial = 0
    specs = []
    for j, s in enumerate(iet_seeds):
        spec = random_iet(d, int(s))
        system = IET(name=f"iet{j}", spec=spec)
        proxy, last_gap, degenerate = boshernitzan_proxy(spec, n_cap)
        specs.append({"system": system.name, "seed": int(s), "permutation": list(spec.permutation),
                      "lengths": [[x.numerator, x.denominator] for x in spec.lengths],
                      "boshernitzan_proxy": proxy, "delta_at_cap": last_gap,
                      "degenerate": degenerate})
        targets = spec.discontinuities("forward")
        rngs = trial_rngs(cfg.seed, cfg.trials * len(targets), salt=100 + j)
        xs = np.stack([system.sample_states(r, 1)[0] for r in rngs])
        tg = np.zeros((len(xs), 2), dtype=np.uint64)
        for t, x0 in enumerate(targets):
            tg[t * cfg.trials:(t + 1) * cfg.trials, 0] = to_fixed(x0)
        taus = hit_profiles(system, xs, tg, sched, cfg.n_max)
        for i in range(len(xs)):
            fields, obs, flag = _profile_trial(cfg, trial, system, sched.ks, taus[i], "hitting")
            if degenerate:
                flag = "DEGENERATE"
            fields["target"] = float(targets[i // cfg.trials])
            rep.trials.append({"trial": trial, "system": system.name, "flag": flag,
                               "estimates": {k: clean(v) for k, v in fields.items()},
                               "observations": obs})
            trial += 1
    counted = [t["estimates"]["R_lower"] for t in rep.trials
               if t["flag"] != "DEGENERATE" and t["estimates"]["R_lower"] is not None]
    rep.summary = {"pooled": {"R_lower": median_iqr(counted),
                              "R_upper_exploratory": median_iqr(
                                  [t["estimates"]["R_upper"] for t in rep.trials
                                   if t["flag"] != "DEGENERATE"])},
                   "iets": specs,
                   "n_degenerate": sum(s["degenerate"] for s in specs)}
    tol = cfg.tolerances.get("median", 0.2)
    med = _median(counted)
    rep.verdicts["pooled_median_R_lower"] = _verdict(
        abs(med - 1) <= tol, med, [1 - tol, 1 + tol], "pooled median(R_lower) within 1 +- tol")


@experiment("lemma1")
def run_lemma1(cfg: ExperimentConfig, rep: ExperimentReport):
    """Summability of survival-set measures; optional non-mixing contrast system."""
    from ..hitting import summability_diagnostic

    p = cfg.params
    eps = float(p.get("epsilon", 0.2))
    samples = int(p.get("sample_count", 10 ** 4))
    n0 = int(p.get("n0", 6))
    cap = int(p.get("horizon_cap", 10 ** 6))
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    tables = {}
    for si, desc in enumerate(cfg.systems[:2]):
        system = build_system(desc)
        rng = trial_rngs(cfg.seed, 1, salt=200 + si)[0]
        x = system.sample(rng)
        rows = summability_diagnostic(system, x, sched, eps, samples,
                                      int(rng.integers(2 ** 31)), horizon_cap=cap)
        obs = [observation(cfg.kind, si, system.name, "survival", r.n, 2.0 ** -r.n,
                           r.survival, False, "partial_sum", r.partial_sum, r.flag)
               for r in rows]
        tables[system.name] = rows
        rep.trials.append({"trial": si, "system": system.name,
                           "flag": ",".join(sorted({r.flag for r in rows if r.flag})),
                           "estimates": {"center": clean(x.as_floats()[0]),
                                         "horizons": [r.horizon for r in rows],
                                         "survival": [r.survival for r in rows],
                                         "partial_sums": [r.partial_sum for r in rows]},
                           "observations": obs})
    rep.summary = {"epsilon": eps, "sample_count": samples, "n0": n0}
    names = list(tables)
    rows = tables[names[0]]
    at_n0 = [r.partial_sum for r in rows if r.n <= n0]
    base = at_n0[-1] if at_n0 else 0.0
    increment = rows[-1].partial_sum - base
    tol = cfg.tolerances.get("increment", 1e-2)
    rep.verdicts["summable"] = _verdict(
        increment < tol, increment, tol, "partial sums grow by < tol beyond n0")
    if len(names) > 1:
        tail = [r.survival for r in tables[names[1]] if r.n > n0 and r.survival is not None]
        mean_tail = float(np.mean(tail)) if tail else math.nan
        floor = cfg.tolerances.get("nondecay_floor", 0.25)
        rep.verdicts["contrast_nondecaying"] = _verdict(
            mean_tail >= floor, mean_tail, floor,
            "contrast system: mean survival beyond n0 stays >= floor")


@experiment("lemma2")
def run_lemma2(cfg: ExperimentConfig, rep: ExperimentReport):
    """Grid sweep of the recursion bound; zero failures allowed."""
    ms = cfg.params.get("m_values", [round(0.1 * i, 1) for i in range(1, 10)])
    n_top = int(cfg.params.get("n_top", cfg.n_max))
    failures = 0
    worst = -math.inf
    for i, m in enumerate(ms):
        a, bound = lemma2_table(float(m), n_top)
        ok = a[2:] <= bound[2:]
        fails = int((~ok).sum())
        failures += fails
        worst = max(worst, float(np.max(a[2:] / bound[2:])))
        ns = sorted({1 << j for j in range(1, int(math.log2(n_top)) + 1)} | {n_top})
        obs = [observation(cfg.kind, i, f"m={m}", "lemma2", n, None, float(a[n]), False,
                           "bound", float(bound[n]), "" if a[n] <= bound[n] else "FAIL")
               for n in ns]
        rep.trials.append({"trial": i, "system": f"m={m}", "flag": "FAIL" if fails else "",
                           "estimates": {"m": float(m), "failures": fails,
                                         "max_ratio": float(np.max(a[2:] / bound[2:]))},
                           "observations": obs})
    rep.summary = {"cells": len(ms) * (n_top - 1), "failures": failures,
                   "max_ratio_a_over_bound": worst}
    rep.verdicts["bound_holds_everywhere"] = _verdict(
        failures == 0, failures, 0, "a_n <= bound for every (m, 2 <= n <= n_top)")


@experiment("birkhoff-sandwich")
def run_birkhoff(cfg: ExperimentConfig, rep: ExperimentReport):
    """Growth exponent of Birkhoff sums of a power-law pole."""
    system = build_system(cfg.systems[0])
    p = cfg.params
    alpha = float(p.get("alpha", 2.0))
    N = int(p.get("N", 1 << 24))
    pole = p.get("pole", "typical")
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    rngs = trial_rngs(cfg.seed, cfg.trials, salt=300)
    xs, poles = _sample_pairs(system, rngs)
    if pole == "discontinuity":
        discs = system.spec.discontinuities("forward")
        poles = np.zeros_like(xs)
        for i in range(cfg.trials):
            poles[i, 0] = to_fixed(discs[i % len(discs)])
    elif pole != "typical":
        raise ValueError(f"unknown pole placement {pole!r}")
    pole_targets = batch_targets(system, poles)
    traces = birkhoff_traces(system, xs, pole_targets, alpha, N)
    taus = hit_profiles(system, xs, pole_targets, sched, cfg.n_max)
    for i, tr in enumerate(traces):
        g = growth_exponent(tr, cfg.tail_fraction)
        fields = {"exponent_ols": g.slope_ols, "exponent_lower": g.slope_tail_min,
                  "exponent_upper": g.slope_tail_max, "pole_hits": tr.pole_hits}
        rfields, _, rflag = _profile_trial(cfg, i, system, sched.ks, taus[i], "hitting")
        fields.update(rfields)
        if alpha > 1 and rfields["R_lower"] and rfields["R_lower"] > 0:
            est = ScalingEstimate(rfields["R_ols"], rfields["R_lower"], rfields["R_upper"],
                                  cfg.tail_fraction, 0, 0)
            sw = sandwich_check(g, est, alpha, cfg.tolerances.get("band", 0.25))
            fields.update(sandwich_lower=sw.lower, sandwich_upper=sw.upper,
                          sandwich_pass=sw.passed)
        obs = [observation(cfg.kind, i, system.name, "birkhoff", j, None, s, False,
                           "log2_S_over_j", math.log2(s) / j, tr.flag)
               for j, s in enumerate(tr.sums) if j >= 1]
        rep.trials.append({"trial": i, "system": system.name, "flag": tr.flag or rflag,
                           "estimates": {k: clean(v) for k, v in fields.items()},
                           "observations": obs})
    est = [t["estimates"] for t in rep.trials]
    rep.summary = _summarize(rep.trials, ["exponent_ols", "exponent_upper", "R_lower", "R_upper"])
    sw = [e.get("sandwich_pass") for e in est if "sandwich_pass" in e]
    rep.summary["per_trial_sandwich_pass_fraction"] = float(np.mean(sw)) if sw else None
    med = _median([e["exponent_upper"] for e in est])
    if "band" in p:
        lo, hi = (float(v) for v in p["band"])
        rule = "median exponent within the configured band"
    else:
        R = float(p.get("reference_R", system.measure.dimension))
        ref = ScalingEstimate(R, R, R, cfg.tail_fraction, 0, 0)
        tol = cfg.tolerances.get("band", 0.25)
        sw_ref = sandwich_check(ScalingEstimate(med, med, med, 1.0, 0, 0), ref, alpha, tol)
        lo, hi = sw_ref.lower - tol, sw_ref.upper + tol
        rule = "alpha/R - tol <= median exponent <= alpha/R + 1 + tol"
    rep.verdicts["median_exponent_in_band"] = _verdict(lo <= med <= hi, med, [lo, hi], rule)


@experiment("prop1-identities")
def run_prop1(cfg: ExperimentConfig, rep: ExperimentReport):
    """Exact finite-time shift and power identities for hitting times."""
    powers = [int(m) for m in cfg.params.get("powers", [2, 3])]
    ks = list(range(cfg.k_min, cfg.k_max + 1))
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    shift_fail = power_fail = checked_shift = checked_power = 0
    holder_ok = holder_n = 0
    trial = 0
    for si, desc in enumerate(cfg.systems):
        system = build_system(desc)
        powered = {m: system.iterate(m) for m in powers}
        for rng in trial_rngs(cfg.seed, cfg.trials, salt=400 + si):
            s = system.sample_states(rng, 2)
            x, y = system.point_from_state(s[0]), system.point_from_state(s[1])
            k = int(rng.choice(ks))
            r = Fraction(1, 1 << k)
            tau = hitting_time(system, x, y, r, cfg.n_max)
            tau_shift = hitting_time(system, system.apply(x), y, r, cfg.n_max)
            flag = ""
            if tau is None:
                shift_ok = tau_shift is None or tau_shift == cfg.n_max
            elif tau >= 2:
                shift_ok = tau_shift == tau - 1
            else:
                shift_ok = True
            if tau != 1:
                checked_shift += 1
            if not shift_ok:
                shift_fail += 1
                flag = "SHIFT_FAIL"
            obs = [observation(cfg.kind, trial, system.name, "shift", k, float(r), tau,
                               tau is None, "tau_after_shift", tau_shift,
                               "" if shift_ok else "SHIFT_FAIL")]
            for m, sys_m in powered.items():
                tau_m = hitting_time(sys_m, x, y, r, cfg.n_max)
                tau_full = hitting_time(system, x, y, r, m * cfg.n_max)
                ok = tau_m is None or (tau_full is not None and tau_full <= m * tau_m)
                checked_power += tau_m is not None
                if not ok:
                    power_fail += 1
                    flag = flag or "POWER_FAIL"
                obs.append(observation(cfg.kind, trial, system.name, f"power{m}", k, float(r),
                                       tau_full, tau_full is None, f"tau_of_T^{m}", tau_m,
                                       "" if ok else "POWER_FAIL"))
            est = {"tau": tau, "tau_shift": tau_shift}
            # Hoelder-type inequality between indicators: asymptotic, so only a
            # non-contradiction fraction is reported
            if cfg.params.get("holder", True):
                row = hit_profiles(system, s[:1], batch_targets(system, s[1:]), sched,
                                   cfg.n_max)[0]
                ty = system.apply(y)
                ty_state = np.array([system.state(ty)], dtype=np.uint64)
                row_t = hit_profiles(system, s[:1], batch_targets(system, ty_state), sched,
                                     cfg.n_max)[0]
                try:
                    a = estimate_R((sched.ks, [int(t) for t in row]), cfg.tail_fraction)
                    b = estimate_R((sched.ks, [int(t) for t in row_t]), cfg.tail_fraction)
                    gap = a.slope_tail_max - b.slope_tail_max
                    est["holder_gap"] = gap
                    holder_n += 1
                    holder_ok += gap >= -cfg.tolerances.get("holder", 0.2)
                except InsufficientDataError:
                    pass
            rep.trials.append({"trial": trial, "system": system.name, "flag": flag,
                               "estimates": {k2: clean(v) for k2, v in est.items()},
                               "observations": obs})
            trial += 1
    rep.summary = {"shift_checked": checked_shift, "shift_failures": shift_fail,
                   "power_checked": checked_power, "power_failures": power_fail,
                   "holder_noncontradiction_fraction":
                       holder_ok / holder_n if holder_n else None}
    rep.verdicts["shift_identity"] = _verdict(shift_fail == 0, shift_fail, 0,
                                              "tau(Tx) == tau(x) - 1 whenever tau(x) >= 2")
    rep.verdicts["power_identity"] = _verdict(power_fail == 0, power_fail, 0,
                                              "tau_T <= m * tau_{T^m}")


@experiment("liouville-separation")
def run_liouville(cfg: ExperimentConfig, rep: ExperimentReport):
    """Upper hitting indicator of a Liouville-like rotation vs a badly approximable one."""
    sched = DyadicSchedule(cfg.k_min, cfg.k_max)
    meds = {}
    trial = 0
    for si, desc in enumerate(cfg.systems[:2]):
        system = build_system(desc)
        xs, ys = _sample_pairs(system, trial_rngs(cfg.seed, cfg.trials, salt=500 + si))
        taus = hit_profiles(system, xs, batch_targets(system, ys), sched, cfg.n_max)
        uppers = []
        for i in range(cfg.trials):
            fields, obs, flag = _profile_trial(cfg, trial, system, sched.ks, taus[i], "hitting")
            uppers.append(fields["R_upper"])
            rep.trials.append({"trial": trial, "system": system.name, "flag": flag,
                               "estimates": {k: clean(v) for k, v in fields.items()},
                               "observations": obs})
            trial += 1
        meds[si] = _median(uppers)
    rep.summary = _summarize(rep.trials, ["R_ols", "R_lower", "R_upper"])
    lo = cfg.tolerances.get("anomalous_min", 1.5)
    hi = cfg.tolerances.get("regular_max", 1.2)
    rep.verdicts["anomalous_median_R_upper"] = _verdict(
        meds[0] >= lo, meds[0], lo, "median(R_upper) of the Liouville-like rotation >= bound")
    if 1 in meds:
        rep.verdicts["regular_median_R_upper"] = _verdict(
            meds[1] <= hi, meds[1], hi, "median(R_upper) of the regular rotation <= bound")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    import numba

    numba.set_num_threads(max(1, min(cfg.threads, numba.config.NUMBA_NUM_THREADS)))
    rep = ExperimentReport(config=cfg.to_dict())
    start = time.perf_counter()
    REGISTRY[cfg.kind](cfg, rep)
    rep.duration_seconds = round(time.perf_counter() - start, 3)
    return rep

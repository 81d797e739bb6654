"""The twelve acceptance criteria, each at its stated tolerance.

Every test prints one ``C<n> PASS|FAIL ...`` line (also repeated in the
terminal summary).  Bands are written out literally here rather than read
back from the report verdicts.  Run alone with

    pytest tests/test_acceptance.py -v
"""

import time
from pathlib import Path

import numpy as np
import pytest

from hitdim.birkhoff import SingularObservable, birkhoff_trace
from hitdim.hitting import hit_profile
from hitdim.lab.config import load_config
from hitdim.lab.experiments import run_experiment
from hitdim.lab.lemma2 import lemma2_sequence

from .conftest import ACCEPTANCE_LINES
from .oracles import naive_birkhoff, naive_profile
from .test_hitting import _random_configs

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
_RUNS: dict[str, tuple] = {}


def run(name):
    """Run a shipped config once per session; returns (report, seconds)."""
    if name not in _RUNS:
        start = time.perf_counter()
        rep = run_experiment(load_config(CONFIGS / f"{name}.toml"))
        _RUNS[name] = (rep, time.perf_counter() - start)
    return _RUNS[name]


def report(capsys, tag, ok, detail):
    line = f"{tag} {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def med(rep, system, key):
    return rep.summary[system][key]["median"]


def test_c01_lemma2_bound(capsys):
    rep, secs = run("lemma2_grid")
    failures = rep.summary["failures"]
    # spot cells through the scalar evaluator
    spot = all(lemma2_sequence(m / 10, n)[2] for m in range(1, 10) for n in (2, 3, 10, 999))
    ok = failures == 0 and rep.summary["cells"] == 9 * 9999 and spot and secs < 1.0
    report(capsys, "C1", ok, f"lemma2 grid: {failures} failures over {rep.summary['cells']} "
                             f"cells, max a/bound {rep.summary['max_ratio_a_over_bound']:.3f} "
                             f"({secs:.2f} s < 1 s)")


def test_c02_prop1_identities(capsys):
    rep, secs = run("prop1_identities")
    s = rep.summary
    per_system = {t["system"] for t in rep.trials}
    ok = (s["shift_failures"] == 0 and s["power_failures"] == 0 and len(rep.trials) == 4000
          and len(per_system) == 4 and secs < 30)
    report(capsys, "C2", ok, f"shift failures {s['shift_failures']}/{s['shift_checked']}, "
                             f"power failures {s['power_failures']}/{s['power_checked']} "
                             f"on 4 x 1000 triples ({secs:.1f} s < 30 s)")


def test_c03_theorem2_lower_bound(capsys):
    rep, secs = run("theorem2_hitting")
    est = [t["estimates"] for t in rep.trials]
    r_lo = np.median([e["R_lower"] for e in est])
    d_lo = np.median([e["d_lower"] for e in est])
    frac = np.mean([e["R_lower"] is not None and e["R_lower"] >= e["d_lower"] - 0.3 for e in est])
    ok = len(est) == 100 and r_lo >= d_lo - 0.15 and frac >= 0.95 and secs < 300
    report(capsys, "C3", ok, f"doubling p=1/2: median R_lower {r_lo:.3f} vs >= "
                             f"{d_lo - 0.15:.3f}; trials within 0.3: {frac:.2f} vs >= 0.95 "
                             f"({secs:.1f} s)")


def test_c04_recurrence_upper_bound(capsys):
    rep, secs = run("theorem2_recurrence")
    m = np.median([t["estimates"]["R_upper"] for t in rep.trials])
    ok = len(rep.trials) == 100 and m <= 1.15 and secs < 300
    report(capsys, "C4", ok, f"recurrence median R_upper {m:.3f} vs <= 1.15 ({secs:.1f} s)")


def test_c05_theorem3_cat(capsys):
    rep, secs = run("theorem3_cat")
    m = np.median([t["estimates"]["R_ols"] for t in rep.trials])
    ok = len(rep.trials) == 50 and 1.75 <= m <= 2.25 and secs < 600
    report(capsys, "C5", ok, f"cat map median R_ols {m:.3f} in [1.75, 2.25] ({secs:.1f} s)")


def test_c06_theorem3_bernoulli(capsys):
    rep, secs = run("theorem3_bernoulli")
    m = np.median([t["estimates"]["R_ols"] for t in rep.trials])
    d = rep.summary["reference_dimension"]
    cross = rep.summary["crosscheck_dimension"]["d_ols"]
    ok = len(rep.trials) == 50 and 0.71 <= m <= 0.91 and abs(d - 0.8113) < 1e-4 \
        and abs(cross - d) <= 0.05
    report(capsys, "C6", ok, f"Bernoulli(1/4) median R_ols {m:.3f} in [0.71, 0.91]; entropy "
                             f"d {d:.4f}, digit-walk d {cross:.4f}")


def test_c07_theorem4_iet(capsys):
    rep, secs = run("theorem4_iet")
    pooled = rep.summary["pooled"]["R_lower"]
    ok = 0.8 <= pooled["median"] <= 1.2 and secs < 600
    report(capsys, "C7", ok, f"20 IETs, pooled median R_lower {pooled['median']:.3f} in "
                             f"[0.8, 1.2] over {pooled['n']} trials, "
                             f"{rep.summary['n_degenerate']} degenerate ({secs:.1f} s)")


def test_c08_liouville_separation(capsys):
    rep, _ = run("liouville_separation")
    lv = med(rep, "liouville", "R_upper")
    gd = med(rep, "golden", "R_upper")
    ok = lv >= 1.5 and gd <= 1.2
    report(capsys, "C8", ok, f"median R_upper: a_k = 10^k rotation {lv:.3f} vs >= 1.5, "
                             f"golden {gd:.3f} vs <= 1.2")


def test_c09_lemma1_summability(capsys):
    rep, _ = run("lemma1_summability")
    inc = rep.verdicts["summable"]["value"]
    tail = rep.verdicts["contrast_nondecaying"]["value"]
    ok = inc < 1e-2 and rep.verdicts["contrast_nondecaying"]["passed"]
    report(capsys, "C9", ok, f"doubling partial-sum increase beyond n=6: {inc:.4f} vs < 0.01; "
                             f"a_k = 10^k rotation mean survival beyond n=6: {tail:.3f} "
                             f"(non-decaying if >= 0.25)")


def test_c10_birkhoff_sandwich(capsys):
    bands = {"a": (1.75, 3.25), "b": (1.25, 2.75), "c": (1.25, 2.75), "d": (0.95, 1.05)}
    parts = []
    ok = True
    total = 0.0
    for tag, (lo, hi) in bands.items():
        rep, secs = run(f"birkhoff_{tag}")
        total += secs
        g = np.median([t["estimates"]["exponent_upper"] for t in rep.trials])
        ok &= lo <= g <= hi and len(rep.trials) == 20
        parts.append(f"({tag}) {g:.3f} in [{lo}, {hi}]")
    ok &= total < 600
    report(capsys, "C10", ok, "growth exponents " + ", ".join(parts) + f" ({total:.0f} s)")


def test_c11_oracle_equivalence(capsys):
    mismatches = 0
    for system, x, y, sched in _random_configs(100):
        mismatches += hit_profile(system, x, y, sched, 10_000).taus != \
            naive_profile(system, x, y, sched.ks, 10_000)
    from hitdim.systems import CatMap, DoublingMap
    worst = 0.0
    rng = np.random.default_rng(11)
    for system in (DoublingMap(p=0.5), CatMap()):
        x, x0 = system.sample(rng), system.sample(rng)
        tr = birkhoff_trace(system, x, SingularObservable(x0, 2.0), 1 << 12)
        for n, s in zip(tr.checkpoints, tr.sums):
            ref = naive_birkhoff(system, x, x0, 2.0, n)
            worst = max(worst, abs(s - ref) / ref)
    ok = mismatches == 0 and worst <= 1e-9
    report(capsys, "C11", ok, f"{mismatches} profile mismatches over 100 configs; "
                              f"worst Birkhoff relative error {worst:.1e} vs <= 1e-9")


def test_c12_determinism(capsys):
    differing = []
    names = sorted(p.stem for p in CONFIGS.glob("*.toml"))
    for name in names:
        first, _ = run(name)
        again = run_experiment(load_config(CONFIGS / f"{name}.toml"))
        if again.to_csv() != first.to_csv():
            differing.append(name)
    report(capsys, "C12", not differing, f"{len(names) - len(differing)}/{len(names)} configs "
                                         f"reproduce byte-identical CSV")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

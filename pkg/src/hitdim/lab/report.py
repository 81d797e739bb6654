"""Experiment reports and their CSV / JSON serializations."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_COLUMNS = ("experiment", "trial", "system", "kind", "k", "radius",
               "tau_or_measure", "censored", "estimate_kind", "value", "flag")


def observation(experiment, trial, system, kind, k, radius=None, tau_or_measure=None,
                censored=False, estimate_kind="", value=None, flag="") -> dict:
    return {
        "experiment": experiment, "trial": trial, "system": system, "kind": kind,
        "k": k, "radius": radius, "tau_or_measure": tau_or_measure,
        "censored": bool(censored), "estimate_kind": estimate_kind,
        "value": clean(value), "flag": flag,
    }


def clean(v):
    """JSON-safe scalar: numpy scalars unwrapped, non-finite floats become None."""
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def median_iqr(values) -> dict:
    vals = [v for v in values if v is not None and math.isfinite(v)]
    if not vals:
        return {"n": 0, "median": None, "q1": None, "q3": None, "iqr": None}
    q1, med, q3 = np.percentile(vals, [25, 50, 75])
    return {"n": len(vals), "median": float(med), "q1": float(q1), "q3": float(q3),
            "iqr": float(q3 - q1)}


@dataclass
class ExperimentReport:
    config: dict
    trials: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    duration_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts.values())

    def rows(self):
        for t in self.trials:
            yield from t.get("observations", [])

    def to_dict(self) -> dict:
        return {"config": self.config, "trials": self.trials, "summary": self.summary,
                "verdicts": self.verdicts, "duration_seconds": self.duration_seconds}

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentReport":
        return cls(doc["config"], doc["trials"], doc["summary"], doc["verdicts"],
                   doc["duration_seconds"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows():
            w.writerow(["" if row[c] is None else _fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    return repr(v) if isinstance(v, float) else str(v)


def emit_report(report: ExperimentReport, out_dir: str | Path, formats=("csv", "json"),
                stem: str | None = None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or report.config.get("name") or report.config.get("experiment", "report")
    paths = []
    for fmt in formats:
        path = out / f"{stem}.{fmt}"
        text = report.to_csv() if fmt == "csv" else report.to_json()
        path.write_text(text)
        paths.append(path)
    return paths

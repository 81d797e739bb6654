"""Experiment configuration: TOML documents with nested sections."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..systems import (IET, CatMap, DoublingMap, IETSpec, MapSystem, Rotation,
                       RotationSpec, golden_rotation, liouville_rotation, random_iet)

EXPERIMENT_KINDS = (
    "theorem2", "theorem3", "theorem4", "lemma1", "lemma2",
    "birkhoff-sandwich", "prop1-identities", "liouville-separation",
)


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    systems: list[dict] = field(default_factory=list)
    k_min: int = 4
    k_max: int = 14
    n_max: int = 10 ** 7
    trials: int = 100
    tail_fraction: float = 0.5
    tolerances: dict[str, float] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    out_dir: str = "reports"
    name: str = ""
    threads: int = 1

    def to_dict(self) -> dict:
        return {
            "experiment": self.kind, "name": self.name or self.kind, "seed": self.seed,
            "systems": self.systems, "schedule": {"k_min": self.k_min, "k_max": self.k_max},
            "n_max": self.n_max, "trials": self.trials, "tail_fraction": self.tail_fraction,
            "tolerances": self.tolerances, "params": self.params,
            "output": {"dir": self.out_dir}, "threads": self.threads,
        }


def _int(doc, key, errors, default=None, lo=None, hi=None):
    v = doc.get(key, default)
    if v is None:
        errors.append(f"{key}: required")
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        errors.append(f"{key}: expected an integer, got {v!r}")
        return None
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        errors.append(f"{key}: {v} outside [{lo}, {hi}]")
    return v


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a parsed document; every offending field is reported at once."""
    errors: list[str] = []
    kind = doc.get("experiment")
    if kind not in EXPERIMENT_KINDS:
        errors.append(f"experiment: must be one of {', '.join(EXPERIMENT_KINDS)}")
    seed = _int(doc, "seed", errors, lo=0)
    trials = _int(doc, "trials", errors, default=100, lo=1, hi=10 ** 6)
    n_max = _int(doc, "n_max", errors, default=10 ** 7, lo=1, hi=10 ** 9)
    threads = _int(doc, "threads", errors, default=1, lo=1, hi=1024)
    sched = doc.get("schedule", {})
    k_min = _int(sched, "k_min", errors, default=4, lo=1, hi=60)
    k_max = _int(sched, "k_max", errors, default=14, lo=1, hi=60)
    if k_min is not None and k_max is not None and k_max - k_min < 3:
        errors.append("schedule: k_max - k_min must be >= 3")
    tail = doc.get("tail_fraction", 0.5)
    if not isinstance(tail, (int, float)) or not 0 < tail <= 1:
        errors.append("tail_fraction: must lie in (0, 1]")

    systems = []
    if "system" in doc:
        systems.append(doc["system"])
    systems.extend(doc.get("systems", []))
    for i, desc in enumerate(systems):
        try:
            build_system(desc)
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(f"systems[{i}]: {exc}")
    if kind not in ("lemma2", None) and kind in EXPERIMENT_KINDS and not systems:
        if kind != "theorem4":
            errors.append("system: at least one system descriptor is required")

    tolerances = doc.get("tolerances", {})
    for key, val in tolerances.items():
        if not isinstance(val, (int, float)) or val < 0:
            errors.append(f"tolerances.{key}: must be a non-negative number")
    out = doc.get("output", {})
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        kind=kind, seed=seed, systems=systems, k_min=k_min, k_max=k_max,
        n_max=n_max, trials=trials, tail_fraction=float(tail),
        tolerances=dict(tolerances), params=dict(doc.get("params", {})),
        out_dir=str(out.get("dir", "reports")), name=str(doc.get("name", kind)),
        threads=threads,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from None
    return parse_config(doc)


def _fraction(v) -> Fraction:
    if isinstance(v, (list, tuple)):
        num, den = v
        return Fraction(int(num), int(den))
    return Fraction(str(v))


def build_system(desc: dict) -> MapSystem:
    """Construct a system from its config descriptor.

    kinds: ``rotation`` (``partial_quotients`` | ``alpha`` | ``family`` =
    golden/liouville), ``iet`` (``permutation`` + ``lengths`` as [num, den]
    pairs, or ``d`` + ``seed`` for a random one), ``doubling`` (``p``), ``cat``.
    """
    kind = desc.get("kind")
    name = desc.get("name", "")
    if kind == "rotation":
        if "partial_quotients" in desc:
            spec = RotationSpec(tuple(desc["partial_quotients"]))
        elif "alpha" in desc:
            spec = RotationSpec.from_fraction(_fraction(desc["alpha"]))
        elif desc.get("family") == "golden":
            spec = golden_rotation(int(desc.get("n_quotients", 20)))
        elif desc.get("family") == "liouville":
            spec = liouville_rotation(int(desc.get("n_quotients", 5)), int(desc.get("base", 10)))
        else:
            raise ValueError("rotation needs partial_quotients, alpha or family")
        return Rotation(name=name or f"rotation{spec.partial_quotients[:3]}", spec=spec)
    if kind == "iet":
        if "lengths" in desc:
            spec = IETSpec(tuple(desc["permutation"]),
                           tuple(_fraction(x) for x in desc["lengths"]))
        else:
            spec = random_iet(int(desc["d"]), int(desc["seed"]))
        return IET(name=name or f"iet{spec.d}", spec=spec)
    if kind == "doubling":
        p = float(_fraction(desc.get("p", 0.5)))
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        return DoublingMap(name=name or f"doubling(p={p})", p=p)
    if kind == "cat":
        return CatMap(name=name or "cat")
    raise ValueError(f"unknown system kind {kind!r}")

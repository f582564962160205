"""Run one experiment command against a parsed config and collect a manifest."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, rng
from .combinatorics import growth_function, sauer_shelah, vc_dimension
from .config import ExperimentConfig, fstr
from .constructors import singleton_witness_class
from .errors import ValidationError
from .lab import (
    EstimateReport,
    exact_bad_event_prob,
    exact_probability,
    monte_carlo_bad_event_prob,
    pac_sample_complexity,
    separation_witness_check,
    swapped_probability,
    witness_class_probability,
)
from .concepts import Target
from .measure import FiniteMeasure

COMMANDS = (
    "vcdim", "growth", "sauer-check", "prob-exact", "prob-mc", "bound-check",
    "exchange-check", "separation-check", "pac-m", "construct-dump",
)

GROWTH_COLUMNS = ("m", "growth", "sauer_bound")
SWEEP_COLUMNS = (
    "sweep", "value", "mode", "probability", "trials", "hits",
    "confidence_radius", "growth2m", "bound", "bound_satisfied",
)
EXCHANGE_COLUMNS = ("mask", "probability", "swapped_probability", "equal")


@dataclass
class RunManifest:
    command: str
    config_hash: str
    version: str
    seed: int
    results: dict
    timestamps: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    csv_columns: tuple[str, ...] | None = None
    csv_rows: list[dict] | None = None

    def report(self) -> dict:
        return {
            "tool": "ghostgap",
            "version": self.version,
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "results": self.results,
            "violations": self.violations,
            "timestamps": self.timestamps,
        }

    def report_json(self, indent: int | None = 2) -> str:
        separators = None if indent else (",", ":")
        return json.dumps(_jsonable(self.report()), sort_keys=True, indent=indent, separators=separators)

    def csv_text(self) -> str | None:
        if self.csv_columns is None:
            return None
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.csv_columns, lineterminator="\n")
        writer.writeheader()
        for row in self.csv_rows or []:
            writer.writerow({k: _cell(row.get(k)) for k in self.csv_columns})
        return buf.getvalue()


def strip_timestamps(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timestamps"}


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return fstr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, frozenset):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return fstr(value)
    if isinstance(value, (list, tuple)):
        return "".join(str(v) for v in value)
    return str(value)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def run_experiment(cfg: ExperimentConfig, command: str, threads: int = 1) -> RunManifest:
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}", field="command")
    started = _now()
    manifest = RunManifest(command, cfg.config_hash, __version__, cfg.seed, {})
    _HANDLERS[command](cfg, manifest, threads)
    manifest.timestamps = {"started": started, "finished": _now()}
    return manifest


def _growth_rows(cfg: ExperimentConfig, d: int, threads: int) -> list[dict]:
    klass = cfg.require_class()
    top = cfg.growth_m_max if cfg.growth_m_max is not None else min(8, len(cfg.domain))
    return [
        {"m": k, "growth": growth_function(klass, k, cfg.budget, threads), "sauer_bound": sauer_shelah(d, k)}
        for k in range(top + 1)
    ]


def _vcdim(cfg, man, threads):
    vc = vc_dimension(cfg.require_class(), cfg.vc_cap, cfg.budget)
    man.results = {"vc_dimension": vc.value, "saturated": vc.saturated, "class": cfg.klass.name}


def _growth(cfg, man, threads):
    vc = vc_dimension(cfg.require_class(), cfg.vc_cap, cfg.budget)
    rows = _growth_rows(cfg, vc.value, threads)
    man.results = {"vc_dimension": vc.value, "growth": rows}
    man.csv_columns, man.csv_rows = GROWTH_COLUMNS, rows


def _sauer_check(cfg, man, threads):
    _growth(cfg, man, threads)
    bad = [r["m"] for r in man.results["growth"] if r["growth"] > r["sauer_bound"]]
    man.results["holds"] = not bad
    man.violations += [f"growth({k}) exceeds the Sauer-Shelah bound" for k in bad]


def _estimate(cfg: ExperimentConfig, m: int, eps: Fraction, mode: str, threads: int) -> EstimateReport:
    klass = cfg.require_class()
    if mode == "exact":
        return exact_bad_event_prob(klass, cfg.target, cfg.measure, m, eps, cfg.budget)
    return monte_carlo_bad_event_prob(
        klass, cfg.target, cfg.measure, m, eps, cfg.trials, cfg.seed, cfg.ci_delta, threads, cfg.budget
    )


def _points(cfg: ExperimentConfig) -> list[tuple[int, Fraction]]:
    if cfg.sweep is None:
        return [(cfg.m, cfg.eps)]
    name, values = cfg.sweep
    return [(v, cfg.eps) if name == "m" else (cfg.m, v) for v in values]


def _prob(cfg, man, threads, mode):
    reports = []
    rows = []
    for m, eps in _points(cfg):
        rep = _estimate(cfg, m, eps, mode, threads)
        entry = rep.to_dict()
        if mode == "mc" and cfg.compare_exact:
            exact = exact_probability(cfg.klass, cfg.target, cfg.measure, m, eps, cfg.budget)
            diff = abs(rep.probability - float(exact))
            entry.update(exact_probability=fstr(exact), abs_difference=diff, within_radius=diff <= rep.confidence_radius)
        reports.append(entry)
        if cfg.sweep is not None:
            name = cfg.sweep[0]
            rows.append({"sweep": name, "value": m if name == "m" else eps, **rep.to_dict()})
    man.results = {"reports": reports} if cfg.sweep is not None else reports[0]
    if cfg.sweep is not None:
        man.csv_columns, man.csv_rows = SWEEP_COLUMNS, rows
    return reports


def _prob_exact(cfg, man, threads):
    _prob(cfg, man, threads, "exact")


def _prob_mc(cfg, man, threads):
    _prob(cfg, man, threads, "mc")


def _bound_check(cfg, man, threads):
    reports = _prob(cfg, man, threads, cfg.mode)
    for r in reports:
        if r["bound_satisfied"] is False and r["mode"] == "exact":
            man.violations.append(f"bound below exact probability at m={r['m']}, eps={r['eps']}")
    man.results = {"reports": reports, "dominated": not man.violations}


def _masks(cfg: ExperimentConfig) -> list[list[int]]:
    spec = cfg.exchange or {"random_masks": 10}
    if "masks" in spec:
        return spec["masks"]
    count = spec["random_masks"]
    if cfg.m == 0:
        return [[] for _ in range(count)]
    bits = rng.words(cfg.seed, np.arange(count), cfg.m) & np.uint64(1)
    return [[int(b) for b in row] for row in bits]


def _exchange_check(cfg, man, threads):
    klass = cfg.require_class()
    base = exact_probability(klass, cfg.target, cfg.measure, cfg.m, cfg.eps, cfg.budget)
    rows = []
    for mask in _masks(cfg):
        swapped = swapped_probability(klass, cfg.target, cfg.measure, cfg.m, cfg.eps, mask, cfg.budget)
        rows.append({"mask": mask, "probability": base, "swapped_probability": swapped, "equal": swapped == base})
    man.results = {"probability": base, "checks": rows, "all_equal": all(r["equal"] for r in rows)}
    man.violations += [f"swap mask {r['mask']} changed the probability" for r in rows if not r["equal"]]
    man.csv_columns, man.csv_rows = EXCHANGE_COLUMNS, rows


def _separation_check(cfg, man, threads):
    if cfg.separation is None:
        raise ValidationError("separation-check needs 'separation.support'", field="separation")
    support = [cfg.domain.point(i) for i in cfg.separation]
    ok = separation_witness_check(support, cfg.domain)
    klass = singleton_witness_class(cfg.domain, support)
    n = len(cfg.domain)
    prob = exact_probability(klass, Target.constant(0), FiniteMeasure.uniform(cfg.domain), 1, 1, cfg.budget)
    closed = witness_class_probability(len(support), n)
    man.results = {
        "support": cfg.separation,
        "domain_size": n,
        "check": ok,
        "uniform_probability": prob,
        "closed_form": closed,
        "closed_form_matches": prob == closed,
    }
    if not ok:
        man.violations.append("bad event differs from the witness pair set")
    if prob != closed:
        man.violations.append("uniform probability differs from a(n-1)/n^2")


def _pac_m(cfg, man, threads):
    if cfg.pac is None:
        raise ValidationError("pac-m needs a 'pac' entry", field="pac")
    d = cfg.pac["d"]
    if d is None:
        d = vc_dimension(cfg.require_class(), cfg.vc_cap, cfg.budget).value
    eps, delta = cfg.pac["eps"], cfg.pac["delta"]
    man.results = {"d": d, "eps": eps, "delta": delta, "sample_size": pac_sample_complexity(d, float(eps), float(delta))}


def _param_json(theta: Any) -> Any:
    if isinstance(theta, Fraction):
        return fstr(theta)
    if isinstance(theta, (tuple, list)):
        return [_param_json(t) for t in theta]
    if isinstance(theta, frozenset):
        return sorted(_param_json(t) for t in theta)
    return theta


def _construct_dump(cfg, man, threads):
    klass = cfg.require_class()
    man.results = {
        "name": klass.name,
        "domain": [p.id for p in cfg.domain],
        "params": [_param_json(t) for t in klass.params],
        "table": [[int(v) for v in row] for row in klass.table],
        "distinct_concepts": len(klass.concepts()),
    }


_HANDLERS = {
    "vcdim": _vcdim,
    "growth": _growth,
    "sauer-check": _sauer_check,
    "prob-exact": _prob_exact,
    "prob-mc": _prob_mc,
    "bound-check": _bound_check,
    "exchange-check": _exchange_check,
    "separation-check": _separation_check,
    "pac-m": _pac_m,
    "construct-dump": _construct_dump,
}


def write_outputs(manifest: RunManifest, out: str | Path | None, csv_path: str | Path | None) -> None:
    if out:
        Path(out).write_text(manifest.report_json() + "\n", encoding="utf-8")
    if csv_path:
        text = manifest.csv_text()
        if text is None:
            raise ValidationError(f"command {manifest.command} produces no CSV table", field="csv")
        Path(csv_path).write_text(text, encoding="utf-8")

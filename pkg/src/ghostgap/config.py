"""Experiment config: JSON schema, validation, canonical form and hashing.

Structural problems (bad JSON, wrong types, unknown keys) raise
:class:`ParseError`; semantic ones (eps <= 0, unresolved ids, mismatched
lengths) raise :class:`ValidationError`. Both name the offending field path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .budget import Budget, default_budget
from .concepts import ParamClass, Target, constant_class, interval_class, table_class, threshold_class
from .constructors import (
    amalg_class,
    interp_family,
    interp_fixed,
    patch_class,
    singleton_witness_class,
)
from .errors import ParseError, ValidationError
from .measure import DomainPoint, FiniteDomain, FiniteMeasure

TOP_KEYS = {
    "domain", "measure", "class", "target", "m", "eps", "mode", "trials", "seed", "ci_delta",
    "budget", "sweep", "growth_m_max", "vc_cap", "separation", "pac", "exchange", "compare_exact", "output",
}
FAMILIES = {"threshold", "interval", "singleton", "singleton_witness", "table", "constant"}
CONSTRUCTORS = {"patch", "interp_fixed", "interp_family", "amalg"}
MERGES = ("table", "left", "right", "xor")


def frac(text: Any, path: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError("expected a fraction string like '1/4' or an integer", field=path)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot read {text!r} as a fraction", field=path) from None


def fstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _obj(value: Any, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(value, dict):
        raise ParseError("expected an object", field=path)
    unknown = set(value) - allowed
    if unknown:
        raise ParseError(f"unknown key(s) {sorted(unknown)}", field=path)
    missing = set(required) - set(value)
    if missing:
        raise ParseError(f"missing key(s) {sorted(missing)}", field=path)
    return value


def _int(value: Any, path: str, lo: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", field=path)
    if lo is not None and value < lo:
        raise ValidationError(f"must be >= {lo}", field=path)
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected a list", field=path)
    return value


def _ids(value: Any, path: str) -> list[int]:
    return [_int(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path))]


def _scalar(value: Any, path: str):
    if isinstance(value, (list, dict)) or value is None:
        raise ParseError("projection tags must be strings or numbers", field=path)
    return value


# -- domain / measure -------------------------------------------------------


def parse_domain(spec: Any, path: str = "domain") -> tuple[FiniteDomain, dict]:
    spec = _obj(spec, path, {"points", "grid"})
    if len(spec) != 1:
        raise ParseError("give exactly one of 'points' or 'grid'", field=path)
    if "grid" in spec:
        g = _obj(spec["grid"], f"{path}.grid", {"lo", "hi", "n"}, {"lo", "hi", "n"})
        lo, hi = frac(g["lo"], f"{path}.grid.lo"), frac(g["hi"], f"{path}.grid.hi")
        n = _int(g["n"], f"{path}.grid.n", 1)
        return _wrap(lambda: FiniteDomain.grid(lo, hi, n), path), {"grid": {"lo": fstr(lo), "hi": fstr(hi), "n": n}}
    points, canon = [], []
    for i, p in enumerate(_list(spec["points"], f"{path}.points")):
        where = f"{path}.points[{i}]"
        if isinstance(p, dict):
            p = _obj(p, where, {"id", "coord"}, {"id"})
            pid = _int(p["id"], f"{where}.id")
            coord = frac(p["coord"], f"{where}.coord") if "coord" in p else None
        else:
            pid, coord = _int(p, where), None
        points.append(DomainPoint(pid, coord))
        canon.append({"id": pid} if coord is None else {"id": pid, "coord": fstr(coord)})
    return _wrap(lambda: FiniteDomain(tuple(points)), path), {"points": canon}


def parse_measure(spec: Any, domain: FiniteDomain, path: str = "measure") -> tuple[FiniteMeasure, Any]:
    if spec == "uniform":
        return FiniteMeasure.uniform(domain), "uniform"
    if not isinstance(spec, list):
        raise ParseError("expected 'uniform' or a list of fraction strings", field=path)
    weights = [frac(w, f"{path}[{i}]") for i, w in enumerate(spec)]
    return _wrap(lambda: FiniteMeasure(domain, tuple(weights)), path), [fstr(w) for w in weights]


def _wrap(build, path: str):
    """Run ``build``, attaching ``path`` to validation errors that lack a field."""
    try:
        return build()
    except ValidationError as exc:
        if exc.field is None:
            raise type(exc)(str(exc), field=path) from None
        raise


# -- class expressions --------------------------------------------------------


def parse_class(expr: Any, domain: FiniteDomain, path: str = "class") -> tuple[ParamClass, dict]:
    """Build a class from a (possibly nested) expression and return it with its canonical form."""
    if not isinstance(expr, dict) or len(expr) != 1:
        raise ParseError("class expression must be an object with exactly one key", field=path)
    (kind, body), = expr.items()
    here = f"{path}.{kind}"
    if kind not in FAMILIES | CONSTRUCTORS:
        raise ParseError(f"unknown class kind {kind!r}", field=path)

    if kind in ("threshold", "interval"):
        _obj(body, here, set())
        build = threshold_class if kind == "threshold" else interval_class
        return build(domain), {kind: {}}
    if kind in ("singleton", "singleton_witness"):
        body = _obj(body, here, {"support"}, {"support"})
        ids = _ids(body["support"], f"{here}.support")
        support = _wrap(lambda: [domain.point(i) for i in ids], f"{here}.support")
        return singleton_witness_class(domain, support), {kind: {"support": sorted(set(ids))}}
    if kind == "constant":
        value = _int(body, here)
        if value not in (0, 1):
            raise ValidationError("constant class must be 0 or 1", field=here)
        return constant_class(domain, value), {kind: value}
    if kind == "table":
        body = _obj(body, here, {"rows"}, {"rows"})
        rows = [_ids(r, f"{here}.rows[{i}]") for i, r in enumerate(_list(body["rows"], f"{here}.rows"))]
        if not rows:
            raise ValidationError("table needs at least one row", field=f"{here}.rows")
        return _wrap(lambda: table_class(domain, rows), here), {kind: {"rows": rows}}

    if kind == "patch":
        body = _obj(body, here, {"left", "right", "router"}, {"left", "right", "router"})
        left, lc = parse_class(body["left"], domain, f"{here}.left")
        right, rc = parse_class(body["right"], domain, f"{here}.right")
        router, oc = parse_class(body["router"], domain, f"{here}.router")
        return patch_class(left, right, router), {kind: {"left": lc, "right": rc, "router": oc}}
    if kind == "interp_fixed":
        body = _obj(body, here, {"left", "right", "region"}, {"left", "right", "region"})
        left, lc = parse_class(body["left"], domain, f"{here}.left")
        right, rc = parse_class(body["right"], domain, f"{here}.right")
        ids = _ids(body["region"], f"{here}.region")
        region = _wrap(lambda: domain.subset(ids), f"{here}.region")
        return interp_fixed(left, right, region), {kind: {"left": lc, "right": rc, "region": sorted(set(ids))}}
    if kind == "interp_family":
        body = _obj(body, here, {"left", "right", "regions"}, {"left", "right", "regions"})
        left, lc = parse_class(body["left"], domain, f"{here}.left")
        right, rc = parse_class(body["right"], domain, f"{here}.right")
        raw = _list(body["regions"], f"{here}.regions")
        id_lists = [_ids(r, f"{here}.regions[{i}]") for i, r in enumerate(raw)]
        regions = [_wrap(lambda ids=ids: domain.subset(ids), f"{here}.regions") for ids in id_lists]
        klass = _wrap(lambda: interp_family(left, right, regions), f"{here}.regions")
        return klass, {kind: {"left": lc, "right": rc, "regions": [sorted(set(r)) for r in id_lists]}}

    # amalg
    body = _obj(body, here, {"left", "right", "pi1", "pi2", "merge", "merge_table"}, {"left", "right", "pi1", "pi2", "merge"})
    left, lc = parse_class(body["left"], domain, f"{here}.left")
    right, rc = parse_class(body["right"], domain, f"{here}.right")
    pi1 = [_scalar(t, f"{here}.pi1[{i}]") for i, t in enumerate(_list(body["pi1"], f"{here}.pi1"))]
    pi2 = [_scalar(t, f"{here}.pi2[{i}]") for i, t in enumerate(_list(body["pi2"], f"{here}.pi2"))]
    if len(pi1) != len(left):
        raise ValidationError(f"{len(pi1)} tags for {len(left)} left parameters", field=f"{here}.pi1")
    if len(pi2) != len(right):
        raise ValidationError(f"{len(pi2)} tags for {len(right)} right parameters", field=f"{here}.pi2")
    merge = body["merge"]
    if merge not in MERGES:
        raise ParseError(f"merge must be one of {list(MERGES)}", field=f"{here}.merge")
    canon = {"left": lc, "right": rc, "pi1": pi1, "pi2": pi2, "merge": merge}
    if merge == "table":
        if "merge_table" not in body:
            raise ParseError("merge 'table' needs merge_table", field=here)
        table = _merge_table(body["merge_table"], len(left), len(right), len(domain), f"{here}.merge_table")
        canon["merge_table"] = table
        pos = {p.id: k for k, p in enumerate(domain.points)}
        fn = lambda i, j, x: table[i][j][pos[x.id]]  # noqa: E731
    else:
        if "merge_table" in body:
            raise ParseError("merge_table is only allowed with merge 'table'", field=f"{here}.merge_table")
        fn = {
            "left": lambda i, j, x: left.evaluate(i, x),
            "right": lambda i, j, x: right.evaluate(j, x),
            "xor": lambda i, j, x: left.evaluate(i, x) ^ right.evaluate(j, x),
        }[merge]
    # parameters are index pairs so that duplicate parameter values stay distinct
    klass = _wrap(
        lambda: amalg_class(range(len(left)), range(len(right)), pi1, pi2, fn, domain, f"amalg[{merge}]({left.name},{right.name})"),
        here,
    )
    return klass, {kind: canon}


def _merge_table(value: Any, n1: int, n2: int, n: int, path: str) -> list:
    rows = _list(value, path)
    if len(rows) != n1 or any(not isinstance(r, list) or len(r) != n2 for r in rows):
        raise ValidationError(f"merge_table must be {n1} x {n2} x {n}", field=path)
    out = []
    for i, r in enumerate(rows):
        out.append([])
        for j, labels in enumerate(r):
            labels = _ids(labels, f"{path}[{i}][{j}]")
            if len(labels) != n or any(v not in (0, 1) for v in labels):
                raise ValidationError(f"merge_table must be {n1} x {n2} x {n} of 0/1", field=f"{path}[{i}][{j}]")
            out[-1].append(labels)
    return out


def parse_target(spec: Any, klass: ParamClass | None, domain: FiniteDomain, path: str = "target") -> tuple[Target, dict]:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ParseError("target must be one of {param|table|constant}", field=path)
    (kind, value), = spec.items()
    if kind == "constant":
        v = _int(value, f"{path}.constant")
        return _wrap(lambda: Target.constant(v), path), {kind: v}
    if kind == "table":
        labels = _ids(value, f"{path}.table")
        return _wrap(lambda: Target.from_table(domain, labels), path), {kind: labels}
    if kind == "param":
        idx = _int(value, f"{path}.param")
        if klass is None:
            raise ValidationError("a parameter target needs a class", field=path)
        return _wrap(lambda: Target.from_param(klass, idx), path), {kind: idx}
    raise ParseError(f"unknown target kind {kind!r}", field=path)


# -- whole config -------------------------------------------------------------


@dataclass
class ExperimentConfig:
    canonical: dict
    domain: FiniteDomain
    measure: FiniteMeasure
    klass: ParamClass | None
    target: Target
    m: int
    eps: Fraction
    mode: str
    trials: int
    seed: int
    ci_delta: Fraction
    budget: Budget
    sweep: tuple[str, list] | None = None
    growth_m_max: int | None = None
    vc_cap: int | None = None
    separation: list[int] | None = None
    pac: dict | None = None
    exchange: dict | None = None
    compare_exact: bool = False
    output: dict = field(default_factory=dict)

    def serialize(self) -> str:
        return serialize(self.canonical)

    @property
    def config_hash(self) -> str:
        return config_hash(self.canonical)

    def require_class(self) -> ParamClass:
        if self.klass is None:
            raise ValidationError("this command needs a 'class' entry", field="class")
        return self.klass


def serialize(canonical: dict) -> str:
    return json.dumps(canonical, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(canonical: dict) -> str:
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object", line=1)
    return doc


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and fully validate a config document.

    ``overrides`` replaces top-level keys (CLI ``--seed``/``--trials``) before
    validation, so they are reflected in the canonical form and hash.
    """
    doc = load_json(text)
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(doc)


def build_config(doc: dict) -> ExperimentConfig:
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ParseError(f"unknown key(s) {sorted(unknown)}", field="<top>")
    if "domain" not in doc:
        raise ParseError("missing key 'domain'", field="<top>")
    canon: dict[str, Any] = {}

    budget = default_budget()
    if "budget" in doc:
        b = _obj(doc["budget"], "budget", set(Budget.field_names()))
        budget = budget.replace(**{k: _int(v, f"budget.{k}", 0) for k, v in b.items()})
        canon["budget"] = {k: _int(v, f"budget.{k}") for k, v in b.items()}

    domain, canon["domain"] = parse_domain(doc["domain"])
    measure, canon["measure"] = parse_measure(doc.get("measure", "uniform"), domain)

    klass = None
    if "class" in doc:
        try:
            klass, canon["class"] = parse_class(doc["class"], domain)
        except RecursionError:
            raise ParseError("class expression nested too deeply", field="class") from None
        _wrap(lambda: klass.table, "class")

    target, canon["target"] = parse_target(doc.get("target", {"constant": 0}), klass, domain)
    if klass is not None:
        target.check(klass)

    m = _int(doc.get("m", 1), "m", 0)
    eps = frac(doc.get("eps", "1"), "eps")
    if eps <= 0:
        raise ValidationError("eps must be positive", field="eps")
    mode = doc.get("mode", "exact")
    if mode not in ("exact", "mc"):
        raise ParseError("mode must be 'exact' or 'mc'", field="mode")
    trials = _int(doc.get("trials", 100000), "trials", 1)
    seed = _int(doc.get("seed", 0), "seed", 0)
    if seed >= 2**64:
        raise ValidationError("seed must fit in 64 bits", field="seed")
    ci_delta = frac(doc.get("ci_delta", "1/1000"), "ci_delta")
    if not 0 < ci_delta < 1:
        raise ValidationError("ci_delta must lie in (0, 1)", field="ci_delta")
    canon.update(m=m, eps=fstr(eps), mode=mode, trials=trials, seed=seed, ci_delta=fstr(ci_delta))

    cfg = ExperimentConfig(canon, domain, measure, klass, target, m, eps, mode, trials, seed, ci_delta, budget)

    if "sweep" in doc:
        s = _obj(doc["sweep"], "sweep", {"eps", "m"})
        if len(s) != 1:
            raise ParseError("sweep takes exactly one of 'eps' or 'm'", field="sweep")
        if "eps" in s:
            values = [frac(v, f"sweep.eps[{i}]") for i, v in enumerate(_list(s["eps"], "sweep.eps"))]
            if any(v <= 0 for v in values):
                raise ValidationError("sweep eps values must be positive", field="sweep.eps")
            cfg.sweep = ("eps", values)
            canon["sweep"] = {"eps": [fstr(v) for v in values]}
        else:
            values = [_int(v, f"sweep.m[{i}]", 0) for i, v in enumerate(_list(s["m"], "sweep.m"))]
            cfg.sweep = ("m", values)
            canon["sweep"] = {"m": values}
    if "growth_m_max" in doc:
        cfg.growth_m_max = canon["growth_m_max"] = _int(doc["growth_m_max"], "growth_m_max", 0)
        if cfg.growth_m_max > len(domain):
            raise ValidationError(f"exceeds domain size {len(domain)}", field="growth_m_max")
    if "vc_cap" in doc:
        cfg.vc_cap = canon["vc_cap"] = _int(doc["vc_cap"], "vc_cap", 0)
    if "separation" in doc:
        sep = _obj(doc["separation"], "separation", {"support"}, {"support"})
        ids = _ids(sep["support"], "separation.support")
        _wrap(lambda: domain.subset(ids), "separation.support")
        cfg.separation = sorted(set(ids))
        canon["separation"] = {"support": cfg.separation}
    if "pac" in doc:
        p = _obj(doc["pac"], "pac", {"d", "eps", "delta"}, {"eps", "delta"})
        d = _int(p["d"], "pac.d", 0) if p.get("d") is not None else None
        pe, pd = frac(p["eps"], "pac.eps"), frac(p["delta"], "pac.delta")
        for name, v in (("eps", pe), ("delta", pd)):
            if not 0 < v < 1:
                raise ValidationError("must lie in (0, 1)", field=f"pac.{name}")
        cfg.pac = {"d": d, "eps": pe, "delta": pd}
        canon["pac"] = {"d": d, "eps": fstr(pe), "delta": fstr(pd)}
    if "exchange" in doc:
        ex = _obj(doc["exchange"], "exchange", {"masks", "random_masks"})
        if len(ex) != 1:
            raise ParseError("exchange takes exactly one of 'masks' or 'random_masks'", field="exchange")
        if "masks" in ex:
            masks = [_ids(mk, f"exchange.masks[{i}]") for i, mk in enumerate(_list(ex["masks"], "exchange.masks"))]
            for i, mk in enumerate(masks):
                if len(mk) != m or any(b not in (0, 1) for b in mk):
                    raise ValidationError(f"mask must be {m} bits of 0/1", field=f"exchange.masks[{i}]")
            cfg.exchange = canon["exchange"] = {"masks": masks}
        else:
            cfg.exchange = canon["exchange"] = {"random_masks": _int(ex["random_masks"], "exchange.random_masks", 1)}
    if "compare_exact" in doc:
        if not isinstance(doc["compare_exact"], bool):
            raise ParseError("expected true or false", field="compare_exact")
        cfg.compare_exact = canon["compare_exact"] = doc["compare_exact"]
    if "output" in doc:
        out = _obj(doc["output"], "output", {"report", "csv"})
        for k, v in out.items():
            if not isinstance(v, str):
                raise ParseError("expected a path string", field=f"output.{k}")
        cfg.output = canon["output"] = dict(out)
    return cfg

"""Parameterized concept classes, empirical error and the one-sided ghost gap.

A class is a finite parameter list plus a total evaluator ``(theta, x) -> {0, 1}``.
Gaps and thresholds are exact ``Fraction`` values throughout; ``eps`` is never
converted to float.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from .budget import Budget
from .errors import DomainMismatch, ValidationError
from .measure import DomainPoint, FiniteDomain, FiniteMeasure, Sample, SamplePair, enumerate_pairs

Evaluator = Callable[[Any, DomainPoint], int]


@dataclass(frozen=True, eq=False)
class ParamClass:
    """Concepts ``e(theta, .)`` for ``theta`` in ``params``.

    Distinct parameters may give the same concept; nothing deduplicates them.
    """

    params: tuple[Hashable, ...]
    evaluator: Evaluator
    domain: FiniteDomain
    name: str = "class"

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not self.params:
            raise ValidationError(f"class {self.name!r} has no parameters")

    def __len__(self) -> int:
        return len(self.params)

    def evaluate(self, theta: int, x: DomainPoint) -> int:
        return self.evaluator(self.params[theta], x)

    @cached_property
    def table(self) -> np.ndarray:
        """Label matrix, shape ``(len(params), len(domain))``, dtype uint8."""
        rows = np.zeros((len(self.params), len(self.domain)), dtype=np.uint8)
        for i, theta in enumerate(self.params):
            for j, x in enumerate(self.domain.points):
                v = self.evaluator(theta, x)
                if v not in (0, 1):
                    raise ValidationError(f"{self.name}: evaluator returned {v!r} at ({theta!r}, {x!r})")
                rows[i, j] = v
        rows.setflags(write=False)
        return rows

    def label(self, theta: int, x: DomainPoint) -> int:
        return int(self.table[theta, self.domain.position(x)])

    def concepts(self) -> set[tuple[int, ...]]:
        """The class as a set of label vectors over the domain."""
        return {tuple(int(v) for v in row) for row in self.table}


def table_class(domain: FiniteDomain, rows: Sequence[Sequence[int]], name: str = "table") -> ParamClass:
    """Explicit class: parameter ``i`` labels ``domain.points[j]`` with ``rows[i][j]``."""
    rows = tuple(tuple(int(v) for v in r) for r in rows)
    for r in rows:
        if len(r) != len(domain):
            raise ValidationError(f"table row has {len(r)} labels for {len(domain)} points", field="table")
        if any(v not in (0, 1) for v in r):
            raise ValidationError("table labels must be 0 or 1", field="table")
    pos = {p.id: j for j, p in enumerate(domain.points)}
    return ParamClass(tuple(range(len(rows))), lambda i, x: rows[i][pos[x.id]], domain, name)


def constant_class(domain: FiniteDomain, value: int) -> ParamClass:
    return ParamClass((value,), lambda b, x: b, domain, f"const{value}")


def _coord(x: DomainPoint) -> Fraction:
    return x.coord if x.coord is not None else Fraction(x.id)


def threshold_class(domain: FiniteDomain) -> ParamClass:
    """``1[x >= theta]`` with theta over the coords plus one value above them all."""
    coords = sorted(_coord(x) for x in domain)
    params = tuple(coords) + (coords[-1] + 1,)
    return ParamClass(params, lambda t, x: int(_coord(x) >= t), domain, "threshold")


def interval_class(domain: FiniteDomain) -> ParamClass:
    """``1[a <= x <= b]`` over grid endpoints a <= b, plus one empty interval."""
    coords = sorted(_coord(x) for x in domain)
    params = [(a, b) for i, a in enumerate(coords) for b in coords[i:]]
    top = coords[-1] + 1
    params.append((top, top))
    return ParamClass(tuple(params), lambda ab, x: int(ab[0] <= _coord(x) <= ab[1]), domain, "interval")


@dataclass(frozen=True)
class Target:
    labeler: Callable[[DomainPoint], int]
    realizable_ref: int | None = None

    def __call__(self, x: DomainPoint) -> int:
        return self.labeler(x)

    @classmethod
    def constant(cls, value: int) -> Target:
        if value not in (0, 1):
            raise ValidationError("constant target must be 0 or 1", field="target")
        return cls(lambda x: value)

    @classmethod
    def from_param(cls, klass: ParamClass, theta: int) -> Target:
        if not 0 <= theta < len(klass):
            raise ValidationError(f"parameter index {theta} out of range", field="target.param")
        return cls(lambda x: klass.evaluate(theta, x), realizable_ref=theta)

    @classmethod
    def from_table(cls, domain: FiniteDomain, labels: Sequence[int]) -> Target:
        if len(labels) != len(domain) or any(v not in (0, 1) for v in labels):
            raise ValidationError("target table needs one 0/1 label per point", field="target.table")
        by_id = {p.id: int(v) for p, v in zip(domain.points, labels)}
        return cls(lambda x: by_id[x.id])

    def vector(self, domain: FiniteDomain) -> np.ndarray:
        return np.array([self.labeler(x) for x in domain.points], dtype=np.uint8)

    def check(self, klass: ParamClass) -> None:
        """Raise unless the target is total and agrees with its realizable reference."""
        vec = self.vector(klass.domain)
        if not np.isin(vec, (0, 1)).all():
            raise ValidationError("target must label every point with 0 or 1", field="target")
        if self.realizable_ref is not None and not np.array_equal(vec, klass.table[self.realizable_ref]):
            raise ValidationError("target disagrees with its realizable reference", field="target")


def _check_sample(klass: ParamClass, sample: Sample) -> None:
    for x in sample:
        if x not in klass.domain:
            raise DomainMismatch(f"sample point {x!r} not in the domain of {klass.name}")


def empirical_error(klass: ParamClass, theta: int, c: Target, sample: Sample) -> Fraction:
    """Fraction of sample points where concept ``theta`` disagrees with ``c``; 0 on an empty sample."""
    _check_sample(klass, sample)
    m = len(sample)
    if m == 0:
        return Fraction(0)
    wrong = sum(1 for x in sample if klass.evaluate(theta, x) != c(x))
    return Fraction(wrong, m)


def ghost_gap(klass: ParamClass, theta: int, c: Target, pair: SamplePair) -> Fraction:
    return empirical_error(klass, theta, c, pair.ghost) - empirical_error(klass, theta, c, pair.train)


def _threshold(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive", field="eps")
    return eps / 2


def _check_length(pair: SamplePair, m: int) -> None:
    if pair.m != m:
        raise ValidationError(f"sample pair has length {pair.m}, expected m={m}")


def witness_contains(klass: ParamClass, theta: int, c: Target, m: int, eps, pair: SamplePair) -> bool:
    """``(theta, pair)`` is in the witness set: gap >= eps/2 (closed inequality)."""
    _check_length(pair, m)
    return ghost_gap(klass, theta, c, pair) >= _threshold(eps)


def bad_event_contains(klass: ParamClass, c: Target, m: int, eps, pair: SamplePair) -> bool:
    _check_length(pair, m)
    half = _threshold(eps)
    return any(ghost_gap(klass, i, c, pair) >= half for i in range(len(klass)))


def sup_gap(klass: ParamClass, c: Target, m: int, pair: SamplePair) -> Fraction:
    """Largest ghost gap over the parameter list; always attained."""
    _check_length(pair, m)
    return max(ghost_gap(klass, i, c, pair) for i in range(len(klass)))


def witness_set(
    klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, budget: Budget | None = None
) -> Iterator[tuple[int, SamplePair]]:
    """All ``(theta, pair)`` in the witness set, ``pair`` ranging over X^m x X^m."""
    half = _threshold(eps)
    for pair, _ in enumerate_pairs(mu, m, budget):
        for i in range(len(klass)):
            if ghost_gap(klass, i, c, pair) >= half:
                yield i, pair


def project_witnesses(witnesses: Iterable[tuple[int, SamplePair]]) -> set[SamplePair]:
    return {pair for _, pair in witnesses}


def error_matrix(klass: ParamClass, c: Target) -> np.ndarray:
    """``1[e_theta(x) != c(x)]`` as int8, shape ``(len(params), len(domain))``."""
    return (klass.table != c.vector(klass.domain)[None, :]).astype(np.int8)


def deduplicate(klass: ParamClass) -> ParamClass:
    """Keep the first parameter of each distinct concept."""
    seen: set[bytes] = set()
    keep = []
    for i, row in enumerate(klass.table):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(klass.params[i])
    return ParamClass(tuple(keep), klass.evaluator, klass.domain, f"dedup({klass.name})")

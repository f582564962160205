"""Brute-force VC combinatorics over a class's label table.

Labelings of k points are packed into one integer word (bit i = label of
point i) and collected with ``np.unique``. Subset scans count against the
budget's ``subset_cap`` and ``eval_cap``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .budget import Budget, default_budget
from .concepts import ParamClass
from .errors import BudgetExceeded, CapExceeded, ValidationError
from .measure import DomainPoint


@dataclass(frozen=True)
class DichotomySet:
    pointset: tuple[DomainPoint, ...]
    labelings: frozenset[int]

    def __len__(self) -> int:
        return len(self.labelings)

    def vectors(self) -> set[tuple[int, ...]]:
        k = len(self.pointset)
        return {tuple((w >> i) & 1 for i in range(k)) for w in self.labelings}


def _positions(klass: ParamClass, pts: Sequence[DomainPoint], budget: Budget) -> list[int]:
    pos = [klass.domain.position(p) for p in pts]
    if len(set(pos)) != len(pos):
        raise ValidationError("dichotomy points must be distinct")
    if len(pos) > budget.bit_cap:
        raise CapExceeded(f"{len(pos)} points exceed the bit-vector cap {budget.bit_cap}")
    return pos


def _packed(table: np.ndarray, pos: Sequence[int]) -> np.ndarray:
    if not pos:
        return np.zeros(1, dtype=np.int64)
    weights = np.left_shift(np.int64(1), np.arange(len(pos), dtype=np.int64))
    return np.unique(table[:, list(pos)].astype(np.int64) @ weights)


def dichotomies(klass: ParamClass, pts: Sequence[DomainPoint], budget: Budget | None = None) -> DichotomySet:
    budget = budget or default_budget()
    pos = _positions(klass, pts, budget)
    return DichotomySet(tuple(pts), frozenset(int(w) for w in _packed(klass.table, pos)))


def shatters(klass: ParamClass, pts: Sequence[DomainPoint], budget: Budget | None = None) -> bool:
    return len(dichotomies(klass, pts, budget)) == 2 ** len(pts)


class VCDimension(NamedTuple):
    value: int
    saturated: bool  # a set of size ``cap`` is shattered, so the true value may be larger


class _Meter:
    """Counts subsets and evaluations against the budget."""

    def __init__(self, budget: Budget, rows: int):
        self.budget = budget
        self.rows = rows
        self.subsets = 0
        self.evals = 0

    def charge(self, k: int, count: int = 1, lower_bound: int | None = None) -> None:
        self.subsets += count
        self.evals += count * k * self.rows
        if self.subsets > self.budget.subset_cap:
            raise BudgetExceeded(f"subset scan exceeded subset_cap={self.budget.subset_cap}", lower_bound)
        if self.evals > self.budget.eval_cap:
            raise BudgetExceeded(f"subset scan exceeded eval_cap={self.budget.eval_cap}", lower_bound)


def vc_dimension(klass: ParamClass, cap: int | None = None, budget: Budget | None = None) -> VCDimension:
    """Largest k <= cap with some shattered k-subset of the domain.

    Ascends k and stops at the first size with nothing shattered, relying on
    downward closure of shattering.
    """
    budget = budget or default_budget()
    n = len(klass.domain)
    cap = n if cap is None else min(cap, n)
    if cap < 0:
        raise ValidationError("cap must be >= 0", field="cap")
    if cap > budget.bit_cap:
        cap = budget.bit_cap
    table = klass.table
    distinct = len(np.unique(table, axis=0))
    meter = _Meter(budget, len(klass))
    best = 0
    for k in range(1, cap + 1):
        if distinct < 2**k:
            break
        if math.comb(n, k) + meter.subsets > budget.subset_cap:
            raise BudgetExceeded(f"C({n},{k}) subsets exceed subset_cap={budget.subset_cap}", lower_bound=best)
        found = False
        for combo in itertools.combinations(range(n), k):
            meter.charge(k, lower_bound=best)
            if len(_packed(table, combo)) == 2**k:
                found = True
                break
        if not found:
            break
        best = k
    # sizes above cap were never tried, so a shattered cap-set leaves the answer open
    saturated = best == cap and cap < n and distinct >= 2 ** (cap + 1)
    return VCDimension(best, saturated)


def growth_function(
    klass: ParamClass, m: int, budget: Budget | None = None, threads: int = 1
) -> int:
    """Max number of labelings on any m distinct domain points."""
    budget = budget or default_budget()
    n = len(klass.domain)
    if m < 0:
        raise ValidationError("m must be >= 0", field="m")
    if m > n:
        raise ValidationError(f"m={m} exceeds domain size {n}", field="m")
    if m == 0:
        return 1
    if m > budget.bit_cap:
        raise CapExceeded(f"m={m} exceeds the bit-vector cap {budget.bit_cap}")
    count = math.comb(n, m)
    meter = _Meter(budget, len(klass))
    meter.charge(m, count)
    table = klass.table
    ceiling = min(2**m, len(np.unique(table, axis=0)))

    def scan(chunk: list[tuple[int, ...]]) -> int:
        best = 0
        for combo in chunk:
            best = max(best, len(_packed(table, combo)))
            if best == ceiling:
                break
        return best

    combos = list(itertools.combinations(range(n), m))
    if threads <= 1:
        return scan(combos)
    size = -(-len(combos) // threads)
    chunks = [combos[i : i + size] for i in range(0, len(combos), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return max(pool.map(scan, chunks))


def growth_upper(klass: ParamClass, m: int, budget: Budget | None = None) -> int:
    """Bound on labelings of any m-tuple (repeats allowed): growth at min(m, |X|)."""
    return growth_function(klass, min(m, len(klass.domain)), budget)


def sauer_shelah(d: int, m: int) -> int:
    if d < 0 or m < 0:
        raise ValidationError("d and m must be >= 0")
    return sum(math.comb(m, i) for i in range(min(d, m) + 1))

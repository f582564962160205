"""Bad-event probabilities, the symmetrization bound, and structural checks.

Exact probabilities sum product weights over all of X^m x X^m in integer
arithmetic. Monte Carlo trial i draws from the counter stream keyed by (seed, i), so
hit counts do not depend on block size or on how blocks meet threads.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng
from .budget import Budget, default_budget
from .combinatorics import growth_upper
from .concepts import ParamClass, Target, bad_event_contains, error_matrix
from .constructors import singleton_witness_class
from .errors import ValidationError
from .measure import (
    DomainPoint,
    FiniteDomain,
    FiniteMeasure,
    SamplePair,
    check_enumeration_cap,
    draw_positions,
    enumerate_pairs,
)

BLOCK_CELLS = 1 << 22  # bounds the (params x pairs x m) gather per block
DEFAULT_CI_DELTA = Fraction(1, 1000)


@dataclass(frozen=True)
class BoundConvention:
    """``factor * growth(2m) * exp(-m * eps**2 / divisor)``."""

    factor: float = 1.0
    divisor: float = 8.0


STANDARD_BOUND = BoundConvention()


@dataclass(frozen=True)
class EstimateReport:
    mode: str  # "exact" or "monte-carlo"
    probability: Fraction | float
    m: int
    eps: Fraction
    trials: int | None = None
    hits: int | None = None
    confidence_radius: float | None = None
    ci_delta: Fraction | None = None
    seed: int | None = None
    growth2m: int | None = None
    bound: float | None = None
    bound_satisfied: bool | None = None

    def to_dict(self) -> dict:
        out = {}
        for key, value in self.__dict__.items():
            if isinstance(value, Fraction):
                value = fraction_str(value)
            out[key] = value
        return out


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def hoeffding_radius(trials: int, ci_delta) -> float:
    return math.sqrt(math.log(2 / float(ci_delta)) / (2 * trials))


def float_up(q: Fraction) -> float:
    """Smallest float >= q."""
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def symmetrization_bound(growth2m: int, m: int, eps, convention: BoundConvention = STANDARD_BOUND) -> float:
    if m < 1:
        raise ValidationError("bound needs m >= 1", field="m")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive", field="eps")
    return convention.factor * growth2m * math.exp(-m * float(eps) ** 2 / convention.divisor)


def bound_dominates(bound: float, probability: Fraction | float) -> bool:
    """``bound >= probability``, rounding an exact probability up before comparing."""
    p = float_up(probability) if isinstance(probability, Fraction) else probability
    return bound >= p


def _eps_parts(eps) -> tuple[int, int]:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive", field="eps")
    return eps.numerator, eps.denominator


def _bad_mask(errors: np.ndarray, train: np.ndarray, ghost: np.ndarray, m: int, eps) -> np.ndarray:
    """Rows of ``train``/``ghost`` (positions, shape (N, m)) on which some gap reaches eps/2.

    gap = k/m with k = ghost mistakes - train mistakes, and k/m >= p/(2q) iff 2qk >= pm.
    """
    p, q = _eps_parts(eps)
    if m == 0:
        return np.zeros(len(train), dtype=bool)
    k = errors[:, ghost].sum(axis=-1, dtype=np.int64) - errors[:, train].sum(axis=-1, dtype=np.int64)
    return (2 * q * k >= p * m).any(axis=0)


def _position_blocks(n: int, m: int, block: int) -> Iterator[np.ndarray]:
    total = n ** (2 * m)
    shape = (n,) * (2 * m)
    for start in range(0, total, block):
        flat = np.arange(start, min(start + block, total), dtype=np.int64)
        yield np.stack(np.unravel_index(flat, shape), axis=1) if m else np.zeros((len(flat), 0), dtype=np.int64)


def _block_size(rows: int, m: int) -> int:
    return max(256, BLOCK_CELLS // max(1, rows * m))


def _exact_mass(
    mu: FiniteMeasure, m: int, budget: Budget | None, hit: Callable, rows: int = 1
) -> Fraction:
    """Exact measure of {pairs : hit(train, ghost)} under mu^(2m); ``hit`` works on position blocks."""
    n = len(mu.domain)
    check_enumeration_cap(n, m, budget)
    total = mu.denominator ** (2 * m)
    small = total < 2**62
    nums = np.array(mu.numerators, dtype=np.int64 if small else object)
    acc = 0
    for idx in _position_blocks(n, m, _block_size(rows, m)):
        mask = hit(idx[:, :m], idx[:, m:])
        if not mask.any():
            continue
        w = nums[idx[mask]].prod(axis=1) if m else np.ones(int(mask.sum()), dtype=np.int64)
        acc += int(w.sum()) if small else sum(int(v) for v in w)
    return Fraction(acc, total)


def _with_bound(report: EstimateReport, klass: ParamClass, budget: Budget | None) -> EstimateReport:
    if report.m < 1:
        return report
    g = growth_upper(klass, 2 * report.m, budget)
    b = symmetrization_bound(g, report.m, report.eps)
    return EstimateReport(
        **{**report.__dict__, "growth2m": g, "bound": b, "bound_satisfied": bound_dominates(b, report.probability)}
    )


def exact_probability(klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, budget: Budget | None = None) -> Fraction:
    _same_domain(klass, mu)
    errors = error_matrix(klass, c)
    return _exact_mass(mu, m, budget, lambda s, t: _bad_mask(errors, s, t, m, eps), len(klass))


def exact_bad_event_prob(
    klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, budget: Budget | None = None, with_bound: bool = True
) -> EstimateReport:
    prob = exact_probability(klass, c, mu, m, eps, budget)
    report = EstimateReport("exact", prob, m, Fraction(eps))
    return _with_bound(report, klass, budget) if with_bound else report


def exact_bad_event_prob_by_scan(
    klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, budget: Budget | None = None
) -> Fraction:
    """Slow reference path: enumerate pairs and test each with the existential scan."""
    return sum(
        (w for pair, w in enumerate_pairs(mu, m, budget) if bad_event_contains(klass, c, m, eps, pair)),
        Fraction(0),
    )


def _same_domain(klass: ParamClass, mu: FiniteMeasure) -> None:
    if klass.domain != mu.domain:
        raise ValidationError("class and measure live on different domains")


def _block_hits(errors, mu, m, eps, seed, start, stop) -> int:
    trials = np.arange(start, stop, dtype=np.uint64)
    if m == 0:
        return 0
    pos = draw_positions(mu, rng.words(seed, trials, 2 * m))
    return int(_bad_mask(errors, pos[:, :m], pos[:, m:], m, eps).sum())


def monte_carlo_bad_event_prob(
    klass: ParamClass,
    c: Target,
    mu: FiniteMeasure,
    m: int,
    eps,
    trials: int,
    seed: int,
    ci_delta=DEFAULT_CI_DELTA,
    threads: int = 1,
    budget: Budget | None = None,
    with_bound: bool = True,
) -> EstimateReport:
    """Hit fraction over ``trials`` pairs; trial i is :func:`ghostgap.measure.trial_pair` (mu, m, seed, i)."""
    if trials < 1:
        raise ValidationError("trials must be >= 1", field="trials")
    _same_domain(klass, mu)
    _eps_parts(eps)
    errors = error_matrix(klass, c)
    size = _block_size(len(klass), 2 * m)
    blocks = [(s, min(s + size, trials)) for s in range(0, trials, size)]

    def run(block):
        return _block_hits(errors, mu, m, eps, seed, *block)

    if threads <= 1:
        hits = sum(map(run, blocks))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(run, blocks))
    report = EstimateReport(
        "monte-carlo",
        hits / trials,
        m,
        Fraction(eps),
        trials=trials,
        hits=hits,
        confidence_radius=hoeffding_radius(trials, ci_delta),
        ci_delta=Fraction(ci_delta),
        seed=seed,
    )
    return _with_bound(report, klass, budget) if with_bound else report


def swapped_probability(
    klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, mask: Sequence[int], budget: Budget | None = None
) -> Fraction:
    """Measure of {p : swap(p, mask) is bad}."""
    if len(mask) != m:
        raise ValidationError(f"swap mask has length {len(mask)}, expected {m}", field="swap_mask")
    _same_domain(klass, mu)
    errors = error_matrix(klass, c)
    flip = np.array([bool(b) for b in mask], dtype=bool)

    def hit(s, t):
        s2 = np.where(flip, t, s)
        t2 = np.where(flip, s, t)
        return _bad_mask(errors, s2, t2, m, eps)

    return _exact_mass(mu, m, budget, hit, len(klass))


def exchangeability_check(
    klass: ParamClass, c: Target, mu: FiniteMeasure, m: int, eps, mask: Sequence[int], budget: Budget | None = None
) -> bool:
    return exact_probability(klass, c, mu, m, eps, budget) == swapped_probability(klass, c, mu, m, eps, mask, budget)


def pac_sample_complexity(d: int, eps: float, delta: float) -> int:
    """Realizable-case sufficient size ceil((8/eps)(d log2(16/eps) + log2(2/delta)))."""
    if d < 0:
        raise ValidationError("d must be >= 0", field="d")
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ValidationError("eps and delta must lie in (0, 1)")
    return math.ceil((8 / eps) * (d * math.log2(16 / eps) + math.log2(2 / delta)))


def witness_pair_set(support: Iterable[DomainPoint], domain: FiniteDomain) -> set[tuple[DomainPoint, DomainPoint]]:
    """Pairs (x, y) with y in the support and x != y."""
    support = set(support)
    return {(x, y) for x in domain for y in domain if y in support and x != y}


def separation_witness_check(support: Iterable[DomainPoint], domain: FiniteDomain) -> bool:
    """For the witness class at m=1, zero target, eps=1: bad event == witness pair set, pair by pair."""
    support = list(support)
    klass = singleton_witness_class(domain, support)
    zero = Target.constant(0)
    expected = witness_pair_set(support, domain)
    mu = FiniteMeasure.uniform(domain)
    for pair, _ in enumerate_pairs(mu, 1):
        bad = bad_event_contains(klass, zero, 1, 1, pair)
        if bad != ((pair.train[0], pair.ghost[0]) in expected):
            return False
    return True


def witness_class_probability(support_size: int, n: int) -> Fraction:
    """Closed form a(n-1)/n^2 for the witness class under the uniform measure on n points."""
    return Fraction(support_size * (n - 1), n * n)

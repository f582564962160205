"""Finite domains, exact rational measures, IID sampling and pair enumeration."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import rng
from .budget import Budget, default_budget
from .errors import CapExceeded, DomainMismatch, ValidationError


@dataclass(frozen=True, order=True)
class DomainPoint:
    id: int
    coord: Fraction | None = None

    def __repr__(self) -> str:
        if self.coord is None:
            return f"x{self.id}"
        return f"x{self.id}@{self.coord}"


@dataclass(frozen=True)
class FiniteDomain:
    points: tuple[DomainPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValidationError("domain must be nonempty", field="domain")
        ids = [p.id for p in self.points]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate point ids", field="domain")
        coords = [p.coord for p in self.points]
        if any(c is not None for c in coords):
            if any(c is None for c in coords):
                raise ValidationError("either every point has a coord or none does", field="domain")
            order = sorted(self.points, key=lambda p: p.id)
            if any(a.coord >= b.coord for a, b in zip(order, order[1:])):
                raise ValidationError("coords must increase strictly with ids", field="domain")

    @classmethod
    def from_ids(cls, ids: Iterable[int]) -> FiniteDomain:
        return cls(tuple(DomainPoint(int(i)) for i in ids))

    @classmethod
    def range(cls, n: int) -> FiniteDomain:
        return cls.from_ids(range(n))

    @classmethod
    def grid(cls, lo, hi, n: int) -> FiniteDomain:
        """``n`` evenly spaced rational coordinates from ``lo`` to ``hi`` inclusive."""
        lo, hi = Fraction(lo), Fraction(hi)
        if n < 1:
            raise ValidationError("grid needs n >= 1", field="domain.grid.n")
        if n == 1:
            return cls((DomainPoint(0, lo),))
        if hi <= lo:
            raise ValidationError("grid needs hi > lo", field="domain.grid")
        step = (hi - lo) / (n - 1)
        return cls(tuple(DomainPoint(i, lo + i * step) for i in range(n)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[DomainPoint]:
        return iter(self.points)

    def __contains__(self, point: object) -> bool:
        return isinstance(point, DomainPoint) and self._position.get(point.id) is not None and (
            self.points[self._position[point.id]] == point
        )

    @cached_property
    def _position(self) -> dict[int, int]:
        return {p.id: i for i, p in enumerate(self.points)}

    def position(self, point: DomainPoint) -> int:
        """Index of ``point`` in ``points``."""
        try:
            pos = self._position[point.id]
        except KeyError:
            raise DomainMismatch(f"{point!r} is not in the domain") from None
        if self.points[pos] != point:
            raise DomainMismatch(f"{point!r} is not in the domain")
        return pos

    def point(self, point_id: int) -> DomainPoint:
        try:
            return self.points[self._position[point_id]]
        except KeyError:
            raise DomainMismatch(f"no point with id {point_id}") from None

    def subset(self, ids: Iterable[int]) -> frozenset[DomainPoint]:
        return frozenset(self.point(i) for i in ids)


@dataclass(frozen=True)
class FiniteMeasure:
    domain: FiniteDomain
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        if len(self.weights) != len(self.domain):
            raise ValidationError("one weight per domain point required", field="measure")
        if any(w < 0 for w in self.weights):
            raise ValidationError("weights must be nonnegative", field="measure")
        if sum(self.weights) != 1:
            raise ValidationError(f"weights sum to {sum(self.weights)}, not 1", field="measure")

    @classmethod
    def uniform(cls, domain: FiniteDomain) -> FiniteMeasure:
        n = len(domain)
        return cls(domain, tuple(Fraction(1, n) for _ in range(n)))

    @classmethod
    def point_mass(cls, domain: FiniteDomain, point: DomainPoint) -> FiniteMeasure:
        pos = domain.position(point)
        return cls(domain, tuple(Fraction(int(i == pos)) for i in range(len(domain))))

    def weight(self, point: DomainPoint) -> Fraction:
        return self.weights[self.domain.position(point)]

    @cached_property
    def denominator(self) -> int:
        return math.lcm(*(w.denominator for w in self.weights))

    @cached_property
    def numerators(self) -> tuple[int, ...]:
        """Integer weights over the common ``denominator``."""
        q = self.denominator
        return tuple(int(w * q) for w in self.weights)

    @cached_property
    def _cumulative(self) -> np.ndarray:
        return np.cumsum(np.array(self.numerators, dtype=np.uint64))


@dataclass(frozen=True)
class Sample:
    points: tuple[DomainPoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[DomainPoint]:
        return iter(self.points)

    def __getitem__(self, i: int) -> DomainPoint:
        return self.points[i]


@dataclass(frozen=True)
class SamplePair:
    train: Sample
    ghost: Sample

    def __post_init__(self):
        if not isinstance(self.train, Sample):
            object.__setattr__(self, "train", Sample(tuple(self.train)))
        if not isinstance(self.ghost, Sample):
            object.__setattr__(self, "ghost", Sample(tuple(self.ghost)))
        if len(self.train) != len(self.ghost):
            raise ValidationError("train and ghost samples must have equal length")

    @property
    def m(self) -> int:
        return len(self.train)

    def swapped(self, mask: Sequence[int | bool]) -> SamplePair:
        """Exchange train[i] and ghost[i] wherever ``mask[i]`` is set."""
        if len(mask) != self.m:
            raise ValidationError(f"swap mask has length {len(mask)}, expected {self.m}")
        train, ghost = list(self.train), list(self.ghost)
        for i, flip in enumerate(mask):
            if flip:
                train[i], ghost[i] = ghost[i], train[i]
        return SamplePair(Sample(tuple(train)), Sample(tuple(ghost)))


def draw_positions(mu: FiniteMeasure, words: np.ndarray) -> np.ndarray:
    """Map uniform uint64 words to domain positions distributed as ``mu``.

    Uses exact integer cut points; the modulo bias is at most q / 2**64.
    """
    r = words % np.uint64(mu.denominator)
    return np.searchsorted(mu._cumulative, r, side="right")


def sample_iid(mu: FiniteMeasure, m: int, stream: rng.TrialStream) -> Sample:
    if m < 0:
        raise ValidationError("sample size must be >= 0")
    if m == 0:
        return Sample(())
    pos = draw_positions(mu, stream.take(m))
    pts = mu.domain.points
    return Sample(tuple(pts[i] for i in pos))


def trial_pair(mu: FiniteMeasure, m: int, seed: int, trial: int) -> SamplePair:
    """The sample pair used by Monte Carlo trial ``trial``: S takes draws 0..m-1, T takes m..2m-1."""
    stream = rng.TrialStream(seed, trial)
    return SamplePair(sample_iid(mu, m, stream), sample_iid(mu, m, stream.advanced(m)))


def check_enumeration_cap(n_points: int, m: int, budget: Budget | None = None) -> int:
    budget = budget or default_budget()
    size = n_points ** (2 * m)
    if size > budget.enum_cap:
        raise CapExceeded(f"|X|^(2m) = {n_points}^{2 * m} = {size} exceeds enumeration cap {budget.enum_cap}")
    return size


def enumerate_position_pairs(
    mu: FiniteMeasure, m: int, budget: Budget | None = None
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Positions of every (S, T) with its integer weight over ``mu.denominator ** (2m)``."""
    n = len(mu.domain)
    check_enumeration_cap(n, m, budget)
    nums = mu.numerators
    for idx in itertools.product(range(n), repeat=2 * m):
        w = 1
        for i in idx:
            w *= nums[i]
        yield idx[:m], idx[m:], w


def enumerate_pairs(
    mu: FiniteMeasure, m: int, budget: Budget | None = None
) -> Iterator[tuple[SamplePair, Fraction]]:
    """Every element of X^m x X^m once, with its exact product weight."""
    if m < 0:
        raise ValidationError("sample size must be >= 0")
    pts = mu.domain.points
    total = mu.denominator ** (2 * m)
    for s, t, w in enumerate_position_pairs(mu, m, budget):
        pair = SamplePair(Sample(tuple(pts[i] for i in s)), Sample(tuple(pts[i] for i in t)))
        yield pair, Fraction(w, total)

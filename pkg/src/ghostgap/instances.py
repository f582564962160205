"""Small named instances (class, target, measure) used by the checks and configs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .concepts import ParamClass, Target, interval_class, table_class, threshold_class
from .constructors import amalg_classes, interp_fixed, patch_class, singleton_witness_class
from .measure import FiniteDomain, FiniteMeasure


@dataclass(frozen=True)
class Instance:
    name: str
    klass: ParamClass
    target: Target
    measure: FiniteMeasure


def witness_instance() -> Instance:
    d = FiniteDomain.range(5)
    k = singleton_witness_class(d, d.subset([1, 3]))
    return Instance("witness-5", k, Target.constant(0), FiniteMeasure.uniform(d))


def threshold_instance() -> Instance:
    d = FiniteDomain.grid(0, 1, 5)
    k = threshold_class(d)
    mu = FiniteMeasure(d, (Fraction(1, 2), Fraction(1, 8), Fraction(1, 8), Fraction(1, 8), Fraction(1, 8)))
    return Instance("threshold-5", k, Target.from_param(k, 2), mu)


def interval_instance() -> Instance:
    d = FiniteDomain.grid(0, 3, 4)
    k = interval_class(d)
    return Instance("interval-4", k, Target.from_param(k, 4), FiniteMeasure.uniform(d))


def interp_instance() -> Instance:
    d = FiniteDomain.grid(0, 1, 5)
    k = interp_fixed(threshold_class(d), interval_class(d), d.subset([0, 1]))
    return Instance("interp-5", k, Target.constant(0), FiniteMeasure.uniform(d))


def amalg_instance() -> Instance:
    d = FiniteDomain.grid(0, 1, 4)
    left = threshold_class(d)
    right = singleton_witness_class(d, d.points)
    k = amalg_classes(left, right, [0, 1, 0, 1, 0], [0, 0, 1, 1, 0], "xor")
    return Instance("amalg-4", k, Target.from_table(d, [0, 1, 1, 0]), FiniteMeasure.uniform(d))


def table_instance() -> Instance:
    d = FiniteDomain.range(4)
    rows = [[0, 0, 0, 0], [1, 0, 1, 0], [0, 1, 1, 0], [1, 1, 0, 1], [0, 0, 1, 1]]
    k = table_class(d, rows)
    mu = FiniteMeasure(d, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)))
    return Instance("table-4", k, Target.from_param(k, 0), mu)


def patch_instance() -> Instance:
    d = FiniteDomain.range(4)
    router = table_class(d, [[1, 1, 0, 0], [0, 1, 0, 1]], "router")
    k = patch_class(singleton_witness_class(d, d.subset([0, 2])), threshold_class(d), router)
    return Instance("patch-4", k, Target.constant(1), FiniteMeasure.uniform(d))


def shipped_instances() -> list[Instance]:
    return [
        witness_instance(),
        threshold_instance(),
        interval_instance(),
        interp_instance(),
        amalg_instance(),
        table_instance(),
        patch_instance(),
    ]

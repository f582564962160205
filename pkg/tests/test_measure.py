import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghostgap import rng
from ghostgap.budget import Budget, parse_budget_string
from ghostgap.errors import CapExceeded, DomainMismatch, ValidationError
from ghostgap.measure import (
    DomainPoint,
    FiniteDomain,
    FiniteMeasure,
    Sample,
    SamplePair,
    enumerate_pairs,
    sample_iid,
    trial_pair,
)
from oracles import all_pairs, measures, pair_weight


def test_point_mass_sample_is_constant():
    d = FiniteDomain.range(4)
    mu = FiniteMeasure.point_mass(d, d.point(2))
    s = sample_iid(mu, 3, rng.TrialStream(seed=11))
    assert s.points == (d.point(2),) * 3


def test_empty_sample():
    mu = FiniteMeasure.uniform(FiniteDomain.range(2))
    assert len(sample_iid(mu, 0, rng.TrialStream(seed=1))) == 0


def test_uniform_frequency_converges():
    d = FiniteDomain.range(2)
    s = sample_iid(FiniteMeasure.uniform(d), 10**5, rng.TrialStream(seed=2024))
    freq = sum(1 for x in s if x.id == 0) / len(s)
    assert abs(freq - 0.5) <= 0.01


def test_frequency_within_guard_band():
    d = FiniteDomain.range(4)
    mu = FiniteMeasure(d, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)))
    n = 10**5
    counts = Counter(x.id for x in sample_iid(mu, n, rng.TrialStream(seed=5)))
    band = 5 * math.sqrt(math.log(2 / 0.001) / (2 * n))
    for p, w in zip(d.points, mu.weights):
        assert abs(counts[p.id] / n - float(w)) <= band


def test_zero_weight_points_never_drawn():
    d = FiniteDomain.range(3)
    mu = FiniteMeasure(d, (Fraction(1, 2), Fraction(0), Fraction(1, 2)))
    s = sample_iid(mu, 5000, rng.TrialStream(seed=3))
    assert all(x.id != 1 for x in s)


def test_stream_is_position_addressed():
    a = rng.TrialStream(9, trial=4).take(10)
    b = rng.TrialStream(9, trial=4, offset=6).take(4)
    assert np.array_equal(a[6:], b)
    batch = rng.words(9, np.array([7, 4, 0]), 10)
    assert np.array_equal(batch[1], a)


def test_trial_pair_independent_of_order():
    mu = FiniteMeasure.uniform(FiniteDomain.range(5))
    forward = [trial_pair(mu, 3, 42, i) for i in range(20)]
    backward = [trial_pair(mu, 3, 42, i) for i in reversed(range(20))][::-1]
    assert forward == backward


def test_uniform_product_m1():
    mu = FiniteMeasure.uniform(FiniteDomain.range(2))
    out = list(enumerate_pairs(mu, 1))
    assert len(out) == 4
    assert all(w == Fraction(1, 4) for _, w in out)


def test_weighted_product_m2():
    d = FiniteDomain.range(3)
    mu = FiniteMeasure(d, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
    out = list(enumerate_pairs(mu, 2))
    assert len(out) == 81
    assert len({p for p, _ in out}) == 81
    assert sum(w for _, w in out) == 1
    expected = {(s, t): pair_weight(mu, s, t) for s, t in all_pairs(d, 2)}
    assert {(p.train.points, p.ghost.points): w for p, w in out} == expected


def test_empty_product():
    mu = FiniteMeasure.uniform(FiniteDomain.range(3))
    assert list(enumerate_pairs(mu, 0)) == [(SamplePair(Sample(), Sample()), Fraction(1))]


def test_cap_exceeded():
    mu = FiniteMeasure.uniform(FiniteDomain.range(10))
    with pytest.raises(CapExceeded):
        next(enumerate_pairs(mu, 2, Budget(enum_cap=9999)))
    assert len(list(enumerate_pairs(mu, 2, Budget(enum_cap=10**4)))) == 10**4


@given(measures(), st.integers(0, 2))
def test_weights_sum_to_one(mu, m):
    assert sum(w for _, w in enumerate_pairs(mu, m)) == 1


def test_measure_validation():
    d = FiniteDomain.range(2)
    with pytest.raises(ValidationError):
        FiniteMeasure(d, (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValidationError):
        FiniteMeasure(d, (Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(ValidationError):
        FiniteMeasure(d, (Fraction(1),))


def test_domain_validation():
    with pytest.raises(ValidationError):
        FiniteDomain(())
    with pytest.raises(ValidationError):
        FiniteDomain((DomainPoint(0), DomainPoint(0)))
    with pytest.raises(ValidationError):
        FiniteDomain((DomainPoint(0, Fraction(1)), DomainPoint(1, Fraction(0))))


def test_grid_coordinates():
    g = FiniteDomain.grid("0", "1", 5)
    assert [p.coord for p in g] == [Fraction(k, 4) for k in range(5)]
    assert FiniteDomain.grid(3, 3, 1).points == (DomainPoint(0, Fraction(3)),)


def test_position_rejects_foreign_point():
    d = FiniteDomain.range(3)
    with pytest.raises(DomainMismatch):
        d.position(DomainPoint(7))
    with pytest.raises(DomainMismatch):
        d.position(DomainPoint(1, Fraction(1)))


def test_swap():
    d = FiniteDomain.range(4)
    p = SamplePair(Sample(d.points[:2]), Sample(d.points[2:]))
    q = p.swapped([1, 0])
    assert q.train.points == (d.point(2), d.point(1))
    assert q.ghost.points == (d.point(0), d.point(3))
    assert q.swapped([1, 0]) == p


def test_unequal_pair_rejected():
    d = FiniteDomain.range(2)
    with pytest.raises(ValidationError):
        SamplePair(Sample(d.points), Sample(d.points[:1]))


def test_budget_string():
    assert parse_budget_string("123").enum_cap == 123
    b = parse_budget_string("subset_cap=5, bit_cap=8")
    assert (b.subset_cap, b.bit_cap, b.enum_cap) == (5, 8, Budget().enum_cap)
    with pytest.raises(ValidationError):
        parse_budget_string("bogus=1")


def test_budget_env(monkeypatch):
    from ghostgap.budget import default_budget

    monkeypatch.setenv("GHOSTGAP_BUDGET", "enum_cap=16")
    mu = FiniteMeasure.uniform(FiniteDomain.range(3))
    with pytest.raises(CapExceeded):
        list(enumerate_pairs(mu, 2))
    assert default_budget().enum_cap == 16

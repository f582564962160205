import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghostgap.combinatorics import growth_function
from ghostgap.concepts import Target, bad_event_contains, interval_class, table_class
from ghostgap.constructors import singleton_witness_class
from ghostgap.errors import CapExceeded, ValidationError
from ghostgap.budget import Budget
from ghostgap.instances import shipped_instances, witness_instance
from ghostgap.lab import (
    bound_dominates,
    exact_bad_event_prob,
    exact_bad_event_prob_by_scan,
    exact_probability,
    exchangeability_check,
    float_up,
    hoeffding_radius,
    monte_carlo_bad_event_prob,
    pac_sample_complexity,
    separation_witness_check,
    swapped_probability,
    symmetrization_bound,
    witness_class_probability,
)
from ghostgap.measure import FiniteDomain, FiniteMeasure, enumerate_pairs, trial_pair
from oracles import all_pairs, bad, bad_probability, measures, pair_weight, table_classes


def test_class_of_target_has_probability_zero():
    d = FiniteDomain.range(4)
    k = table_class(d, [[1, 0, 0, 1]])
    rep = exact_bad_event_prob(k, Target.from_param(k, 0), FiniteMeasure.uniform(d), 2, Fraction(1, 3))
    assert rep.probability == 0 and rep.mode == "exact"


def test_eps_above_two_has_probability_zero():
    for inst in shipped_instances():
        for m in (1, 2):
            assert exact_probability(inst.klass, inst.target, inst.measure, m, Fraction(9, 4)) == 0
    # and the same by brute force on one instance
    inst = witness_instance()
    assert bad_probability(inst.klass, inst.target, inst.measure, 1, Fraction(9, 4)) == 0


@pytest.mark.parametrize("n,a", [(2, 1), (4, 1), (5, 2), (6, 3), (6, 6)])
def test_witness_formula(n, a):
    d = FiniteDomain.range(n)
    k = singleton_witness_class(d, d.points[:a])
    mu = FiniteMeasure.uniform(d)
    counted = Fraction(sum(1 for s, t in all_pairs(d, 1) if t[0] in d.points[:a] and s[0] != t[0]), n * n)
    assert witness_class_probability(a, n) == counted
    assert exact_probability(k, Target.constant(0), mu, 1, 1) == counted


@st.composite
def instances(draw):
    mu = draw(measures(n_max=4))
    k = draw(table_classes(mu.domain, max_params=5))
    labels = draw(st.lists(st.integers(0, 1), min_size=len(mu.domain), max_size=len(mu.domain)))
    return k, Target.from_table(mu.domain, labels), mu, draw(st.integers(0, 2))


EPS = st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)])


@given(instances(), EPS)
def test_exact_paths_agree(inst, eps):
    k, c, mu, m = inst
    fast = exact_probability(k, c, mu, m, eps)
    assert fast == exact_bad_event_prob_by_scan(k, c, mu, m, eps)
    assert fast == bad_probability(k, c, mu, m, eps)


def test_exact_large_denominator_path():
    d = FiniteDomain.range(3)
    weights = (Fraction(1, 3**13), Fraction(1, 2**14), 1 - Fraction(1, 3**13) - Fraction(1, 2**14))
    mu = FiniteMeasure(d, weights)
    assert mu.denominator ** 4 >= 2**62
    k = table_class(d, [[1, 0, 0], [0, 1, 1]])
    c = Target.constant(0)
    assert exact_probability(k, c, mu, 2, 1) == bad_probability(k, c, mu, 2, 1)


def test_exact_cap():
    inst = witness_instance()
    with pytest.raises(CapExceeded):
        exact_probability(inst.klass, inst.target, inst.measure, 2, 1, Budget(enum_cap=100))


def test_m_zero():
    inst = witness_instance()
    rep = exact_bad_event_prob(inst.klass, inst.target, inst.measure, 0, 1)
    assert rep.probability == 0 and rep.bound is None


def test_mc_zero_for_target_class():
    d = FiniteDomain.range(3)
    k = table_class(d, [[0, 1, 1]])
    for seed in (1, 2, 3):
        rep = monte_carlo_bad_event_prob(k, Target.from_param(k, 0), FiniteMeasure.uniform(d), 2, 1, 5000, seed)
        assert rep.hits == 0 and rep.probability == 0.0


@pytest.mark.parametrize("seed", [11, 12, 13])
def test_mc_within_hoeffding_radius(seed):
    inst = witness_instance()
    q = exact_probability(inst.klass, inst.target, inst.measure, 2, 1)
    rep = monte_carlo_bad_event_prob(inst.klass, inst.target, inst.measure, 2, 1, 10**5, seed, Fraction(1, 1000))
    assert rep.confidence_radius == pytest.approx(math.sqrt(math.log(2000) / 2e5))
    assert abs(rep.probability - float(q)) <= rep.confidence_radius
    assert rep.probability == rep.hits / rep.trials


def test_mc_deterministic_and_thread_invariant():
    inst = shipped_instances()[3]
    args = (inst.klass, inst.target, inst.measure, 2, Fraction(1, 2), 20000, 99)
    a = monte_carlo_bad_event_prob(*args)
    assert a == monte_carlo_bad_event_prob(*args)
    assert a == monte_carlo_bad_event_prob(*args, threads=8)
    assert a != monte_carlo_bad_event_prob(*args[:-1], 100)


def test_mc_trials_match_scalar_path():
    inst = shipped_instances()[1]
    k, c, mu = inst.klass, inst.target, inst.measure
    hits = sum(bad_event_contains(k, c, 2, Fraction(1, 2), trial_pair(mu, 2, 5, i)) for i in range(300))
    assert monte_carlo_bad_event_prob(k, c, mu, 2, Fraction(1, 2), 300, 5).hits == hits


def test_mc_validation():
    inst = witness_instance()
    with pytest.raises(ValidationError):
        monte_carlo_bad_event_prob(inst.klass, inst.target, inst.measure, 1, 1, 0, 1)
    with pytest.raises(ValidationError):
        monte_carlo_bad_event_prob(inst.klass, inst.target, inst.measure, 1, 0, 10, 1)


def test_bound_values():
    assert symmetrization_bound(1, 1, Fraction(1, 10**6)) == pytest.approx(1.0, abs=1e-9)
    interval_growth = growth_function(interval_class(FiniteDomain.grid(0, 1, 6)), 6)
    assert interval_growth == 22
    assert symmetrization_bound(interval_growth, 3, 1) == 22 * math.exp(-3 / 8)
    assert symmetrization_bound(22, 3, 1) == pytest.approx(15.12, abs=0.005)
    with pytest.raises(ValidationError):
        symmetrization_bound(1, 0, 1)


def test_float_up_is_outward():
    for q in (Fraction(1, 3), Fraction(2, 3), Fraction(1, 10), Fraction(5, 7)):
        f = float_up(q)
        assert Fraction(f) >= q
        assert Fraction(math.nextafter(f, -math.inf)) < q
    assert float_up(Fraction(1, 2)) == 0.5
    # the bound must not pass merely because the rational rounded down
    q = Fraction(1, 3)
    assert not bound_dominates(float(q), q)
    assert bound_dominates(float_up(q), q)


def test_bound_dominates_shipped():
    for inst in shipped_instances():
        for m in (1, 2):
            for eps in (Fraction(1, 4), Fraction(1, 2), 1, 2):
                rep = exact_bad_event_prob(inst.klass, inst.target, inst.measure, m, eps)
                assert rep.bound_satisfied, (inst.name, m, eps)


def test_exchange_masks():
    inst = witness_instance()
    k, c, mu = inst.klass, inst.target, inst.measure
    assert exchangeability_check(k, c, mu, 2, 1, [0, 0])
    assert exchangeability_check(k, c, mu, 2, 1, [1, 1])
    with pytest.raises(ValidationError):
        swapped_probability(k, c, mu, 2, 1, [1])


def test_swapped_probability_oracle():
    inst = shipped_instances()[5]
    k, c, mu = inst.klass, inst.target, inst.measure
    for mask in ([1, 0], [0, 1], [1, 1]):
        brute = Fraction(0)
        for s, t in all_pairs(mu.domain, 2):
            s2 = tuple(t[i] if mask[i] else s[i] for i in range(2))
            t2 = tuple(s[i] if mask[i] else t[i] for i in range(2))
            if bad(k, c, s2, t2, 1):
                brute += pair_weight(mu, s, t)
        assert swapped_probability(k, c, mu, 2, 1, mask) == brute


def test_exchange_random_masks_shipped():
    r = random.Random(3)
    for inst in shipped_instances()[:5]:
        for _ in range(4):
            mask = [r.randrange(2) for _ in range(2)]
            assert exchangeability_check(inst.klass, inst.target, inst.measure, 2, Fraction(1, 2), mask)


def test_pac_sample_complexity():
    sizes = [pac_sample_complexity(2, e, 0.05) for e in (0.5, 0.3, 0.2, 0.1, 0.05)]
    assert sizes == sorted(sizes)
    assert pac_sample_complexity(0, 0.1, 0.05) < pac_sample_complexity(5, 0.1, 0.05)
    independent = math.ceil(80 * (math.log(160) / math.log(2) + math.log(40) / math.log(2)))
    assert pac_sample_complexity(1, 0.1, 0.05) == independent == 1012
    with pytest.raises(ValidationError):
        pac_sample_complexity(1, 1.5, 0.1)


def test_separation_check_cases():
    d4 = FiniteDomain.range(4)
    assert separation_witness_check([], d4)
    a = d4.point(2)
    assert separation_witness_check([a], d4)
    k = singleton_witness_class(d4, [a])
    bad_pairs = [p for p, _ in enumerate_pairs(FiniteMeasure.uniform(d4), 1) if bad_event_contains(k, Target.constant(0), 1, 1, p)]
    assert sorted((p.train[0].id, p.ghost[0].id) for p in bad_pairs) == [(0, 2), (1, 2), (3, 2)]
    d6 = FiniteDomain.range(6)
    assert separation_witness_check(d6.subset([0, 2, 5]), d6)


def test_eps_monotone_exact():
    grid = [Fraction(k, 8) for k in range(1, 20)]
    for inst in shipped_instances():
        probs = [exact_probability(inst.klass, inst.target, inst.measure, 2, e) for e in grid]
        assert all(a >= b for a, b in zip(probs, probs[1:]))


def test_hoeffding_radius():
    assert hoeffding_radius(10**5, 1e-3) == math.sqrt(math.log(2 / 1e-3) / (2 * 10**5))


def test_report_serialization():
    inst = witness_instance()
    d = exact_bad_event_prob(inst.klass, inst.target, inst.measure, 1, 1).to_dict()
    assert d["probability"] == "8/25" and d["eps"] == "1/1" and d["growth2m"] == 3

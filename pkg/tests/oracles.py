"""Independent reference computations: plain loops over evaluators, no library shortcuts."""

from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from ghostgap.concepts import table_class
from ghostgap.measure import FiniteDomain, FiniteMeasure


def all_pairs(domain, m):
    pts = domain.points
    for combo in itertools.product(pts, repeat=2 * m):
        yield combo[:m], combo[m:]


def pair_weight(mu, s, t):
    w = Fraction(1)
    for x in s + t:
        w *= mu.weights[mu.domain.points.index(x)]
    return w


def gap(evaluate, c, s, t):
    m = len(s)
    if m == 0:
        return Fraction(0)
    err_t = sum(evaluate(x) != c(x) for x in t)
    err_s = sum(evaluate(x) != c(x) for x in s)
    return Fraction(err_t, m) - Fraction(err_s, m)


def bad(klass, c, s, t, eps):
    return any(gap(lambda x, th=th: klass.evaluator(th, x), c, s, t) >= Fraction(eps) / 2 for th in klass.params)


def bad_probability(klass, c, mu, m, eps):
    return sum((pair_weight(mu, s, t) for s, t in all_pairs(mu.domain, m) if bad(klass, c, s, t, eps)), Fraction(0))


def labelings(klass, pts):
    return {tuple(klass.evaluator(th, x) for x in pts) for th in klass.params}


def shattered(klass, pts):
    return len(labelings(klass, pts)) == 2 ** len(pts)


def vc_brute(klass):
    best = 0
    pts = klass.domain.points
    for k in range(1, len(pts) + 1):
        if any(shattered(klass, combo) for combo in itertools.combinations(pts, k)):
            best = k
    return best


def growth_brute(klass, m):
    return max(len(labelings(klass, combo)) for combo in itertools.combinations(klass.domain.points, m))


# -- hypothesis strategies ----------------------------------------------------


@st.composite
def measures(draw, n_min=1, n_max=5):
    n = draw(st.integers(n_min, n_max))
    raw = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n).filter(lambda ws: sum(ws) > 0))
    total = sum(raw)
    return FiniteMeasure(FiniteDomain.range(n), tuple(Fraction(w, total) for w in raw))


@st.composite
def table_classes(draw, domain, max_params=8):
    n = len(domain)
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=1, max_size=max_params))
    return table_class(domain, rows)

"""Building new classes from old: witness singletons, patching, interpolation
and fiber-product amalgamation.

Every constructor returns an ordinary :class:`ParamClass`, so constructions nest.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Any

from .concepts import ParamClass
from .errors import DomainMismatch, EmptyFamily, EmptyFiberProduct, ValidationError
from .measure import DomainPoint, FiniteDomain

ZERO = (0, None)


@dataclass(frozen=True)
class RouterClass:
    """Router ``route(rho, x)``: 1 sends ``x`` to the left class, 0 to the right."""

    params: tuple[Hashable, ...]
    route: Callable[[Any, DomainPoint], int]
    domain: FiniteDomain

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not self.params:
            raise ValidationError("router has no parameters")

    @classmethod
    def from_class(cls, klass: ParamClass) -> RouterClass:
        return cls(klass.params, klass.evaluator, klass.domain)

    @classmethod
    def constant(cls, domain: FiniteDomain, value: int) -> RouterClass:
        return cls((value,), lambda b, x: b, domain)


def _same_domain(*domains: FiniteDomain) -> None:
    first = domains[0]
    for d in domains[1:]:
        if d != first:
            raise DomainMismatch("constructor inputs live on different domains")


def _region(domain: FiniteDomain, points: Iterable[DomainPoint]) -> frozenset[int]:
    ids = set()
    for p in points:
        if p not in domain:
            raise DomainMismatch(f"region point {p!r} is not in the domain")
        ids.add(p.id)
    return frozenset(ids)


def singleton_witness_class(domain: FiniteDomain, support: Iterable[DomainPoint]) -> ParamClass:
    """The zero concept plus ``1_{a}`` for each ``a`` in ``support``.

    Parameters are ``(branch, a_id)``: ``(0, None)`` is the zero concept and
    ``(1, a.id)`` the indicator of ``a``.
    """
    ids = sorted(_region(domain, support))
    params = (ZERO,) + tuple((1, a) for a in ids)

    def evaluate(theta, x):
        branch, a = theta
        return int(branch == 1 and x.id == a)

    return ParamClass(params, evaluate, domain, f"witness{ids}")


def patch_class(left: ParamClass, right: ParamClass, router: RouterClass | ParamClass) -> ParamClass:
    """Parameters ``(t1, t2, rho)``; the concept uses ``left`` where the router says 1, else ``right``."""
    if isinstance(router, ParamClass):
        router = RouterClass.from_class(router)
    _same_domain(left.domain, right.domain, router.domain)
    e1, e2, route = left.evaluator, right.evaluator, router.route
    params = tuple((t1, t2, rho) for t1 in left.params for t2 in right.params for rho in router.params)

    def evaluate(theta, x):
        t1, t2, rho = theta
        return e1(t1, x) if route(rho, x) == 1 else e2(t2, x)

    return ParamClass(params, evaluate, left.domain, f"patch({left.name},{right.name})")


def interp_fixed(left: ParamClass, right: ParamClass, region: Iterable[DomainPoint]) -> ParamClass:
    """``left`` on ``region``, ``right`` off it."""
    _same_domain(left.domain, right.domain)
    ids = _region(left.domain, region)
    router = RouterClass((ids,), lambda r, x: int(x.id in r), left.domain)
    klass = patch_class(left, right, router)
    return ParamClass(klass.params, klass.evaluator, klass.domain, f"interp({left.name},{right.name})")


def interp_family(left: ParamClass, right: ParamClass, regions: Sequence[Iterable[DomainPoint]]) -> ParamClass:
    """Router picks one region ``A_n`` from a finite list; concept is ``left`` on ``A_n``, ``right`` off it."""
    _same_domain(left.domain, right.domain)
    if not regions:
        raise EmptyFamily("region family is empty")
    sets = tuple(_region(left.domain, r) for r in regions)
    router = RouterClass(tuple(range(len(sets))), lambda n, x: int(x.id in sets[n]), left.domain)
    klass = patch_class(left, right, router)
    return ParamClass(klass.params, klass.evaluator, klass.domain, f"interp_family({left.name},{right.name})")


def _tagger(pi, params: Sequence[Hashable]) -> list:
    if callable(pi):
        return [pi(t) for t in params]
    tags = list(pi)
    if len(tags) != len(params):
        raise ValidationError(f"projection lists {len(tags)} tags for {len(params)} parameters")
    return tags


def agreement_relation(t1: Sequence[Hashable], t2: Sequence[Hashable], pi1, pi2) -> list[tuple[int, int]]:
    """Index pairs ``(i, j)`` with ``pi1(t1[i]) == pi2(t2[j])``, in lexicographic order.

    ``pi1``/``pi2`` are callables on parameter values or sequences of tags by index.
    """
    tags1, tags2 = _tagger(pi1, t1), _tagger(pi2, t2)
    by_tag: dict[Hashable, list[int]] = {}
    for j, s in enumerate(tags2):
        by_tag.setdefault(s, []).append(j)
    return [(i, j) for i, s in enumerate(tags1) for j in by_tag.get(s, ())]


def amalg_class(
    t1: Sequence[Hashable],
    t2: Sequence[Hashable],
    pi1,
    pi2,
    merge: Callable[[Any, Any, DomainPoint], int],
    domain: FiniteDomain,
    name: str = "amalg",
) -> ParamClass:
    """Concepts ``merge(a, b, .)`` over the pairs ``(a, b)`` whose projections agree."""
    t1, t2 = tuple(t1), tuple(t2)
    pairs = agreement_relation(t1, t2, pi1, pi2)
    if not pairs:
        raise EmptyFiberProduct("no parameter pair satisfies pi1(t1) == pi2(t2)")
    params = tuple((t1[i], t2[j]) for i, j in pairs)
    return ParamClass(params, lambda ab, x: merge(ab[0], ab[1], x), domain, name)


def merge_left(left: ParamClass) -> Callable:
    return lambda a, b, x: left.evaluator(a, x)


def merge_right(right: ParamClass) -> Callable:
    return lambda a, b, x: right.evaluator(b, x)


def merge_xor(left: ParamClass, right: ParamClass) -> Callable:
    return lambda a, b, x: left.evaluator(a, x) ^ right.evaluator(b, x)


def amalg_classes(left: ParamClass, right: ParamClass, pi1, pi2, merge: str | Callable = "left") -> ParamClass:
    """Amalgamate two classes' parameter lists with a named or custom merge."""
    _same_domain(left.domain, right.domain)
    if callable(merge):
        fn = merge
    elif merge == "left":
        fn = merge_left(left)
    elif merge == "right":
        fn = merge_right(right)
    elif merge == "xor":
        fn = merge_xor(left, right)
    else:
        raise ValidationError(f"unknown merge {merge!r}", field="merge")
    label = merge if isinstance(merge, str) else "custom"
    return amalg_class(left.params, right.params, pi1, pi2, fn, left.domain, f"amalg[{label}]({left.name},{right.name})")

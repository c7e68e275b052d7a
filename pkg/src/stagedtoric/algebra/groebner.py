"""Buchberger's algorithm, normal forms, and elimination ideals.

The implementation follows the classical algorithm with the normal
selection strategy (S-pairs by increasing lcm degree) and the
Gebauer-Moeller formulation of Buchberger's two criteria.  No modular or
floating-point shortcuts are used; everything is exact over the
rationals.  Resource limits are explicit: exceeding a budget raises
:class:`BudgetExceeded`, never a silent truncation.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from .orders import MonomialOrder, degrevlex, block_elimination
from .poly import (
    ONE,
    ZERO,
    Monomial,
    Polynomial,
    VarSet,
    mono_coprime,
    mono_degree,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)


@dataclass(frozen=True)
class Budget:
    """Explicit resource limits for basis computations."""

    max_basis: int = 4000
    max_degree: int = 60
    max_total_terms: int = 20000

    def check(self, basis_size: int, total_terms: int, degree: int):
        if basis_size > self.max_basis:
            raise BudgetExceeded("basis size", basis_size, self)
        if total_terms > self.max_total_terms:
            raise BudgetExceeded("total term count", total_terms, self)
        if degree > self.max_degree:
            raise BudgetExceeded("degree", degree, self)


DEFAULT_BUDGET = Budget()


class BudgetExceeded(Exception):
    """Raised when a computation outgrows its declared budget.

    Carries the partial degree bound reached so callers can report an
    explicit outcome instead of aborting opaquely.
    """

    def __init__(self, quantity: str, reached, budget: Budget):
        super().__init__(
            "budget exceeded: %s reached %s (budget %r)" % (quantity, reached, budget)
        )
        self.quantity = quantity
        self.reached = reached
        self.budget = budget


class GroebnerBasis:
    """A basis with its monomial order; ``reduced`` marks the canonical form."""

    __slots__ = ("generators", "order", "reduced")

    def __init__(self, generators, order: MonomialOrder, reduced: bool = False):
        self.generators = tuple(generators)
        self.order = order
        self.reduced = reduced

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroebnerBasis)
            and self.order == other.order
            and set(self.generators) == set(other.generators)
        )

    def contains(self, f: Polynomial) -> bool:
        return normal_form(f, list(self.generators), self.order).is_zero()

    def format(self) -> list[str]:
        return [g.format(self.order) for g in self.generators]

    def __repr__(self) -> str:
        return "GroebnerBasis(%d generators, %s%s)" % (
            len(self.generators),
            self.order.kind,
            ", reduced" if self.reduced else "",
        )


def _prepare(G: list[Polynomial], order: MonomialOrder):
    prepped = []
    for g in G:
        if g.is_zero():
            continue
        lm = order.leading_monomial(g)
        prepped.append((g, lm, g.terms[lm]))
    return prepped


def normal_form(f: Polynomial, G: list[Polynomial], order: MonomialOrder) -> Polynomial:
    """Remainder of ``f`` on division by ``G``; deterministic in list order.

    No term of the remainder is divisible by the leading term of any
    element of ``G``, and ``f - r`` lies in the ideal generated by ``G``.
    """
    for g in G:
        if not g.is_zero() and g.varset != f.varset:
            raise ValueError("divisors over a different variable set")
    return _normal_form_prepared(f, _prepare(G, order), order)


def _normal_form_prepared(f: Polynomial, prepped, order: MonomialOrder) -> Polynomial:
    key = order.key
    work = dict(f.terms)
    remainder: dict = {}
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for g, lm, lc in prepped:
            if mono_divides(lm, m):
                q = mono_div(m, lm)
                factor = c / lc
                terms = g.terms
                for mg, cg in terms.items():
                    if mg == lm:
                        continue
                    mm = mono_mul(mg, q)
                    s = work.get(mm, ZERO) - factor * cg
                    if s:
                        work[mm] = s
                    else:
                        work.pop(mm, None)
                break
        else:
            remainder[m] = c
    return Polynomial(f.varset, remainder)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    lmf, lcf = order.leading_term(f)
    lmg, lcg = order.leading_term(g)
    lcm = mono_lcm(lmf, lmg)
    return f.mul_term(mono_div(lcm, lmf), ONE / lcf) - g.mul_term(
        mono_div(lcm, lmg), ONE / lcg
    )


def _gm_update(basis, lms, pairs, h_index, order):
    """Gebauer-Moeller pair update when basis[h_index] enters the basis."""
    lh = lms[h_index]
    # candidate new pairs, pruned by the chain (M/F) criteria
    candidates = []
    for i in range(h_index):
        candidates.append((i, mono_lcm(lms[i], lh)))
    kept = []
    for i, lcm_i in candidates:
        dominated = False
        for j, lcm_j in candidates:
            if j == i:
                continue
            if lcm_j != lcm_i and mono_divides(lcm_j, lcm_i):
                dominated = True
                break
        if not dominated:
            kept.append((i, lcm_i))
    # F criterion: one representative per lcm value
    by_lcm: dict = {}
    for i, lcm_i in kept:
        by_lcm.setdefault(lcm_i, i)
    # product (first Buchberger) criterion
    new_pairs = [
        (i, lcm_i)
        for lcm_i, i in ((l, i) for l, i in by_lcm.items())
        if not mono_coprime(lms[i], lh)
    ]
    # prune old pairs by the chain criterion
    surviving = []
    for (i, j, lcm_ij) in pairs:
        if (
            mono_divides(lh, lcm_ij)
            and mono_lcm(lms[i], lh) != lcm_ij
            and mono_lcm(lms[j], lh) != lcm_ij
        ):
            continue
        surviving.append((i, j, lcm_ij))
    pairs[:] = surviving
    for i, lcm_i in new_pairs:
        pairs.append((i, h_index, lcm_i))


def buchberger(
    gens: list[Polynomial],
    order: MonomialOrder | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    The output is the unique reduced basis for the given order, so it does
    not depend on the order of the input generators.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        varset = None
        raise ValueError("cannot infer the ring of an empty generator list")
    varset = gens[0].varset
    if order is None:
        order = degrevlex(varset)
    if len(varset) == 0:
        raise ValueError("empty variable set")
    for g in gens:
        if g.varset != varset:
            raise ValueError("generators over different variable sets")

    key = order.key
    basis: list[Polynomial] = []
    lms: list[Monomial] = []
    pairs: list[tuple[int, int, Monomial]] = []
    total_terms = 0

    def add(h: Polynomial):
        nonlocal total_terms
        lm, lc = order.leading_term(h)
        h = h.scale(ONE / lc)
        basis.append(h)
        lms.append(lm)
        total_terms += len(h.terms)
        budget.check(len(basis), total_terms, mono_degree(lm))
        _gm_update(basis, lms, pairs, len(basis) - 1, order)

    for g in sorted(gens, key=lambda p: key(order.leading_monomial(p))):
        r = _normal_form_prepared(g, _prepare(basis, order), order)
        if not r.is_zero():
            add(r)

    heap = [(mono_degree(l), key(l), i, j) for (i, j, l) in pairs]
    heapq.heapify(heap)
    live = {(i, j) for (i, j, _) in pairs}
    while heap:
        _, _, i, j = heapq.heappop(heap)
        if (i, j) not in live:
            continue
        live.discard((i, j))
        s = s_polynomial(basis[i], basis[j], order)
        r = _normal_form_prepared(s, _prepare(basis, order), order)
        if r.is_zero():
            pairs[:] = [p for p in pairs if (p[0], p[1]) != (i, j)]
            continue
        pairs[:] = [p for p in pairs if (p[0], p[1]) != (i, j)]
        before = {(a, b) for (a, b, _) in pairs}
        add(r)
        after = {(a, b): l for (a, b, l) in pairs}
        live = set(after)
        heap = [(mono_degree(l), key(l), a, b) for (a, b), l in after.items()]
        heapq.heapify(heap)
    return GroebnerBasis(_reduce_basis(basis, order), order, reduced=True)


def _reduce_basis(basis: list[Polynomial], order: MonomialOrder):
    key = order.key
    # minimalize: drop generators whose leading monomial is divisible by
    # the leading monomial of another survivor
    indexed = sorted(
        ((order.leading_monomial(g), g) for g in basis if not g.is_zero()),
        key=lambda t: key(t[0]),
    )
    minimal: list[tuple[Monomial, Polynomial]] = []
    for lm, g in indexed:
        if not any(mono_divides(l2, lm) for l2, _ in minimal):
            minimal.append((lm, g))
    polys = [g for _, g in minimal]
    # interreduce tails to the unique reduced form
    changed = True
    while changed:
        changed = False
        for i in range(len(polys)):
            others = polys[:i] + polys[i + 1 :]
            r = _normal_form_prepared(polys[i], _prepare(others, order), order)
            if r != polys[i]:
                polys[i] = r
                changed = True
    out = []
    for g in polys:
        if g.is_zero():
            continue
        lm, lc = order.leading_term(g)
        out.append(g.scale(ONE / lc))
    out.sort(key=lambda g: key(order.leading_monomial(g)))
    return out


def eliminate(
    gens: list[Polynomial],
    drop: set[str] | list[str],
    budget: Budget = DEFAULT_BUDGET,
) -> list[Polynomial]:
    """Generators of the ideal of ``gens`` intersected with the ring on the
    remaining variables, via a block elimination order."""
    if not gens:
        return []
    varset = gens[0].varset
    drop = set(drop)
    for name in drop:
        if name not in varset:
            raise ValueError("cannot drop unknown variable %r" % name)
    keep = [n for n in varset.names if n not in drop]
    if not keep:
        raise ValueError("cannot eliminate every variable")
    if not drop:
        return list(gens)
    ordered = VarSet([n for n in varset.names if n in drop] + keep)
    order = block_elimination(ordered, len(drop))
    moved = [g.rename(ordered) for g in gens]
    gb = buchberger(moved, order, budget)
    target = VarSet(keep)
    out = []
    n_elim = len(drop)
    for g in gb.generators:
        if all(all(e == 0 for e in m[:n_elim]) for m in g.terms):
            out.append(g.rename(target))
    return out


def is_binomial_basis(
    gens: list[Polynomial],
    order: MonomialOrder | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> tuple[bool, Polynomial | None]:
    """Whether the ideal of ``gens`` has a reduced basis of binomials.

    A reduced Groebner basis of a binomial ideal consists of binomials in
    any monomial order, so the answer is order independent; DegRevLex is
    the default for determinism.  Returns the first offending generator as
    a witness when the answer is False.  The zero ideal counts as binomial.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return True, None
    gb = buchberger(gens, order, budget)
    for g in gb.generators:
        if not g.is_binomial_or_less():
            return False, g
    return True, None

"""Monomial orders: DegRevLex, Lex, and block (elimination) orders.

Every order exposes a sort key so that ``key(a) > key(b)`` exactly when
``a`` is greater than ``b``.  DegRevLex compares total degree first, then
breaks ties reverse-lexicographically: among equal-degree monomials the
greater one has the *smaller* exponent at the last position where they
differ.
"""

from __future__ import annotations

from .poly import Monomial, Polynomial, VarSet, mono_degree


class MonomialOrder:
    kind = "abstract"

    def __init__(self, varset: VarSet):
        self.varset = varset

    def key(self, m: Monomial):
        raise NotImplementedError

    def compare(self, a: Monomial, b: Monomial) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def leading_monomial(self, p: Polynomial) -> Monomial:
        if not p.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(p.terms, key=self.key)

    def leading_term(self, p: Polynomial):
        m = self.leading_monomial(p)
        return m, p.terms[m]

    def sorted_monomials(self, p: Polynomial, reverse: bool = True):
        return sorted(p.terms, key=self.key, reverse=reverse)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __repr__(self) -> str:
        return "%s(%r)" % (type(self).__name__, self.varset.names)


class DegRevLex(MonomialOrder):
    kind = "degrevlex"

    def key(self, m: Monomial):
        return (sum(m), tuple(-e for e in reversed(m)))


class Lex(MonomialOrder):
    kind = "lex"

    def key(self, m: Monomial):
        return m


class BlockOrder(MonomialOrder):
    """Eliminates a prefix of the variables.

    Monomials are compared DegRevLex on the first ``n_elim`` exponents and,
    on ties, DegRevLex on the remainder.  A Groebner basis for this order
    intersected with the non-eliminated variables generates the elimination
    ideal.
    """

    kind = "block"

    def __init__(self, varset: VarSet, n_elim: int):
        super().__init__(varset)
        if not 0 < n_elim < len(varset):
            raise ValueError("elimination block must be a proper nonempty prefix")
        self.n_elim = n_elim

    def key(self, m: Monomial):
        head, tail = m[: self.n_elim], m[self.n_elim :]
        return (
            sum(head),
            tuple(-e for e in reversed(head)),
            sum(tail),
            tuple(-e for e in reversed(tail)),
        )


def degrevlex(varset: VarSet) -> DegRevLex:
    return DegRevLex(varset)


def lex(varset: VarSet) -> Lex:
    return Lex(varset)


def block_elimination(varset: VarSet, n_elim: int) -> BlockOrder:
    return BlockOrder(varset, n_elim)


def degrevlex_compare(varset: VarSet, a: Monomial, b: Monomial) -> int:
    """-1, 0, or +1 as ``a`` is below, equal to, or above ``b`` in DegRevLex."""
    if len(a) != len(varset) or len(b) != len(varset):
        raise ValueError("monomial length does not match the variable set")
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return 1 if da > db else -1
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return 1 if x < y else -1
    return 0

"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are exponent tuples indexed by a fixed, ordered variable set.
Polynomials are dictionaries mapping exponent tuples to nonzero Fractions,
so all arithmetic is exact over the rationals.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

Monomial = tuple  # exponent tuple, one entry per variable

ZERO = Fraction(0)
ONE = Fraction(1)

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-'@]*$")


class VarSet:
    """An ordered collection of distinct variable names.

    The declaration order is the comparison order used by every monomial
    order; it is fixed at construction.
    """

    __slots__ = ("names", "index")

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names: %r" % (self.names,))
        for n in self.names:
            if not _NAME_RE.match(n):
                raise ValueError("bad variable name: %r" % n)
        self.index = {n: i for i, n in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def __repr__(self) -> str:
        return "VarSet(%s)" % ", ".join(self.names)

    def unit(self) -> Monomial:
        return (0,) * len(self.names)

    def gen(self, name: str) -> "Polynomial":
        e = [0] * len(self.names)
        e[self.index[name]] = 1
        return Polynomial(self, {tuple(e): ONE})

    def monomial(self, exps: Mapping[str, int] | Iterable[int]) -> Monomial:
        if isinstance(exps, Mapping):
            e = [0] * len(self.names)
            for name, p in exps.items():
                e[self.index[name]] = p
            return tuple(e)
        e = tuple(exps)
        if len(e) != len(self.names):
            raise ValueError("exponent tuple of wrong length")
        return e

    def extend(self, extra: Iterable[str]) -> "VarSet":
        return VarSet(self.names + tuple(extra))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True when a | b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


def mono_coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class Polynomial:
    """A finite Fraction-valued map on monomials over a fixed VarSet.

    Zero coefficients are never stored; the zero polynomial has an empty
    term map.  Instances are treated as immutable.
    """

    __slots__ = ("varset", "terms")

    def __init__(self, varset: VarSet, terms: Mapping[Monomial, Fraction] | None = None):
        self.varset = varset
        if terms:
            self.terms = {m: c for m, c in terms.items() if c}
        else:
            self.terms = {}

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(varset: VarSet) -> "Polynomial":
        return Polynomial(varset)

    @staticmethod
    def constant(varset: VarSet, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial(varset)
        return Polynomial(varset, {varset.unit(): c})

    @staticmethod
    def from_monomial(varset: VarSet, m: Monomial, c=ONE) -> "Polynomial":
        return Polynomial(varset, {m: Fraction(c)})

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_binomial_or_less(self) -> bool:
        return len(self.terms) <= 2

    def is_homogeneous(self) -> bool:
        degs = {mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.varset == other.varset
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.varset, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.varset != other.varset:
            raise ValueError("polynomials over different variable sets")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, ZERO) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        out = Polynomial.__new__(Polynomial)
        out.varset, out.terms = self.varset, terms
        return out

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, ZERO) - c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        out = Polynomial.__new__(Polynomial)
        out.varset, out.terms = self.varset, terms
        return out

    def __neg__(self) -> "Polynomial":
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        self._check(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = terms.get(m, ZERO) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        out = Polynomial.__new__(Polynomial)
        out.varset, out.terms = self.varset, terms
        return out

    __rmul__ = __mul__

    def scale(self, c: Fraction) -> "Polynomial":
        if not c:
            return Polynomial(self.varset)
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = {m: c * v for m, v in self.terms.items()}
        return out

    def mul_term(self, m: Monomial, c: Fraction) -> "Polynomial":
        if not c:
            return Polynomial(self.varset)
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = {mono_mul(m0, m): c * v for m0, v in self.terms.items()}
        return out

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.varset, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Ring map determined by variable images.

        Variables absent from `images` must not occur in the polynomial.
        The target ring is taken from the first image.
        """
        if not images:
            raise ValueError("empty substitution")
        target = next(iter(images.values())).varset
        cache: dict = {}

        def var_power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in cache:
                name = self.varset.names[i]
                if name not in images:
                    raise ValueError("no image for variable %s" % name)
                cache[key] = images[name] ** e
            return cache[key]

        total = Polynomial.zero(target)
        for m, c in self.terms.items():
            part = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    part = part * var_power(i, e)
            total = total + part
        return total

    def rename(self, varset: VarSet, mapping: Mapping[str, str] | None = None) -> "Polynomial":
        """Move to another VarSet by renaming variables (default: same names)."""
        terms = {}
        for m, c in self.terms.items():
            e = [0] * len(varset)
            for i, p in enumerate(m):
                if p:
                    name = self.varset.names[i]
                    if mapping:
                        name = mapping.get(name, name)
                    e[varset.index[name]] = p
            key = tuple(e)
            terms[key] = terms.get(key, ZERO) + c
        return Polynomial(varset, terms)

    # -- text form ---------------------------------------------------

    def format(self, order=None) -> str:
        """Canonical text: terms in descending order, '*' products, '^' powers."""
        from .orders import degrevlex

        if not self.terms:
            return "0"
        if order is None:
            order = degrevlex(self.varset)
        parts = []
        for m in sorted(self.terms, key=order.key, reverse=True):
            c = self.terms[m]
            factors = []
            for name, e in zip(self.varset.names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append("%s^%d" % (name, e))
            coeff = abs(c)
            if coeff != 1 or not factors:
                factors.insert(0, str(coeff))
            text = "*".join(factors)
            if not parts:
                parts.append(text if c > 0 else "-" + text)
            else:
                parts.append(("+ " if c > 0 else "- ") + text)
        return " ".join(parts)

    __str__ = format

    def __repr__(self) -> str:
        return "Polynomial(%s)" % self.format()


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_.\-']*)"
    r"|(?P<op>[-+*^()]))"
)


def parse_polynomial(varset: VarSet, text: str) -> Polynomial:
    """Parse the canonical textual format, e.g. ``p1*p3 - p1*p2 + p2^2``.

    Coefficients may be reduced fractions like ``3/2``; juxtaposition is not
    supported, factors are joined by '*'.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValueError("bad polynomial text at %r" % text[pos : pos + 12])
        pos = m.end()
        for kind in ("num", "name", "op"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val))
                break
    result = Polynomial.zero(varset)
    current: Polynomial | None = None
    sign = 1
    pending_power = False
    for kind, val in tokens:
        if kind == "op" and val in "+-":
            if current is not None:
                result = result + current.scale(Fraction(sign))
            current = None
            sign = 1 if val == "+" else -1
        elif kind == "op" and val == "*":
            continue
        elif kind == "op" and val == "^":
            pending_power = True
        elif kind == "num":
            if pending_power:
                if current is None or not current.terms:
                    raise ValueError("misplaced power")
                current = _power_last_factor(current, int(val))
                pending_power = False
            else:
                factor = Polynomial.constant(varset, Fraction(val))
                current = factor if current is None else current * factor
        elif kind == "name":
            if val not in varset:
                raise ValueError("unknown variable %r" % val)
            factor = varset.gen(val)
            current = factor if current is None else current * factor
        else:
            raise ValueError("unsupported token %r" % val)
    if pending_power:
        raise ValueError("dangling '^'")
    if current is not None:
        result = result + current.scale(Fraction(sign))
    return result


def _power_last_factor(p: Polynomial, e: int) -> Polynomial:
    # Parser helper: the '^' binds to the variable just multiplied in, which
    # is always a single generator in the canonical format.
    if len(p.terms) != 1:
        raise ValueError("'^' after non-monomial")
    (m, c), = p.terms.items()
    idx = max(i for i, x in enumerate(m) if x)
    if m[idx] != 1:
        raise ValueError("'^' after exponentiated factor")
    exps = list(m)
    exps[idx] = e
    return Polynomial(p.varset, {tuple(exps): c})

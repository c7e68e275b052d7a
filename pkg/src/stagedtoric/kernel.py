"""Ground-truth kernel oracle for the atom parametrisation.

The homogenised parametrisation sends p_r to its degree-d atom monomial in
the labels and z, subject to the sum-to-one relations "stage labels sum to
z".  Its kernel is computed exactly: the first label of every stage is
substituted away (theta_1 := z - theta_2 - ... - theta_k), which realises
the quotient by the sum-to-one ideal, and the remaining free parameters
are eliminated with a block order.  Degree-bounded questions are answered
by linear algebra on graded pieces instead.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

from .algebra import (
    Budget,
    BudgetExceeded,
    GroebnerBasis,
    Polynomial,
    VarSet,
    buchberger,
    degrevlex,
    eliminate,
    normal_form,
    parse_polynomial,
)
from .algebra.orders import MonomialOrder
from .trees import StagedTree, Z_NAME, Z_STAGE_ID

CACHE_ENV = "STAGEDTORIC_CACHE"


@dataclass(frozen=True)
class OracleBudget:
    """Size limits for the elimination oracle."""

    max_leaves: int = 16
    max_labels: int = 10  # label count, not counting the homogenising z
    gb: Budget = Budget(max_basis=4000, max_degree=60, max_total_terms=20000)
    max_graded_monomials: int = 40000

    def admits(self, tree: StagedTree) -> bool:
        return tree.n <= self.max_leaves and len(tree.label_names()) <= self.max_labels


DEFAULT_ORACLE_BUDGET = OracleBudget()


def canonical_images(tree: StagedTree):
    """Substitution realising the quotient by the sum-to-one relations.

    The first label of every stage maps to z minus the remaining labels of
    that stage; all other labels map to themselves.  Returns the reduced
    ring (surviving labels plus z) and the label images.
    """
    survivors = []
    for sid in sorted(tree.stages):
        if sid == Z_STAGE_ID:
            continue
        survivors.extend(tree.stages[sid].labels[1:])
    ring = VarSet(survivors + [Z_NAME])
    images: dict[str, Polynomial] = {name: ring.gen(name) for name in survivors}
    z = ring.gen(Z_NAME)
    for sid in sorted(tree.stages):
        if sid == Z_STAGE_ID:
            continue
        labels = tree.stages[sid].labels
        rest = Polynomial.zero(ring)
        for lab in labels[1:]:
            rest = rest + ring.gen(lab)
        images[labels[0]] = z - rest
    images[Z_NAME] = z
    return ring, images


def canonical_form(tree: StagedTree, f: Polynomial) -> Polynomial:
    """Reduce a polynomial in the labels and z modulo the sum-to-one ideal."""
    ring, images = canonical_images(tree)
    return f.substitute(images)


def atom_canonical(tree: StagedTree, ring=None, images=None) -> list[Polynomial]:
    """Canonical forms of all atom monomials, in leaf order."""
    if ring is None or images is None:
        ring, images = canonical_images(tree)
    theta = tree.theta_varset()
    out = []
    for r in range(1, tree.n + 1):
        out.append(tree.atom_polynomial(r, theta).substitute(images))
    return out


class SparseSpan:
    """Echelonised span of sparse vectors keyed by monomials."""

    def __init__(self, order: MonomialOrder):
        self.key = order.key
        self.pivots: dict = {}  # pivot monomial -> row dict (monic at pivot)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        while row:
            m = max(row, key=self.key)
            piv = self.pivots.get(m)
            if piv is None:
                return row
            c = row[m]
            for mm, cc in piv.items():
                s = row.get(mm, 0) - c * cc
                if s:
                    row[mm] = s
                else:
                    row.pop(mm, None)
        return row

    def add(self, row: dict) -> bool:
        red = self.reduce(row)
        if not red:
            return False
        m = max(red, key=self.key)
        inv = Fraction(1) / red[m]
        self.pivots[m] = {mm: cc * inv for mm, cc in red.items()}
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


class CacheMiss(Exception):
    """Raised in cache-only mode when no stored result exists."""


def kernel_ideal(
    tree: StagedTree,
    budget: OracleBudget = DEFAULT_ORACLE_BUDGET,
    cache_dir: str | None = None,
    cache_only: bool = False,
) -> GroebnerBasis:
    """Reduced DegRevLex basis of the kernel of the atom parametrisation.

    Computed by eliminating the free parameters from the ideal generated
    by p_r minus its canonical atom form.
    """
    if not budget.admits(tree):
        raise BudgetExceeded(
            "oracle size (leaves %d, labels %d)" % (tree.n, len(tree.label_names()) + 1),
            "tree too large",
            budget.gb,
        )
    tree = tree.homogenize()
    p_ring = tree.p_varset()
    cached = _cache_load(tree, budget, cache_dir, p_ring)
    if cached is not None:
        return cached
    if cache_only:
        raise CacheMiss("no cached kernel for %s" % (tree.name or "tree"))
    ring, images = canonical_images(tree)
    atoms = atom_canonical(tree, ring, images)
    combined = VarSet(ring.names + p_ring.names)
    gens = []
    for i, a in enumerate(atoms):
        gens.append(combined.gen("p%d" % (i + 1)) - a.rename(combined))
    out = eliminate(gens, set(ring.names), budget.gb)
    gb = GroebnerBasis([g.rename(p_ring) for g in out], degrevlex(p_ring), reduced=True)
    _cache_store(tree, budget, cache_dir, gb)
    return gb


def kernel_of_monomial_map(
    images: list[Polynomial],
    var_prefix: str = "l",
    budget: Budget = Budget(),
) -> GroebnerBasis:
    """Toric kernel of the map sending fresh variables to given monomials.

    Every image must be a single monomial (in any common ring); the result
    is the reduced DegRevLex basis in the fresh variables.
    """
    if not images:
        raise ValueError("empty monomial map")
    ring = images[0].varset
    names = ["%s%d" % (var_prefix, i + 1) for i in range(len(images))]
    combined = VarSet(list(ring.names) + names)
    gens = []
    for name, img in zip(names, images):
        if not img.is_monomial():
            raise ValueError("image of %s is not a monomial" % name)
        gens.append(combined.gen(name) - img.rename(combined))
    out = eliminate(gens, set(ring.names), budget)
    target = VarSet(names)
    return GroebnerBasis([g.rename(target) for g in out], degrevlex(target), reduced=True)


def graded_kernel_piece(
    tree: StagedTree,
    degree: int,
    budget: OracleBudget = DEFAULT_ORACLE_BUDGET,
) -> list[Polynomial]:
    """Exact basis of the degree-D part of the kernel, by linear algebra.

    Evaluates the canonical form of the image of every degree-D monomial
    in the atoms and returns the null space as polynomials.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    tree = tree.homogenize()
    n = tree.n
    count = comb(n + degree - 1, degree)
    if count > budget.max_graded_monomials:
        raise BudgetExceeded("graded piece size", count, budget.gb)
    ring, images = canonical_images(tree)
    atoms = atom_canonical(tree, ring, images)
    p_ring = tree.p_varset()
    monos = list(combinations_with_replacement(range(n), degree))
    columns: dict = {}
    rows = []
    for combo in monos:
        f = atoms[combo[0]]
        for idx in combo[1:]:
            f = f * atoms[idx]
        row = {}
        for m, c in f.terms.items():
            col = columns.setdefault(m, len(columns))
            row[col] = c
        rows.append(row)
    ncols = len(columns)
    dense = [[Fraction(0)] * ncols for _ in rows]
    for i, row in enumerate(rows):
        for j, c in row.items():
            dense[i][j] = c
    from .algebra import null_space

    transposed = [[dense[i][j] for i in range(len(rows))] for j in range(ncols)]
    basis = null_space(transposed)
    out = []
    for vec in basis:
        terms = {}
        for combo, c in zip(monos, vec):
            if c:
                e = [0] * n
                for idx in combo:
                    e[idx] += 1
                terms[tuple(e)] = c
        out.append(Polynomial(p_ring, terms))
    return out


def minimal_generator_degrees(basis: GroebnerBasis) -> dict[int, int]:
    """Degrees of a minimal homogeneous generating set, with multiplicity.

    Degree by degree, a graded element is a minimal generator exactly when
    it falls outside the span of the ideal generated in lower degrees.
    """
    gens = [g for g in basis.generators if not g.is_zero()]
    if not gens:
        return {}
    for g in gens:
        if not g.is_homogeneous():
            raise ValueError("minimal generator degrees need a homogeneous ideal")
    varset = gens[0].varset
    order = degrevlex(varset)
    by_degree: dict[int, list[Polynomial]] = {}
    for g in gens:
        by_degree.setdefault(g.degree(), []).append(g)
    max_d = max(by_degree)
    result: dict[int, int] = {}
    nvars = len(varset)
    for d in range(1, max_d + 1):
        lower = [g for g in gens if 0 < g.degree() < d]
        span = SparseSpan(order)
        for g in lower:
            extra = d - g.degree()
            for combo in combinations_with_replacement(range(nvars), extra):
                e = [0] * nvars
                for idx in combo:
                    e[idx] += 1
                span.add(g.mul_term(tuple(e), Fraction(1)).terms)
        fresh = 0
        for g in by_degree.get(d, []):
            if span.add(g.terms):
                fresh += 1
        if fresh:
            result[d] = fresh
    return result


def ideal_equal(
    a: list[Polynomial],
    b: list[Polynomial],
    budget: Budget = Budget(),
) -> bool:
    """Mutual containment of the two generated ideals, by normal forms."""
    a = [g for g in a if not g.is_zero()]
    b = [g for g in b if not g.is_zero()]
    if not a and not b:
        return True
    if not a or not b:
        return False
    if a[0].varset != b[0].varset:
        raise ValueError("ideals over different variable sets")
    order = degrevlex(a[0].varset)
    gb_a = buchberger(a, order, budget)
    gb_b = buchberger(b, order, budget)
    return set(gb_a.generators) == set(gb_b.generators)


def contains_all(gb: GroebnerBasis, polys: list[Polynomial]) -> bool:
    """Every polynomial reduces to zero against the basis."""
    return all(
        normal_form(f, list(gb.generators), gb.order).is_zero() for f in polys
    )


# -- on-disk oracle cache ----------------------------------------------


def _cache_key(tree: StagedTree, budget: OracleBudget) -> str:
    from .treedsl import serialize_tree

    payload = serialize_tree(tree) + "|degrevlex|%r" % (budget.gb,)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def _cache_path(tree: StagedTree, budget: OracleBudget, cache_dir: str | None):
    base = cache_dir or os.environ.get(CACHE_ENV)
    if not base:
        return None
    return os.path.join(base, _cache_key(tree, budget) + ".kernel")


def _cache_load(tree, budget, cache_dir, p_ring) -> GroebnerBasis | None:
    path = _cache_path(tree, budget, cache_dir)
    if not path or not os.path.exists(path):
        return None
    gens = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            gens.append(parse_polynomial(p_ring, line))
    return GroebnerBasis(gens, degrevlex(p_ring), reduced=True)


def _cache_store(tree, budget, cache_dir, gb: GroebnerBasis):
    path = _cache_path(tree, budget, cache_dir)
    if not path:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        fh.write("# order: degrevlex on %s\n" % (",".join(gb.order.varset.names)))
        fh.write("# budget: %r\n" % (budget.gb,))
        for g in gb.generators:
            fh.write(g.format(gb.order) + "\n")

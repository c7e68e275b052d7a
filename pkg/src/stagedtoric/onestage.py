"""One-stage trees: degree-d spans, Veronese comparisons, certificates.

When every internal vertex shares one stage with labels theta_1..theta_k,
each atom expands (z = theta_1 + ... + theta_k) into the span of the
degree-d monomials in the thetas.  Rank arguments over that span decide
whether the algebra is the full degree-d algebra, produce linear forms
with monomial images, and compare the algebras of two trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import comb, factorial

from .algebra import (
    Budget,
    BudgetExceeded,
    Polynomial,
    VarSet,
)
from .kernel import atom_canonical
from .minors import ToricCertificate
from .trees import LinearForm, StagedTree, Z_STAGE_ID

ONE = Fraction(1)


@dataclass
class OneStageInfo:
    is_one_stage: bool
    is_caterpillar: bool
    is_maximal: bool
    k: int | None
    d: int


def classify_onestage(tree: StagedTree) -> OneStageInfo:
    """Shape flags: one stage, caterpillar (one internal vertex per level),
    maximal (every path reaches full depth)."""
    stages = {
        tree.stage_of[v]
        for v in tree.children
        if tree.children[v] and tree.stage_of[v] != Z_STAGE_ID
    }
    one = len(stages) == 1 and not any(
        tree.stage_of.get(v) == Z_STAGE_ID for v in tree.children if tree.children[v]
    )
    d = tree.depth
    per_level: dict[int, int] = {}
    for v in tree.children:
        if tree.children[v]:
            per_level[tree.depth_of[v]] = per_level.get(tree.depth_of[v], 0) + 1
    caterpillar = all(per_level.get(t, 0) == 1 for t in range(d))
    maximal = all(tree.depth_of[v] == d for v in tree.leaves)
    k = tree.stages[next(iter(stages))].arity if one else None
    return OneStageInfo(one, caterpillar, maximal, k, d)


def _require_one_stage(tree: StagedTree) -> OneStageInfo:
    info = classify_onestage(tree)
    if not info.is_one_stage:
        raise ValueError("operation needs a one-stage tree")
    return info


def balanced_onestage(tree: StagedTree) -> bool:
    """One-stage trees are balanced exactly when they are maximal."""
    return _require_one_stage(tree).is_maximal


def veronese_basis(k: int, d: int) -> list[tuple]:
    """All degree-d exponent tuples in k parameters, first parameter first."""
    out = []
    for combo in combinations_with_replacement(range(k), d):
        e = [0] * k
        for idx in combo:
            e[idx] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def _one_stage_atoms(tree: StagedTree) -> list[tuple[tuple, int]]:
    """Per leaf: (label count vector, path length)."""
    info = _require_one_stage(tree)
    sid = next(
        tree.stage_of[v] for v in tree.children if tree.children[v]
    )
    labels = tree.stages[sid].labels
    index = {lab: i for i, lab in enumerate(labels)}
    out = []
    for leaf in tree.leaves:
        counts = [0] * len(labels)
        path = tree.path_labels(leaf)
        for lab in path:
            counts[index[lab]] += 1
        out.append((tuple(counts), len(path)))
    return out


def _multinomials(t: int, k: int):
    """(composition, multinomial coefficient) pairs for (x1+...+xk)^t."""
    out = []
    for combo in combinations_with_replacement(range(k), t):
        a = [0] * k
        for idx in combo:
            a[idx] += 1
        coeff = factorial(t)
        for x in a:
            coeff //= factorial(x)
        out.append((tuple(a), coeff))
    return out


def degree_d_span(tree: StagedTree) -> list[list[int]]:
    """Each atom expanded over the degree-d basis via z = sum of labels.

    Entries are non-negative integers (multinomial coefficients)."""
    info = _require_one_stage(tree)
    k, d = info.k, info.d
    basis = veronese_basis(k, d)
    pos = {m: i for i, m in enumerate(basis)}
    atoms = _one_stage_atoms(tree)
    vectors = []
    for counts, length in atoms:
        t = d - length
        vec = [0] * len(basis)
        for a, coeff in _multinomials(t, k):
            m = tuple(x + y for x, y in zip(counts, a))
            vec[pos[m]] += coeff
        vectors.append(vec)
    return vectors


def _int_rank(vectors) -> int:
    rows = [list(map(Fraction, v)) for v in vectors if any(v)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    pivot_rows: list[list[Fraction]] = []
    pivot_cols: list[int] = []
    for row in rows:
        for prow, pcol in zip(pivot_rows, pivot_cols):
            if row[pcol]:
                f = row[pcol]
                row = [a - f * b for a, b in zip(row, prow)]
        col = next((i for i, x in enumerate(row) if x), None)
        if col is None:
            continue
        inv = ONE / row[col]
        pivot_rows.append([x * inv for x in row])
        pivot_cols.append(col)
        rank += 1
    return rank


def span_rank(tree: StagedTree) -> int:
    return _int_rank(degree_d_span(tree))


def is_full_veronese(tree: StagedTree) -> bool:
    """Whether the atoms span every degree-d monomial in the labels."""
    info = _require_one_stage(tree)
    return span_rank(tree) == comb(info.k + info.d - 1, info.d)


def linear_relations(tree: StagedTree) -> list[LinearForm]:
    """Basis of the linear forms killed by the atom map, for any tree."""
    tree = tree.homogenize()
    atoms = atom_canonical(tree)
    columns: dict = {}
    rows = []
    for f in atoms:
        row = {}
        for m, c in f.terms.items():
            row[columns.setdefault(m, len(columns))] = c
        rows.append(row)
    ncols = len(columns)
    dense = [[Fraction(0)] * ncols for _ in rows]
    for i, row in enumerate(rows):
        for j, c in row.items():
            dense[i][j] = c
    from .algebra import null_space

    transposed = [[dense[i][j] for i in range(len(rows))] for j in range(ncols)]
    return [
        LinearForm({i + 1: c for i, c in enumerate(vec) if c})
        for vec in null_space(transposed)
    ]


# -- certificates -------------------------------------------------------


class _SpanSolver:
    """Row space of the atom vectors with recorded atom combinations."""

    def __init__(self, vectors):
        self.n = len(vectors)
        self.dim = len(vectors[0]) if vectors else 0
        self.rows: list[tuple[list[Fraction], dict[int, Fraction]]] = []
        self.pivot_cols: list[int] = []
        self.pivot_atoms: list[int] = []
        self.dependent: list[tuple[int, dict[int, Fraction]]] = []
        order = sorted(
            range(self.n), key=lambda i: (sum(1 for x in vectors[i] if x), i)
        )
        self.insertion_order = order
        for i in order:
            vec = [Fraction(x) for x in vectors[i]]
            combo = {i: ONE}
            vec, combo = self._reduce(vec, combo)
            col = next((c for c, x in enumerate(vec) if x), None)
            if col is None:
                # dependency: atom i equals the recorded pivot combination
                dep = {j: -c for j, c in combo.items() if j != i}
                self.dependent.append((i, dep))
                continue
            inv = ONE / vec[col]
            vec = [x * inv for x in vec]
            combo = {j: c * inv for j, c in combo.items()}
            for t, (prow, pcombo) in enumerate(self.rows):
                if prow[col]:
                    f = prow[col]
                    self.rows[t] = (
                        [a - f * b for a, b in zip(prow, vec)],
                        _combo_sub(pcombo, combo, f),
                    )
            self.rows.append((vec, combo))
            self.pivot_cols.append(col)
            self.pivot_atoms.append(i)

    def _reduce(self, vec, combo):
        for (prow, pcombo), col in zip(self.rows, self.pivot_cols):
            if vec[col]:
                f = vec[col]
                vec = [a - f * b for a, b in zip(vec, prow)]
                combo = _combo_sub(combo, pcombo, f)
        return vec, combo

    def solve_unit(self, col_index: int) -> dict[int, Fraction] | None:
        """Atom combination mapping to the basis vector e_{col_index}."""
        vec = [Fraction(0)] * self.dim
        vec[col_index] = ONE
        combo: dict[int, Fraction] = {}
        vec, combo = self._reduce(vec, combo)
        if any(vec):
            return None
        return {i: -c for i, c in combo.items()}

    @property
    def rank(self) -> int:
        return len(self.rows)


def _combo_sub(a: dict, b: dict, f: Fraction) -> dict:
    out = dict(a)
    for j, c in b.items():
        s = out.get(j, 0) - f * c
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    return out


class _IntSolver:
    """Fraction-free echelon form of integer atom vectors with recorded
    integer combinations; pivots prefer sparse vectors."""

    __slots__ = ("rows", "pivots", "combos", "pivot_atoms", "dependent")

    def __init__(self, vectors):
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        self.combos: list[dict[int, int]] = []
        self.pivot_atoms: list[int] = []
        self.dependent: list[tuple[int, dict[int, Fraction]]] = []
        order = sorted(
            range(len(vectors)),
            key=lambda i: (sum(1 for x in vectors[i] if x), i),
        )
        for i in order:
            vec = list(vectors[i])
            combo = {i: 1}
            for row, piv, rc in zip(self.rows, self.pivots, self.combos):
                f = vec[piv]
                if f:
                    g = row[piv]
                    vec = [g * x - f * y for x, y in zip(vec, row)]
                    new = {j: g * c for j, c in combo.items()}
                    for j, c in rc.items():
                        s = new.get(j, 0) - f * c
                        if s:
                            new[j] = s
                        else:
                            new.pop(j, None)
                    combo = new
            piv = next((c for c, x in enumerate(vec) if x), None)
            if piv is None:
                n_self = combo.pop(i)
                dep = {j: Fraction(-c, n_self) for j, c in combo.items()}
                self.dependent.append((i, dep))
                continue
            self.rows.append(vec)
            self.pivots.append(piv)
            self.combos.append(combo)
            self.pivot_atoms.append(i)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def solve_unit(self, col: int, dim: int) -> dict[int, Fraction]:
        x = [Fraction(0)] * dim
        x[col] = ONE
        out: dict[int, Fraction] = {}
        for row, piv, combo in zip(self.rows, self.pivots, self.combos):
            f = x[piv]
            if f:
                factor = f / row[piv]
                x = [a - factor * b for a, b in zip(x, row)]
                for j, c in combo.items():
                    s = out.get(j, 0) + factor * c
                    if s:
                        out[j] = s
                    else:
                        out.pop(j, None)
        if any(x):
            raise ValueError("unit vector outside the span")
        return out


def certificate_core(k: int, d: int, vectors: list):
    """Forms and basis-monomial images from the degree-d atom vectors.

    Returns (ok, forms, image_indices, failing) where forms are maps from
    1-based atom index to Fraction and image_indices point into the
    degree-d basis.  ok requires the span to be the full space and every
    form's recomputed image to equal its claimed basis vector exactly.
    """
    basis_size = comb(k + d - 1, d)
    solver = _IntSolver(vectors)
    if solver.rank != basis_size:
        return False, [], [], "degree-%d span has rank %d, expected %d" % (
            d, solver.rank, basis_size,
        )
    forms: list[dict[int, Fraction]] = []
    image_indices: list[int] = []
    for j in range(basis_size):
        combo = solver.solve_unit(j, basis_size)
        forms.append({i + 1: c for i, c in combo.items()})
        image_indices.append(j)
    unit_atoms = {
        i for i, v in enumerate(vectors) if sum(1 for x in v if x) == 1
    }
    for atom_idx, dep in solver.dependent:
        add_back = next((s for s in sorted(dep) if s in unit_atoms), None)
        if add_back is not None and dep.get(add_back) == ONE:
            coeffs = {atom_idx + 1: ONE}
            for s, c in dep.items():
                if s == add_back:
                    continue
                coeffs[s + 1] = coeffs.get(s + 1, Fraction(0)) - c
            target = next(c for c, x in enumerate(vectors[add_back]) if x)
            forms.append({r: c for r, c in coeffs.items() if c})
            image_indices.append(target)
        else:
            # divide out the largest coefficient of the atom's expansion
            vec = vectors[atom_idx]
            j_star = max(range(basis_size), key=lambda j: (abs(vec[j]), -j))
            c_star = Fraction(vec[j_star])
            coeffs = {atom_idx + 1: ONE}
            for j in range(basis_size):
                c = vec[j]
                if j == j_star or not c:
                    continue
                for r, v in forms[j].items():
                    s = coeffs.get(r, 0) - c * v
                    if s:
                        coeffs[r] = s
                    else:
                        coeffs.pop(r, None)
            inv = ONE / c_star
            forms.append({r: c * inv for r, c in coeffs.items()})
            image_indices.append(j_star)

    # recompute every form's image and compare with the claimed monomial
    for form, j in zip(forms, image_indices):
        acc: dict[int, Fraction] = {}
        for r, c in form.items():
            for jj, x in enumerate(vectors[r - 1]):
                if x:
                    s = acc.get(jj, 0) + c * x
                    if s:
                        acc[jj] = s
                    else:
                        acc.pop(jj, None)
        if acc != {j: ONE}:
            return False, forms, image_indices, "form image mismatch"
    return True, forms, image_indices, None


def onestage_certificate(tree: StagedTree, with_generators: bool = True) -> ToricCertificate:
    """Certificate for a one-stage tree whose span is the full degree-d
    algebra: forms with degree-d monomial images and the binomial
    relations of the associated monomial map.

    The preimage of each basis monomial is solved from the atom span;
    every atom dependency contributes one further independent form that
    maps to a monomial again.
    """
    info = _require_one_stage(tree)
    k, d = info.k, info.d
    basis = veronese_basis(k, d)
    vectors = degree_d_span(tree)
    ok, raw_forms, image_indices, failing = certificate_core(k, d, vectors)
    sid = next(tree.stage_of[v] for v in tree.children if tree.children[v])
    theta = tree.theta_varset()
    label_pos = [theta.index[lab] for lab in tree.stages[sid].labels]

    def theta_monomial(exps: tuple) -> tuple:
        e = [0] * len(theta)
        for p, x in zip(label_pos, exps):
            e[p] = x
        return tuple(e)

    forms = [LinearForm(f) for f in raw_forms]
    images = [theta_monomial(basis[j]) for j in image_indices]
    if not ok:
        return ToricCertificate(forms, images, [], False, failing, "one-stage-veronese")
    generators = (
        _monomial_map_quadrics(images, len(forms)) if with_generators else []
    )
    return ToricCertificate(forms, images, generators, True, None, "one-stage-veronese")


def _monomial_map_quadrics(images: list[tuple], n: int) -> list[Polynomial]:
    """Degree one and two binomials of the map l_i -> m_i."""
    ell = VarSet(["l%d" % (i + 1) for i in range(n)])
    out = []
    groups: dict[tuple, int] = {}
    for i, m in enumerate(images):
        if m in groups:
            out.append(ell.gen("l%d" % (i + 1)) - ell.gen("l%d" % (groups[m] + 1)))
        else:
            groups[m] = i
    pair_groups: dict[tuple, tuple] = {}
    for i in range(n):
        for j in range(i, n):
            key = tuple(x + y for x, y in zip(images[i], images[j]))
            if key in pair_groups:
                a, b = pair_groups[key]
                f = ell.gen("l%d" % (i + 1)) * ell.gen("l%d" % (j + 1)) - ell.gen(
                    "l%d" % (a + 1)
                ) * ell.gen("l%d" % (b + 1))
                if not f.is_zero():
                    out.append(f)
            else:
                pair_groups[key] = (i, j)
    return out


def binary_onestage_certificate(
    tree: StagedTree, with_generators: bool = True
) -> ToricCertificate:
    """The two-parameter case: the span is always the full (d+1)-space,
    so the certificate construction applies to every binary one-stage
    tree."""
    info = _require_one_stage(tree)
    if info.k != 2:
        raise ValueError("binary certificate needs exactly two labels")
    return onestage_certificate(tree, with_generators)


_ATOM_CACHE: dict = {}


def shape_atoms(shape, k: int):
    """Atoms of a one-stage shape as (label counts, path length) pairs,
    memoised across shared subshapes."""
    if shape == LEAF:
        return (((0,) * k, 0),)
    key = (k, shape)
    cached = _ATOM_CACHE.get(key)
    if cached is not None:
        return cached
    out = []
    for i, child in enumerate(shape):
        for counts, length in shape_atoms(child, k):
            c = list(counts)
            c[i] += 1
            out.append((tuple(c), length + 1))
    out = tuple(out)
    _ATOM_CACHE[key] = out
    return out


def atoms_to_vectors(k: int, d: int, atoms) -> list:
    """Degree-d expansion of (counts, length) atoms over the basis."""
    basis = veronese_basis(k, d)
    pos = {m: i for i, m in enumerate(basis)}
    mcache: dict[int, list] = {}
    vectors = []
    for counts, length in atoms:
        t = d - length
        if t not in mcache:
            mcache[t] = _multinomials(t, k)
        vec = [0] * len(basis)
        for a, coeff in mcache[t]:
            vec[pos[tuple(x + y for x, y in zip(counts, a))]] += coeff
        vectors.append(vec)
    return vectors


def shape_certificate_core(shape, k: int, d: int):
    """certificate_core applied straight to a one-stage shape."""
    return certificate_core(k, d, atoms_to_vectors(k, d, shape_atoms(shape, k)))


def algebra_equality(
    t1: StagedTree, t2: StagedTree, up_to_permutation: bool = False
) -> bool:
    """Whether the two degree-d spans coincide (optionally modulo a
    simultaneous relabelling of the parameters)."""
    i1, i2 = _require_one_stage(t1), _require_one_stage(t2)
    if (i1.k, i1.d) != (i2.k, i2.d):
        raise ValueError("trees have different (k, d)")
    k, d = i1.k, i1.d
    basis = veronese_basis(k, d)
    pos = {m: i for i, m in enumerate(basis)}
    v1 = degree_d_span(t1)
    v2 = degree_d_span(t2)

    def spans_equal(a, b) -> bool:
        ra, rb = _int_rank(a), _int_rank(b)
        return ra == rb == _int_rank(a + b)

    if spans_equal(v1, v2):
        return True
    if not up_to_permutation:
        return False
    for perm in permutations(range(k)):
        if perm == tuple(range(k)):
            continue
        permuted = []
        for vec in v2:
            new = [0] * len(basis)
            for m, i in pos.items():
                if vec[i]:
                    pm = tuple(m[perm.index(t)] for t in range(k))
                    new[pos[pm]] += vec[i]
            permuted.append(new)
        if spans_equal(v1, permuted):
            return True
    return False


# -- enumeration --------------------------------------------------------

LEAF = ()


def iter_onestage_shapes(k: int, d: int):
    """All one-stage shapes of depth exactly d (nested child tuples)."""
    from itertools import product

    upto: list[list] = [[LEAF]]
    depth_of: dict = {LEAF: 0}
    for m in range(1, d):
        layer = [LEAF]
        for c in product(upto[m - 1], repeat=k):
            shape = tuple(c)
            if shape not in depth_of:
                depth_of[shape] = 1 + max(depth_of[x] for x in shape)
            layer.append(shape)
        # dedupe while keeping order (LEAF reappears via products of leaves)
        seen = set()
        uniq = []
        for s in layer:
            if s not in seen:
                seen.add(s)
                uniq.append(s)
        upto.append(uniq)
    for c in product(upto[d - 1], repeat=k):
        if max(depth_of[x] for x in c) == d - 1:
            yield tuple(c)


def shape_orbit_representative(shape, k: int):
    """Lexicographically smallest image under simultaneous relabelling."""

    def apply(shape, perm):
        if shape == LEAF:
            return LEAF
        return tuple(apply(shape[perm[i]], perm) for i in range(k))

    return min(apply(shape, perm) for perm in permutations(range(k)))


def enumerate_onestage(
    k: int,
    d: int,
    modulo_permutation: bool = False,
    max_trees: int = 1_000_000,
) -> list[StagedTree]:
    """All one-stage trees of depth exactly d with k parameters.

    Counts grow very fast; exceeding ``max_trees`` raises BudgetExceeded
    before any tree is built.
    """
    estimate = _count_estimate(k, d)
    if estimate > max_trees:
        raise BudgetExceeded("one-stage enumeration size", estimate, Budget())
    from .catalog import one_stage

    labels = ["t%d" % (i + 1) for i in range(k)]
    seen = set()
    out = []
    for shape in iter_onestage_shapes(k, d):
        if modulo_permutation:
            rep = shape_orbit_representative(shape, k)
            if rep in seen:
                continue
            seen.add(rep)
            shape = rep
        out.append(one_stage(shape, labels))
    return out


def _count_estimate(k: int, d: int) -> int:
    upto = 1
    for _ in range(d):
        upto = upto**k + 1
    return upto

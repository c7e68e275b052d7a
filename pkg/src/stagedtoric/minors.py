"""Stage matrices, model invariants, and change-of-variables certificates.

The stage matrix of a colour has one column per vertex of that colour,
the i-th row holding the atom sum p_[v_i] of the vertex's i-th child.
Its 2x2 minors generate an ideal squeezed between the ideal of model
invariants and the kernel of the atom map, and elementary row and column
operations do not change it.  A toric certificate is a verified witness:
n independent linear forms with monomial images together with binomial
generators of such an intermediate ideal pin the kernel down as the
kernel of the associated monomial map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .algebra import (
    Budget,
    GroebnerBasis,
    Polynomial,
    VarSet,
    buchberger,
    degrevlex,
    normal_form,
    rank as matrix_rank,
)
from .kernel import (
    DEFAULT_ORACLE_BUDGET,
    OracleBudget,
    atom_canonical,
    canonical_images,
    ideal_equal,
    kernel_ideal,
    kernel_of_monomial_map,
)
from .trees import LinearForm, StagedTree, Z_STAGE_ID

ONE = Fraction(1)


def form_polynomial(form: LinearForm, p_ring: VarSet) -> Polynomial:
    return form.to_polynomial(p_ring)


def form_product(a: LinearForm, b: LinearForm, p_ring: VarSet) -> Polynomial:
    return a.to_polynomial(p_ring) * b.to_polynomial(p_ring)


def _sign_normalized(f: Polynomial, order) -> Polynomial:
    lm, lc = order.leading_term(f)
    return f.scale(ONE / lc)


def model_invariants(tree: StagedTree) -> list[Polynomial]:
    """Generators p_[u_i] p_[v] - p_[u] p_[v_i] over all same-stage pairs.

    Deduplicated and sign-normalized; stages with a single vertex
    contribute nothing.
    """
    p_ring = tree.p_varset()
    order = degrevlex(p_ring)
    out: list[Polynomial] = []
    seen = set()
    for sid in sorted(tree.stage_vertices):
        members = tree.stage_vertices[sid]
        arity = tree.stages[sid].arity
        for a in range(len(members)):
            for b in range(len(members)):
                if a == b:
                    continue
                u, v = members[a], members[b]
                bu, bv = tree.bracket(u), tree.bracket(v)
                for i in range(arity):
                    bui = tree.bracket(tree.children[u][i])
                    bvi = tree.bracket(tree.children[v][i])
                    f = form_product(bui, bv, p_ring) - form_product(bu, bvi, p_ring)
                    if f.is_zero():
                        continue
                    f = _sign_normalized(f, order)
                    if f not in seen:
                        seen.add(f)
                        out.append(f)
    return out


@dataclass
class StageMatrix:
    """Rows indexed by child position, columns by the stage's vertices."""

    stage_id: str
    columns: list[str]  # vertex ids, depth-first postorder
    entries: list[list[LinearForm]]  # entries[row][col]

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.columns)

    def distinct_forms(self) -> list[LinearForm]:
        seen: list[LinearForm] = []
        for row in self.entries:
            for f in row:
                if f not in seen:
                    seen.append(f)
        return seen

    def minors(self, tree_or_ring) -> list[Polynomial]:
        p_ring = (
            tree_or_ring
            if isinstance(tree_or_ring, VarSet)
            else tree_or_ring.p_varset()
        )
        order = degrevlex(p_ring)
        out = []
        for r1, r2 in combinations(range(self.nrows), 2):
            for c1, c2 in combinations(range(self.ncols), 2):
                f = form_product(
                    self.entries[r1][c1], self.entries[r2][c2], p_ring
                ) - form_product(self.entries[r1][c2], self.entries[r2][c1], p_ring)
                if not f.is_zero():
                    out.append(_sign_normalized(f, order))
        return out


def stage_matrix(tree: StagedTree, stage_id: str) -> StageMatrix:
    if stage_id not in tree.stage_vertices:
        raise ValueError("stage %r has no vertices" % stage_id)
    members = [v for v in tree.postorder if v in set(tree.stage_vertices[stage_id])]
    arity = tree.stages[stage_id].arity
    entries = [
        [tree.bracket(tree.children[v][i]) for v in members] for i in range(arity)
    ]
    return StageMatrix(stage_id, members, entries)


def all_stage_matrices(tree: StagedTree) -> list[StageMatrix]:
    """Matrices of the model's own stages (padding z-chains carry no
    column worth of information and no 2x2 minors)."""
    return [
        stage_matrix(tree, sid)
        for sid in sorted(tree.stage_vertices)
        if sid != Z_STAGE_ID
    ]


def ideal_of_minors(tree: StagedTree) -> list[Polynomial]:
    """All 2x2 minors of all stage matrices, expanded in the atom variables."""
    p_ring = tree.p_varset()
    order = degrevlex(p_ring)
    out: list[Polynomial] = []
    seen = set()
    for m in all_stage_matrices(tree):
        for f in m.minors(p_ring):
            if f not in seen:
                seen.add(f)
                out.append(f)
    return out


def row_col_transform(matrix: StageMatrix, ops) -> StageMatrix:
    """Apply elementary operations (kind, target, coefficients).

    ``kind`` is "row" or "col"; the target line is replaced by the
    coefficient combination of all lines, and the target's own coefficient
    must be nonzero so the operation is invertible and the ideal of
    minors is unchanged.
    """
    entries = [list(row) for row in matrix.entries]
    for kind, target, coeffs in ops:
        lines = len(entries) if kind == "row" else len(entries[0])
        if len(coeffs) != lines:
            raise ValueError("need %d coefficients" % lines)
        coeffs = [Fraction(c) for c in coeffs]
        if not coeffs[target]:
            raise ValueError("non-invertible operation: zero coefficient on the replaced line")
        if kind == "row":
            new_row = [LinearForm() for _ in range(len(entries[0]))]
            for c, row in zip(coeffs, entries):
                if c:
                    for j, f in enumerate(row):
                        new_row[j] = new_row[j] + f.scale(c)
            entries[target] = new_row
        elif kind == "col":
            new_col = [LinearForm() for _ in range(len(entries))]
            for j, c in enumerate(coeffs):
                if c:
                    for i in range(len(entries)):
                        new_col[i] = new_col[i] + entries[i][j].scale(c)
            for i in range(len(entries)):
                entries[i][target] = new_col[i]
        else:
            raise ValueError("unknown operation kind %r" % kind)
    return StageMatrix(matrix.stage_id, list(matrix.columns), entries)


def monomial_representative(
    tree: StagedTree,
    f: Polynomial,
    max_degree: int = 8,
):
    """A monomial congruent to ``f`` modulo the sum-to-one ideal, or None.

    The input must be homogeneous; candidates of the same degree over the
    labels and z are enumerated and compared in canonical form (first
    label of every stage eliminated).
    """
    if f.is_zero():
        return None
    if not f.is_homogeneous():
        raise ValueError("monomial representative needs a homogeneous input")
    degree = f.degree()
    if degree > max_degree:
        raise ValueError("degree %d beyond the candidate enumeration bound" % degree)
    theta = tree.theta_varset()
    ring, images = canonical_images(tree)
    target = f.substitute(images)
    if len(f.terms) == 1 and next(iter(f.terms.values())) == 1:
        return next(iter(f.terms))
    nvars = len(theta)
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for idx in combo:
            e[idx] += 1
        m = tuple(e)
        cand = Polynomial.from_monomial(theta, m).substitute(images)
        if cand == target:
            return m
    return None


@dataclass
class ToricCertificate:
    """Witness that the kernel is toric in new coordinates.

    When verified: the forms are linearly independent, each form's image
    is congruent to the recorded monomial, and the generators are
    binomials in the new coordinates generating an ideal squeezed between
    the model invariants and the kernel.
    """

    forms: list[LinearForm]
    images: list  # monomial exponent tuples over the tree's theta ring
    generators: list[Polynomial]  # in the ell-coordinates
    verified: bool
    failing: str | None = None
    method: str = "direct"
    provenance: dict = field(default_factory=dict)

    def ell_ring(self) -> VarSet:
        return VarSet(["l%d" % (i + 1) for i in range(len(self.forms))])

    def image_polynomials(self, tree: StagedTree) -> list[Polynomial]:
        theta = tree.theta_varset()
        return [Polynomial.from_monomial(theta, m) for m in self.images]

    def monomial_kernel(self, tree: StagedTree, budget: Budget = Budget()) -> GroebnerBasis:
        """Toric kernel of l_i -> m_i, in the ell-coordinates."""
        return kernel_of_monomial_map(self.image_polynomials(tree), "l", budget)

    def kernel_in_p(self, tree: StagedTree, budget: Budget = Budget()) -> list[Polynomial]:
        """The certified kernel pulled back to the atom coordinates."""
        gb = self.monomial_kernel(tree, budget)
        p_ring = tree.p_varset()
        images = {
            "l%d" % (i + 1): f.to_polynomial(p_ring) for i, f in enumerate(self.forms)
        }
        return [g.substitute(images) for g in gb.generators]


def _rewrite_in_forms(
    polys: list[Polynomial], forms: list[LinearForm], p_ring: VarSet, ell: VarSet
) -> list[Polynomial] | None:
    """Express polynomials in the form coordinates; None if forms are not
    a basis."""
    n = len(forms)
    A = [[forms[i].coeffs.get(j + 1, Fraction(0)) for j in range(n)] for i in range(n)]
    # invert A by row reduction on [A | I]
    aug = [row + [ONE if i == j else Fraction(0) for j in range(n)] for i, row in enumerate(A)]
    from .algebra import rref

    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    inv = [row[n:] for row in red]  # A^{-1}
    images = {}
    for j in range(n):
        terms = {}
        for i in range(n):
            c = inv[j][i]
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        images["p%d" % (j + 1)] = Polynomial(ell, terms)
    return [g.substitute(images) for g in polys]


def verify_certificate(
    tree: StagedTree,
    forms: list[LinearForm],
    j_gens: list[Polynomial],
    method: str = "direct",
    gb_budget: Budget = Budget(),
    provenance: dict | None = None,
) -> ToricCertificate:
    """Check the three certificate hypotheses and package the result.

    (i) the forms are n and independent; (ii) every form's image has a
    monomial representative modulo the sum-to-one ideal; (iii) the
    supplied generators become binomials in the new coordinates (per
    generator, else as a reduced basis), generate an ideal containing the
    model invariants, and lie in the kernel.  Failures set ``verified``
    False with the failing clause named.
    """
    tree = tree.homogenize()
    n = tree.n
    p_ring = tree.p_varset()
    provenance = provenance or {}

    def failure(clause: str, images=None) -> ToricCertificate:
        return ToricCertificate(
            forms, images or [], list(j_gens), False, clause, method, provenance
        )

    if len(forms) != n:
        return failure("form count %d != %d" % (len(forms), n))
    rows = [f.vector(n) for f in forms]
    if matrix_rank(rows) != n:
        return failure("forms are linearly dependent")

    images = []
    for idx, f in enumerate(forms):
        img = f.image(tree)
        m = monomial_representative(tree, img)
        if m is None:
            return failure("image of form %d has no monomial representative" % (idx + 1))
        images.append(m)

    ell = VarSet(["l%d" % (i + 1) for i in range(n)])
    rewritten = _rewrite_in_forms(list(j_gens), forms, p_ring, ell)
    if rewritten is None:
        return failure("forms are linearly dependent")
    binomial_gens = [g for g in rewritten if not g.is_zero()]
    if not all(g.is_binomial_or_less() for g in binomial_gens):
        from .algebra import is_binomial_basis

        ok, witness = is_binomial_basis(binomial_gens, budget=gb_budget)
        if not ok:
            return failure("generators are not binomial in the new coordinates")
        gb = buchberger(binomial_gens, degrevlex(ell), gb_budget)
        binomial_gens = list(gb.generators)

    # generators must lie in the kernel: zero image under the atom map
    ring, label_images = canonical_images(tree)
    atoms = atom_canonical(tree, ring, label_images)
    atom_map = {"p%d" % (i + 1): a for i, a in enumerate(atoms)}
    for g in j_gens:
        if not g.substitute(atom_map).is_zero():
            return failure("a generator is not in the kernel")

    # the model invariants must reduce to zero against the generators
    if binomial_gens:
        gb = buchberger(binomial_gens, degrevlex(ell), gb_budget)
        inv_rewritten = _rewrite_in_forms(model_invariants(tree), forms, p_ring, ell)
        for g in inv_rewritten:
            if not normal_form(g, list(gb.generators), gb.order).is_zero():
                return failure("a model invariant is outside the generated ideal")
    else:
        if model_invariants(tree):
            return failure("a model invariant is outside the generated ideal")

    return ToricCertificate(forms, images, binomial_gens, True, None, method, provenance)


def certificate_kernel_check(
    tree: StagedTree,
    cert: ToricCertificate,
    oracle_budget: OracleBudget = DEFAULT_ORACLE_BUDGET,
    gb_budget: Budget = Budget(),
) -> bool:
    """Cross-check: the certified monomial-map kernel equals the oracle's."""
    tree = tree.homogenize()
    pulled = cert.kernel_in_p(tree, gb_budget)
    oracle = kernel_ideal(tree, oracle_budget)
    return ideal_equal(pulled, list(oracle.generators), gb_budget)


def standard_basis_certificate(
    tree: StagedTree, j_gens: list[Polynomial] | None = None
) -> ToricCertificate:
    """Certificate attempt with the atom variables themselves as forms."""
    tree = tree.homogenize()
    forms = [LinearForm.unit(r) for r in range(1, tree.n + 1)]
    gens = ideal_of_minors(tree) if j_gens is None else j_gens
    return verify_certificate(tree, forms, gens, method="standard-basis")


def random_search(
    tree: StagedTree,
    seed: int,
    trials: int,
    max_ops_per_matrix: int = 3,
) -> ToricCertificate | None:
    """Seeded search over elementary operations on the stage matrices.

    Each trial draws a short random sequence of invertible row and column
    replacements per stage matrix with coefficients in {-2..2}, collects
    the distinct entries, and runs the verifier whenever they give exactly
    n independent forms.  Returns the first verified certificate, None
    when the trial budget is exhausted.  Deterministic in the seed.
    """
    if trials < 1:
        return None
    tree = tree.homogenize()
    n = tree.n
    rng = random.Random(seed)
    matrices = all_stage_matrices(tree)
    nonzero = [-2, -1, 1, 2]
    allcoef = [-2, -1, 0, 1, 2]
    for trial in range(trials):
        transformed = []
        for m in matrices:
            ops = []
            for _ in range(rng.randint(0, max_ops_per_matrix)):
                kinds = []
                if m.nrows > 1:
                    kinds.append("row")
                if m.ncols > 1:
                    kinds.append("col")
                if not kinds:
                    break
                kind = rng.choice(kinds)
                size = m.nrows if kind == "row" else m.ncols
                target = rng.randrange(size)
                coeffs = [rng.choice(allcoef) for _ in range(size)]
                coeffs[target] = rng.choice(nonzero)
                ops.append((kind, target, coeffs))
            transformed.append(row_col_transform(m, ops) if ops else m)
        forms: list[LinearForm] = []
        for m in transformed:
            for f in m.distinct_forms():
                if f not in forms:
                    forms.append(f)
        if len(forms) != n:
            continue
        if matrix_rank([f.vector(n) for f in forms]) != n:
            continue
        j_gens = []
        for m in transformed:
            j_gens.extend(m.minors(tree.p_varset()))
        cert = verify_certificate(
            tree,
            forms,
            j_gens,
            method="random-search",
            provenance={"seed": seed, "trial": trial},
        )
        if cert.verified:
            return cert
    return None

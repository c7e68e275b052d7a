"""Balancedness and the quadratic Groebner basis of a balanced tree.

A staged tree is balanced when t(u_i)t(v_j) = t(u_j)t(v_i) for every pair
of same-stage vertices u, v and all child indices i, j, where t(v) is the
subtree polynomial.  For balanced trees the kernel of the atom map has a
Groebner basis of binomials of degree one and two; the degree-two part is
generated from the product identity

    (m_u theta_i t(u_i)) (m_v theta_j t(v_j))
        = (m_u theta_j t(u_j)) (m_v theta_i t(v_i))

by matching terms on the two sides, each term being an atom monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    GroebnerBasis,
    Polynomial,
    VarSet,
    degrevlex,
    normal_form,
    s_polynomial,
)
from .kernel import (
    DEFAULT_ORACLE_BUDGET,
    OracleBudget,
    atom_canonical,
    kernel_ideal,
    minimal_generator_degrees,
)
from .trees import StagedTree, Z_STAGE_ID
from .treeops import swap

ONE = Fraction(1)


class BalanceError(ValueError):
    pass


def subtree_polynomials(tree: StagedTree) -> dict[str, Polynomial]:
    """t(v) for every vertex, computed bottom-up in one pass."""
    ring = tree.theta_varset()
    out: dict[str, Polynomial] = {}
    for v in tree.postorder:
        if tree.is_leaf(v):
            out[v] = Polynomial.constant(ring, 1)
        else:
            total = Polynomial.zero(ring)
            for lab, c in zip(tree.stage(v).labels, tree.children[v]):
                total = total + ring.gen(lab) * out[c]
            out[v] = total
    return out


def is_balanced(tree: StagedTree):
    """Exact polynomial check of the balance condition.

    Returns (True, None) or (False, (u, v, i, j)) with the first violating
    quadruple in stage-sorted, depth-first order.
    """
    t = subtree_polynomials(tree)
    for sid in sorted(tree.stage_vertices):
        members = tree.stage_vertices[sid]
        arity = tree.stages[sid].arity
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = members[a], members[b]
                for i in range(arity):
                    for j in range(i + 1, arity):
                        ui, uj = tree.children[u][i], tree.children[u][j]
                        vi, vj = tree.children[v][i], tree.children[v][j]
                        if t[ui] * t[vj] != t[uj] * t[vi]:
                            return False, (u, v, i + 1, j + 1)
    return True, None


def degree_one_pairs(tree: StagedTree) -> list[tuple[int, int]]:
    """All (r, s), r < s, whose atoms agree modulo the sum-to-one ideal."""
    tree = tree.homogenize()
    atoms = atom_canonical(tree)
    classes: dict = {}
    for r, f in enumerate(atoms, start=1):
        key = frozenset(f.terms.items())
        classes.setdefault(key, []).append(r)
    pairs = []
    for group in classes.values():
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                pairs.append((group[a], group[b]))
    return sorted(pairs)


def _descend_by_labels(tree: StagedTree, start: str, labels) -> str | None:
    """Follow a label sequence from ``start``; the reached leaf, or None."""
    v = start
    for lab in labels:
        if tree.is_leaf(v):
            return None
        stage = tree.stage(v)
        if lab not in stage.labels:
            return None
        v = tree.children[v][stage.labels.index(lab)]
    return v if tree.is_leaf(v) else None


def quadratic_gb(tree: StagedTree, verify: bool = True) -> GroebnerBasis:
    """Degree one and two binomial basis of the kernel, for balanced trees.

    Linear binomials come from equal atoms.  Each quadratic binomial
    matches a term pair of the product identity across two same-stage
    vertices; the partner is found by transplanting each path's suffix
    below the sibling edge when that labelled path exists, otherwise by
    image matching.  Quadratics that are monomial multiples of linear
    relations are dropped.  With ``verify`` the S-pair criterion is
    checked, so the result is a certified Groebner basis.
    """
    ok, witness = is_balanced(tree)
    if not ok:
        raise BalanceError("tree is not balanced; witness %r" % (witness,))
    hom = tree.homogenize()
    p_ring = hom.p_varset()
    order = degrevlex(p_ring)
    theta = hom.theta_varset()
    atom = {r: hom.atom_monomial(r, theta) for r in range(1, hom.n + 1)}
    leaf_index = hom.leaf_number
    full_path = {r: hom.path_labels(hom.leaves[r - 1]) for r in atom}

    def leaves_under(v):
        return [leaf_index[u] for u in hom.leaves_below(v)]

    binomials: set[tuple] = set()

    def emit(r1, r2, s1, s2):
        left = sorted((r1, r2))
        right = sorted((s1, s2))
        if left == right:
            return
        binomials.add((tuple(left), tuple(right)))

    for sid in sorted(hom.stage_vertices):
        members = hom.stage_vertices[sid]
        arity = hom.stages[sid].arity
        if arity < 2 or len(members) < 2:
            continue
        labels = hom.stages[sid].labels
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = members[a], members[b]
                for i in range(arity):
                    for j in range(i + 1, arity):
                        A = leaves_under(hom.children[u][i])
                        B = leaves_under(hom.children[v][j])
                        C = leaves_under(hom.children[u][j])
                        D = leaves_under(hom.children[v][i])
                        du, dv = hom.depth_of[u] + 1, hom.depth_of[v] + 1
                        for r1 in A:
                            suffix1 = full_path[r1][du:]
                            t1 = _descend_by_labels(hom, hom.children[u][j], suffix1)
                            for r2 in B:
                                target = tuple(
                                    x + y for x, y in zip(atom[r1], atom[r2])
                                )
                                s1 = leaf_index[t1] if t1 is not None else None
                                s2 = None
                                if s1 is not None:
                                    suffix2 = full_path[r2][dv:]
                                    t2 = _descend_by_labels(
                                        hom, hom.children[v][i], suffix2
                                    )
                                    if t2 is not None:
                                        s2 = leaf_index[t2]
                                if (
                                    s1 is not None
                                    and s2 is not None
                                    and tuple(
                                        x + y for x, y in zip(atom[s1], atom[s2])
                                    )
                                    == target
                                ):
                                    emit(r1, r2, s1, s2)
                                    continue
                                found = None
                                for c1 in C:
                                    for c2 in D:
                                        if (
                                            tuple(
                                                x + y
                                                for x, y in zip(atom[c1], atom[c2])
                                            )
                                            == target
                                        ):
                                            cand = (c1, c2)
                                            if found is None or cand < found:
                                                found = cand
                                if found is None:
                                    raise BalanceError(
                                        "no matching term pair at stage %r" % sid
                                    )
                                emit(r1, r2, *found)

    gens: list[Polynomial] = []
    for r, s in degree_one_pairs(tree):
        gens.append(p_ring.gen("p%d" % r) - p_ring.gen("p%d" % s))
    for left, right in sorted(binomials):
        if set(left) & set(right):
            continue  # monomial multiple of a linear relation
        m1 = _pair_monomial(p_ring, left)
        m2 = _pair_monomial(p_ring, right)
        f = Polynomial(p_ring, {m1: ONE}) - Polynomial(p_ring, {m2: ONE})
        gens.append(_sign_normalize(f, order))
    gens = sorted(set(gens), key=lambda g: order.key(order.leading_monomial(g)))
    gb = GroebnerBasis(gens, order, reduced=False)
    if verify and not _spairs_reduce(gens, order):
        raise BalanceError("constructed set failed the S-pair criterion")
    return gb


def _pair_monomial(p_ring: VarSet, pair) -> tuple:
    e = [0] * len(p_ring)
    for r in pair:
        e[p_ring.index["p%d" % r]] += 1
    return tuple(e)


def _sign_normalize(f: Polynomial, order) -> Polynomial:
    lm, lc = order.leading_term(f)
    return f.scale(ONE / lc)


def _spairs_reduce(gens, order) -> bool:
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = s_polynomial(gens[i], gens[j], order)
            if not normal_form(s, gens, order).is_zero():
                return False
    return True


def quadratic_gb_reduced(tree: StagedTree, verify: bool = True) -> GroebnerBasis:
    """Degree-two basis after dropping variables with duplicate atoms.

    p_r is dropped whenever some s > r has the same atom; remaining
    occurrences are substituted by the highest-index representative.
    """
    full = quadratic_gb(tree, verify=False)
    rep: dict[int, int] = {}
    for r, s in degree_one_pairs(tree):
        rep[r] = max(rep.get(r, r), s)

    def resolve(r: int) -> int:
        while r in rep:
            r = rep[r]
        return r

    tree_n = tree.homogenize().n
    survivors = sorted(set(resolve(r) for r in range(1, tree_n + 1)))
    reduced_ring = VarSet(["p%d" % r for r in survivors])
    order = degrevlex(reduced_ring)
    out = set()
    for g in full.generators:
        if g.degree() != 2:
            continue
        pairs = []
        for m, c in sorted(g.terms.items()):
            idxs = []
            for pos, e in enumerate(m):
                idxs.extend([pos + 1] * e)
            pairs.append((tuple(sorted(resolve(r) for r in idxs)), c))
        terms: dict = {}
        for pair, c in pairs:
            mono = _pair_monomial(reduced_ring, pair)
            s = terms.get(mono, 0) + c
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        f = Polynomial(reduced_ring, terms)
        if not f.is_zero():
            out.add(_sign_normalize(f, order))
    gens = sorted(out, key=lambda g: order.key(order.leading_monomial(g)))
    gb = GroebnerBasis(gens, order, reduced=False)
    if verify and not _spairs_reduce(gens, order):
        raise BalanceError("reduced construction failed the S-pair criterion")
    return gb


# -- colour structure ---------------------------------------------------


def colour_normal_form(tree: StagedTree) -> StagedTree:
    """Swap-equivalent tree whose stage pairs satisfy the colour audit.

    Visits internal vertices level by level; on first meeting a stage it
    decides, from the colour multiplicities of the children, whether each
    child index gets its own colour or all children get a common colour,
    then enforces the same decision at every later vertex of that stage by
    swaps.  The atom multiset is preserved.
    """
    ok, witness = is_balanced(tree)
    if not ok:
        raise BalanceError("tree is not balanced; witness %r" % (witness,))
    current = tree.homogenize()
    decisions: dict[str, tuple[str, list[str] | str]] = {}
    depth = 0
    while depth < current.depth - 1:
        layer = [
            v
            for v in current.dfs_order
            if not current.is_leaf(v)
            and current.depth_of[v] == depth
            and len(current.children[v]) > 1
            and all(
                not current.is_leaf(c) and _colourable(current, c)
                for c in current.children[v]
            )
        ]
        for v in layer:
            sid = current.stage_of[v]
            kids = current.children[v]
            if sid not in decisions:
                per_child = _per_child_colours(current, kids)
                if per_child is not None:
                    decisions[sid] = ("per-child", per_child)
                else:
                    decisions[sid] = ("uniform", None)
            kind, data = decisions[sid]
            kids = current.children[v]
            if kind == "per-child":
                for i, c in enumerate(kids):
                    want = data[i]
                    if current.stage_of[c] != want:
                        current = swap(current, c, want)
            else:
                # the common colour is chosen per vertex; only the
                # uniform-vs-per-child decision transfers along the stage
                common = _common_colour(current, current.children[v])
                for c in list(current.children[v]):
                    if current.stage_of[c] != common:
                        current = swap(current, c, common)
        depth += 1
    return current


def _colourable(tree: StagedTree, v: str) -> bool:
    """Whether the subtree at v contains any vertex of a real stage."""
    return any(
        tree.children[w] and tree.stage_of[w] != Z_STAGE_ID
        for w in tree.subtree_vertices(v)
    )


def _per_child_colours(tree: StagedTree, kids) -> list[str] | None:
    """For each child an own colour whose multiplicity exceeds a sibling's."""
    colours = sorted(sid for sid in tree.stage_vertices if sid != Z_STAGE_ID)
    mult = {c: [tree.multiplicity(c, k) for k in kids] for c in colours}
    chosen = []
    for i in range(len(kids)):
        pick = None
        for c in colours:
            if any(mult[c][i] > mult[c][j] for j in range(len(kids))):
                pick = c
                break
        if pick is None:
            return None
        chosen.append(pick)
    return chosen


def _common_colour(tree: StagedTree, kids) -> str:
    colours = sorted(sid for sid in tree.stage_vertices if sid != Z_STAGE_ID)
    for c in colours:
        if all(tree.multiplicity(c, k) >= 1 for k in kids):
            return c
    raise BalanceError("no common colour available below %r" % (kids,))


def colour_audit(tree: StagedTree):
    """Check every stage pair against the two normal-form conditions."""
    for sid in sorted(tree.stage_vertices):
        members = tree.stage_vertices[sid]
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = members[a], members[b]
                if not (_condition_matching(tree, u, v) or _condition_uniform(tree, u, v)):
                    return False, (u, v)
    return True, None


def _condition_matching(tree, u, v):
    for cu, cv in zip(tree.children[u], tree.children[v]):
        lu, lv = tree.is_leaf(cu), tree.is_leaf(cv)
        if lu != lv:
            return False
        if not lu and tree.stage_of[cu] != tree.stage_of[cv]:
            return False
    return True


def _condition_uniform(tree, u, v):
    def uniform(w):
        kinds = {
            None if tree.is_leaf(c) else tree.stage_of[c] for c in tree.children[w]
        }
        return len(kinds) == 1

    return uniform(u) and uniform(v)


# -- degree bound sufficient condition ----------------------------------


@dataclass
class KoszulReport:
    status: str  # "koszul" or "inconclusive"
    generator_degrees: dict[int, int] | None = None

    @property
    def koszul(self) -> bool:
        return self.status == "koszul"


def koszul_sufficient(
    tree: StagedTree, budget: OracleBudget = DEFAULT_ORACLE_BUDGET
) -> KoszulReport:
    """Sufficient quadratic-basis criterion.

    Balanced trees qualify through their degree one and two basis.  For
    other trees the kernel's reduced basis is inspected: degree at most
    two is a proof, anything else is reported as inconclusive together
    with the minimal generator degrees, never as a refutation.
    """
    ok, _ = is_balanced(tree)
    if ok:
        return KoszulReport("koszul")
    gb = kernel_ideal(tree, budget)
    if not gb.generators:
        return KoszulReport("koszul")
    if max(g.degree() for g in gb.generators) <= 2:
        return KoszulReport("koszul")
    return KoszulReport("inconclusive", minimal_generator_degrees(gb))

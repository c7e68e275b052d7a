"""Subtree-inclusion certificates and the balanced-prefix hybrid.

A stage has the subtree-inclusion property when one of its child indices
is dominated by every sibling: the subtree below the chosen child embeds,
with identical labels and stages, below every child of every vertex of
the stage.  Redrawing with the dominated edge first, substituting every
first label by z turns all atoms into independent monomials, which yields
the change of variables.  The hybrid construction cuts the tree along a
frontier: a balanced prefix handles the top, the inclusion property the
bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Budget, Polynomial, VarSet, rank as matrix_rank, solve
from .balance import is_balanced, quadratic_gb
from .kernel import canonical_images
from .minors import (
    StageMatrix,
    ToricCertificate,
    all_stage_matrices,
    row_col_transform,
    stage_matrix,
    verify_certificate,
)
from .trees import LinearForm, Stage, StagedTree, Z_NAME, Z_STAGE_ID

ONE = Fraction(1)


class SipError(ValueError):
    pass


@dataclass
class SipResult:
    is_sip: bool
    choice: dict[str, int] = field(default_factory=dict)  # stage -> 1-based index
    valid: dict[str, list[int]] = field(default_factory=dict)
    witness: tuple | None = None  # (stage, vertex, child index) when not SIP


def _plain(tree: StagedTree, v: str, cache: dict) -> bool:
    """No vertex of a real stage in the subtree: model-wise a leaf
    (z-padding chains count for nothing)."""
    key = ("plain", v)
    if key not in cache:
        cache[key] = all(
            not tree.children[w] or tree.stage_of[w] == Z_STAGE_ID
            for w in tree.subtree_vertices(v)
        )
    return cache[key]


def _embeds(tree: StagedTree, a: str, b: str, cache: dict) -> bool:
    """Root-preserving embedding of the subtree at ``a`` into the subtree
    at ``b`` matching edge labels; internal vertices then match stages
    automatically because stages have disjoint label sets.  Padding
    z-chains are transparent on both sides."""
    key = (a, b)
    if key in cache:
        return cache[key]
    if _plain(tree, a, cache):
        out = True
    elif not tree.is_leaf(a) and tree.stage_of[a] == Z_STAGE_ID:
        out = _embeds(tree, tree.children[a][0], b, cache)
    elif tree.is_leaf(b):
        out = False
    elif tree.stage_of[b] == Z_STAGE_ID:
        out = _embeds(tree, a, tree.children[b][0], cache)
    elif tree.stage_of[a] != tree.stage_of[b]:
        out = False
    else:
        out = all(
            _embeds(tree, ca, cb, cache)
            for ca, cb in zip(tree.children[a], tree.children[b])
        )
    cache[key] = out
    return out


def detect_sip(tree: StagedTree) -> SipResult:
    """Valid child indices per stage; SIP when every stage has one."""
    cache: dict = {}
    choice: dict[str, int] = {}
    valid: dict[str, list[int]] = {}
    for sid in sorted(tree.stage_vertices):
        members = tree.stage_vertices[sid]
        arity = tree.stages[sid].arity
        good = []
        first_failure = None
        for i in range(arity):
            ok = True
            for v in members:
                for j in range(arity):
                    if not _embeds(
                        tree, tree.children[v][i], tree.children[v][j], cache
                    ):
                        ok = False
                        if first_failure is None:
                            first_failure = (sid, v, j + 1)
                        break
                if not ok:
                    break
            if ok:
                good.append(i + 1)
        valid[sid] = good
        if not good:
            return SipResult(False, witness=first_failure, valid=valid)
        choice[sid] = good[0]
    return SipResult(True, choice, valid)


def reorder_first(tree: StagedTree, choice: dict[str, int]):
    """Redraw so the chosen index of each stage comes first.

    Returns (tree, leaf_map) where leaf_map sends the new leaf number to
    the original one.
    """
    stages = []
    perms: dict[str, list[int]] = {}
    for sid in sorted(tree.stages):
        s = tree.stages[sid]
        i0 = choice.get(sid, 1) - 1
        perm = [i0] + [i for i in range(s.arity) if i != i0]
        perms[sid] = perm
        stages.append(Stage(sid, [s.labels[i] for i in perm]))
    children = {}
    for v, kids in tree.children.items():
        if kids:
            perm = perms[tree.stage_of[v]]
            children[v] = [kids[i] for i in perm]
        else:
            children[v] = []
    out = StagedTree(stages, tree.root, children, tree.stage_of, name=tree.name)
    leaf_map = {}
    for leaf, new_number in out.leaf_number.items():
        leaf_map[new_number] = tree.leaf_number[leaf]
    return out, leaf_map


def stratify(tree: StagedTree):
    """Split every stage by depth with fresh labels.

    Returns (stratified tree, label substitution) where the substitution
    maps each fresh label back to the original one, so composing it with
    the stratified atom map recovers the original.
    """
    new_stages: dict[tuple, Stage] = {}
    stage_of = {}
    for v in tree.children:
        if not tree.children[v]:
            continue
        sid = tree.stage_of[v]
        if sid == Z_STAGE_ID:
            # padding vertices keep the single shared z stage at any depth
            stage_of[v] = Z_STAGE_ID
            new_stages[(Z_STAGE_ID, 0)] = Stage(Z_STAGE_ID, [Z_NAME])
            continue
        depth = tree.depth_of[v]
        key = (sid, depth)
        if key not in new_stages:
            base = tree.stages[sid]
            labels = ["%s@%d" % (lab, depth) for lab in base.labels]
            new_stages[key] = Stage("%s@%d" % (sid, depth), labels)
        stage_of[v] = new_stages[key].id
    uniq: dict[str, Stage] = {}
    for s in new_stages.values():
        uniq[s.id] = s
    out = StagedTree(
        list(uniq.values()), tree.root, tree.children, stage_of, name=tree.name
    )
    substitution = {}
    for (sid, depth), s in new_stages.items():
        if s.id == Z_STAGE_ID:
            continue
        for fresh, old in zip(s.labels, tree.stages[sid].labels):
            substitution[fresh] = old
    substitution[Z_NAME] = Z_NAME
    return out, substitution


def _zsub_monomial(tree: StagedTree, leaf: str, theta: VarSet) -> tuple:
    """Atom monomial with every first label replaced by z."""
    exps = [0] * len(theta)
    labels = tree.path_labels(leaf)
    zi = theta.index[Z_NAME]
    for lab in labels:
        if lab == Z_NAME:
            exps[zi] += 1
            continue
        sid = next(s.id for s in tree.stages.values() if lab in s.labels)
        if tree.stages[sid].labels[0] == lab:
            exps[zi] += 1
        else:
            exps[theta.index[lab]] += 1
    exps[zi] += tree.depth - len(labels)
    return tuple(exps)


def sip_change_of_variables(
    tree: StagedTree,
    gb_budget: Budget = Budget(),
) -> ToricCertificate:
    """Change of variables for a tree with the subtree-inclusion property.

    After redrawing with the dominated edge first, the stratified tree's
    atoms with all first labels replaced by z form n independent
    monomials; their unique preimages are the new coordinates.  The ideal
    of minors is rewritten by the corresponding column and row operations
    and handed to the verifier.  The full atom sum is always among the
    forms.
    """
    res = detect_sip(tree)
    if not res.is_sip:
        raise SipError("tree lacks the subtree-inclusion property: %r" % (res.witness,))
    reordered, leaf_map = reorder_first(tree, res.choice)
    hom = reordered.homogenize()
    strat, _sub = stratify(hom)
    theta = strat.theta_varset()
    ring, images = canonical_images(strat)

    targets = []
    seen = {}
    for r in range(1, strat.n + 1):
        m = _zsub_monomial(strat, strat.leaves[r - 1], theta)
        targets.append(m)
        seen.setdefault(m, []).append(r)
    if len(seen) != strat.n:
        raise SipError("substituted atoms are not distinct")

    # solve preimages in the degree-d graded piece of the stratified map
    atom_canon = [
        Polynomial.from_monomial(theta, strat.atom_monomial(r, theta)).substitute(images)
        for r in range(1, strat.n + 1)
    ]
    columns: dict = {}
    for f in atom_canon:
        for m in f.terms:
            columns.setdefault(m, len(columns))
    rows = []
    for f in atom_canon:
        row = [Fraction(0)] * len(columns)
        for m, c in f.terms.items():
            row[columns[m]] = c
        rows.append(row)
    matrix = [[rows[i][j] for i in range(len(rows))] for j in range(len(columns))]
    if matrix_rank(rows) != strat.n:
        raise SipError("stratified atoms are linearly dependent")
    forms = []
    for m in targets:
        target_poly = Polynomial.from_monomial(theta, m).substitute(images)
        rhs = [Fraction(0)] * len(columns)
        for mm, c in target_poly.terms.items():
            if mm not in columns:
                raise SipError("target monomial outside the atom span")
            rhs[columns[mm]] = c
        sol = solve(matrix, rhs)
        if sol is None:
            raise SipError("target monomial outside the atom span")
        forms.append(
            LinearForm({leaf_map[i + 1]: c for i, c in enumerate(sol) if c})
        )

    j_gens = _sip_transformed_minors(reordered, hom, leaf_map)
    cert = verify_certificate(
        tree.homogenize(),
        forms,
        j_gens,
        method="subtree-inclusion",
        provenance={"stage_choice": res.choice},
    )
    return cert


def _local_root(tree: StagedTree, v: str, stops: set[str] | None) -> str:
    """The governing vertex: the nearest ancestor in ``stops`` (or the
    root) from which the rerouting walk starts."""
    if not stops:
        return tree.root
    w = v
    while w is not None:
        if w in stops:
            return w
        w = tree.parent[w]
    return tree.root


def _first_edge_count(tree: StagedTree, v: str, stops: set[str] | None = None) -> int:
    top = _local_root(tree, v, stops)
    count = 0
    w = v
    while w != top and tree.parent[w] is not None:
        p = tree.parent[w]
        if tree.children[p].index(w) == 0 and tree.stage_of[p] != Z_STAGE_ID:
            count += 1
        w = p
    return count


def _sip_columns_ops(tree: StagedTree, matrix: StageMatrix, stops: set[str] | None = None):
    """Column then row operations realising the substitution of first
    labels by z on a stage matrix of a reordered tree.

    ``stops`` restricts the rerouting to stay below the given frontier,
    which is how the blockwise hybrid operations work."""
    cols = matrix.columns
    col_index = {v: i for i, v in enumerate(cols)}
    order = sorted(cols, key=lambda v: -_first_edge_count(tree, v, stops))
    ops = []
    for v in order:
        m = _first_edge_count(tree, v, stops)
        if m == 0:
            continue
        partners = _first_edge_partners(tree, v, stops)
        coeffs = [Fraction(0)] * len(cols)
        for u in partners:
            if u not in col_index:
                raise SipError("partner vertex %r outside the stage" % u)
            coeffs[col_index[u]] += 1
        if not coeffs[col_index[v]]:
            raise SipError("column operation would drop the original column")
        ops.append(("col", col_index[v], coeffs))
    nrows = matrix.nrows
    if nrows > 1:
        ops.append(("row", 0, [ONE] * nrows))
    return ops


def _first_edge_partners(tree: StagedTree, v: str, stops: set[str] | None = None) -> list[str]:
    """Vertices reached by rerouting any subset of first-edge steps on the
    path from the governing vertex to v through the sibling edges, copying
    the remaining labels (possible by the inclusion property)."""
    top = _local_root(tree, v, stops)
    path = []
    w = v
    while w != top and tree.parent[w] is not None:
        p = tree.parent[w]
        path.append((p, tree.children[p].index(w)))
        w = p
    path.reverse()
    results = [top]
    for p, idx in path:
        new_results = []
        for current in results:
            stage = tree.stage(current)
            label_here = tree.stage(p).labels[idx]
            pos = stage.labels.index(label_here)
            if pos == 0 and stage.id != Z_STAGE_ID:
                for j in range(stage.arity):
                    new_results.append(tree.children[current][j])
            else:
                new_results.append(tree.children[current][pos])
        results = new_results
    return results


def _sip_transformed_minors(reordered: StagedTree, hom: StagedTree, leaf_map) -> list[Polynomial]:
    """Minors of the stage matrices after the inclusion-property column
    operations and the top-row sum, translated to original leaf numbers."""
    p_ring = hom.p_varset()
    out = []
    for m in all_stage_matrices(hom):
        ops = _sip_columns_ops(hom, m)
        mm = row_col_transform(m, ops) if ops else m
        out.extend(mm.minors(p_ring))
    translated = []
    n = hom.n
    original_ring = p_ring
    for f in out:
        terms = {}
        for mono, c in f.terms.items():
            e = [0] * n
            for pos, exp in enumerate(mono):
                if exp:
                    e[leaf_map[pos + 1] - 1] += exp
            key = tuple(e)
            terms[key] = terms.get(key, Fraction(0)) + c
        g = Polynomial(original_ring, terms)
        if not g.is_zero():
            translated.append(g)
    return translated


# -- hybrid construction -------------------------------------------------


@dataclass
class FrontierCut:
    vertices: list[str]  # the prefix's leaves that are internal in the tree


def depth_frontier(tree: StagedTree, t: int) -> list[str]:
    """All vertices at distance exactly t, plus shallower leaves."""
    out = []
    for v in tree.dfs_order:
        if tree.depth_of[v] == t:
            out.append(v)
        elif tree.depth_of[v] < t and tree.is_leaf(v):
            out.append(v)
    return out


def _prefix_tree(tree: StagedTree, frontier: list[str]):
    """The rooted prefix with the frontier as leaves."""
    fset = set(frontier)
    # frontier must be an antichain covering every leaf
    for v in frontier:
        w = tree.parent[v]
        while w is not None:
            if w in fset:
                raise SipError("frontier is not an antichain")
            w = tree.parent[w]
    covered = set()
    for v in frontier:
        covered.update(tree.leaves_below(v))
    if set(tree.leaves) != covered:
        raise SipError("frontier does not cover every leaf")
    children = {}
    stage_of = {}
    stack = [tree.root]
    while stack:
        v = stack.pop()
        if v in fset:
            children[v] = []
            continue
        children[v] = list(tree.children[v])
        stage_of[v] = tree.stage_of[v]
        stack.extend(tree.children[v])
    used = set(stage_of.values())
    stages = [s for s in tree.stages.values() if s.id in used]
    return StagedTree(stages, tree.root, children, stage_of, name=tree.name + "-prefix")


def hybrid_certificate(
    tree: StagedTree,
    frontier: list[str],
    gb_budget: Budget = Budget(),
) -> ToricCertificate:
    """Balanced prefix + inclusion-property suffix certificate.

    Checks the three hypotheses: the prefix is balanced, no prefix stage
    reappears below the frontier, and the stages below the frontier have
    the inclusion property.  The generators are the prefix kernel pulled
    back through the frontier brackets plus the transformed minors of the
    suffix stages.
    """
    tree = tree.homogenize()
    trivial_prefix = list(frontier) == [tree.root]
    prefix = None
    prefix_stages: set[str] = set()
    if not trivial_prefix:
        prefix = _prefix_tree(tree, frontier)
        ok, witness = is_balanced(prefix)
        if not ok:
            return ToricCertificate([], [], [], False, "prefix is not balanced", "hybrid")
        prefix_stages = {
            prefix.stage_of[v]
            for v in prefix.children
            if prefix.children[v] and prefix.stage_of[v] != Z_STAGE_ID
        }
    below_stages = set()
    for v in frontier:
        for w in tree.subtree_vertices(v):
            if tree.children[w] and tree.stage_of[w] != Z_STAGE_ID:
                below_stages.add(tree.stage_of[w])
    if prefix_stages & below_stages:
        return ToricCertificate(
            [], [], [], False, "a prefix stage reappears below the frontier", "hybrid"
        )

    # inclusion property of the suffix stages, checked inside the full tree
    cache: dict = {}
    choice: dict[str, int] = {}
    for sid in sorted(below_stages):
        members = tree.stage_vertices[sid]
        arity = tree.stages[sid].arity
        good = None
        for i in range(arity):
            if all(
                _embeds(tree, tree.children[v][i], tree.children[v][j], cache)
                for v in members
                for j in range(arity)
            ):
                good = i + 1
                break
        if good is None:
            return ToricCertificate(
                [], [], [], False,
                "stage %s below the frontier lacks the inclusion property" % sid,
                "hybrid",
            )
        choice[sid] = good

    reordered, leaf_map = reorder_first(tree, choice)
    new_frontier = frontier  # vertex ids are unchanged by reordering
    stops = set(new_frontier)
    p_ring = reordered.p_varset()

    # prefix kernel pulled back through the frontier brackets
    pulled: list[Polynomial] = []
    if not trivial_prefix:
        prefix_re = _prefix_tree(reordered, new_frontier)
        q_gb = quadratic_gb(prefix_re, verify=False)
        bracket_polys = {}
        for idx, v in enumerate(prefix_re.leaves):
            bracket_polys["p%d" % (idx + 1)] = reordered.bracket(v).to_polynomial(p_ring)
        pulled = [g.substitute(bracket_polys) for g in q_gb.generators]

    j_gens = list(pulled)
    transformed: dict[str, StageMatrix] = {}
    for sid in sorted(below_stages):
        m = stage_matrix(reordered, sid)
        ops = _sip_columns_ops(reordered, m, stops)
        mm = row_col_transform(m, ops) if ops else m
        transformed[sid] = mm
        j_gens.extend(mm.minors(p_ring))

    # frontier brackets, suffix matrix entries, and completion as needed
    forms: list[LinearForm] = []
    for v in new_frontier:
        forms.append(reordered.bracket(v))
    for sid in sorted(below_stages):
        for f in transformed[sid].distinct_forms():
            if f not in forms:
                forms.append(f)
    n = reordered.n
    have = [f.vector(n) for f in forms]
    if matrix_rank(have) != len(forms):
        forms = _independent_subset(forms, n)
    for r in range(1, n + 1):
        if len(forms) == n:
            break
        cand = LinearForm.unit(r)
        trial = [f.vector(n) for f in forms] + [cand.vector(n)]
        if matrix_rank(trial) == len(forms) + 1:
            forms.append(cand)

    original_forms = [
        LinearForm({leaf_map[r]: c for r, c in f.coeffs.items()}) for f in forms
    ]
    original_gens = []
    for f in j_gens:
        terms = {}
        for mono, c in f.terms.items():
            e = [0] * n
            for pos, exp in enumerate(mono):
                if exp:
                    e[leaf_map[pos + 1] - 1] += exp
            key = tuple(e)
            terms[key] = terms.get(key, Fraction(0)) + c
        g = Polynomial(tree.p_varset(), terms)
        if not g.is_zero():
            original_gens.append(g)

    return verify_certificate(
        tree,
        original_forms,
        original_gens,
        method="hybrid",
        provenance={"frontier": list(frontier), "stage_choice": choice},
    )


def _independent_subset(forms: list[LinearForm], n: int) -> list[LinearForm]:
    from .algebra import IncrementalSpan

    span = IncrementalSpan(n)
    out = []
    for f in forms:
        if span.add(f.vector(n)):
            out.append(f)
    return out


def hybrid_search(
    tree: StagedTree, gb_budget: Budget = Budget()
) -> ToricCertificate | None:
    """Try frontier cuts at every depth, shallowest first."""
    hom = tree.homogenize()
    for t in range(hom.depth + 1):
        frontier = depth_frontier(hom, t)
        try:
            cert = hybrid_certificate(hom, frontier, gb_budget)
        except (SipError, ValueError):
            continue
        if cert.verified:
            return cert
    return None

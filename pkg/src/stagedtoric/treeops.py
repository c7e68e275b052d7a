"""Model-preserving tree rewrites: swap and resize.

A swap reorganises the subtree below a vertex v so that its root takes a
prescribed colour c, provided every v-to-leaf path already passes through
a c-coloured vertex.  A resize merges two levels below every vertex of a
stage, introducing product labels.  Both return new trees; the atom
multiset is preserved (for resize, up to the recorded label substitution).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .trees import Stage, StagedTree


class SwapError(ValueError):
    def __init__(self, message: str, path: list[str] | None = None):
        if path:
            message += " (path %s)" % " -> ".join(path)
        super().__init__(message)
        self.path = path


class ResizeError(ValueError):
    pass


def _path_avoiding(tree: StagedTree, v: str, stage_id: str) -> list[str] | None:
    """A v-to-leaf path meeting no vertex of the stage, if one exists."""
    if tree.is_leaf(v):
        return [v]
    if tree.stage_of[v] == stage_id:
        return None
    for c in tree.children[v]:
        tail = _path_avoiding(tree, c, stage_id)
        if tail is not None:
            return [v] + tail
    return None


def swap(tree: StagedTree, v: str, stage_id: str) -> StagedTree:
    """Rebuild T(v) with a root of the given colour.

    Copies the prefix of T(v) ending at the first c-coloured vertex of
    each path below every c-edge, then reattaches the subtrees hanging off
    the matching edges, so the multiset of atom monomials is unchanged.
    """
    if stage_id not in tree.stages:
        raise SwapError("unknown stage %r" % stage_id)
    if v not in tree.children:
        raise SwapError("unknown vertex %r" % v)
    if not tree.is_leaf(v) and tree.stage_of[v] == stage_id:
        raise SwapError("swap not applicable: %r already has colour %r" % (v, stage_id))
    bad = _path_avoiding(tree, v, stage_id)
    if bad is not None:
        raise SwapError("swap not applicable: a path below %r avoids the colour" % v, bad)

    target = tree.stages[stage_id]
    # prefix subtree: vertices strictly before the first c-coloured vertex,
    # plus those c-coloured vertices as prefix leaves
    prefix_children: dict[str, list[str]] = {}
    prefix_leaves: list[str] = []

    def explore(u: str):
        if not tree.is_leaf(u) and tree.stage_of[u] == stage_id and u != v:
            prefix_children[u] = []
            prefix_leaves.append(u)
            return
        prefix_children[u] = list(tree.children[u])
        for c in tree.children[u]:
            explore(c)

    explore(v)

    children = {w: list(c) for w, c in tree.children.items()}
    stage_of = dict(tree.stage_of)
    # detach the old subtree below v
    for w in tree.subtree_vertices(v):
        if w != v:
            children.pop(w, None)
        stage_of.pop(w, None)

    def copy_name(u: str, j: int) -> str:
        return v + "~%d" % (j + 1) if u == v else "%s~%d" % (u, j + 1)

    children[v] = []
    stage_of[v] = stage_id
    new_children_of_v = []
    for j in range(target.arity):
        root_j = copy_name(v, j)
        new_children_of_v.append(root_j)
        for u, kids in prefix_children.items():
            cu = copy_name(u, j)
            if kids:
                children[cu] = [copy_name(k, j) for k in kids]
                stage_of[cu] = tree.stage_of[u]
            else:
                # prefix leaf: identify with the root of the subtree past
                # its j-th (colour-c) edge
                w = tree.children[u][j]
                sub = tree.subtree_vertices(w)
                for x in sub:
                    if x == w:
                        continue
                    children[x] = list(tree.children[x])
                    if not tree.is_leaf(x):
                        stage_of[x] = tree.stage_of[x]
                children[cu] = list(tree.children[w])
                if not tree.is_leaf(w):
                    stage_of[cu] = tree.stage_of[w]
    children[v] = new_children_of_v

    used = set()
    stack = [tree.root]
    while stack:
        u = stack.pop()
        used.add(u)
        stack.extend(children[u])
    children = {u: kids for u, kids in children.items() if u in used}
    stage_of = {u: s for u, s in stage_of.items() if u in used}
    used_stage_ids = set(stage_of.values())
    stages = [s for s in tree.stages.values() if s.id in used_stage_ids]
    return StagedTree(stages, tree.root, children, stage_of, name=tree.name)


@dataclass
class ResizeResult:
    tree: StagedTree
    naive: bool
    substitution: dict[str, tuple[str, str]] = field(default_factory=dict)
    merged_stage: str = ""


def resize(tree: StagedTree, u: str) -> ResizeResult:
    """Merge the level below every vertex of u's stage into product edges.

    Requires the children of same-stage vertices to be pairwise in the
    same stages index by index.  New labels are fresh names recording the
    substitution new = tau * sigma; substituting back recovers every
    subtree polynomial.  The result is flagged naive when the extra stage
    conditions (distinct child stages, not reused elsewhere) fail.
    """
    if u not in tree.children or tree.is_leaf(u):
        raise ResizeError("resize needs an internal vertex")
    sid = tree.stage_of[u]
    stage = tree.stages[sid]
    members = tree.stage_vertices[sid]
    pattern: list[str | None] = []
    for i in range(stage.arity):
        kinds = set()
        for v in members:
            c = tree.children[v][i]
            kinds.add(None if tree.is_leaf(c) else tree.stage_of[c])
        if len(kinds) != 1:
            raise ResizeError(
                "resize not applicable: children at position %d of stage %r "
                "are not pairwise in the same stage" % (i + 1, sid)
            )
        pattern.append(next(iter(kinds)))
    internal_positions = [i for i, p in enumerate(pattern) if p is not None]
    if not internal_positions:
        raise ResizeError("resize not applicable: stage %r has leaf children only" % sid)
    if sid in pattern:
        raise ResizeError("resize not applicable: stage %r feeds itself" % sid)

    child_stage_ids = [pattern[i] for i in internal_positions]
    naive = len(set(child_stage_ids)) != len(child_stage_ids)
    merged_away = {(v, i) for v in members for i in internal_positions}
    for v in tree.dfs_order:
        if tree.is_leaf(v) or tree.stage_of[v] not in child_stage_ids:
            continue
        parent = tree.parent[v]
        if parent is None or (parent, tree.children[parent].index(v)) not in merged_away:
            naive = True

    new_labels: list[str] = []
    substitution: dict[str, tuple[str, str]] = {}
    for i in range(stage.arity):
        tau = stage.labels[i]
        if pattern[i] is None:
            new_labels.append(tau)
        else:
            child_stage = tree.stages[pattern[i]]
            for sigma in child_stage.labels:
                name = "%s.%s" % (tau, sigma)
                new_labels.append(name)
                substitution[name] = (tau, sigma)

    merged_sid = sid + "*"
    while merged_sid in tree.stages:
        merged_sid += "*"
    children = {v: list(c) for v, c in tree.children.items()}
    stage_of = dict(tree.stage_of)
    removed: set[str] = set()
    for v in members:
        new_kids: list[str] = []
        for i in range(stage.arity):
            c = tree.children[v][i]
            if pattern[i] is None:
                new_kids.append(c)
            else:
                removed.add(c)
                new_kids.extend(tree.children[c])
        children[v] = new_kids
        stage_of[v] = merged_sid
    for c in removed:
        children.pop(c, None)
        stage_of.pop(c, None)

    used_stage_ids = set(stage_of.values())
    stages = [s for s in tree.stages.values() if s.id in used_stage_ids and s.id != merged_sid]
    stages.append(Stage(merged_sid, new_labels))
    new_tree = StagedTree(stages, tree.root, children, stage_of, name=tree.name)
    return ResizeResult(new_tree, naive, substitution, merged_sid)


def check_resize_substitution(original: StagedTree, result: ResizeResult) -> bool:
    """Substituting each product label back recovers the original root
    subtree polynomial exactly."""
    old_ring = original.theta_varset()
    new_ring = result.tree.theta_varset()
    images = {}
    for name in new_ring.names:
        if name in result.substitution:
            tau, sigma = result.substitution[name]
            images[name] = old_ring.gen(tau) * old_ring.gen(sigma)
        else:
            images[name] = old_ring.gen(name)
    lhs = result.tree.subtree_polynomial(result.tree.root, new_ring).substitute(images)
    rhs = original.subtree_polynomial(original.root, old_ring)
    return lhs == rhs

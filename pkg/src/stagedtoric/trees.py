"""The staged tree data model.

A staged tree is a rooted tree with edges directed away from the root.
Every internal vertex belongs to a stage; a stage carries an ordered list
of edge labels (parameters), and a vertex's outgoing edges are labelled by
its stage's labels in order.  Distinct stages have disjoint label sets.
Leaves are numbered 1..n in depth-first order, visiting children in label
order, so leaf 1 is the topmost drawing position.

The label ``z`` is reserved for the homogenising parameter: out-degree-one
vertices inserted to push every leaf to the common depth d all share one
anonymous stage labelled ``z``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import Polynomial, VarSet

Z_NAME = "z"
Z_STAGE_ID = "_z"

ONE = Fraction(1)


class Stage:
    """An ordered list of distinct parameter names shared by its vertices."""

    __slots__ = ("id", "labels")

    def __init__(self, id: str, labels: Sequence[str]):
        if len(labels) < 1:
            raise ValueError("stage %r needs at least one label" % id)
        if len(set(labels)) != len(labels):
            raise ValueError("stage %r has repeated labels" % id)
        self.id = id
        self.labels = tuple(labels)

    @property
    def arity(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return "Stage(%s: %s)" % (self.id, " ".join(self.labels))

    def __eq__(self, other) -> bool:
        return isinstance(other, Stage) and self.id == other.id and self.labels == other.labels

    def __hash__(self) -> int:
        return hash((self.id, self.labels))


class TreeError(ValueError):
    """Structural defect in a staged tree description."""


class StagedTree:
    """Immutable staged tree with validated structure.

    ``children`` maps every vertex to its (possibly empty) ordered child
    tuple and ``stage_of`` assigns a stage id to every internal vertex.
    """

    def __init__(
        self,
        stages: Iterable[Stage],
        root: str,
        children: Mapping[str, Sequence[str]],
        stage_of: Mapping[str, str],
        name: str = "",
    ):
        stage_list = list(stages)
        self.stages = {s.id: s for s in stage_list}
        if len(self.stages) != len(stage_list):
            raise TreeError("duplicate stage ids")
        self.root = root
        self.children = {v: tuple(c) for v, c in children.items()}
        self.stage_of = dict(stage_of)
        self.name = name
        self._validate()
        self._index()

    # -- validation and derived structure -----------------------------

    def _validate(self):
        if self.root not in self.children:
            raise TreeError("root %r is not a declared vertex" % self.root)
        seen_labels: dict[str, str] = {}
        for s in self.stages.values():
            for lab in s.labels:
                if lab in seen_labels:
                    raise TreeError(
                        "label %r appears in stages %r and %r" % (lab, seen_labels[lab], s.id)
                    )
                seen_labels[lab] = s.id
                if lab == Z_NAME and s.arity != 1:
                    raise TreeError("label %r is reserved for out-degree-one padding stages" % Z_NAME)
        parents: dict[str, str] = {}
        for v, kids in self.children.items():
            for c in kids:
                if c in parents:
                    raise TreeError("vertex %r has two parents" % c)
                if c not in self.children:
                    raise TreeError("child %r of %r is not declared" % (c, v))
                parents[c] = v
        # reachability (also rules out cycles, since each vertex has <= 1 parent)
        seen = set()
        stack = [self.root]
        while stack:
            v = stack.pop()
            if v in seen:
                raise TreeError("cycle through %r" % v)
            seen.add(v)
            stack.extend(self.children[v])
        if seen != set(self.children):
            missing = sorted(set(self.children) - seen)
            raise TreeError("unreachable vertices: %s" % ", ".join(missing))
        if self.root in parents:
            raise TreeError("root has a parent")
        if not self.children[self.root]:
            raise TreeError("root must be internal")
        for v, kids in self.children.items():
            if kids:
                sid = self.stage_of.get(v)
                if sid is None:
                    raise TreeError("internal vertex %r has no stage" % v)
                if sid not in self.stages:
                    raise TreeError("vertex %r uses undefined stage %r" % (v, sid))
                if len(kids) != self.stages[sid].arity:
                    raise TreeError(
                        "vertex %r has %d children but stage %r has arity %d"
                        % (v, len(kids), sid, self.stages[sid].arity)
                    )
            elif v in self.stage_of:
                raise TreeError("leaf %r must not carry a stage" % v)

    def _index(self):
        self.parent: dict[str, str | None] = {self.root: None}
        self.depth_of: dict[str, int] = {self.root: 0}
        order: list[str] = []
        leaves: list[str] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            kids = self.children[v]
            if not kids:
                leaves.append(v)
            for c in reversed(kids):
                self.parent[c] = v
                self.depth_of[c] = self.depth_of[v] + 1
                stack.append(c)
        self.dfs_order = tuple(order)
        self.leaves = tuple(leaves)  # depth-first, top to bottom
        self.leaf_number = {v: i + 1 for i, v in enumerate(leaves)}
        self.n = len(leaves)
        self.depth = max(self.depth_of[v] for v in leaves)
        by_stage: dict[str, list[str]] = {}
        post: list[str] = []

        def visit(v):
            for c in self.children[v]:
                visit(c)
            post.append(v)

        visit(self.root)
        self.postorder = tuple(post)
        for v in post:
            if self.children[v]:
                by_stage.setdefault(self.stage_of[v], []).append(v)
        self.stage_vertices = {sid: tuple(vs) for sid, vs in by_stage.items()}

    # -- basic queries -------------------------------------------------

    def is_leaf(self, v: str) -> bool:
        return not self.children[v]

    def internal_vertices(self) -> list[str]:
        return [v for v in self.dfs_order if self.children[v]]

    def stage(self, v: str) -> Stage:
        return self.stages[self.stage_of[v]]

    def edge_label(self, v: str, i: int) -> str:
        return self.stage(v).labels[i]

    def path_labels(self, v: str) -> list[str]:
        """Edge labels along the root-to-v path."""
        out = []
        while self.parent[v] is not None:
            p = self.parent[v]
            out.append(self.edge_label(p, self.children[p].index(v)))
            v = p
        out.reverse()
        return out

    def subtree_vertices(self, v: str) -> list[str]:
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def leaves_below(self, v: str) -> list[str]:
        return [u for u in self.subtree_vertices(v) if self.is_leaf(u)]

    def label_names(self) -> list[str]:
        names = []
        for sid in sorted(self.stages):
            if sid == Z_STAGE_ID:
                continue
            names.extend(self.stages[sid].labels)
        return names

    def theta_varset(self) -> VarSet:
        """Ring of the parameters together with the homogenising variable."""
        return VarSet(self.label_names() + [Z_NAME])

    def p_varset(self) -> VarSet:
        return VarSet(["p%d" % (i + 1) for i in range(self.n)])

    # -- the parametrisation -------------------------------------------

    def atom_monomial(self, r: int, varset: VarSet | None = None):
        """Image of p_r: the path-label monomial padded by z to degree d."""
        if not 1 <= r <= self.n:
            raise ValueError("leaf index %d out of range" % r)
        varset = varset or self.theta_varset()
        leaf = self.leaves[r - 1]
        exps = [0] * len(varset)
        labels = self.path_labels(leaf)
        for lab in labels:
            exps[varset.index[Z_NAME if lab == Z_NAME else lab]] += 1
        exps[varset.index[Z_NAME]] += self.depth - len(labels)
        return tuple(exps)

    def atom_polynomial(self, r: int, varset: VarSet | None = None) -> Polynomial:
        varset = varset or self.theta_varset()
        return Polynomial.from_monomial(varset, self.atom_monomial(r, varset))

    def bracket(self, v: str) -> "LinearForm":
        """p_[v]: the sum of the atom variables whose path passes v."""
        return LinearForm({self.leaf_number[u]: ONE for u in self.leaves_below(v)})

    def bracket_monomial(self, v: str, varset: VarSet | None = None):
        """Image of p_[v] modulo the sum-to-one relations: the root-to-v
        label monomial padded by z to degree d."""
        varset = varset or self.theta_varset()
        exps = [0] * len(varset)
        labels = self.path_labels(v)
        for lab in labels:
            exps[varset.index[Z_NAME if lab == Z_NAME else lab]] += 1
        exps[varset.index[Z_NAME]] += self.depth - len(labels)
        return tuple(exps)

    def subtree_polynomial(self, v: str, varset: VarSet | None = None) -> Polynomial:
        """t(v): sum over v-to-leaf paths of the product of edge labels."""
        varset = varset or self.theta_varset()
        cache: dict[str, Polynomial] = {}

        def t(u: str) -> Polynomial:
            if u in cache:
                return cache[u]
            if self.is_leaf(u):
                val = Polynomial.constant(varset, 1)
            else:
                val = Polynomial.zero(varset)
                for lab, c in zip(self.stage(u).labels, self.children[u]):
                    val = val + varset.gen(lab) * t(c)
            cache[u] = val
            return val

        return t(v)

    def multiplicity(self, stage_id: str, v: str) -> int:
        """Greatest m such that every v-to-leaf path meets >= m vertices of
        the stage; 0 as soon as one path avoids it entirely."""
        if stage_id not in self.stages:
            raise ValueError("unknown stage %r" % stage_id)

        def walk(u: str) -> int:
            own = 1 if (not self.is_leaf(u) and self.stage_of[u] == stage_id) else 0
            if self.is_leaf(u):
                return 0
            return own + min(walk(c) for c in self.children[u])

        return walk(v)

    def homogenize(self) -> "StagedTree":
        """Push every leaf to depth d through out-degree-one z-labelled
        vertices; atom images are unchanged and the map is idempotent."""
        short = [v for v in self.leaves if self.depth_of[v] < self.depth]
        if not short:
            return self
        stages = [s for s in self.stages.values()]
        if Z_STAGE_ID not in self.stages:
            stages.append(Stage(Z_STAGE_ID, [Z_NAME]))
        children = {v: list(c) for v, c in self.children.items()}
        stage_of = dict(self.stage_of)
        for v in short:
            gap = self.depth - self.depth_of[v]
            chain = [v] + ["%s@%d" % (v, k) for k in range(1, gap + 1)]
            for a, b in zip(chain, chain[1:]):
                children[a] = [b]
                stage_of[a] = Z_STAGE_ID
            children[chain[-1]] = []
        return StagedTree(stages, self.root, children, stage_of, name=self.name)

    # -- identity -------------------------------------------------------

    def atom_multiset(self, varset: VarSet | None = None):
        varset = varset or self.theta_varset()
        return sorted(self.atom_monomial(r, varset) for r in range(1, self.n + 1))

    def relabel(self, rename: Mapping[str, str]) -> "StagedTree":
        """Rename parameters (stage structure unchanged)."""
        stages = [Stage(s.id, [rename.get(l, l) for l in s.labels]) for s in self.stages.values()]
        return StagedTree(stages, self.root, self.children, self.stage_of, name=self.name)

    def __repr__(self) -> str:
        return "StagedTree(%sn=%d, d=%d, %d stages)" % (
            (self.name + ": ") if self.name else "",
            self.n,
            self.depth,
            len(self.stages),
        )


class LinearForm:
    """A rational linear combination of the atom variables p_r.

    Stored sparsely as a map from 1-based leaf index to coefficient.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        self.coeffs = {i: Fraction(c) for i, c in (coeffs or {}).items() if c}

    @staticmethod
    def unit(r: int) -> "LinearForm":
        return LinearForm({r: ONE})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "LinearForm") -> "LinearForm":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            s = out.get(i, 0) + c
            if s:
                out[i] = s
            else:
                out.pop(i, None)
        return LinearForm(out)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scale(Fraction(-1))

    def __neg__(self) -> "LinearForm":
        return self.scale(Fraction(-1))

    def scale(self, c) -> "LinearForm":
        c = Fraction(c)
        return LinearForm({i: c * v for i, v in self.coeffs.items()})

    def vector(self, n: int) -> list[Fraction]:
        return [self.coeffs.get(i + 1, Fraction(0)) for i in range(n)]

    def to_polynomial(self, p_varset: VarSet) -> Polynomial:
        terms = {}
        for i, c in self.coeffs.items():
            e = [0] * len(p_varset)
            e[p_varset.index["p%d" % i]] = 1
            terms[tuple(e)] = c
        return Polynomial(p_varset, terms)

    def image(self, tree: StagedTree, varset: VarSet | None = None) -> Polynomial:
        """The form's image: sum of coefficient-weighted atom monomials."""
        varset = varset or tree.theta_varset()
        terms: dict = {}
        for r, c in self.coeffs.items():
            m = tree.atom_monomial(r, varset)
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial(varset, terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def format(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in sorted(self.coeffs):
            c = self.coeffs[i]
            name = "p%d" % i
            mag = abs(c)
            text = name if mag == 1 else "%s*%s" % (mag, name)
            if not parts:
                parts.append(text if c > 0 else "-" + text)
            else:
                parts.append(("+ " if c > 0 else "- ") + text)
        return " ".join(parts)

    __str__ = format

    def __repr__(self) -> str:
        return "LinearForm(%s)" % self.format()

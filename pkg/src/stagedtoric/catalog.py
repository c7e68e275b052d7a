"""Bundled example trees.

All the worked examples live here: the coin flip, the two-colour cube with
its resize/swap companions, the six-leaf binary tree with toric structure,
the certificate examples, the Bayesian-network trees, the open trees, and
the one-stage tables.  Each builder returns a fresh StagedTree; the
``corpus`` helper writes them out as ``.tree`` files.
"""

from __future__ import annotations

import os

from .trees import Stage, StagedTree
from .treedsl import serialize_tree
from .treeops import resize, swap


def coin_flip() -> StagedTree:
    """Flip a biased coin; on heads flip again.  Both internal vertices
    share one stage, so the tree is non-squarefree and not balanced."""
    return StagedTree(
        [Stage("c", ["t1", "t2"])],
        "r",
        {"r": ["v", "l3"], "v": ["l1", "l2"], "l1": [], "l2": [], "l3": []},
        {"r": "c", "v": "c"},
        name="coinflip",
    )


def colour_audit_example() -> StagedTree:
    """Balanced tree with an out-degree-one stage in the middle of a branch."""
    return StagedTree(
        [Stage("a", ["a1", "a2"]), Stage("b", ["b1", "b2"]), Stage("m", ["mu"])],
        "r",
        {
            "r": ["u", "m1"],
            "u": ["l1", "l2"],
            "m1": ["v"],
            "v": ["l3", "l4"],
            "l1": [], "l2": [], "l3": [], "l4": [],
        },
        {"r": "a", "u": "b", "m1": "m", "v": "b"},
        name="fig2",
    )


def two_colour_cube() -> StagedTree:
    """Full binary depth-3 tree, one colour at depths 0 and 2, another at
    depth 1.  Balanced, non-squarefree: atoms 2 and 5 agree, as do 4 and 7."""
    children = {
        "r": ["u1", "u2"],
        "u1": ["w11", "w12"], "u2": ["w21", "w22"],
        "w11": ["a1", "a2"], "w12": ["a3", "a4"],
        "w21": ["a5", "a6"], "w22": ["a7", "a8"],
    }
    for i in range(1, 9):
        children["a%d" % i] = []
    stage_of = {"r": "blue", "u1": "green", "u2": "green"}
    for w in ("w11", "w12", "w21", "w22"):
        stage_of[w] = "blue"
    return StagedTree(
        [Stage("blue", ["b1", "b2"]), Stage("green", ["g1", "g2"])],
        "r",
        children,
        stage_of,
        name="fig3a",
    )


def two_colour_cube_resized() -> StagedTree:
    t = resize(two_colour_cube(), "u1").tree
    t.name = "fig3b"
    return t


def two_colour_cube_swapped() -> StagedTree:
    resized = two_colour_cube_resized()
    t = swap(resized, resized.root, resized.stage_of["u1"])
    t.name = "fig3c"
    return t


def binary_toric_six() -> StagedTree:
    """One-stage binary tree with six leaves and depth four whose algebra
    is the full degree-4 span in two parameters."""
    children = {
        "r": ["A", "B"],
        "A": ["p1", "p2"],
        "B": ["C", "p6"],
        "C": ["p3", "D"],
        "D": ["p4", "p5"],
    }
    for leaf in ("p1", "p2", "p3", "p4", "p5", "p6"):
        children[leaf] = []
    stage_of = {v: "c" for v in ("r", "A", "B", "C", "D")}
    return StagedTree([Stage("c", ["t1", "t2"])], "r", children, stage_of, name="fig4")


def hybrid_twelve() -> StagedTree:
    """Depth-4, 12-leaf tree: a level-staged balanced prefix of depth 3
    with two extra stages hanging below four of its frontier vertices.
    Not balanced; its kernel needs generators of degrees two and four."""
    children = {
        "r": ["u1", "u2"],
        "u1": ["w11", "w12"], "u2": ["w21", "w22"],
        "w11": ["v1", "v2"], "w12": ["v3", "v4"],
        "w21": ["v5", "v6"], "w22": ["v7", "v8"],
        "v1": ["x1", "x2"], "v2": [],
        "v3": ["x4", "x5"], "v4": [],
        "v5": ["x7", "x8"], "v6": [],
        "v7": ["x10", "x11"], "v8": [],
    }
    for x in ("x1", "x2", "x4", "x5", "x7", "x8", "x10", "x11"):
        children[x] = []
    stage_of = {
        "r": "blue", "u1": "green", "u2": "green",
        "w11": "teal", "w21": "teal", "w12": "plum", "w22": "plum",
        "v1": "lg", "v7": "lg", "v3": "dg", "v5": "dg",
    }
    return StagedTree(
        [
            Stage("blue", ["b1", "b2"]),
            Stage("green", ["g1", "g2"]),
            Stage("teal", ["c1", "c2"]),
            Stage("plum", ["d1", "d2"]),
            Stage("lg", ["e1", "e2"]),
            Stage("dg", ["h1", "h2"]),
        ],
        "r",
        children,
        stage_of,
        name="fig5",
    )


def minors_eleven() -> StagedTree:
    """Eleven leaves, a 3-label stage with four vertices and a 2-label
    stage with two; toric via a change of variables found by row and
    column operations on the stage matrices."""
    children = {
        "r": ["X", "l9", "W"],
        "X": ["V", "A", "B"],
        "V": ["l1", "l2"],
        "A": ["l3", "l4", "l5"],
        "B": ["l6", "l7", "l8"],
        "W": ["l10", "l11"],
    }
    for i in range(1, 12):
        children["l%d" % i] = []
    stage_of = {"r": "m", "X": "m", "A": "m", "B": "m", "V": "g", "W": "g"}
    return StagedTree(
        [Stage("m", ["m1", "m2", "m3"]), Stage("g", ["g1", "g2"])],
        "r",
        children,
        stage_of,
        name="fig6",
    )


def nested_sip() -> StagedTree:
    """Depth-4 tree with three stages whose valid child indices are
    {1, 2} for the root stage, {1} for blue, and {2} for green."""
    children = {
        "r": ["u1", "u2"],
        "u1": ["l1", "w1"], "u2": ["l5", "w2"],
        "w1": ["x1", "l4"], "w2": ["x2", "l8"],
        "x1": ["l2", "l3"], "x2": ["l6", "l7"],
    }
    for i in range(1, 9):
        children["l%d" % i] = []
    stage_of = {
        "r": "yellow",
        "u1": "blue", "u2": "blue",
        "w1": "green", "w2": "green",
        "x1": "blue", "x2": "blue",
    }
    return StagedTree(
        [Stage("yellow", ["y1", "y2"]), Stage("blue", ["b1", "b2"]), Stage("green", ["g1", "g2"])],
        "r",
        children,
        stage_of,
        name="fig7",
    )


def _binary_bn(parents: dict[int, list[int]], name: str) -> StagedTree:
    """Staged tree of a Bayesian network on four binary variables.

    Vertices at distance t-1 are the histories of the first t-1 variables;
    two histories share a stage exactly when they agree on the parents of
    the next variable.
    """
    nvars = 4
    stages: dict[str, Stage] = {}
    children: dict[str, list[str]] = {}
    stage_of: dict[str, str] = {}

    def vid(history: tuple[int, ...]) -> str:
        return "v" + "".join(str(b) for b in history) if history else "root"

    for t in range(nvars + 1):
        from itertools import product

        for history in product((0, 1), repeat=t):
            v = vid(history)
            if t == nvars:
                children[v] = []
                continue
            children[v] = [vid(history + (0,)), vid(history + (1,))]
            pa = parents.get(t + 1, [])
            key = tuple(history[p - 1] for p in pa)
            sid = "s%d_%s" % (t + 1, "".join(str(b) for b in key) or "x")
            if sid not in stages:
                suffix = "".join(str(b) for b in key)
                base = "x%d%s" % (t + 1, ("_" + suffix) if suffix else "")
                stages[sid] = Stage(sid, [base + "a", base + "b"])
            stage_of[v] = sid
    return StagedTree(list(stages.values()), "root", children, stage_of, name=name)


def bn_diamond() -> StagedTree:
    """Four binary variables, edges 1->2, 1->3, 2->4, 3->4; the balanced
    prefix reaches depth 3."""
    return _binary_bn({2: [1], 3: [1], 4: [2, 3]}, "fig8a")


def bn_collider() -> StagedTree:
    """Four binary variables, edges 1->3, 2->3, 2->4; the balanced prefix
    reaches depth 2."""
    return _binary_bn({2: [], 3: [1, 2], 4: [2]}, "fig8b")


def one_stage(shape, labels, name="") -> StagedTree:
    """One-stage tree from a nested shape: () is a leaf, otherwise the
    tuple of child shapes (length must equal the label count)."""
    k = len(labels)
    children: dict[str, list[str]] = {}
    stage_of: dict[str, str] = {}
    counter = [0]

    def build(node) -> str:
        vid = "n%d" % counter[0]
        counter[0] += 1
        if node == ():
            children[vid] = []
            return vid
        if len(node) != k:
            raise ValueError("internal vertex needs exactly %d children" % k)
        kids = [build(c) for c in node]
        children[vid] = kids
        stage_of[vid] = "c"
        return vid

    root = build(shape)
    return StagedTree([Stage("c", list(labels))], root, children, stage_of, name=name)


L = ()  # leaf shorthand
S3 = (L, L, L)
S2 = (L, L)


def open_caterpillar() -> StagedTree:
    """Three parameters, depth four, one internal vertex per level with
    the continuation edge at positions 1, 2, 3; no child index works for
    the stage, so the subtree-inclusion route is closed."""
    c3 = (L, L, L)
    c2 = (L, L, c3)
    c1 = (L, c2, L)
    return one_stage((c1, L, L), ["t1", "t2", "t3"], name="fig10")


def t32_trees() -> list[StagedTree]:
    """The three one-stage trees of depth two on three parameters, up to
    permutation."""
    return [
        one_stage((S3, L, L), ["t1", "t2", "t3"], "t32_1"),
        one_stage((S3, S3, L), ["t1", "t2", "t3"], "t32_2"),
        one_stage((S3, S3, S3), ["t1", "t2", "t3"], "t32_3"),
    ]


def t33_table() -> dict[str, StagedTree]:
    """Twenty one-stage trees of depth three on three parameters.

    The numbering matches the worked table: T13 and T14 span the full
    degree-3 space, the pairs (T4,T5), (T8,T16), (T10,T18), (T11,T17),
    (T18,T19) generate equal algebras, and exactly T4, T8, T10, T11, T14,
    T18 fail the subtree-inclusion property.
    """
    t = {}
    labels = ["t1", "t2", "t3"]
    t["T1"] = one_stage(((S3, L, L), L, L), labels, "T1")
    t["T2"] = one_stage(((L, S3, L), L, L), labels, "T2")
    t["T3"] = one_stage((S3, S3, L), labels, "T3")
    t["T4"] = one_stage(((L, S3, S3), L, L), labels, "T4")
    t["T5"] = one_stage(((S3, S3, S3), L, L), labels, "T5")
    t["T6"] = one_stage(((S3, S3, L), L, L), labels, "T6")
    t["T7"] = one_stage(((S3, L, L), S3, L), labels, "T7")
    t["T8"] = one_stage(((L, L, S3), S3, L), labels, "T8")
    t["T9"] = one_stage(((S3, L, L), (S3, L, L), L), labels, "T9")
    t["T10"] = one_stage(((L, S3, S3), S3, L), labels, "T10")
    t["T11"] = one_stage(((S3, L, S3), S3, L), labels, "T11")
    t["T12"] = one_stage((L, S3, (L, S3, S3)), labels, "T12")
    t["T13"] = one_stage(((S3, L, L), (L, S3, L), L), labels, "T13")
    t["T14"] = one_stage(((S3, L, L), (L, L, S3), L), labels, "T14")
    t["T15"] = one_stage((S3, (S3, L, L), L), labels, "T15")
    t["T16"] = one_stage(((L, L, S3), S3, S3), labels, "T16")
    t["T17"] = one_stage(((S3, L, S3), S3, S3), labels, "T17")
    t["T18"] = one_stage(((L, S3, S3), S3, S3), labels, "T18")
    t["T19"] = one_stage(((S3, S3, S3), S3, S3), labels, "T19")
    t["T20"] = one_stage(((S3, L, L), S3, S3), labels, "T20")
    return t


def open_two_stage() -> StagedTree:
    """Two-stage tree left undecided: not balanced, no subtree-inclusion
    index, no balanced prefix, yet its ideal of minors equals the kernel."""
    return StagedTree(
        [Stage("s", ["r1", "r2"]), Stage("c", ["t1", "t2"])],
        "root",
        {
            "root": ["u", "l5"],
            "u": ["v", "l4"],
            "v": ["l1", "w"],
            "w": ["l2", "l3"],
            "l1": [], "l2": [], "l3": [], "l4": [], "l5": [],
        },
        {"root": "s", "u": "c", "v": "c", "w": "c"},
        name="fig11",
    )


def search_example() -> StagedTree:
    """Non-balanced tree with no structural certificate on which the
    seeded random row/column search succeeds: a two-vertex stage blocking
    both child positions, with a second colour below."""
    return StagedTree(
        [Stage("m", ["m1", "m2"]), Stage("g", ["g1", "g2"])],
        "root",
        {
            "root": ["X", "l4"],
            "X": ["l1", "V"],
            "V": ["l2", "l3"],
            "l1": [], "l2": [], "l3": [], "l4": [],
        },
        {"root": "m", "X": "m", "V": "g"},
        name="fig9",
    )


CORPUS_BUILDERS = {
    "coinflip": coin_flip,
    "fig2": colour_audit_example,
    "fig3a": two_colour_cube,
    "fig3b": two_colour_cube_resized,
    "fig3c": two_colour_cube_swapped,
    "fig4": binary_toric_six,
    "fig5": hybrid_twelve,
    "fig6": minors_eleven,
    "fig7": nested_sip,
    "fig8a": bn_diamond,
    "fig8b": bn_collider,
    "fig9": search_example,
    "fig10": open_caterpillar,
    "fig11": open_two_stage,
}


def corpus() -> dict[str, StagedTree]:
    return {name: build() for name, build in CORPUS_BUILDERS.items()}


def write_corpus(directory: str):
    os.makedirs(directory, exist_ok=True)
    for name, build in CORPUS_BUILDERS.items():
        with open(os.path.join(directory, name + ".tree"), "w") as fh:
            fh.write(serialize_tree(build()))

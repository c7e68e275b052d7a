"""Line-oriented DSL for staged trees, canonical serializer, DOT export.

Grammar ('#' starts a comment, statements end with ';'):

    stage <id> : <label> <label> ... ;
    vertex <id> stage <stage-id> children <vertex-id> ... ;
    vertex <id> leaf ;
    root <vertex-id> ;

Child list length must equal the stage arity, and child order corresponds
to label order top-to-bottom.
"""

from __future__ import annotations

import re

from .trees import Stage, StagedTree, TreeError, Z_STAGE_ID

_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-'@~]*$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.line = line
        self.column = column


def _statements(text: str):
    """Yield (line, tokens) per ';'-terminated statement."""
    current: list[str] = []
    start_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        col = 1
        for piece in line.replace(";", " ; ").split():
            if piece == ";":
                if current:
                    yield start_line, current
                current = []
                start_line = None
            else:
                if start_line is None:
                    start_line = lineno
                current.append(piece)
            col += len(piece)
    if current:
        raise ParseError("statement missing terminating ';'", start_line or 1)


def parse_tree(text: str, name: str = "") -> StagedTree:
    """Parse DSL source into a validated StagedTree."""
    stages: list[Stage] = []
    stage_ids: set[str] = set()
    children: dict[str, list[str]] = {}
    stage_of: dict[str, str] = {}
    root: str | None = None
    saw_any = False
    for line, toks in _statements(text):
        saw_any = True
        head = toks[0]
        if head == "stage":
            if len(toks) < 4 or toks[2] != ":":
                raise ParseError("expected 'stage <id> : <labels...>'", line)
            sid = toks[1]
            if sid in stage_ids:
                raise ParseError("stage %r declared twice" % sid, line)
            labels = toks[3:]
            for lab in labels:
                if not _ID.match(lab):
                    raise ParseError("bad label %r" % lab, line)
            try:
                stages.append(Stage(sid, labels))
            except ValueError as e:
                raise ParseError(str(e), line) from None
            stage_ids.add(sid)
        elif head == "vertex":
            if len(toks) < 3:
                raise ParseError("truncated vertex statement", line)
            vid = toks[1]
            if not _ID.match(vid):
                raise ParseError("bad vertex id %r" % vid, line)
            if vid in children:
                raise ParseError("vertex %r declared twice" % vid, line)
            if toks[2] == "leaf":
                if len(toks) != 3:
                    raise ParseError("leaf vertex takes no arguments", line)
                children[vid] = []
            elif toks[2] == "stage":
                if len(toks) < 6 or toks[4] != "children":
                    raise ParseError(
                        "expected 'vertex <id> stage <stage-id> children <ids...>'", line
                    )
                stage_of[vid] = toks[3]
                children[vid] = toks[5:]
            else:
                raise ParseError("expected 'stage' or 'leaf' after vertex id", line)
        elif head == "root":
            if len(toks) != 2:
                raise ParseError("expected 'root <vertex-id>'", line)
            if root is not None:
                raise ParseError("root declared twice", line)
            root = toks[1]
        else:
            raise ParseError("unknown statement %r" % head, line)
    if not saw_any:
        raise ParseError("empty tree description", 1)
    if root is None:
        raise ParseError("no root declared", 1)
    try:
        return StagedTree(stages, root, children, stage_of, name=name)
    except TreeError as e:
        raise ParseError(str(e), 1) from None


def serialize_tree(tree: StagedTree) -> str:
    """Canonical form: stages sorted by id, vertices in depth-first order."""
    out = []
    for sid in sorted(tree.stages):
        s = tree.stages[sid]
        out.append("stage %s : %s ;" % (s.id, " ".join(s.labels)))
    for v in tree.dfs_order:
        kids = tree.children[v]
        if kids:
            out.append("vertex %s stage %s children %s ;" % (v, tree.stage_of[v], " ".join(kids)))
        else:
            out.append("vertex %s leaf ;" % v)
    out.append("root %s ;" % tree.root)
    return "\n".join(out) + "\n"


_PALETTE = [
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3", "#a6d854",
    "#ffd92f", "#e5c494", "#b3b3b3", "#1b9e77", "#d95f02",
    "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
]


def stage_colours(tree: StagedTree) -> dict[str, str]:
    colours = {}
    for i, sid in enumerate(sorted(tree.stages)):
        colours[sid] = "#dddddd" if sid == Z_STAGE_ID else _PALETTE[i % len(_PALETTE)]
    return colours


def to_dot(tree: StagedTree) -> str:
    """Graphviz source: one node per vertex, fill colour per stage, edge
    labels carrying the parameter names."""
    colours = stage_colours(tree)
    lines = ["digraph staged_tree {", "  rankdir=LR;", "  node [style=filled];"]
    for v in tree.dfs_order:
        if tree.is_leaf(v):
            lines.append(
                '  "%s" [label="%d", shape=box, fillcolor="#ffffff"];'
                % (v, tree.leaf_number[v])
            )
        else:
            lines.append(
                '  "%s" [label="%s", shape=circle, fillcolor="%s"];'
                % (v, v, colours[tree.stage_of[v]])
            )
    for v in tree.dfs_order:
        kids = tree.children[v]
        for lab, c in zip(tree.stage(v).labels if kids else [], kids):
            lines.append('  "%s" -> "%s" [label="%s"];' % (v, c, lab))
    lines.append("}")
    return "\n".join(lines) + "\n"

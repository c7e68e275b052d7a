"""Command-line driver.

    stagedtoric validate <file.tree>
    stagedtoric analyze  <file.tree> [--format json|text|dot] [--seed N]
                         [--oracle on|off|cache-only] [--forms forms.json]
                         [--budget default|small|large] [--render DIR]
                         [--trials N] [--timings]
    stagedtoric corpus   <dir> [--format json|text] [--out FILE]
                         [--csv FILE] [--render DIR] [--seed N] ...

Exit codes: 0 success, 1 usage or parse error, 2 validation error,
3 budget exceeded, 4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .algebra import Budget, BudgetExceeded
from .kernel import CACHE_ENV, OracleBudget
from .report import (
    AnalysisOptions,
    analyze_tree,
    render_tree,
    to_csv,
    to_json,
    to_table,
    to_text,
)
from .treedsl import ParseError, parse_tree, to_dot
from .trees import LinearForm, TreeError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_ORACLE = 4

BUDGET_PROFILES = {
    "small": (OracleBudget(max_leaves=10, max_labels=7, gb=Budget(1000, 30, 6000)), Budget(1000, 30, 6000)),
    "default": (OracleBudget(), Budget()),
    "large": (
        OracleBudget(max_leaves=20, max_labels=12, gb=Budget(8000, 80, 60000)),
        Budget(8000, 80, 60000),
    ),
}


def _load_tree(path: str):
    with open(path) as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_tree(text, name=name)


def _load_forms(path: str) -> list[LinearForm]:
    with open(path) as fh:
        data = json.load(fh)
    forms = []
    if isinstance(data, dict):
        data = data["forms"]
    for row in data:
        if isinstance(row, dict):
            forms.append(
                LinearForm({int(k.lstrip("p")): Fraction(str(v)) for k, v in row.items()})
            )
        else:
            forms.append(
                LinearForm({i + 1: Fraction(str(c)) for i, c in enumerate(row) if Fraction(str(c))})
            )
    return forms


def _options(args) -> AnalysisOptions:
    oracle_budget, gb_budget = BUDGET_PROFILES[args.budget]
    return AnalysisOptions(
        seed=args.seed,
        search_trials=args.trials,
        oracle=args.oracle,
        oracle_budget=oracle_budget,
        gb_budget=gb_budget,
        cache_dir=args.cache or os.environ.get(CACHE_ENV),
        forms=_load_forms(args.forms) if getattr(args, "forms", None) else None,
        timings=args.timings,
    )


def cmd_validate(args) -> int:
    try:
        tree = _load_tree(args.path)
    except FileNotFoundError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TreeError) as e:
        print("invalid: %s" % e, file=sys.stderr)
        return EXIT_VALIDATION
    hom = tree.homogenize()
    print(
        "valid: %s (n=%d, depth=%d, %d stages)"
        % (tree.name, tree.n, hom.depth, len(tree.stages))
    )
    if args.format == "dot":
        print(to_dot(tree), end="")
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        tree = _load_tree(args.path)
    except FileNotFoundError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TreeError) as e:
        print("invalid: %s" % e, file=sys.stderr)
        return EXIT_VALIDATION
    if args.format == "dot":
        sys.stdout.write(to_dot(tree))
        return EXIT_OK
    try:
        report = analyze_tree(tree, _options(args))
    except BudgetExceeded as e:
        print("budget exceeded: %s" % e, file=sys.stderr)
        return EXIT_BUDGET
    if args.render:
        os.makedirs(args.render, exist_ok=True)
        render_tree(tree, os.path.join(args.render, tree.name + ".png"))
    sys.stdout.write(to_json(report) if args.format == "json" else to_text(report))
    if report.get("oracle", {}).get("agreement") is False:
        return EXIT_ORACLE
    return EXIT_OK


def cmd_corpus(args) -> int:
    try:
        names = sorted(f for f in os.listdir(args.dir) if f.endswith(".tree"))
    except FileNotFoundError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    options = _options(args)
    reports = []
    disagreement = False
    jobs = max(1, args.jobs)
    paths = [os.path.join(args.dir, f) for f in names]
    if jobs > 1 and len(paths) > 1:
        import multiprocessing as mp

        with mp.Pool(jobs) as pool:
            reports = pool.starmap(
                _corpus_row, [(p, args.seed, args.trials, args.oracle, args.budget) for p in paths]
            )
    else:
        reports = [
            _corpus_row(p, args.seed, args.trials, args.oracle, args.budget)
            for p in paths
        ]
    for report in reports:
        if report.get("oracle", {}).get("agreement") is False:
            disagreement = True
    if args.render:
        os.makedirs(args.render, exist_ok=True)
        for path in paths:
            try:
                render_tree(_load_tree(path), os.path.join(args.render, os.path.basename(path)[:-5] + ".png"))
            except (ParseError, TreeError):
                pass
    payload = {"schema": 1, "rows": reports}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(to_csv(reports))
    if args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(to_table(reports))
    return EXIT_ORACLE if disagreement else EXIT_OK


def _corpus_row(path, seed, trials, oracle, budget) -> dict:
    name = os.path.basename(path)[:-5]
    try:
        tree = _load_tree(path)
    except (ParseError, TreeError) as e:
        return {"name": name, "error": str(e), "classification": "error"}
    oracle_budget, gb_budget = BUDGET_PROFILES[budget]
    options = AnalysisOptions(
        seed=seed,
        search_trials=trials,
        oracle=oracle,
        oracle_budget=oracle_budget,
        gb_budget=gb_budget,
    )
    try:
        return analyze_tree(tree, options)
    except BudgetExceeded as e:
        return {"name": name, "error": str(e), "classification": "budget"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stagedtoric",
        description="Decide and certify toric structure of staged tree models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "text", "dot"], default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=2000, help="random search budget")
        p.add_argument("--oracle", choices=["on", "off", "cache-only"], default="on")
        p.add_argument("--budget", choices=sorted(BUDGET_PROFILES), default="default")
        p.add_argument("--cache", default=None, help="kernel cache directory")
        p.add_argument("--render", default=None, help="write PNG figures to this directory")
        p.add_argument("--timings", action="store_true", help="include timings in JSON")

    pv = sub.add_parser("validate", help="parse and validate a .tree file")
    pv.add_argument("path")
    common(pv)
    pv.set_defaults(func=cmd_validate)

    pa = sub.add_parser("analyze", help="classify and certify one tree")
    pa.add_argument("path")
    pa.add_argument("--forms", default=None, help="JSON file with user-supplied forms")
    common(pa)
    pa.set_defaults(func=cmd_analyze)

    pc = sub.add_parser("corpus", help="analyze every .tree file in a directory")
    pc.add_argument("dir")
    pc.add_argument("--out", default=None, help="write the JSON report here")
    pc.add_argument("--csv", default=None, help="write the delimited summary here")
    pc.add_argument("--jobs", type=int, default=1)
    common(pc)
    pc.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Analysis reports: JSON/text/CSV serialisation and figure rendering.

The analyze pipeline classifies a tree by trying the certificate routes
in order: balanced, subtree-inclusion, balanced-prefix hybrid, one-stage
span, randomized search.  "unknown" is a terminal status, not an error.
Reports are deterministic: identical input, seed, and configuration give
byte-identical JSON (timings are only included on request).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .algebra import Budget, BudgetExceeded, degrevlex
from .balance import is_balanced, koszul_sufficient, quadratic_gb
from .kernel import (
    CacheMiss,
    DEFAULT_ORACLE_BUDGET,
    OracleBudget,
    ideal_equal,
    kernel_ideal,
)
from .minors import (
    ToricCertificate,
    certificate_kernel_check,
    ideal_of_minors,
    random_search,
    verify_certificate,
)
from .onestage import classify_onestage, is_full_veronese, onestage_certificate
from .sip import detect_sip, hybrid_search, sip_change_of_variables
from .trees import LinearForm, StagedTree
from .treedsl import stage_colours

SCHEMA_VERSION = 1


@dataclass
class AnalysisOptions:
    seed: int = 0
    search_trials: int = 2000
    oracle: str = "on"  # on | off | cache-only
    oracle_budget: OracleBudget = DEFAULT_ORACLE_BUDGET
    gb_budget: Budget = field(default_factory=Budget)
    cache_dir: str | None = None
    forms: list[LinearForm] | None = None
    timings: bool = False


def _certificate_dict(cert: ToricCertificate, tree: StagedTree) -> dict:
    theta = tree.homogenize().theta_varset()
    order = degrevlex(cert.ell_ring()) if cert.forms else None
    return {
        "verified": cert.verified,
        "failing": cert.failing,
        "method": cert.method,
        "provenance": cert.provenance,
        "forms": [
            {("p%d" % i): str(c) for i, c in sorted(f.coeffs.items())}
            for f in cert.forms
        ],
        "images": [
            {name: e for name, e in zip(theta.names, m) if e} for m in cert.images
        ],
        "generators": [g.format(order) for g in cert.generators],
    }


def analyze_tree(tree: StagedTree, options: AnalysisOptions | None = None) -> dict:
    """Full pipeline report for one tree."""
    options = options or AnalysisOptions()
    hom = tree.homogenize()
    report: dict = {
        "schema": SCHEMA_VERSION,
        "name": tree.name or "tree",
        "leaves": tree.n,
        "depth": hom.depth,
        "stages": {
            sid: list(tree.stages[sid].labels) for sid in sorted(tree.stages)
        },
        "seed": options.seed,
        "normal_cohen_macaulay": "not checked",
    }
    timings: dict[str, float] = {}

    def timed(label, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[label] = round(time.perf_counter() - t0, 6)
        return out

    balanced, witness = timed("balance", lambda: is_balanced(tree))
    report["balanced"] = balanced
    if witness:
        report["balance_witness"] = list(witness)

    sip = timed("sip", lambda: detect_sip(tree))
    report["sip"] = sip.is_sip
    if sip.is_sip:
        report["sip_indices"] = dict(sorted(sip.choice.items()))
    elif sip.witness:
        report["sip_witness"] = list(sip.witness)

    classification = "unknown"
    certificate: ToricCertificate | None = None

    if options.forms is not None:
        cert = timed(
            "supplied-forms",
            lambda: verify_certificate(
                tree, options.forms, ideal_of_minors(hom), method="supplied-forms"
            ),
        )
        if cert.verified:
            classification = "supplied-forms"
            certificate = cert

    if certificate is None:
        if balanced:
            classification = "balanced"
            gb = timed("quadratic-basis", lambda: quadratic_gb(tree, verify=False))
            report["quadratic_basis"] = [g.format(gb.order) for g in gb.generators]
            p_ring = hom.p_varset()
            certificate = verify_certificate(
                hom,
                [LinearForm.unit(r) for r in range(1, hom.n + 1)],
                list(gb.generators),
                method="balanced",
            )
        elif sip.is_sip:
            classification = "SIP"
            certificate = timed("sip-certificate", lambda: sip_change_of_variables(tree))
        else:
            hy = timed("hybrid", lambda: hybrid_search(tree, options.gb_budget))
            if hy is not None and hy.verified:
                classification = "hybrid"
                certificate = hy
            else:
                info = classify_onestage(tree)
                report["one_stage"] = {
                    "is_one_stage": info.is_one_stage,
                    "is_caterpillar": info.is_caterpillar,
                    "is_maximal": info.is_maximal,
                    "k": info.k,
                    "d": info.d,
                }
                if info.is_one_stage:
                    from .onestage import span_rank

                    rank = span_rank(tree)
                    report["one_stage"]["span_rank"] = rank
                    report["one_stage"]["full_veronese"] = is_full_veronese(tree)
                if info.is_one_stage and (info.k == 2 or is_full_veronese(tree)):
                    cert = timed("one-stage", lambda: onestage_certificate(tree))
                    if cert.verified:
                        classification = "one-stage-certified"
                        certificate = cert
                if classification == "unknown":
                    rc = timed(
                        "random-search",
                        lambda: random_search(tree, options.seed, options.search_trials),
                    )
                    if rc is not None:
                        classification = "randomized-certified"
                        certificate = rc

    report["classification"] = classification
    if certificate is not None:
        report["certificate"] = _certificate_dict(certificate, tree)

    report["oracle"] = {"mode": options.oracle, "agreement": None}
    if options.oracle != "off":
        if not options.oracle_budget.admits(hom):
            report["oracle"]["skipped"] = "tree outside the oracle budget"
        else:
            try:
                kernel = timed(
                    "oracle",
                    lambda: kernel_ideal(
                        hom,
                        options.oracle_budget,
                        options.cache_dir,
                        cache_only=options.oracle == "cache-only",
                    ),
                )
                report["kernel"] = [g.format(kernel.order) for g in kernel.generators]
                agreement = None
                if classification == "balanced":
                    agreement = ideal_equal(
                        report_basis(tree), list(kernel.generators), options.gb_budget
                    )
                elif certificate is not None and certificate.verified:
                    agreement = certificate_kernel_check(
                        tree, certificate, options.oracle_budget, options.gb_budget
                    )
                report["oracle"]["agreement"] = agreement
            except BudgetExceeded as e:
                report["oracle"]["skipped"] = str(e)
            except CacheMiss as e:
                report["oracle"]["skipped"] = str(e)
    try:
        if options.oracle == "on" and options.oracle_budget.admits(hom):
            kz = timed("koszul", lambda: koszul_sufficient(tree, options.oracle_budget))
            report["koszul"] = kz.status
            if kz.generator_degrees:
                report["generator_degrees"] = {
                    str(k): v for k, v in sorted(kz.generator_degrees.items())
                }
        else:
            report["koszul"] = "not checked"
    except BudgetExceeded:
        report["koszul"] = "not checked"

    report["pipeline_order"] = [
        "balanced", "SIP", "hybrid", "one-stage", "randomized",
    ]
    if options.timings:
        report["timings"] = timings
    return report


def report_basis(tree: StagedTree):
    return list(quadratic_gb(tree, verify=False).generators)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def to_text(report: dict) -> str:
    lines = [
        "tree: %s  (n=%d, depth=%d)" % (report["name"], report["leaves"], report["depth"]),
        "balanced: %s" % report["balanced"],
        "subtree-inclusion: %s" % report["sip"],
        "classification: %s" % report["classification"],
    ]
    cert = report.get("certificate")
    if cert:
        lines.append("certificate: %s (verified=%s)" % (cert["method"], cert["verified"]))
        for f, m in zip(cert["forms"], cert["images"]):
            form = " + ".join("%s*%s" % (c, p) if c != "1" else p for p, c in f.items())
            image = "*".join(
                "%s^%d" % (v, e) if e > 1 else v for v, e in m.items()
            )
            lines.append("  %s  ->  %s" % (form, image))
    if report.get("oracle", {}).get("agreement") is not None:
        lines.append("oracle agreement: %s" % report["oracle"]["agreement"])
    if "kernel" in report:
        lines.append("kernel basis:")
        for g in report["kernel"]:
            lines.append("  " + g)
    lines.append("koszul: %s" % report.get("koszul", "not checked"))
    return "\n".join(lines) + "\n"


CSV_COLUMNS = ["name", "leaves", "depth", "balanced", "sip", "classification", "certificate", "oracle_agreement"]


def corpus_rows(reports: list[dict]) -> list[dict]:
    rows = []
    for r in reports:
        cert = r.get("certificate") or {}
        rows.append(
            {
                "name": r.get("name", ""),
                "leaves": r.get("leaves", ""),
                "depth": r.get("depth", ""),
                "balanced": r.get("balanced", ""),
                "sip": r.get("sip", ""),
                "classification": r.get("classification", r.get("error", "error")),
                "certificate": cert.get("method", "") if cert.get("verified") else "",
                "oracle_agreement": r.get("oracle", {}).get("agreement", ""),
            }
        )
    return rows


def to_csv(reports: list[dict]) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in corpus_rows(reports):
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def to_table(reports: list[dict]) -> str:
    rows = corpus_rows(reports)
    headers = CSV_COLUMNS
    cells = [[str(_csv_cell(r[h])) for h in headers] for r in rows]
    widths = [
        max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
        for i, h in enumerate(headers)
    ]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out.append("  ".join("-" * w for w in widths))
    for c in cells:
        out.append("  ".join(x.ljust(w) for x, w in zip(c, widths)))
    return "\n".join(out) + "\n"


def render_tree(tree: StagedTree, path: str):
    """Draw the staged tree with matplotlib: colour-filled internal
    vertices per stage, boxed numbered leaves, labelled edges."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    colours = stage_colours(tree)
    ypos: dict[str, float] = {}
    for i, leaf in enumerate(tree.leaves):
        ypos[leaf] = float(tree.n - i)

    for v in reversed(tree.dfs_order):
        if not tree.is_leaf(v):
            kids = tree.children[v]
            ypos[v] = sum(ypos[c] for c in kids) / len(kids)

    fig, ax = plt.subplots(figsize=(2 + 1.6 * tree.depth, 1 + 0.45 * tree.n))
    for v in tree.dfs_order:
        x = tree.depth_of[v]
        if tree.is_leaf(v):
            continue
        for lab, c in zip(tree.stage(v).labels, tree.children[v]):
            ax.plot([x, tree.depth_of[c]], [ypos[v], ypos[c]], "-", color="#888888", zorder=1)
            ax.annotate(
                lab,
                ((x + tree.depth_of[c]) / 2, (ypos[v] + ypos[c]) / 2),
                fontsize=8,
                ha="center",
                va="bottom",
                color="#444444",
            )
    for v in tree.dfs_order:
        x = tree.depth_of[v]
        if tree.is_leaf(v):
            ax.scatter([x], [ypos[v]], marker="s", s=160, c="white", edgecolors="black", zorder=2)
            ax.annotate(str(tree.leaf_number[v]), (x, ypos[v]), fontsize=8, ha="center", va="center", zorder=3)
        else:
            ax.scatter([x], [ypos[v]], s=200, c=colours[tree.stage_of[v]], edgecolors="black", zorder=2)
    ax.set_axis_off()
    ax.set_title(tree.name or "staged tree")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

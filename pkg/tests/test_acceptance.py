"""Acceptance suite: one test per criterion, printing one PASS/FAIL line.

All arithmetic is exact, so every comparison is equality; the only
numeric tolerances are the stated wall-clock limits.  Run with
``pytest tests/test_acceptance.py -v -s``.
"""

import random
import time
from fractions import Fraction

import pytest

from stagedtoric.algebra import VarSet, is_binomial_basis, parse_polynomial
from stagedtoric.balance import is_balanced, quadratic_gb, quadratic_gb_reduced
from stagedtoric.catalog import (
    bn_collider,
    bn_diamond,
    coin_flip,
    corpus,
    hybrid_twelve,
    minors_eleven,
    nested_sip,
    one_stage,
    open_caterpillar,
    open_two_stage,
    t33_table,
    two_colour_cube,
)
from stagedtoric.kernel import (
    OracleBudget,
    graded_kernel_piece,
    ideal_equal,
    kernel_ideal,
    minimal_generator_degrees,
)
from stagedtoric.minors import (
    certificate_kernel_check,
    ideal_of_minors,
    random_search,
    row_col_transform,
    stage_matrix,
    verify_certificate,
)
from stagedtoric.onestage import (
    algebra_equality,
    binary_onestage_certificate,
    classify_onestage,
    enumerate_onestage,
    is_full_veronese,
    iter_onestage_shapes,
    linear_relations,
    shape_certificate_core,
    span_rank,
)
from stagedtoric.report import AnalysisOptions, analyze_tree
from stagedtoric.sip import detect_sip, hybrid_search, sip_change_of_variables
from stagedtoric.trees import LinearForm

WIDE_ORACLE = OracleBudget(max_labels=12)


class Criterion:
    def __init__(self, number, description):
        self.number = number
        self.description = description

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print("ACCEPTANCE %2s %s (%.1fs) - %s" % (self.number, status, elapsed, self.description))
        return False


def binomial_set(gb):
    out = set()
    for g in gb.generators:
        mono = sorted(g.terms)
        out.add((tuple(mono), tuple(g.terms[m] for m in mono)))
    return out


def parse_set(ring, texts):
    out = set()
    for t in texts:
        g = parse_polynomial(ring, t)
        lead = max(g.terms)  # any canonical scaling: make the max-key term +1
        g = g.scale(Fraction(1) / g.terms[lead])
        mono = sorted(g.terms)
        out.add((tuple(mono), tuple(g.terms[m] for m in mono)))
    return out


def normalise_gb(gb):
    out = set()
    for g in gb.generators:
        lead = max(g.terms)
        h = g.scale(Fraction(1) / g.terms[lead])
        mono = sorted(h.terms)
        out.add((tuple(mono), tuple(h.terms[m] for m in mono)))
    return out


def test_criterion_1_coin_flip():
    with Criterion(1, "coin-flip kernel and q-coordinate certificate"):
        t0 = time.perf_counter()
        coin = coin_flip()
        K = kernel_ideal(coin)
        ring = K.order.varset
        expected = parse_polynomial(ring, "p1*p2 + p2^2 - p1*p3")
        assert list(K.generators) == [expected]
        forms = [
            LinearForm({1: 1}),
            LinearForm({1: 1, 2: 1}),
            LinearForm({1: 1, 2: 1, 3: 1}),
        ]
        from stagedtoric.minors import model_invariants

        cert = verify_certificate(coin, forms, model_invariants(coin))
        assert cert.verified
        theta = coin.homogenize().theta_varset()
        assert cert.images == [
            theta.monomial({"t1": 2}),
            theta.monomial({"t1": 1, "z": 1}),
            theta.monomial({"z": 2}),
        ]
        gb = cert.monomial_kernel(coin)
        assert [g.format(gb.order) for g in gb.generators] == ["l2^2 - l1*l3"]
        assert certificate_kernel_check(coin, cert)
        assert time.perf_counter() - t0 < 1.0


CUBE_BASIS = [
    "p2 - p5", "p4 - p7",
    "p2*p3 - p1*p4", "p2*p5 - p1*p6", "p2*p7 - p1*p8", "p4*p5 - p3*p6",
    "p4*p7 - p3*p8", "p6*p7 - p5*p8", "p2^2 - p1*p6", "p2*p3 - p1*p7",
    "p2*p4 - p1*p8", "p1*p4 - p3*p5", "p2*p4 - p3*p6", "p4^2 - p3*p8",
    "p5^2 - p1*p6", "p3*p6 - p5*p7", "p4*p6 - p5*p8", "p5*p7 - p1*p8",
    "p6*p7 - p2*p8", "p7^2 - p3*p8", "p3*p5 - p1*p7", "p3*p6 - p1*p8",
    "p4*p5 - p2*p7", "p4*p6 - p2*p8",
]

CUBE_REDUCED = [
    "p6*p7 - p5*p8", "p5^2 - p1*p6", "p3*p6 - p5*p7", "p5*p7 - p1*p8",
    "p7^2 - p3*p8", "p3*p5 - p1*p7", "p3*p6 - p1*p8",
]


def test_criterion_2_worked_basis():
    with Criterion(2, "24-element degree one/two basis and its 7-element reduction"):
        t0 = time.perf_counter()
        tree = two_colour_cube()
        gb = quadratic_gb(tree)
        assert len(gb.generators) == 24
        assert normalise_gb(gb) == parse_set(gb.order.varset, CUBE_BASIS)
        red = quadratic_gb_reduced(tree)
        assert len(red.generators) == 7
        assert normalise_gb(red) == parse_set(red.order.varset, CUBE_REDUCED)
        K = kernel_ideal(tree)
        assert ideal_equal(list(gb.generators), list(K.generators))
        # the reduced set generates the kernel of the map on surviving atoms
        from stagedtoric.kernel import kernel_of_monomial_map
        from stagedtoric.algebra import Polynomial

        hom = tree.homogenize()
        theta = hom.theta_varset()
        survivors = [1, 3, 5, 6, 7, 8]
        images = [
            Polynomial.from_monomial(theta, hom.atom_monomial(r, theta))
            for r in survivors
        ]
        Kbar = kernel_of_monomial_map(images, "q")
        rename = {"q%d" % (i + 1): "p%d" % r for i, r in enumerate(survivors)}
        target = red.order.varset
        Kbar_p = [g.rename(target, rename) for g in Kbar.generators]
        assert ideal_equal(list(red.generators), Kbar_p)
        assert time.perf_counter() - t0 < 10.0


def test_criterion_3_balanced_iff_binomial():
    with Criterion(3, "balanced <=> binomial kernel over corpus and small tables"):
        trees = list(corpus().values())
        for k, d in ((2, 2), (2, 3), (3, 2)):
            trees.extend(enumerate_onestage(k, d))
        checked = 0
        for tree in trees:
            if not WIDE_ORACLE.admits(tree.homogenize()):
                continue  # outside the oracle budget (the two 16-leaf trees)
            K = kernel_ideal(tree, WIDE_ORACLE)
            binom, _ = is_binomial_basis(list(K.generators))
            assert binom == is_balanced(tree)[0], tree.name
            checked += 1
        assert checked >= 40


def test_criterion_4_worked_certificate():
    with Criterion(4, "eleven-leaf certificate with the documented completion"):
        t0 = time.perf_counter()
        tree = minors_eleven()
        green = row_col_transform(stage_matrix(tree, "g"), [("row", 1, [1, 1])])
        magenta = row_col_transform(
            stage_matrix(tree, "m"),
            [("row", 1, [1, 1, 1]), ("col", 0, [-1, -1, 1, 0])],
        )
        forms = []
        for m in (green, magenta):
            for f in m.distinct_forms():
                if f not in forms:
                    forms.append(f)
        assert len(forms) == 11
        assert LinearForm({6: 1}) in forms  # the completion the listing skipped
        ring = tree.p_varset()
        cert = verify_certificate(tree, forms, green.minors(ring) + magenta.minors(ring))
        assert cert.verified
        theta = tree.homogenize().theta_varset()
        expected_images = {
            theta.monomial({"m1": 2, "g1": 1}),
            theta.monomial({"m1": 2, "z": 1}),
            theta.monomial({"m1": 3}),
            theta.monomial({"z": 3}),
        }
        assert expected_images <= set(cert.images)
        assert time.perf_counter() - t0 < 30.0


def test_criterion_5_hybrid_and_generator_degrees():
    with Criterion(5, "hybrid certificate forms and kernel generator degrees {2,4}"):
        t0 = time.perf_counter()
        tree = hybrid_twelve()
        from stagedtoric.sip import depth_frontier, hybrid_certificate

        hom = tree.homogenize()
        cert = hybrid_certificate(hom, depth_frontier(hom, 3))
        assert cert is not None and cert.verified
        assert hybrid_search(tree) is not None  # the search also succeeds
        got = sorted(str(f) for f in cert.forms)
        assert got == [
            "p1 + p2", "p10 + p11", "p11", "p12", "p2", "p3",
            "p4 + p5", "p5", "p6", "p7 + p8", "p8", "p9",
        ]
        K = kernel_ideal(tree, WIDE_ORACLE)
        degrees = minimal_generator_degrees(K)
        assert sorted(degrees) == [2, 4]
        assert time.perf_counter() - t0 < 60.0


def test_criterion_6_sip_certificates():
    with Criterion(6, "subtree-inclusion certificates match the kernel everywhere"):
        fixtures = list(corpus().values())
        for k, d in ((2, 2), (2, 3), (3, 2)):
            fixtures.extend(enumerate_onestage(k, d))
        sip_names = set()
        for tree in fixtures:
            res = detect_sip(tree)
            if not res.is_sip:
                continue
            if tree.name:
                sip_names.add(tree.name)
            cert = sip_change_of_variables(tree)
            assert cert.verified, tree.name
            total = LinearForm({r: Fraction(1) for r in range(1, tree.homogenize().n + 1)})
            assert total in cert.forms
            if WIDE_ORACLE.admits(tree.homogenize()):
                assert certificate_kernel_check(tree, cert, WIDE_ORACLE), tree.name
        assert {"coinflip", "fig7"} <= sip_names
        # the eleven-leaf worked example is certified by explicit operations
        # (criterion 4), not by subtree inclusion: its 3-label stage has no
        # valid child index, so it is correctly absent here
        assert "fig6" not in sip_names


def test_criterion_7_binary_sweep():
    with Criterion(7, "every binary one-stage tree of depth <= 5 certifies"):
        t0 = time.perf_counter()
        labels = ["t1", "t2"]
        rng = random.Random(20260810)
        total = 0
        for d in range(1, 6):
            for shape in iter_onestage_shapes(2, d):
                ok, forms, image_indices, failing = shape_certificate_core(shape, 2, d)
                assert ok, (d, shape, failing)
                total += 1
                # the span rank equals d+1 by the core's own full-rank check;
                # spot-verify through the tree-level operation
                if d <= 4 or rng.random() < 0.002:
                    tree = one_stage(shape, labels)
                    assert span_rank(tree) == d + 1
                    cert = binary_onestage_certificate(tree, with_generators=False)
                    assert cert.verified
                    assert [dict(f.coeffs) for f in cert.forms] == forms
        assert total == 1 + 3 + 21 + 651 + 457653
        assert time.perf_counter() - t0 < 300.0


def test_criterion_8_table_spot_checks():
    with Criterion(8, "depth-three ternary table: ranks, equal algebras, 14 SIP certificates"):
        table = t33_table()
        assert span_rank(table["T13"]) == 10 and is_full_veronese(table["T13"])
        assert span_rank(table["T14"]) == 10 and is_full_veronese(table["T14"])
        for a, b in [("T4", "T5"), ("T8", "T16"), ("T10", "T18"), ("T11", "T17"), ("T18", "T19")]:
            assert algebra_equality(table[a], table[b]), (a, b)
        sip_trees = {name for name, t in table.items() if detect_sip(t).is_sip}
        assert sip_trees == set(table) - {"T4", "T8", "T10", "T11", "T14", "T18"}
        assert len(sip_trees) == 14
        for name in sorted(sip_trees):
            cert = sip_change_of_variables(table[name])
            assert cert.verified, name


def test_criterion_9_linear_relations_iff_caterpillar():
    with Criterion(9, "linear relations vanish exactly on caterpillars (k<=3, d<=3)"):
        for k in (1, 2, 3):
            for d in (1, 2, 3):
                for tree in enumerate_onestage(k, d):
                    empty = linear_relations(tree) == []
                    assert empty == classify_onestage(tree).is_caterpillar, (k, d)


def test_criterion_10_bayesian_and_open_trees():
    with Criterion(10, "Bayesian trees certify; open trees stay unknown with J = kernel"):
        for build, frontier_size in ((bn_diamond, 8), (bn_collider, 4)):
            cert = hybrid_search(build())
            assert cert is not None and cert.verified
            assert len(cert.provenance["frontier"]) == frontier_size
        for build in (open_caterpillar, open_two_stage):
            tree = build()
            report = analyze_tree(tree, AnalysisOptions(search_trials=500))
            assert report["classification"] == "unknown"
            assert report["oracle"]["agreement"] is None
            K = kernel_ideal(tree)
            assert ideal_equal(ideal_of_minors(tree.homogenize()), list(K.generators))


def test_criterion_11_property_suites():
    with Criterion(11, "randomized property suites, 200 seeded cases each"):
        from test_properties import random_polynomial, random_tree
        from stagedtoric.algebra import (
            Polynomial,
            buchberger,
            normal_form,
            s_polynomial,
        )
        from stagedtoric.treeops import ResizeError, check_resize_substitution, resize, swap

        ring = VarSet(["x", "y", "z"])
        for seed in range(200):
            rng = random.Random(seed)
            f, g, h = (random_polynomial(rng, ring) for _ in range(3))
            assert (f + g) + h == f + (g + h)
            assert f * (g + h) == f * g + f * h

        for seed in range(200):
            rng = random.Random(1000 + seed)
            gens = [random_polynomial(rng, ring, max_terms=3) for _ in range(2)]
            gens = [p for p in gens if not p.is_zero()]
            if not gens:
                continue
            gb = buchberger(gens)
            basis = list(gb.generators)
            for i in range(len(basis)):
                for j in range(i + 1, len(basis)):
                    s = s_polynomial(basis[i], basis[j], gb.order)
                    assert normal_form(s, basis, gb.order).is_zero()
            if basis:
                assert set(buchberger(basis, gb.order).generators) == set(basis)

        swaps = resizes = 0
        for seed in range(200):
            rng = random.Random(2000 + seed)
            t = random_tree(rng)
            h2 = t.homogenize()
            assert h2.homogenize() is h2
            assert h2.atom_multiset() == t.atom_multiset()
            for v in t.dfs_order:
                if t.is_leaf(v):
                    continue
                for sid in t.stage_vertices:
                    if t.stage_of[v] != sid and t.multiplicity(sid, v) >= 1:
                        out = swap(t, v, sid)
                        assert out.atom_multiset() == t.atom_multiset()
                        swaps += 1
                        break
                else:
                    continue
                break
            for v in t.dfs_order:
                if not t.is_leaf(v):
                    try:
                        res = resize(t, v)
                    except ResizeError:
                        continue
                    assert check_resize_substitution(t, res)
                    resizes += 1
                    break
        assert swaps >= 10 and resizes >= 10
        # deterministic rich cases on the bundled trees
        cube = two_colour_cube()
        swapped = swap(cube, cube.root, "green")
        assert swapped.atom_multiset() == cube.atom_multiset()
        res = resize(cube, "u1")
        assert check_resize_substitution(cube, res)
        assert is_balanced(res.tree)[0]

        agreements = 0
        for seed in range(200):
            rng = random.Random(3000 + seed)
            t = random_tree(rng)
            if t.n > 6:
                continue
            piece = graded_kernel_piece(t, 1)
            K = kernel_ideal(t)
            assert len(piece) == len([g for g in K.generators if g.degree() == 1])
            for g in piece:
                assert K.contains(g)
            agreements += 1
        assert agreements >= 100

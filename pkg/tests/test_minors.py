import pytest
from fractions import Fraction

from stagedtoric.algebra import VarSet, parse_polynomial
from stagedtoric.catalog import (
    coin_flip,
    colour_audit_example,
    minors_eleven,
    search_example,
    two_colour_cube,
)
from stagedtoric.kernel import kernel_ideal
from stagedtoric.minors import (
    all_stage_matrices,
    certificate_kernel_check,
    ideal_of_minors,
    model_invariants,
    monomial_representative,
    random_search,
    row_col_transform,
    stage_matrix,
    standard_basis_certificate,
    verify_certificate,
)
from stagedtoric.trees import LinearForm, Stage, StagedTree


def _singleton_tree():
    return StagedTree(
        [Stage("a", ["a1", "a2"]), Stage("b", ["b1", "b2"])],
        "r",
        {"r": ["u", "l3"], "u": ["l1", "l2"], "l1": [], "l2": [], "l3": []},
        {"r": "a", "u": "b"},
    )


class TestModelInvariants:
    def test_singleton_stages_empty(self):
        assert model_invariants(_singleton_tree()) == []

    def test_coin_flip(self):
        inv = model_invariants(coin_flip())
        assert [str(g) for g in inv] == ["p1*p2 + p2^2 - p1*p3"]

    def test_contained_in_minors_ideal(self):
        from stagedtoric.algebra import buchberger, degrevlex, normal_form

        t = minors_eleven().homogenize()
        J = ideal_of_minors(t)
        gb = buchberger(J)
        for g in model_invariants(t):
            assert normal_form(g, list(gb.generators), gb.order).is_zero()


class TestStageMatrix:
    def test_green(self):
        m = stage_matrix(minors_eleven(), "g")
        assert m.columns == ["V", "W"]
        assert [[str(f) for f in row] for row in m.entries] == [
            ["p1", "p10"],
            ["p2", "p11"],
        ]

    def test_magenta_root_column_last(self):
        m = stage_matrix(minors_eleven(), "m")
        assert m.columns == ["A", "B", "X", "r"]
        assert [str(f) for f in m.entries[0]] == [
            "p3", "p6", "p1 + p2", "p1 + p2 + p3 + p4 + p5 + p6 + p7 + p8",
        ]
        assert str(m.entries[1][3]) == "p9"
        assert str(m.entries[2][3]) == "p10 + p11"

    def test_singleton_stage_no_minors(self):
        m = stage_matrix(_singleton_tree(), "b")
        assert m.ncols == 1
        assert m.minors(VarSet(["p1", "p2", "p3"])) == []


class TestRowColTransform:
    def test_worked_example_green(self):
        m = stage_matrix(minors_eleven(), "g")
        mm = row_col_transform(m, [("row", 1, [1, 1])])
        assert [[str(f) for f in row] for row in mm.entries] == [
            ["p1", "p10"],
            ["p1 + p2", "p10 + p11"],
        ]

    def test_worked_example_magenta(self):
        m = stage_matrix(minors_eleven(), "m")
        mm = row_col_transform(m, [("row", 1, [1, 1, 1]), ("col", 0, [-1, -1, 1, 0])])
        assert str(mm.entries[0][0]) == "p1 + p2 - p3 - p6"
        assert str(mm.entries[1][0]) == "p1 + p2"
        assert str(mm.entries[2][0]) == "-p5 + p6 + p7"

    def test_identity_noop(self):
        m = stage_matrix(minors_eleven(), "g")
        mm = row_col_transform(m, [])
        assert mm.entries == m.entries

    def test_non_invertible_rejected(self):
        m = stage_matrix(minors_eleven(), "g")
        with pytest.raises(ValueError, match="invertible"):
            row_col_transform(m, [("row", 0, [0, 1])])

    def test_minor_ideal_preserved(self):
        from stagedtoric.kernel import ideal_equal

        t = minors_eleven()
        ring = t.p_varset()
        m = stage_matrix(t, "m")
        mm = row_col_transform(m, [("row", 1, [1, 1, 1]), ("col", 0, [-1, -1, 1, 0])])
        assert ideal_equal(m.minors(ring), mm.minors(ring))


class TestMonomialRepresentative:
    def test_monomial_is_its_own(self):
        t = coin_flip().homogenize()
        theta = t.theta_varset()
        f = parse_polynomial(theta, "t1^2")
        assert monomial_representative(t, f) == theta.monomial({"t1": 2})

    def test_bracket_image(self):
        t = coin_flip().homogenize()
        f = LinearForm({1: 1, 2: 1}).image(t)
        m = monomial_representative(t, f)
        assert m == t.theta_varset().monomial({"t1": 1, "z": 1})

    def test_none_for_nonmonomial_class(self):
        t = coin_flip().homogenize()
        f = LinearForm({1: 1, 3: 1}).image(t)  # t1^2 + t2 z has no monomial form
        assert monomial_representative(t, f) is None

    def test_inhomogeneous_rejected(self):
        t = coin_flip().homogenize()
        theta = t.theta_varset()
        with pytest.raises(ValueError):
            monomial_representative(t, parse_polynomial(theta, "t1 + t2^2"))


class TestVerifyCertificate:
    def test_coin_flip_q_forms(self):
        t = coin_flip()
        forms = [LinearForm({1: 1}), LinearForm({1: 1, 2: 1}), LinearForm({1: 1, 2: 1, 3: 1})]
        cert = verify_certificate(t, forms, model_invariants(t))
        assert cert.verified
        theta = t.homogenize().theta_varset()
        assert cert.images == [
            theta.monomial({"t1": 2}),
            theta.monomial({"t1": 1, "z": 1}),
            theta.monomial({"z": 2}),
        ]
        gb = cert.monomial_kernel(t)
        assert [g.format(gb.order) for g in gb.generators] == ["l2^2 - l1*l3"]
        assert certificate_kernel_check(t, cert)

    def test_dependent_forms_rejected(self):
        t = coin_flip()
        forms = [LinearForm({1: 1}), LinearForm({2: 1}), LinearForm({1: 1, 2: 1})]
        cert = verify_certificate(t, forms, [])
        assert not cert.verified and "dependent" in cert.failing

    def test_standard_basis_fails_on_unbalanced(self):
        assert not standard_basis_certificate(coin_flip()).verified

    def test_standard_basis_with_quadratic_gb_on_balanced(self):
        from stagedtoric.balance import quadratic_gb

        t = two_colour_cube()
        gens = list(quadratic_gb(t, verify=False).generators)
        cert = verify_certificate(t, [LinearForm.unit(r) for r in range(1, 9)], gens)
        assert cert.verified

    def test_verified_standard_basis_implies_balanced(self):
        # a verified standard-basis certificate forces balancedness
        from stagedtoric.balance import is_balanced

        for build in (coin_flip, two_colour_cube, colour_audit_example, search_example):
            t = build()
            cert = standard_basis_certificate(t)
            if cert.verified:
                assert is_balanced(t)[0]


class TestRandomSearch:
    def test_coin_flip_documented_seed(self):
        cert = random_search(coin_flip(), seed=7, trials=200)
        assert cert is not None and cert.verified
        assert cert.provenance["seed"] == 7
        assert certificate_kernel_check(coin_flip(), cert)

    def test_deterministic(self):
        a = random_search(coin_flip(), seed=7, trials=200)
        b = random_search(coin_flip(), seed=7, trials=200)
        assert a.provenance == b.provenance
        assert a.forms == b.forms

    def test_search_example_documented_budget(self):
        cert = random_search(search_example(), seed=2, trials=8000)
        assert cert is not None and cert.verified
        assert certificate_kernel_check(search_example(), cert)

    def test_single_trial_miss_is_none(self):
        assert random_search(search_example(), seed=0, trials=1) is None

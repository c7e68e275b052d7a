from fractions import Fraction

import pytest

from stagedtoric.algebra import (
    Budget,
    BudgetExceeded,
    VarSet,
    buchberger,
    degrevlex,
    degrevlex_compare,
    eliminate,
    in_span,
    is_binomial_basis,
    lex,
    normal_form,
    null_space,
    parse_polynomial,
)


P3 = VarSet(["p1", "p2", "p3"])


def poly(text, varset=P3):
    return parse_polynomial(varset, text)


class TestDegRevLex:
    def test_spec_tie_break(self):
        # p1^2*p3 beats p1*p2*p3: same degree, smaller exponent at the last
        # position where they differ
        a = P3.monomial({"p1": 2, "p3": 1})
        b = P3.monomial({"p1": 1, "p2": 1, "p3": 1})
        assert degrevlex_compare(P3, a, b) == 1

    def test_reflexive(self):
        x = P3.monomial({"p1": 1})
        assert degrevlex_compare(P3, x, x) == 0

    def test_degree_dominates(self):
        a = P3.monomial({"p1": 1})
        b = P3.monomial({"p2": 2})
        assert degrevlex_compare(P3, a, b) == -1

    def test_mismatched_length_rejected(self):
        with pytest.raises(ValueError):
            degrevlex_compare(P3, (1, 0), (0, 1, 0))

    def test_leading_term_last_variable_penalised(self):
        order = degrevlex(P3)
        f = poly("p1*p3 - p1*p2 - p2^2")
        assert order.leading_monomial(f) == P3.monomial({"p1": 1, "p2": 1})


class TestParseFormat:
    def test_round_trip(self):
        f = poly("p1*p2 + p2^2 - p1*p3")
        assert f.format() == "p1*p2 + p2^2 - p1*p3"
        assert poly(f.format()) == f
        g = poly("p1*p3 - p1*p2 + p2^2")
        assert g.format() == "-p1*p2 + p2^2 + p1*p3"
        assert poly(g.format()) == g

    def test_fraction_coefficients(self):
        f = poly("3/2*p1 - p2")
        assert f.terms[P3.monomial({"p1": 1})] == Fraction(3, 2)

    def test_unknown_variable(self):
        with pytest.raises(ValueError):
            poly("q1 + p2")


class TestNormalForm:
    def test_member_reduces_to_zero(self):
        g = poly("p1*p3 - p2^2")
        f = poly("p1*p3 - p2^2") * poly("p1 + p2")
        assert normal_form(f, [g], degrevlex(P3)).is_zero()

    def test_empty_divisors(self):
        f = poly("p1 + p2")
        assert normal_form(f, [], degrevlex(P3)) == f

    def test_single_step(self):
        f = poly("p1*p3 - p2^2")
        assert normal_form(f, [f], degrevlex(P3)).is_zero()


class TestBuchberger:
    def test_principal_ideal_is_its_own_basis(self):
        g = poly("p1*p3 - p2^2")
        gb = buchberger([g], degrevlex(P3))
        lead = gb.order.leading_term(g)
        monic = g.scale(1 / lead[1])
        assert list(gb.generators) == [monic]
        assert gb.reduced

    def test_linear_elimination_lex(self):
        V = VarSet(["x", "y", "z"])
        gens = [parse_polynomial(V, "x - y"), parse_polynomial(V, "y - z")]
        gb = buchberger(gens, lex(V))
        assert {g.format(gb.order) for g in gb.generators} == {"x - z", "y - z"}

    def test_input_order_independent(self):
        gens = [poly("p1*p3 - p2^2"), poly("p1^2 - p2*p3"), poly("p2^2 - p1")]
        a = buchberger(gens)
        b = buchberger(list(reversed(gens)))
        assert set(a.generators) == set(b.generators)

    def test_rerun_is_identity(self):
        gens = [poly("p1*p3 - p2^2"), poly("p1^2*p2 - p3^3")]
        gb = buchberger(gens)
        again = buchberger(list(gb.generators))
        assert set(gb.generators) == set(again.generators)

    def test_spairs_reduce_to_zero(self):
        from stagedtoric.algebra import s_polynomial

        gens = [poly("p1*p3 - p2^2"), poly("p1^2 - p3^2")]
        gb = buchberger(gens)
        basis = list(gb.generators)
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                s = s_polynomial(basis[i], basis[j], gb.order)
                assert normal_form(s, basis, gb.order).is_zero()

    def test_budget_is_explicit(self):
        gens = [poly("p1*p3 - p2^2"), poly("p1^2*p2 - p3^3")]
        with pytest.raises(BudgetExceeded):
            buchberger(gens, budget=Budget(max_basis=1, max_degree=2, max_total_terms=3))


class TestEliminate:
    def test_fresh_variable_leaves_nothing(self):
        V = VarSet(["t", "p"])
        gens = [parse_polynomial(V, "p - t^2")]
        assert eliminate(gens, {"t"}) == []

    def test_drop_only_variable_occurring(self):
        V = VarSet(["x", "y"])
        gens = [parse_polynomial(V, "x - y")]
        assert eliminate(gens, {"x"}) == []

    def test_coin_flip_system(self):
        # p1 -> a^2, p2 -> a*b, p3 -> b*z with a + b = z
        V = VarSet(["a", "b", "z", "p1", "p2", "p3"])
        gens = [
            parse_polynomial(V, "p1 - a^2"),
            parse_polynomial(V, "p2 - a*b"),
            parse_polynomial(V, "p3 - b*z"),
            parse_polynomial(V, "a + b - z"),
        ]
        out = eliminate(gens, {"a", "b", "z"})
        assert len(out) == 1
        assert out[0].format() == "p1*p2 + p2^2 - p1*p3"


class TestBinomialBasis:
    def test_binomial_ideal(self):
        ok, witness = is_binomial_basis([poly("p1*p3 - p2^2")])
        assert ok and witness is None

    def test_trinomial_ideal(self):
        ok, witness = is_binomial_basis([poly("p1*p3 - p1*p2 - p2^2")])
        assert not ok
        assert witness is not None and len(witness.terms) == 3

    def test_zero_ideal(self):
        ok, witness = is_binomial_basis([])
        assert ok and witness is None

    def test_generator_permutation_invariant(self):
        gens = [poly("p1*p3 - p2^2"), poly("p1^2 - p2*p3"), poly("p1 - p2")]
        assert is_binomial_basis(gens)[0] == is_binomial_basis(gens[::-1])[0]


class TestLinalg:
    def test_identity_has_trivial_null_space(self):
        assert null_space([[1, 0], [0, 1]]) == []

    def test_one_equation(self):
        basis = null_space([[1, 1]])
        assert len(basis) == 1
        v = basis[0]
        assert v[0] + v[1] == 0 and any(v)

    def test_null_space_annihilates(self):
        m = [[1, 2, 3], [4, 5, 6]]
        basis = null_space(m)
        assert len(basis) == 1
        v = basis[0]
        for row in m:
            assert sum(a * b for a, b in zip(row, v)) == 0

    def test_in_span_zero_vector(self):
        ok, coeffs = in_span([0, 0], [[1, 0], [0, 1]])
        assert ok and coeffs == [0, 0]

    def test_in_span_member(self):
        ok, coeffs = in_span([1, 0], [[1, 0], [1, 1]])
        assert ok
        assert coeffs[0] * 1 + coeffs[1] * 1 == 1

    def test_not_in_span(self):
        ok, coeffs = in_span([0, 0, 1], [[1, 0, 0], [0, 1, 0]])
        assert not ok and coeffs is None

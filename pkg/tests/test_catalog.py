import os

import pytest

from stagedtoric.balance import is_balanced
from stagedtoric.catalog import (
    CORPUS_BUILDERS,
    bn_collider,
    bn_diamond,
    binary_toric_six,
    coin_flip,
    corpus,
    hybrid_twelve,
    minors_eleven,
    nested_sip,
    open_caterpillar,
    open_two_stage,
    search_example,
    two_colour_cube,
    write_corpus,
)
from stagedtoric.onestage import classify_onestage
from stagedtoric.sip import detect_sip
from stagedtoric.treedsl import parse_tree, serialize_tree


class TestShapes:
    def test_coin_flip(self):
        t = coin_flip()
        assert (t.n, t.depth) == (3, 2)

    def test_two_colour_cube(self):
        t = two_colour_cube()
        assert (t.n, t.depth) == (8, 3)
        assert is_balanced(t)[0]

    def test_binary_toric_six(self):
        t = binary_toric_six()
        assert (t.n, t.homogenize().depth) == (6, 4)
        info = classify_onestage(t)
        assert info.is_one_stage and not info.is_caterpillar and not info.is_maximal

    def test_hybrid_twelve(self):
        t = hybrid_twelve()
        assert (t.n, t.homogenize().depth) == (12, 4)
        assert not is_balanced(t)[0] and not detect_sip(t).is_sip

    def test_minors_eleven(self):
        t = minors_eleven()
        assert (t.n, t.homogenize().depth) == (11, 3)
        assert not is_balanced(t)[0] and not detect_sip(t).is_sip

    def test_nested_sip(self):
        t = nested_sip()
        assert detect_sip(t).valid == {"blue": [1], "green": [2], "yellow": [1, 2]}

    def test_bayesian_trees(self):
        for t in (bn_diamond(), bn_collider()):
            assert t.n == 16 and t.depth == 4

    def test_open_caterpillar(self):
        t = open_caterpillar()
        info = classify_onestage(t)
        assert (info.is_one_stage, info.is_caterpillar, info.k, info.d) == (True, True, 3, 4)
        assert not detect_sip(t).is_sip

    def test_open_and_search_trees_uncovered(self):
        for t in (open_two_stage(), search_example()):
            assert not is_balanced(t)[0]
            assert not detect_sip(t).is_sip


class TestCorpusFiles:
    def test_round_trip_every_builder(self, tmp_path):
        write_corpus(str(tmp_path))
        for name in CORPUS_BUILDERS:
            path = tmp_path / (name + ".tree")
            assert path.exists()
            text = path.read_text()
            again = parse_tree(text, name=name)
            assert serialize_tree(again) == text

    def test_corpus_matches_builders(self):
        trees = corpus()
        assert set(trees) == set(CORPUS_BUILDERS)
        for name, tree in trees.items():
            assert tree.n >= 3

    def test_checked_in_fixtures_are_current(self):
        # the fixtures directory shipped with the package mirrors the builders
        root = os.path.join(os.path.dirname(__file__), "..", "fixtures")
        if not os.path.isdir(root):
            pytest.skip("fixtures directory not present")
        for name, build in CORPUS_BUILDERS.items():
            with open(os.path.join(root, name + ".tree")) as fh:
                assert fh.read() == serialize_tree(build())

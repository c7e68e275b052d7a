import json
import os

import pytest

from stagedtoric.catalog import write_corpus
from stagedtoric.cli import main


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    write_corpus(str(d))
    return d


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestValidate:
    def test_valid_file(self, corpus_dir, capsys):
        code, out, _ = run(capsys, ["validate", str(corpus_dir / "coinflip.tree")])
        assert code == 0
        assert "valid" in out and "n=3" in out

    def test_invalid_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.tree"
        bad.write_text("stage a : x y ;\nvertex r stage a children l1 ;\nvertex l1 leaf ;\nroot r ;\n")
        code, _, err = run(capsys, ["validate", str(bad)])
        assert code == 2 and "arity" in err

    def test_duplicate_labels(self, tmp_path, capsys):
        bad = tmp_path / "dup.tree"
        bad.write_text(
            "stage a : x y ;\nstage b : y w ;\n"
            "vertex r stage a children u l ;\nvertex u stage b children l1 l2 ;\n"
            "vertex l leaf ;\nvertex l1 leaf ;\nvertex l2 leaf ;\nroot r ;\n"
        )
        code, _, err = run(capsys, ["validate", str(bad)])
        assert code == 2 and "label" in err

    def test_empty_file(self, tmp_path, capsys):
        bad = tmp_path / "empty.tree"
        bad.write_text("")
        code, _, err = run(capsys, ["validate", str(bad)])
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, ["validate", "no-such-file.tree"])
        assert code == 1


class TestAnalyze:
    def test_balanced_tree_json(self, corpus_dir, capsys):
        code, out, _ = run(
            capsys, ["analyze", str(corpus_dir / "fig3a.tree"), "--format", "json"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["classification"] == "balanced"
        assert len(report["quadratic_basis"]) == 24
        assert report["oracle"]["agreement"] is True

    def test_unknown_is_not_error(self, corpus_dir, capsys):
        code, out, _ = run(
            capsys,
            ["analyze", str(corpus_dir / "fig11.tree"), "--format", "json", "--trials", "50"],
        )
        assert code == 0
        report = json.loads(out)
        assert report["classification"] == "unknown"

    def test_byte_identical_reports(self, corpus_dir, capsys):
        argv = ["analyze", str(corpus_dir / "coinflip.tree"), "--format", "json", "--seed", "5"]
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2

    def test_dot_output(self, corpus_dir, capsys):
        code, out, _ = run(capsys, ["analyze", str(corpus_dir / "coinflip.tree"), "--format", "dot"])
        assert code == 0 and out.startswith("digraph")

    def test_supplied_forms(self, corpus_dir, tmp_path, capsys):
        forms = [
            {"p1": 1},
            {"p1": 1, "p2": 1},
            {"p1": 1, "p2": 1, "p3": 1},
        ]
        f = tmp_path / "forms.json"
        f.write_text(json.dumps(forms))
        code, out, _ = run(
            capsys,
            ["analyze", str(corpus_dir / "coinflip.tree"), "--forms", str(f), "--format", "json"],
        )
        assert code == 0
        report = json.loads(out)
        assert report["classification"] == "supplied-forms"
        assert report["certificate"]["verified"]

    def test_render_writes_figure(self, corpus_dir, tmp_path, capsys):
        out_dir = tmp_path / "figs"
        code, _, _ = run(
            capsys,
            ["analyze", str(corpus_dir / "coinflip.tree"), "--render", str(out_dir)],
        )
        assert code == 0
        assert (out_dir / "coinflip.png").exists()


class TestCorpus:
    def test_empty_directory(self, tmp_path, capsys):
        code, out, _ = run(capsys, ["corpus", str(tmp_path)])
        assert code == 0

    def test_malformed_file_isolated(self, tmp_path, capsys):
        write_corpus(str(tmp_path))
        (tmp_path / "broken.tree").write_text("vertex a leaf ;\nroot a ;\n")
        # keep it quick: skip the heavyweight members
        for heavy in ("fig5", "fig6", "fig8a", "fig8b", "fig10", "fig3b", "fig3c", "fig4", "fig9", "fig2"):
            (tmp_path / (heavy + ".tree")).unlink()
        code, out, _ = run(
            capsys, ["corpus", str(tmp_path), "--format", "json", "--trials", "20"]
        )
        payload = json.loads(out)
        rows = {r["name"]: r for r in payload["rows"]}
        assert rows["broken"]["classification"] == "error"
        assert rows["coinflip"]["classification"] == "SIP"
        assert code == 0

    def test_csv_and_json_outputs(self, tmp_path, capsys):
        write_corpus(str(tmp_path))
        for heavy in ("fig5", "fig6", "fig8a", "fig8b", "fig10", "fig3a", "fig3b", "fig3c", "fig4", "fig9", "fig2", "fig11"):
            (tmp_path / (heavy + ".tree")).unlink()
        out_json = tmp_path / "report.json"
        out_csv = tmp_path / "report.csv"
        code, out, _ = run(
            capsys,
            [
                "corpus", str(tmp_path), "--out", str(out_json), "--csv", str(out_csv),
                "--trials", "20",
            ],
        )
        assert code == 0
        assert out_json.exists() and out_csv.exists()
        header = out_csv.read_text().splitlines()[0]
        assert header.split(",")[:3] == ["name", "leaves", "depth"]
        assert "classification" in out  # aligned table on stdout

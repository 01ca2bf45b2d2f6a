import json

import numpy as np
import pytest

from liteembed.cli import main
from liteembed.core import EmbeddingSet
from liteembed.io import read_emb1, write_emb1, write_labels_csv
from liteembed.synth import collapse_fixture


@pytest.fixture(scope="module")
def fx():
    return collapse_fixture()


@pytest.fixture
def workdir(tmp_path, fx):
    """Fixture files on disk: vocab, exemplars, base texts, labeled images."""
    write_emb1(fx.vocab, tmp_path / "vocab.emb1")
    write_emb1(fx.exemplars_a, tmp_path / "exemplars_a.emb1")
    write_emb1(fx.base_texts, tmp_path / "base.emb1")
    write_emb1(fx.heldout.images, tmp_path / "heldout.emb1")
    write_labels_csv(zip(fx.heldout.images.names, fx.heldout.labels),
                     tmp_path / "heldout_labels.csv")
    return tmp_path


def run_config_doc(fx, steps=400):
    return {
        "class_name": "target_a",
        "exemplars_file": "exemplars_a.emb1",
        "base_text_file": "base.emb1",
        "vocab_file": "vocab.emb1",
        "candidates": {"coarse": list(fx.spec_a.coarse_candidates),
                       "fine": list(fx.spec_a.fine_candidates)},
        "keep_k": fx.keep_k,
        "k": fx.k,
        "total_steps": steps,
        "warmup_steps": steps // 5,
        "output_file": "optimized.emb1",
    }


class TestFit:
    def test_fit_writes_embedding_and_report(self, workdir, fx, capsys):
        cfg = workdir / "run.json"
        cfg.write_text(json.dumps(run_config_doc(fx)))
        code = main(["fit", "--config", str(cfg), "--report", str(workdir / "rep.json")])
        assert code == 0
        out = read_emb1(workdir / "optimized.emb1")
        assert out.names == ("target_a",)
        report = json.loads((workdir / "rep.json").read_text())
        assert report["class_name"] == "target_a"
        assert len(report["trajectory"]) == 400 // 50 + 1
        assert report["config"]["k"] == fx.k

    def test_missing_exemplars_file_exits_2(self, workdir, fx, capsys):
        doc = run_config_doc(fx)
        doc["exemplars_file"] = "absent.emb1"
        cfg = workdir / "run.json"
        cfg.write_text(json.dumps(doc))
        assert main(["fit", "--config", str(cfg)]) == 2
        assert "absent.emb1" in capsys.readouterr().err

    def test_fit_seq_appends_to_shared_output(self, workdir, fx):
        doc_a = run_config_doc(fx, steps=200)
        doc_b = dict(run_config_doc(fx, steps=200),
                     class_name="target_b",
                     candidates={"coarse": list(fx.spec_b.coarse_candidates),
                                 "fine": list(fx.spec_b.fine_candidates)})
        write_emb1(fx.exemplars_b, workdir / "exemplars_b.emb1")
        doc_b["exemplars_file"] = "exemplars_b.emb1"
        cfg = workdir / "seq.json"
        cfg.write_text(json.dumps([doc_a, doc_b]))
        assert main(["fit-seq", "--config", str(cfg)]) == 0
        out = read_emb1(workdir / "optimized.emb1")
        assert out.names == ("target_a", "target_b")

    def test_duplicate_class_in_seq_exits_2(self, workdir, fx):
        doc = run_config_doc(fx, steps=100)
        cfg = workdir / "seq.json"
        cfg.write_text(json.dumps([doc, doc]))
        assert main(["fit-seq", "--config", str(cfg)]) == 2


class TestPca:
    def test_basis_export(self, workdir, capsys):
        out = workdir / "basis.json"
        assert main(["pca", "--input", str(workdir / "vocab.emb1"),
                     "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert set(doc) >= {"dim", "k", "center", "eigenvalues", "components"}
        comps = np.array(doc["components"])
        gram = comps @ comps.T
        assert np.max(np.abs(gram - np.eye(len(comps)))) <= 1e-6

    def test_labels_add_ratios_and_suggestion(self, workdir, fx):
        # two-category labeling over the vocabulary
        labels = [(n, ("target" if n.startswith(("target", "near")) else "other"))
                  for n in fx.vocab.names]
        write_labels_csv(labels, workdir / "vl.csv")
        out = workdir / "basis.json"
        assert main(["pca", "--input", str(workdir / "vocab.emb1"),
                     "--labels", str(workdir / "vl.csv"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert "pc_ratios" in doc and "suggested_k" in doc
        assert doc["k"] == doc["suggested_k"]

    def test_bad_k_exits_2(self, workdir):
        assert main(["pca", "--input", str(workdir / "vocab.emb1"),
                     "--k", "99", "--out", str(workdir / "b.json")]) == 2


class TestEval:
    def test_classify_matches_library(self, workdir, fx, capsys):
        from liteembed.evaluate import classify

        classes = EmbeddingSet([fx.base_texts["target_a"], fx.base_texts["target_b"]])
        write_emb1(classes, workdir / "classes.emb1")
        out = workdir / "result.csv"
        code = main(["eval", "classify", "--classes", str(workdir / "classes.emb1"),
                     "--images", str(workdir / "heldout.emb1"),
                     "--labels", str(workdir / "heldout_labels.csv"),
                     "--out", str(out)])
        assert code == 0
        expected = classify(fx.heldout, classes)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "class,accuracy_percent"
        overall = float(lines[-1].split(",")[1])
        assert overall == expected.overall

    def test_retrieve_prints_precision(self, workdir, fx, capsys):
        code = main(["eval", "retrieve",
                     "--query", f"{workdir / 'base.emb1'}:target_a",
                     "--gallery", str(workdir / "heldout.emb1"),
                     "--labels", str(workdir / "heldout_labels.csv"),
                     "--k", "5"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert doc["query"] == "target_a"
        assert 0.0 <= doc["precision"] <= 1.0

    def test_unknown_query_name_exits_2(self, workdir):
        assert main(["eval", "retrieve",
                     "--query", f"{workdir / 'base.emb1'}:missing",
                     "--gallery", str(workdir / "heldout.emb1"),
                     "--labels", str(workdir / "heldout_labels.csv"),
                     "--k", "2"]) == 2


class TestOtherCommands:
    def test_baseline_mean_image(self, workdir, fx):
        out = workdir / "baseline.emb1"
        assert main(["baseline", "mean-image",
                     "--exemplars", str(workdir / "heldout.emb1"),
                     "--labels", str(workdir / "heldout_labels.csv"),
                     "--out", str(out)]) == 0
        baseline = read_emb1(out)
        assert set(baseline.names) == {"target_a", "target_b"}
        assert np.allclose(np.linalg.norm(baseline.matrix(), axis=1), 1.0, atol=1e-5)

    def test_neighbors(self, workdir, capsys):
        assert main(["neighbors", "--query", f"{workdir / 'base.emb1'}:target_a",
                     "--vocab", str(workdir / "vocab.emb1"), "--n", "3"]) == 0
        ranked = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert ranked[0]["name"] == "target_a"
        assert ranked[0]["similarity"] == pytest.approx(1.0)

    def test_filter_negatives(self, workdir, fx, capsys):
        cands = fx.vocab.subset(fx.spec_a.fine_candidates)
        write_emb1(cands, workdir / "cands.emb1")
        assert main(["filter-negatives", "--candidates", str(workdir / "cands.emb1"),
                     "--exemplars", str(workdir / "exemplars_a.emb1"),
                     "--keep", "2"]) == 0
        kept = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert len(kept) == 2 and "decoy_1" not in kept

    def test_project2d_csv(self, workdir, fx, capsys):
        out = workdir / "coords.csv"
        assert main(["project2d", "--input", str(workdir / "vocab.emb1"),
                     "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "name,x,y"
        assert len(lines) == len(fx.vocab) + 1

    def test_gradcheck_passes(self, capsys):
        assert main(["gradcheck", "--seed", "0", "--instances", "5"]) == 0
        assert "passed" in capsys.readouterr().out

    def test_bad_emb1_file_exits_2(self, tmp_path):
        bad = tmp_path / "bad.emb1"
        bad.write_bytes(b"JUNKJUNK")
        assert main(["pca", "--input", str(bad), "--out", str(tmp_path / "b.json")]) == 2


def test_console_script_runs():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "liteembed.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


def test_thread_cap_does_not_change_results(workdir, fx):
    """LITEEMBED_THREADS caps BLAS threading without touching numerics."""
    import os
    import subprocess
    import sys

    cfg = workdir / "run.json"
    cfg.write_text(json.dumps(run_config_doc(fx, steps=200)))
    outputs = []
    for threads in ("1", "2"):
        out = workdir / "optimized.emb1"
        if out.exists():
            out.unlink()
        env = dict(os.environ, LITEEMBED_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "liteembed.cli", "fit", "--config", str(cfg)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]

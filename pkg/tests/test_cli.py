import json
import subprocess
import sys

import pytest

from llmdetect.cli import main
from llmdetect.corpus import synth_corpus, save_corpus
from llmdetect.ensemble import load_external_scores

CONFIG = """
[run]
seed = 11

[tokenizer]
vocab_size = 120

[features]
ngram_min = 1
ngram_max = 2
min_df = 1

[sgd]
epochs = 3

[gbdt]
n_trees = 4
max_leaves = 4
n_bins = 16
min_data_in_leaf = 2
learning_rate = 0.3
"""


@pytest.fixture
def workdir(tmp_path):
    corpus = synth_corpus(20, seed=5, divergence=0.9)
    save_corpus(corpus, tmp_path / "corpus.jsonl", "jsonl")
    (tmp_path / "run.ini").write_text(CONFIG)
    return tmp_path


def run(args):
    return main([str(a) for a in args])


def trained_bundle(workdir, kind="naive_bayes"):
    assert run(["tokenize-train", workdir / "corpus.jsonl",
                "--out", workdir / "vocab.json",
                "--config", workdir / "run.ini"]) == 0
    assert run(["train", workdir / "corpus.jsonl", "--kind", kind,
                "--out", workdir / f"{kind}.json",
                "--vocab", workdir / "vocab.json",
                "--config", workdir / "run.ini"]) == 0
    return workdir / f"{kind}.json", workdir / "vocab.json"


class TestTokenizeTrain:
    def test_output_reloadable(self, workdir):
        from llmdetect.tokenizer import load_vocab
        assert run(["tokenize-train", workdir / "corpus.jsonl",
                    "--out", workdir / "v.json",
                    "--config", workdir / "run.ini"]) == 0
        vocab = load_vocab((workdir / "v.json").read_bytes())
        assert vocab.size <= 120

    def test_vocab_size_too_small_fails(self, workdir, capsys):
        code = run(["tokenize-train", workdir / "corpus.jsonl",
                    "--out", workdir / "v.json", "--vocab-size", "3"])
        assert code == 1
        assert "error[tokenizer]" in capsys.readouterr().err

    def test_byte_identical_reruns(self, workdir):
        for _ in range(2):
            run(["tokenize-train", workdir / "corpus.jsonl",
                 "--out", workdir / "v.json", "--config", workdir / "run.ini"])
            first = (workdir / "v.json").read_bytes()
        assert (workdir / "v.json").read_bytes() == first


class TestTrain:
    def test_bundle_round_trips(self, workdir):
        bundle_path, _ = trained_bundle(workdir)
        from llmdetect.models import load_model
        bundle = load_model(bundle_path.read_bytes())
        assert bundle.kind == "naive_bayes"
        assert bundle.seed == 11

    def test_unknown_kind_is_usage_error(self, workdir, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["train", workdir / "corpus.jsonl", "--kind", "svm",
                 "--out", workdir / "m.json"])
        assert exc.value.code == 2
        assert "naive_bayes" in capsys.readouterr().err

    def test_missing_vocab_path_fails(self, workdir, capsys):
        code = run(["train", workdir / "corpus.jsonl", "--kind", "naive_bayes",
                    "--out", workdir / "m.json",
                    "--config", workdir / "run.ini"])
        assert code == 1
        assert "error[config]" in capsys.readouterr().err

    def test_identical_bundles_across_runs(self, workdir):
        path1, _ = trained_bundle(workdir)
        data1 = path1.read_bytes()
        path2, _ = trained_bundle(workdir)
        assert path2.read_bytes() == data1

    def test_holdout_split_written(self, workdir):
        run(["tokenize-train", workdir / "corpus.jsonl",
             "--out", workdir / "vocab.json", "--config", workdir / "run.ini"])
        assert run(["train", workdir / "corpus.jsonl", "--kind", "naive_bayes",
                    "--out", workdir / "m.json",
                    "--vocab", workdir / "vocab.json",
                    "--config", workdir / "run.ini",
                    "--holdout-fraction", "0.2",
                    "--holdout-out", workdir / "held.jsonl"]) == 0
        from llmdetect.corpus import load_corpus
        held = load_corpus(workdir / "held.jsonl", "jsonl")
        assert len(held) == 8  # 20% of 40, stratified

    def test_trained_bundle_scores_holdout_well(self, tmp_path):
        # full CLI loop at divergence 0.8: held-out AUC must clear 0.9
        save_corpus(synth_corpus(100, seed=42, divergence=0.8),
                    tmp_path / "c.jsonl", "jsonl")
        (tmp_path / "run.ini").write_text(CONFIG)
        run(["tokenize-train", tmp_path / "c.jsonl",
             "--out", tmp_path / "v.json", "--config", tmp_path / "run.ini"])
        run(["train", tmp_path / "c.jsonl", "--kind", "naive_bayes",
             "--out", tmp_path / "m.json", "--vocab", tmp_path / "v.json",
             "--config", tmp_path / "run.ini",
             "--holdout-fraction", "0.2",
             "--holdout-out", tmp_path / "held.jsonl"])
        run(["predict", tmp_path / "m.json", tmp_path / "held.jsonl",
             "--out", tmp_path / "s.csv", "--vocab", tmp_path / "v.json"])
        run(["evaluate", tmp_path / "s.csv", tmp_path / "held.jsonl",
             "--json", tmp_path / "r.json"])
        report = json.loads((tmp_path / "r.json").read_text())
        assert report["auc"] >= 0.9


class TestPredict:
    def test_scores_round_trip_through_schema(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        assert run(["predict", bundle, workdir / "corpus.jsonl",
                    "--out", workdir / "scores.csv", "--vocab", vocab]) == 0
        scores = load_external_scores(workdir / "scores.csv")
        assert len(scores.scores) == 40
        assert all(0.0 <= s <= 1.0 for s in scores.scores.values())

    def test_empty_corpus_gives_header_only(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        (workdir / "empty.jsonl").write_text("")
        assert run(["predict", bundle, workdir / "empty.jsonl",
                    "--out", workdir / "s.csv", "--vocab", vocab]) == 0
        assert (workdir / "s.csv").read_text() == "id,score\n"

    def test_vocab_hash_mismatch_refused(self, workdir, capsys):
        bundle, _ = trained_bundle(workdir)
        other = synth_corpus(10, seed=77, divergence=0.2)
        save_corpus(other, workdir / "other.jsonl", "jsonl")
        run(["tokenize-train", workdir / "other.jsonl",
             "--out", workdir / "other_vocab.json",
             "--config", workdir / "run.ini"])
        code = run(["predict", bundle, workdir / "corpus.jsonl",
                    "--out", workdir / "s.csv",
                    "--vocab", workdir / "other_vocab.json"])
        assert code == 1
        err = capsys.readouterr().err
        assert "error[model]" in err and "mismatch" in err

    def test_missing_vocab_flagged(self, workdir, capsys):
        bundle, _ = trained_bundle(workdir)
        code = run(["predict", bundle, workdir / "corpus.jsonl",
                    "--out", workdir / "s.csv"])
        assert code == 1
        assert "--vocab" in capsys.readouterr().err

    def test_byte_identical_reruns(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "a.csv", "--vocab", vocab])
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "b.csv", "--vocab", vocab])
        assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()


class TestEvaluate:
    def write_scores(self, workdir, rows):
        path = workdir / "oracle.csv"
        path.write_text("id,score\n" + "".join(f"{i},{s}\n" for i, s in rows))
        return path

    def test_perfect_oracle_auc_one(self, workdir, capsys):
        corpus = synth_corpus(5, seed=2, divergence=0.5)
        save_corpus(corpus, workdir / "c.jsonl", "jsonl")
        rows = [(d.id, float(y)) for d, y in zip(corpus.documents, corpus.labels)]
        scores = self.write_scores(workdir, rows)
        assert run(["evaluate", scores, workdir / "c.jsonl"]) == 0
        out = capsys.readouterr().out
        assert "roc_auc: 1.0" in out

    def test_constant_scores_auc_half(self, workdir, capsys):
        corpus = synth_corpus(5, seed=2, divergence=0.5)
        save_corpus(corpus, workdir / "c.jsonl", "jsonl")
        scores = self.write_scores(workdir, [(d.id, 0.5)
                                             for d in corpus.documents])
        assert run(["evaluate", scores, workdir / "c.jsonl"]) == 0
        assert "roc_auc: 0.5" in capsys.readouterr().out

    def test_json_report_schema(self, workdir, capsys):
        corpus = synth_corpus(5, seed=2, divergence=0.5)
        save_corpus(corpus, workdir / "c.jsonl", "jsonl")
        rows = [(d.id, float(y)) for d, y in zip(corpus.documents, corpus.labels)]
        scores = self.write_scores(workdir, rows)
        assert run(["evaluate", scores, workdir / "c.jsonl",
                    "--json", workdir / "report.json"]) == 0
        report = json.loads((workdir / "report.json").read_text())
        assert set(report) == {"auc", "n_documents", "n_positive", "n_negative",
                               "curve", "confusion"}
        assert [c["threshold"] for c in report["confusion"]] == [
            pytest.approx(t / 10) for t in range(1, 10)]

    def test_corpus_id_missing_from_scores_listed(self, workdir, capsys):
        corpus = synth_corpus(3, seed=2, divergence=0.5)
        save_corpus(corpus, workdir / "c.jsonl", "jsonl")
        scores = self.write_scores(workdir, [(corpus.ids[0], 0.5)])
        assert run(["evaluate", scores, workdir / "c.jsonl"]) == 1
        assert corpus.ids[1] in capsys.readouterr().err


class TestEnsembleCommand:
    def test_spec_run_and_missing_id(self, workdir, capsys):
        bundle, vocab = trained_bundle(workdir)
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "inner.csv", "--vocab", vocab])
        spec = {"format_version": 1, "combine": "probability_mean",
                "voters": [{"model": "naive_bayes.json", "weight": 1.0},
                           {"scores": "inner.csv", "weight": 1.0}]}
        (workdir / "spec.json").write_text(json.dumps(spec))
        assert run(["ensemble", workdir / "spec.json", workdir / "corpus.jsonl",
                    "--out", workdir / "combined.csv", "--vocab", vocab]) == 0
        combined = load_external_scores(workdir / "combined.csv")
        inner = load_external_scores(workdir / "inner.csv")
        for doc_id, score in inner.scores.items():
            assert combined.scores[doc_id] == pytest.approx(score, abs=1e-15)

        # corpus with an id the external file does not cover
        extra = synth_corpus(21, seed=5, divergence=0.9)
        save_corpus(extra, workdir / "bigger.jsonl", "jsonl")
        code = run(["ensemble", workdir / "spec.json", workdir / "bigger.jsonl",
                    "--out", workdir / "x.csv", "--vocab", vocab])
        assert code == 1
        assert "missing" in capsys.readouterr().err

    def test_single_internal_voter_equals_predict(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        spec = {"format_version": 1,
                "voters": [{"model": "naive_bayes.json", "weight": 2.0}]}
        (workdir / "spec.json").write_text(json.dumps(spec))
        run(["ensemble", workdir / "spec.json", workdir / "corpus.jsonl",
             "--out", workdir / "ens.csv", "--vocab", vocab])
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "solo.csv", "--vocab", vocab])
        assert ((workdir / "ens.csv").read_bytes()
                == (workdir / "solo.csv").read_bytes())

    def test_predict_accepts_spec_file(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        spec = {"format_version": 1,
                "voters": [{"model": "naive_bayes.json", "weight": 1.0}]}
        (workdir / "spec.json").write_text(json.dumps(spec))
        assert run(["predict", workdir / "spec.json", workdir / "corpus.jsonl",
                    "--out", workdir / "via_predict.csv", "--vocab", vocab]) == 0
        run(["ensemble", workdir / "spec.json", workdir / "corpus.jsonl",
             "--out", workdir / "via_ensemble.csv", "--vocab", vocab])
        assert ((workdir / "via_predict.csv").read_bytes()
                == (workdir / "via_ensemble.csv").read_bytes())

    def test_rank_mean_combiner(self, workdir):
        bundle, vocab = trained_bundle(workdir)
        spec = {"format_version": 1, "combine": "rank_mean",
                "voters": [{"model": "naive_bayes.json", "weight": 1.0}]}
        (workdir / "spec.json").write_text(json.dumps(spec))
        assert run(["ensemble", workdir / "spec.json", workdir / "corpus.jsonl",
                    "--out", workdir / "ranked.csv", "--vocab", vocab]) == 0
        ranked = load_external_scores(workdir / "ranked.csv")
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "raw.csv", "--vocab", vocab])
        raw = load_external_scores(workdir / "raw.csv")
        # a single voter's rank transform preserves its score ordering
        ids = sorted(raw.scores)
        order_raw = sorted(ids, key=lambda i: raw.scores[i])
        order_ranked = sorted(ids, key=lambda i: ranked.scores[i])
        assert order_raw == order_ranked
        assert all(0.0 <= s <= 1.0 for s in ranked.scores.values())

    def test_tune_weights_runs(self, workdir, capsys):
        bundle, vocab = trained_bundle(workdir)
        run(["predict", bundle, workdir / "corpus.jsonl",
             "--out", workdir / "inner.csv", "--vocab", vocab])
        spec = {"format_version": 1,
                "voters": [{"model": "naive_bayes.json", "weight": 1.0},
                           {"scores": "inner.csv", "weight": 1.0}]}
        (workdir / "spec.json").write_text(json.dumps(spec))
        assert run(["ensemble", workdir / "spec.json", workdir / "corpus.jsonl",
                    "--out", workdir / "tuned.csv", "--vocab", vocab,
                    "--tune-weights"]) == 0
        assert "tuned weights" in capsys.readouterr().err


class TestWhitespaceMode:
    def test_train_and_predict_without_tokenizer_file(self, workdir, capsys):
        config = workdir / "ws.ini"
        config.write_text("[features]\ntoken_source = whitespace\n"
                          "ngram_max = 2\nmin_df = 1\n")
        assert run(["train", workdir / "corpus.jsonl", "--kind", "naive_bayes",
                    "--out", workdir / "ws.json", "--config", config]) == 0
        assert run(["predict", workdir / "ws.json", workdir / "corpus.jsonl",
                    "--out", workdir / "ws_scores.csv"]) == 0
        assert run(["evaluate", workdir / "ws_scores.csv",
                    workdir / "corpus.jsonl"]) == 0
        out = capsys.readouterr().out
        assert "roc_auc:" in out


class TestSynth:
    def test_jsonl_line_count(self, workdir):
        assert run(["synth", "--n-per-class", "10", "--divergence", "0.5",
                    "--out", workdir / "s.jsonl", "--seed", "3"]) == 0
        lines = (workdir / "s.jsonl").read_text().splitlines()
        assert len(lines) == 20

    def test_divergence_out_of_range(self, workdir, capsys):
        code = run(["synth", "--n-per-class", "5", "--divergence", "1.2",
                    "--out", workdir / "s.jsonl"])
        assert code == 1
        assert "error[corpus]" in capsys.readouterr().err

    def test_fixed_seed_identical_bytes(self, workdir):
        for name in ("a.jsonl", "b.jsonl"):
            run(["synth", "--n-per-class", "6", "--divergence", "0.4",
                 "--out", workdir / name, "--seed", "9"])
        assert ((workdir / "a.jsonl").read_bytes()
                == (workdir / "b.jsonl").read_bytes())


def test_module_entry_point(tmp_path):
    corpus = synth_corpus(3, seed=1, divergence=0.5)
    save_corpus(corpus, tmp_path / "c.jsonl", "jsonl")
    proc = subprocess.run(
        [sys.executable, "-m", "llmdetect", "synth", "--n-per-class", "2",
         "--divergence", "0.3", "--out", str(tmp_path / "out.jsonl")],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "out.jsonl").exists()

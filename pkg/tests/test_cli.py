"""CLI behavior: exit codes, stage artifacts, and a small end-to-end run."""

import json
from pathlib import Path

import pytest

from topicflow import cli

THEME_A = ["hospital", "patient", "surge", "ward", "clinic", "testing"]
THEME_B = ["lockdown", "curfew", "closure", "quarantine", "border", "travel"]
OFF_TOPIC = ["football", "playoff", "stadium", "coach", "guitar", "concert"]


def _doc(i, bank, label, day):
    words = [bank[(i + j) % len(bank)] for j in range(4)] + [str(1000 + i)]
    return {
        "id": f"d{i:03d}",
        "text": " ".join(words),
        "ts": f"2020-03-{day:02d}T12:00:00+00:00",
        "label": label,
    }


def make_workspace(tmp_path: Path) -> Path:
    """Write a 48-doc corpus, timeline, and config; returns the config path."""
    records = []
    for i in range(15):
        records.append(_doc(i, THEME_A, "relevant", 1 + i % 20))
    for i in range(15, 30):
        records.append(_doc(i, THEME_B, "relevant", 1 + i % 20))
    for i in range(30, 48):
        records.append(_doc(i, OFF_TOPIC, "irrelevant", 1 + i % 20))
    corpus = tmp_path / "corpus.jsonl"
    with corpus.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    timeline = tmp_path / "timeline.json"
    timeline.write_text(json.dumps([
        {"start": "2020-03-05", "end": "2020-03-09", "description": "first order"},
        {"start": "2020-02-01", "end": "2020-02-02", "description": "early alert"},
    ]), encoding="utf-8")
    config = tmp_path / "run.ini"
    config.write_text(f"""
[run]
seed = 42

[data]
corpus = {corpus}
format = jsonl
timeline = {timeline}

[features]
kind = tfidf
min_df = 2

[model]
kind = logreg
epochs = 60
learning_rate = 0.5

[smote]
enabled = true
k = 3

[cv]
folds = 3

[lda]
k = 2
k_range = 2..3
iterations = 60
burn_in = 30
sample_every = 5
min_df = 2
max_df_ratio = 0.9
infer_iterations = 20

[coherence]
measure = umass
top_n = 5

[trends]
top_m = 2
""", encoding="utf-8")
    return config


def run_cli(config, out, *argv):
    return cli.main(["--config", str(config), "--out", str(out), *argv])


def test_no_arguments_is_usage_error(capsys):
    assert cli.main([]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_command_is_usage_error(capsys):
    assert cli.main(["frobnicate"]) == 1


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "nope.ini"), "preprocess"]) == 1
    assert "not found" in capsys.readouterr().err


def test_missing_corpus_is_data_error(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path / "out"), "preprocess",
                     "--corpus", str(tmp_path / "missing.jsonl")]) == 2
    assert "not found" in capsys.readouterr().err


def test_preprocess_without_corpus_is_config_error(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path / "out"), "preprocess"]) == 1


def test_threads_must_be_positive(tmp_path, capsys):
    config = make_workspace(tmp_path)
    assert run_cli(config, tmp_path / "out", "--threads", "0", "preprocess") == 1
    assert cli.main(["--config", str(config), "--threads", "0", "preprocess"]) == 1


def test_sweep_without_k_range(tmp_path, capsys):
    config = make_workspace(tmp_path)
    config.write_text(config.read_text("utf-8").replace("k_range = 2..3\n", ""),
                      encoding="utf-8")
    out = tmp_path / "out"
    assert run_cli(config, out, "preprocess") == 0
    assert run_cli(config, out, "sweep") == 1
    assert "k_range" in capsys.readouterr().err


def test_preprocess_stage(tmp_path, capsys):
    config = make_workspace(tmp_path)
    out = tmp_path / "out"
    assert run_cli(config, out, "preprocess") == 0
    assert (out / "clean.jsonl").exists()
    stats = json.loads((out / "preprocess_stats.json").read_text("utf-8"))
    assert stats["input"] == 48
    assert stats["unique"] == 48
    assert stats["dropped_short"] == 0
    assert stats["duplicates_removed"] == 0
    assert stats["labels"] == {"relevant": 30, "irrelevant": 18, "unlabeled": 0}


def test_numeric_error_exit_code(tmp_path, capsys):
    config = make_workspace(tmp_path)
    out = tmp_path / "out"
    assert run_cli(config, out, "preprocess") == 0
    emb = tmp_path / "flat.vec"
    lines = ["dim=3"]
    for i in range(48):
        lines.append(f"d{i:03d}\t1.0 2.0 3.0")
    emb.write_text("\n".join(lines) + "\n", encoding="utf-8")
    ini = config.read_text("utf-8").replace("kind = tfidf", "kind = embeddings")
    ini = ini.replace("min_df = 2\n\n[model]", "min_df = 2\npca_components = 1\n\n[model]")
    config.write_text(ini, encoding="utf-8")
    code = run_cli(config, out, "train", "--embeddings", str(emb))
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_full_pipeline_artifacts(tmp_path, capsys):
    config = make_workspace(tmp_path)
    out = tmp_path / "out"
    assert run_cli(config, out, "pipeline") == 0
    for name in [
        "clean.jsonl", "preprocess_stats.json", "vocab.json", "model.json",
        "metrics.json", "cv.json", "labels.csv", "label_summary.json",
        "relevant.jsonl", "lda_vocab.json", "lda_model.json", "doc_topics.jsonl",
        "topics.json", "topics_stats.json", "trend.csv", "trend_counts.csv",
        "alignment.md", "coherence.csv", "sweep.json",
        "report/manifest.json", "report/trend.svg", "report/topic_map.svg",
        "report/coherence.svg",
    ]:
        assert (out / name).exists(), name

    metrics = json.loads((out / "metrics.json").read_text("utf-8"))
    assert metrics["split_sizes"] == {"train": 37, "test": 7, "val": 4}
    assert 0.0 <= metrics["test"]["accuracy"] <= 1.0

    sweep = json.loads((out / "sweep.json").read_text("utf-8"))
    assert sweep["selected_k"] in (2, 3)
    topics = json.loads((out / "topics.json").read_text("utf-8"))
    assert [t["topic"] for t in topics] == list(range(sweep["selected_k"]))
    assert all(t["terms"] for t in topics)

    manifest = json.loads((out / "report" / "manifest.json").read_text("utf-8"))
    assert manifest["missing"] == []


def test_pipeline_is_deterministic(tmp_path):
    config = make_workspace(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli(config, out_a, "pipeline") == 0
    assert run_cli(config, out_b, "pipeline") == 0
    for name in ["model.json", "doc_topics.jsonl", "trend.csv", "report/manifest.json"]:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_seed_changes_model(tmp_path):
    config = make_workspace(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli(config, out_a, "preprocess") == 0
    assert run_cli(config, out_a, "train") == 0
    assert cli.main(["--config", str(config), "--out", str(out_b), "--seed", "7",
                     "preprocess"]) == 0
    assert cli.main(["--config", str(config), "--out", str(out_b), "--seed", "7",
                     "train"]) == 0
    assert (out_a / "model.json").read_bytes() != (out_b / "model.json").read_bytes()


def test_predict_fingerprint_mismatch(tmp_path, capsys):
    config = make_workspace(tmp_path)
    out = tmp_path / "out"
    assert run_cli(config, out, "preprocess") == 0
    assert run_cli(config, out, "train") == 0
    vocab = json.loads((out / "vocab.json").read_text("utf-8"))
    vocab["n_docs"] += 1
    (out / "vocab.json").write_text(json.dumps(vocab, sort_keys=True), encoding="utf-8")
    assert run_cli(config, out, "predict") == 2
    assert "fingerprint" in capsys.readouterr().err


def test_trends_before_topics_is_data_error(tmp_path, capsys):
    config = make_workspace(tmp_path)
    out = tmp_path / "out"
    assert run_cli(config, out, "preprocess") == 0
    assert run_cli(config, out, "trends") == 2

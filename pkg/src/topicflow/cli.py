"""Command-line pipeline driver.

Commands map one-to-one onto pipeline stages (preprocess, train, cv,
predict, topics, sweep, trends, report) plus an end-to-end `pipeline`.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric
error. All stage randomness derives from the master seed and a stage
name, so repeating a command reproduces its outputs byte for byte.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace
from datetime import date
from pathlib import Path

import numpy as np

from . import classify, report as report_mod, topics as topics_mod, trends as trends_mod
from .balance import smote  # noqa: F401  (re-exported for interactive use)
from .classify import (
    KIND_LOGREG, KIND_SVM, FEATURE_EMBEDDING, FEATURE_TFIDF,
    LabeledPoint, LogRegParams, SvmParams,
)
from .config import FEATURES_EMBEDDINGS, FEATURES_TFIDF, RunConfig, load_config
from .corpus import (
    DEFAULT_KEYWORDS, RELEVANT, CleanDocument, PreprocessConfig,
    default_stopwords, deduplicate, load_clean_corpus, load_corpus,
    load_term_file, preprocess, save_clean_corpus,
)
from .errors import ConfigError, DataError, NumericError
from .features import PcaModel, Vocabulary, build_vocabulary, load_embeddings, pca_fit, pca_transform, tfidf_matrix
from .report import RunArtifacts, emit_run_report, intertopic_map, write_coherence_csv, write_json, write_labels_csv
from .rng import derive_seed
from .topics import LdaParams, coherence_sweep, lda_fit, load_doc_topics, load_lda_model, save_doc_topics, save_lda_model, top_words, topic_distribution, umass_coherence, npmi_coherence
from .trends import align_events, alignment_markdown, assign_weeks, load_timeline, save_trend_counts_csv, save_trend_csv, topic_trend


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors map to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topicflow", description=__doc__)
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--out", help="run output directory (overrides config)")
    parser.add_argument("--threads", type=int, help="compute thread cap (overrides config)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="normalize, tokenize, stem, and dedupe a corpus")
    p.add_argument("--corpus", help="raw corpus path (JSONL or CSV)")
    p.add_argument("--format", choices=("jsonl", "csv"), help="corpus format override")
    p.add_argument("--stoplist", help="stopword file (default: bundled list)")
    p.add_argument("--keywords", help="collection keyword file (default: built-in set)")

    p = sub.add_parser("train", help="train a relevance classifier")
    p.add_argument("--clean", help="clean corpus path (default: <out>/clean.jsonl)")
    p.add_argument("--features", choices=(FEATURES_TFIDF, FEATURES_EMBEDDINGS))
    p.add_argument("--model", choices=(KIND_LOGREG, KIND_SVM))
    p.add_argument("--embeddings", help="embedding table (for --features embeddings)")

    p = sub.add_parser("cv", help="cross-validate a classifier")
    p.add_argument("--clean", help="clean corpus path (default: <out>/clean.jsonl)")
    p.add_argument("--features", choices=(FEATURES_TFIDF, FEATURES_EMBEDDINGS))
    p.add_argument("--model", choices=(KIND_LOGREG, KIND_SVM))
    p.add_argument("--embeddings", help="embedding table (for --features embeddings)")
    p.add_argument("--folds", type=int, help="number of folds")
    p.add_argument("--no-smote", action="store_true", help="disable SMOTE inside folds")

    p = sub.add_parser("predict", help="label every document with a trained model")
    p.add_argument("--clean", help="clean corpus path (default: <out>/clean.jsonl)")
    p.add_argument("--model-file", help="model path (default: <out>/model.json)")
    p.add_argument("--embeddings", help="embedding table (for embedding-featured models)")

    p = sub.add_parser("topics", help="fit LDA topics on the relevant documents")
    p.add_argument("--input", help="clean corpus path (default: <out>/relevant.jsonl)")
    p.add_argument("--k", type=int, help="number of topics")

    p = sub.add_parser("sweep", help="scan K by topic coherence")
    p.add_argument("--input", help="clean corpus path (default: <out>/relevant.jsonl)")
    p.add_argument("--k-range", help="K range as <lo>..<hi>")

    p = sub.add_parser("trends", help="tally weekly topic shares")
    p.add_argument("--input", help="clean corpus path (default: <out>/relevant.jsonl)")
    p.add_argument("--origin", help="week origin date (ISO, default: earliest document)")

    sub.add_parser("report", help="bundle all artifacts into <out>/report")
    sub.add_parser("pipeline", help="run every stage end to end")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        cfg.threads = args.threads
    return cfg


def _apply_threads(n: int) -> None:
    try:
        import numba

        numba.set_num_threads(max(1, min(n, numba.get_num_threads())))
    except Exception:  # noqa: BLE001 - thread capping is best effort
        pass


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------- preprocess

def stage_preprocess(cfg: RunConfig, corpus_path=None, fmt=None, stoplist=None, keywords=None) -> dict:
    out = _out_dir(cfg)
    corpus_path = corpus_path or cfg.data.corpus
    if not corpus_path:
        raise ConfigError("no corpus path given (use --corpus or [data] corpus)")
    stop_path = stoplist or cfg.data.stoplist
    stopwords = load_term_file(stop_path) if stop_path else default_stopwords()
    kw_path = keywords or cfg.data.keywords
    kw = load_term_file(kw_path) if kw_path else DEFAULT_KEYWORDS
    pcfg = PreprocessConfig(
        stopwords=stopwords,
        keywords=kw,
        strip_urls=cfg.preprocess.strip_urls,
        strip_mentions_hashmarks=cfg.preprocess.strip_mentions_hashmarks,
        strip_non_ascii=cfg.preprocess.strip_non_ascii,
        min_tokens=cfg.preprocess.min_tokens,
    )
    raw = load_corpus(corpus_path, fmt or cfg.data.format)
    cleaned: list[CleanDocument] = []
    dropped_short = 0
    for doc in raw:
        clean = preprocess(doc, pcfg)
        if clean is None:
            dropped_short += 1
        else:
            cleaned.append(clean)
    unique, n_dupes = deduplicate(cleaned)
    save_clean_corpus(unique, out / "clean.jsonl")
    labels = {"relevant": 0, "irrelevant": 0, "unlabeled": 0}
    for doc in unique:
        labels[doc.label or "unlabeled"] += 1
    stats = {
        "input": len(raw),
        "dropped_short": dropped_short,
        "duplicates_removed": n_dupes,
        "unique": len(unique),
        "labels": labels,
    }
    write_json(stats, out / "preprocess_stats.json")
    return stats


# -------------------------------------------------------------------- train

def _labeled_subset(docs: list[CleanDocument]) -> tuple[list[CleanDocument], list[int]]:
    labeled = [d for d in docs if d.label is not None]
    if not labeled:
        raise DataError("no labeled documents in the corpus")
    y = [1 if d.label == RELEVANT else 0 for d in labeled]
    if len(set(y)) < 2:
        raise DataError("training needs both relevant and irrelevant examples")
    return labeled, y


def _embedding_rows(cfg: RunConfig, docs: list[CleanDocument], path=None) -> np.ndarray:
    emb_path = path or cfg.data.embeddings
    if not emb_path:
        raise ConfigError("embedding features need --embeddings or [data] embeddings")
    vectors, dim = load_embeddings(emb_path)
    missing = [d.id for d in docs if d.id not in vectors]
    if missing:
        shown = ", ".join(repr(m) for m in missing[:5])
        raise DataError(f"{len(missing)} documents lack embeddings (first: {shown})")
    return np.array([vectors[d.id] for d in docs], dtype=np.float64)


def stage_train(cfg: RunConfig, clean_path=None, features_kind=None, model_kind=None,
                embeddings_path=None) -> dict:
    out = _out_dir(cfg)
    docs = load_clean_corpus(clean_path or out / "clean.jsonl")
    labeled, y = _labeled_subset(docs)
    spec = replace(cfg.split, seed=derive_seed(cfg.seed, "split"))
    idx_train, idx_test, idx_val = classify.split_indices(y, spec)

    kind = features_kind or cfg.features.kind
    if kind == FEATURES_TFIDF:
        vocab = build_vocabulary(
            [labeled[i].tokens for i in idx_train],
            min_df=cfg.features.min_df,
            max_df_ratio=cfg.features.max_df_ratio,
        )
        vocab.save(out / "vocab.json")
        feats = tfidf_matrix([d.tokens for d in labeled], vocab)
        fingerprints = {"vocab": vocab.fingerprint()}
        feature_kind = FEATURE_TFIDF
    elif kind == FEATURES_EMBEDDINGS:
        rows = _embedding_rows(cfg, labeled, embeddings_path)
        cap = min(rows.shape[1], len(idx_train) - 1)
        n_comp = cfg.features.pca_components
        if n_comp > cap:
            warnings.warn(f"pca_components clamped from {n_comp} to {cap}", RuntimeWarning)
            n_comp = cap
        pca = pca_fit(rows[idx_train], n_comp)
        pca.save(out / "pca.json")
        projected = pca_transform(pca, rows)
        feats = [projected[i] for i in range(projected.shape[0])]
        fingerprints = {"pca": pca.fingerprint()}
        feature_kind = FEATURE_EMBEDDING
    else:
        raise ConfigError(f"unknown feature kind {kind!r}")

    points = [LabeledPoint(feats[i], y[i]) for i in range(len(labeled))]
    train_pts = [points[i] for i in idx_train]
    test_pts = [points[i] for i in idx_test]
    val_pts = [points[i] for i in idx_val]
    n_before = len(train_pts)
    if cfg.smote.enabled:
        train_pts = classify.balance_training_set(
            train_pts, k=cfg.smote.k, seed=derive_seed(cfg.seed, "smote")
        )

    mkind = model_kind or cfg.model.kind
    train_seed = derive_seed(cfg.seed, "train")
    if mkind == KIND_LOGREG:
        params = LogRegParams(epochs=cfg.model.epochs, learning_rate=cfg.model.learning_rate,
                              l2=cfg.model.l2, seed=train_seed)
        model = classify.train_logreg(train_pts, params, feature_kind, fingerprints)
    elif mkind == KIND_SVM:
        params = SvmParams(epochs=cfg.model.svm_epochs, lam=cfg.model.lam, seed=train_seed)
        model = classify.train_svm(train_pts, params, feature_kind, fingerprints)
    else:
        raise ConfigError(f"unknown model kind {mkind!r}")
    classify.save_model(model, out / "model.json")

    payload = {
        "model": mkind,
        "features": kind,
        "split_sizes": {"train": n_before, "test": len(test_pts), "val": len(val_pts)},
        "train_after_smote": len(train_pts),
    }
    if test_pts:
        payload["test"] = classify.metrics_to_dict(classify.evaluate(model, test_pts))
    if val_pts:
        payload["val"] = classify.metrics_to_dict(classify.evaluate(model, val_pts))
    write_json(payload, out / "metrics.json")
    return payload


# ----------------------------------------------------------------------- cv

def stage_cv(cfg: RunConfig, clean_path=None, features_kind=None, model_kind=None,
             embeddings_path=None, folds=None, use_smote=None) -> dict:
    out = _out_dir(cfg)
    docs = load_clean_corpus(clean_path or out / "clean.jsonl")
    labeled, y = _labeled_subset(docs)
    kind = features_kind or cfg.features.kind
    if kind == FEATURES_TFIDF:
        vocab = build_vocabulary([d.tokens for d in labeled],
                                 min_df=cfg.features.min_df,
                                 max_df_ratio=cfg.features.max_df_ratio)
        feats = tfidf_matrix([d.tokens for d in labeled], vocab)
        feature_kind = FEATURE_TFIDF
    elif kind == FEATURES_EMBEDDINGS:
        rows = _embedding_rows(cfg, labeled, embeddings_path)
        cap = min(rows.shape[1], rows.shape[0] - 1)
        n_comp = min(cfg.features.pca_components, cap)
        pca = pca_fit(rows, n_comp)
        projected = pca_transform(pca, rows)
        feats = [projected[i] for i in range(projected.shape[0])]
        feature_kind = FEATURE_EMBEDDING
    else:
        raise ConfigError(f"unknown feature kind {kind!r}")
    points = [LabeledPoint(feats[i], y[i]) for i in range(len(labeled))]
    mkind = model_kind or cfg.model.kind
    if mkind == KIND_LOGREG:
        params = LogRegParams(epochs=cfg.model.epochs, learning_rate=cfg.model.learning_rate,
                              l2=cfg.model.l2)
    else:
        params = SvmParams(epochs=cfg.model.svm_epochs, lam=cfg.model.lam)
    smote_on = cfg.smote.enabled if use_smote is None else use_smote
    result = classify.cross_validate(
        points,
        mkind,
        k_folds=folds or cfg.cv_folds,
        seed=derive_seed(cfg.seed, "cv"),
        params=params,
        use_smote=smote_on,
        smote_k=cfg.smote.k,
        feature_kind=feature_kind,
    )
    payload = {
        "model": mkind,
        "features": kind,
        "folds": folds or cfg.cv_folds,
        "smote": smote_on,
        "mean": result.mean,
        "std": result.std,
        "per_fold": [classify.metrics_to_dict(m) for m in result.fold_metrics],
    }
    write_json(payload, out / "cv.json")
    return payload


# ------------------------------------------------------------------ predict

def stage_predict(cfg: RunConfig, clean_path=None, model_file=None, embeddings_path=None) -> dict:
    out = _out_dir(cfg)
    model = classify.load_model(model_file or out / "model.json")
    docs = load_clean_corpus(clean_path or out / "clean.jsonl")
    if not docs:
        raise DataError("clean corpus is empty")
    if model.feature_kind == FEATURE_TFIDF:
        vocab = Vocabulary.load(out / "vocab.json")
        expected = model.fingerprints.get("vocab")
        if expected is not None and expected != vocab.fingerprint():
            raise DataError("vocabulary fingerprint does not match the model")
        feats = tfidf_matrix([d.tokens for d in docs], vocab)
    elif model.feature_kind == FEATURE_EMBEDDING:
        pca = PcaModel.load(out / "pca.json")
        expected = model.fingerprints.get("pca")
        if expected is not None and expected != pca.fingerprint():
            raise DataError("PCA fingerprint does not match the model")
        rows = _embedding_rows(cfg, docs, embeddings_path)
        projected = pca_transform(pca, rows)
        feats = [projected[i] for i in range(projected.shape[0])]
    else:
        raise ConfigError(f"model feature kind {model.feature_kind!r} is not usable from files")
    rows_out, summary = classify.bulk_label(model, [d.id for d in docs], feats)
    write_labels_csv(rows_out, out / "labels.csv")
    write_json(summary, out / "label_summary.json")
    relevant = [doc for doc, row in zip(docs, rows_out) if row[1] == RELEVANT]
    save_clean_corpus(relevant, out / "relevant.jsonl")
    return summary


# ------------------------------------------------------------- topics/sweep

def _topic_input(cfg: RunConfig, explicit=None) -> list[CleanDocument]:
    out = _out_dir(cfg)
    if explicit:
        return load_clean_corpus(explicit)
    relevant = out / "relevant.jsonl"
    if relevant.exists():
        return load_clean_corpus(relevant)
    return load_clean_corpus(out / "clean.jsonl")


def _lda_vocab(cfg: RunConfig, token_docs: list[list[str]]) -> Vocabulary:
    return build_vocabulary(token_docs, min_df=cfg.lda.min_df, max_df_ratio=cfg.lda.max_df_ratio)


def _base_lda_params(cfg: RunConfig) -> LdaParams:
    return LdaParams(
        k=cfg.lda.k,
        alpha=cfg.lda.alpha,
        beta=cfg.lda.beta,
        iterations=cfg.lda.iterations,
        burn_in=cfg.lda.burn_in,
        sample_every=cfg.lda.sample_every,
    )


def stage_sweep(cfg: RunConfig, input_path=None, k_range=None) -> topics_mod.SweepResult:
    out = _out_dir(cfg)
    bounds = k_range or cfg.lda.k_range
    if bounds is None:
        raise ConfigError("sweep needs a K range (use --k-range or [lda] k_range)")
    docs = _topic_input(cfg, input_path)
    token_docs = [d.tokens for d in docs]
    vocab = _lda_vocab(cfg, token_docs)
    result = coherence_sweep(
        token_docs,
        vocab,
        list(range(bounds[0], bounds[1] + 1)),
        _base_lda_params(cfg),
        measure=cfg.coherence.measure,
        master_seed=cfg.seed,
        top_n=cfg.coherence.top_n,
        window=cfg.coherence.window,
    )
    write_coherence_csv(result.curve, out / "coherence.csv")
    write_json(
        {
            "measure": cfg.coherence.measure,
            "curve": [[k, score] for k, score in result.curve],
            "selected_k": result.selected_k,
            "failures": {str(k): msg for k, msg in result.failures.items()},
        },
        out / "sweep.json",
    )
    return result


def _resolve_k(cfg: RunConfig, explicit, out: Path) -> int:
    if explicit is not None:
        return explicit
    sweep_file = out / "sweep.json"
    if cfg.lda.k_range is not None and sweep_file.exists():
        import json as _json

        with sweep_file.open("r", encoding="utf-8") as fh:
            return int(_json.load(fh)["selected_k"])
    return cfg.lda.k


def stage_topics(cfg: RunConfig, input_path=None, k=None) -> dict:
    out = _out_dir(cfg)
    docs = _topic_input(cfg, input_path)
    token_docs = [d.tokens for d in docs]
    vocab = _lda_vocab(cfg, token_docs)
    vocab.save(out / "lda_vocab.json")
    n_topics = _resolve_k(cfg, k, out)
    params = replace(_base_lda_params(cfg), k=n_topics,
                     seed=derive_seed(cfg.seed, f"lda-K={n_topics}"))
    model, doc_topics = lda_fit(token_docs, vocab, params)
    save_lda_model(model, out / "lda_model.json")
    save_doc_topics(doc_topics, [d.id for d in docs], out / "doc_topics.jsonl")
    themes = cfg.theme_names(n_topics)
    payload = []
    for t in range(n_topics):
        terms = top_words(model, t, cfg.coherence.top_n)
        payload.append({
            "topic": t,
            "theme": themes[t],
            "terms": [[term, prob] for term, prob in terms],
        })
    write_json(payload, out / "topics.json")
    if cfg.coherence.measure == "umass":
        per_topic, mean_score = umass_coherence(model, token_docs, cfg.coherence.top_n)
    else:
        per_topic, mean_score = npmi_coherence(model, token_docs, cfg.coherence.top_n,
                                               cfg.coherence.window)
    percents, counts = topic_distribution(doc_topics, n_topics)
    write_json(
        {
            "k": n_topics,
            "coherence": {
                "measure": cfg.coherence.measure,
                "per_topic": per_topic,
                "mean": mean_score,
            },
            "distribution_percent": percents,
            "distribution_counts": counts,
        },
        out / "topics_stats.json",
    )
    return {"k": n_topics, "topics": payload, "coherence_mean": mean_score,
            "distribution_percent": percents}


# ------------------------------------------------------------------- trends

def _build_trend(cfg: RunConfig, input_path=None):
    out = _out_dir(cfg)
    docs = _topic_input(cfg, input_path)
    ids, doc_topics = load_doc_topics(out / "doc_topics.jsonl")
    by_id = {d.id: d for d in docs}
    ordered = []
    for doc_id in ids:
        doc = by_id.get(doc_id)
        if doc is None:
            raise DataError(f"document {doc_id!r} has topics but is missing from the corpus")
        ordered.append(doc)
    if not doc_topics:
        raise DataError("no document-topic records found")
    origin = cfg.trends.origin or min(d.timestamp.date() for d in ordered)
    weeks = assign_weeks(ordered, origin)
    k = int(doc_topics[0].theta.shape[0])
    trend = topic_trend(doc_topics, weeks, k, origin)
    rows = None
    if cfg.data.timeline:
        timeline = load_timeline(cfg.data.timeline)
        rows = align_events(trend, timeline, cfg.theme_names(k), cfg.trends.top_m)
    return trend, rows, k


def stage_trends(cfg: RunConfig, input_path=None, origin=None):
    out = _out_dir(cfg)
    if origin is not None:
        cfg.trends.origin = origin
    trend, rows, _ = _build_trend(cfg, input_path)
    save_trend_csv(trend, out / "trend.csv")
    save_trend_counts_csv(trend, out / "trend_counts.csv")
    if rows is not None:
        (out / "alignment.md").write_text(alignment_markdown(rows), encoding="utf-8")
    return trend, rows


# ------------------------------------------------------------------- report

def stage_report(cfg: RunConfig) -> dict:
    import csv as _csv
    import json as _json

    out = _out_dir(cfg)
    artifacts = RunArtifacts()

    labels_path = out / "labels.csv"
    if labels_path.exists():
        with labels_path.open("r", encoding="utf-8", newline="") as fh:
            reader = _csv.reader(fh)
            next(reader, None)
            artifacts.labels_rows = [(r[0], r[1], float(r[2])) for r in reader]
    summary_path = out / "label_summary.json"
    if summary_path.exists():
        artifacts.label_summary = _json.loads(summary_path.read_text("utf-8"))

    metrics_path = out / "metrics.json"
    metrics = _json.loads(metrics_path.read_text("utf-8")) if metrics_path.exists() else None
    cv_path = out / "cv.json"
    if cv_path.exists():
        metrics = metrics or {}
        metrics["cv"] = _json.loads(cv_path.read_text("utf-8"))
    artifacts.metrics = metrics

    topics_path = out / "topics.json"
    if topics_path.exists():
        artifacts.topics = _json.loads(topics_path.read_text("utf-8"))

    sweep_path = out / "sweep.json"
    if sweep_path.exists():
        sweep = _json.loads(sweep_path.read_text("utf-8"))
        artifacts.coherence_curve = [(int(k), float(s)) for k, s in sweep["curve"]]
        artifacts.selected_k = int(sweep["selected_k"])

    if (out / "doc_topics.jsonl").exists():
        trend, rows, k = _build_trend(cfg)
        artifacts.trend = trend
        artifacts.alignment_rows = rows
        artifacts.theme_names = cfg.theme_names(k)
        model_path = out / "lda_model.json"
        vocab_path = out / "lda_vocab.json"
        if model_path.exists() and vocab_path.exists() and k >= 2:
            vocab = Vocabulary.load(vocab_path)
            model = load_lda_model(model_path, vocab)
            _, doc_topics = load_doc_topics(out / "doc_topics.jsonl")
            artifacts.topic_map = intertopic_map(model, doc_topics, cfg.theme_names(k))

    return emit_run_report(artifacts, out / "report")


# ----------------------------------------------------------------- commands

def _cmd_preprocess(cfg, args) -> int:
    stats = stage_preprocess(cfg, args.corpus, args.format, args.stoplist, args.keywords)
    labels = stats["labels"]
    print(f"preprocess: {stats['input']} in, {stats['unique']} unique "
          f"({stats['dropped_short']} too short, {stats['duplicates_removed']} duplicates)")
    print(f"labels: {labels['relevant']} relevant, {labels['irrelevant']} irrelevant, "
          f"{labels['unlabeled']} unlabeled")
    return 0


def _cmd_train(cfg, args) -> int:
    payload = stage_train(cfg, args.clean, args.features, args.model, args.embeddings)
    sizes = payload["split_sizes"]
    print(f"train: {payload['model']} on {payload['features']} features; "
          f"split {sizes['train']}/{sizes['test']}/{sizes['val']} "
          f"(train grew to {payload['train_after_smote']} after balancing)")
    for split_name in ("test", "val"):
        if split_name in payload:
            m = payload[split_name]
            print(f"{split_name}: accuracy={m['accuracy']:.3f} precision={m['precision']:.3f} "
                  f"recall={m['recall']:.3f} f1={m['f1']:.3f}")
    return 0


def _cmd_cv(cfg, args) -> int:
    payload = stage_cv(cfg, args.clean, args.features, args.model, args.embeddings,
                       args.folds, False if args.no_smote else None)
    mean, std = payload["mean"], payload["std"]
    print(f"cv: {payload['folds']} folds, {payload['model']} on {payload['features']} "
          f"(smote={'on' if payload['smote'] else 'off'})")
    for name in ("accuracy", "precision", "recall", "f1"):
        print(f"{name}: {mean[name]:.3f} +/- {std[name]:.3f}")
    return 0


def _cmd_predict(cfg, args) -> int:
    summary = stage_predict(cfg, args.clean, args.model_file, args.embeddings)
    print(f"predict: {summary['n_relevant']} relevant / {summary['n_docs']} docs "
          f"({100 * summary['relevant_fraction']:.1f}%)")
    return 0


def _cmd_topics(cfg, args) -> int:
    result = stage_topics(cfg, args.input, args.k)
    print(f"topics: k={result['k']}, mean coherence {result['coherence_mean']:.4f}")
    for entry in result["topics"]:
        words = ", ".join(term for term, _ in entry["terms"][:10])
        print(f"topic {entry['topic'] + 1} ({entry['theme']}): {words}")
    return 0


def _cmd_sweep(cfg, args) -> int:
    from .config import _parse_k_range

    bounds = _parse_k_range(args.k_range, "--k-range") if args.k_range else None
    result = stage_sweep(cfg, args.input, bounds)
    for k, score in result.curve:
        marker = " <- selected" if k == result.selected_k else ""
        print(f"K={k}: coherence {score:.4f}{marker}")
    for k, msg in sorted(result.failures.items()):
        print(f"K={k}: failed ({msg})")
    return 0


def _cmd_trends(cfg, args) -> int:
    origin = None
    if args.origin:
        try:
            origin = date.fromisoformat(args.origin)
        except ValueError as exc:
            raise ConfigError(f"--origin must be an ISO date: {exc}") from exc
    trend, rows = stage_trends(cfg, args.input, origin)
    print(f"trends: {trend.n_weeks} weeks from {trend.origin.isoformat()}, "
          f"{len(trend.empty_weeks)} empty")
    if rows is not None:
        print(f"aligned {len(rows)} timeline events")
    return 0


def _cmd_report(cfg, args) -> int:
    manifest = stage_report(cfg)
    print(f"report: {len(manifest['files'])} files in {Path(cfg.out) / 'report'}")
    if manifest["missing"]:
        print("missing stages: " + ", ".join(manifest["missing"]))
    return 0


def _cmd_pipeline(cfg, args) -> int:
    ns = argparse.Namespace(
        corpus=None, format=None, stoplist=None, keywords=None, clean=None,
        features=None, model=None, embeddings=None, model_file=None,
        input=None, k=None, k_range=None, origin=None, folds=None, no_smote=False,
    )
    _cmd_preprocess(cfg, ns)
    _cmd_train(cfg, ns)
    _cmd_cv(cfg, ns)
    _cmd_predict(cfg, ns)
    if cfg.lda.k_range is not None:
        _cmd_sweep(cfg, ns)
    _cmd_topics(cfg, ns)
    _cmd_trends(cfg, ns)
    _cmd_report(cfg, ns)
    return 0


_COMMANDS = {
    "preprocess": _cmd_preprocess,
    "train": _cmd_train,
    "cv": _cmd_cv,
    "predict": _cmd_predict,
    "topics": _cmd_topics,
    "sweep": _cmd_sweep,
    "trends": _cmd_trends,
    "report": _cmd_report,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        _apply_threads(cfg.threads)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

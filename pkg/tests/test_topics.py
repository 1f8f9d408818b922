"""Collapsed Gibbs LDA, coherence scoring, and the K sweep."""

import math

import numpy as np
import pytest

from topicflow import _gibbs
from topicflow.errors import ConfigError, DataError
from topicflow.features import build_vocabulary
from topicflow.rng import derive_seed
from topicflow.synthetic import planted_lda_corpus
from topicflow.topics import (
    DocTopics, LdaModel, LdaParams, coherence_sweep, lda_fit, lda_infer,
    load_doc_topics, load_lda_model, npmi_coherence, save_doc_topics,
    save_lda_model, top_words, topic_distribution, umass_coherence,
)


def _fit_planted(n_docs=400, k=4, iterations=300, burn_in=150, seed=11, **kw):
    docs, phi, terms = planted_lda_corpus(n_docs=n_docs, doc_len=20, n_topics=k, seed=3)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    params = LdaParams(k=k, iterations=iterations, burn_in=burn_in,
                       sample_every=10, seed=seed, **kw)
    model, doc_topics = lda_fit(docs, vocab, params)
    return docs, phi, terms, vocab, model, doc_topics


def _best_match_cosines(recovered: np.ndarray, planted: np.ndarray) -> list[float]:
    sims = recovered @ planted.T
    sims /= np.linalg.norm(recovered, axis=1)[:, None]
    sims /= np.linalg.norm(planted, axis=1)[None, :]
    return [float(sims[i].max()) for i in range(recovered.shape[0])]


# --------------------------------------------------------------------- gibbs

def test_lda_params_validation():
    LdaParams().validate()
    with pytest.raises(ConfigError):
        LdaParams(k=0).validate()
    with pytest.raises(ConfigError):
        LdaParams(alpha=-1.0).validate()
    with pytest.raises(ConfigError):
        LdaParams(beta=0.0).validate()
    with pytest.raises(ConfigError):
        LdaParams(iterations=100, burn_in=100).validate()
    with pytest.raises(ConfigError):
        LdaParams(sample_every=0).validate()
    assert LdaParams(k=8).resolved_alpha() == pytest.approx(50.0 / 8)
    assert LdaParams(k=8, alpha=0.2).resolved_alpha() == 0.2


def test_distribution_rows_sum_to_one():
    _, _, _, _, model, doc_topics = _fit_planted(n_docs=120, iterations=120, burn_in=60)
    assert np.allclose(model.phi.sum(axis=1), 1.0, atol=1e-9)
    for dt in doc_topics:
        assert dt.theta.shape == (4,)
        assert dt.theta.sum() == pytest.approx(1.0, abs=1e-9)
        assert dt.dominant == int(np.argmax(dt.theta))


def test_recovers_planted_topics():
    _, planted, _, _, model, _ = _fit_planted(check_counts=True)
    cosines = _best_match_cosines(model.phi, planted)
    assert min(cosines) >= 0.8, cosines


def test_fit_deterministic_and_seed_sensitive():
    docs, _, _ = planted_lda_corpus(n_docs=80, doc_len=15, seed=5)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    base = LdaParams(k=4, iterations=80, burn_in=40, seed=9)
    a, _ = lda_fit(docs, vocab, base)
    b, _ = lda_fit(docs, vocab, base)
    assert a.phi.tobytes() == b.phi.tobytes()
    c, _ = lda_fit(docs, vocab, LdaParams(k=4, iterations=80, burn_in=40, seed=10))
    assert a.phi.tobytes() != c.phi.tobytes()


def test_all_oov_document_uniform():
    docs = [["term00", "term01"], ["zzz"], ["term02", "term03"]]
    vocab = build_vocabulary([docs[0], docs[2]], min_df=1, max_df_ratio=1.0)
    model, doc_topics = lda_fit(docs, vocab, LdaParams(k=2, iterations=30, burn_in=10, seed=1))
    assert doc_topics[1].all_oov
    assert np.allclose(doc_topics[1].theta, 0.5)
    assert not doc_topics[0].all_oov


def test_fit_validation():
    vocab = build_vocabulary([["a", "b"]], min_df=1, max_df_ratio=1.0)
    with pytest.raises(DataError):
        lda_fit([], vocab, LdaParams(k=2, iterations=20, burn_in=10))
    with pytest.raises(DataError):
        lda_fit([["zzz"]], vocab, LdaParams(k=2, iterations=20, burn_in=10))
    with pytest.raises(DataError):
        lda_fit([["a", "b"]], vocab, LdaParams(k=3, iterations=20, burn_in=10))


def test_ll_trace_recorded_and_improving():
    _, _, _, _, model, _ = _fit_planted(n_docs=150, iterations=200, burn_in=100)
    assert len(model.ll_trace) == 20  # every 10 sweeps
    assert all(math.isfinite(v) for v in model.ll_trace)
    assert model.ll_trace[-1] > model.ll_trace[0]


def test_checkpoint_schedule():
    docs, _, _ = planted_lda_corpus(n_docs=30, doc_len=10, seed=2)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    words, doc_ids, doc_len = [], [], np.zeros(len(docs), dtype=np.int64)
    for d, toks in enumerate(docs):
        for t in toks:
            words.append(vocab.index[t])
            doc_ids.append(d)
            doc_len[d] += 1
    args = (np.array(words, dtype=np.int32), np.array(doc_ids, dtype=np.int32), doc_len,
            4, len(vocab.terms), 12.5, 0.01)
    # final sweep always checkpoints, so one sample survives even when
    # (iterations - burn_in) < sample_every
    res = _gibbs.gibbs_run(*args, 505, 500, 10, np.uint64(1), False)
    assert res[6] == 1
    res = _gibbs.gibbs_run(*args, 520, 500, 10, np.uint64(1), False)
    assert res[6] == 2
    res = _gibbs.gibbs_run(*args, 100, 50, 10, np.uint64(1), False)
    assert res[6] == 5
    res = _gibbs.gibbs_run(*args, 515, 500, 10, np.uint64(1), False)
    assert res[6] == 2  # sweeps 510 and the forced final 515


def test_count_conservation_checked():
    # check_counts=True runs the invariant check after every sweep and
    # raises if any table drifts; a healthy run stays silent
    _fit_planted(n_docs=60, iterations=60, burn_in=30, check_counts=True)


# ----------------------------------------------------------------- topwords

def _toy_model(phi_rows, terms):
    phi = np.array(phi_rows, dtype=np.float64)
    return LdaModel(k=phi.shape[0], alpha=1.0, beta=0.01, phi=phi, terms=terms,
                    vocab_fingerprint="toy", seed=0, iterations=10)


def test_top_words_ordering_and_ties():
    model = _toy_model([[0.25, 0.25, 0.4, 0.1]], ["delta", "alpha", "omega", "zed"])
    words = top_words(model, 0, 3)
    assert words[0][0] == "omega"
    assert [w for w, _ in words[1:]] == ["alpha", "delta"]  # tie broken lexicographically
    with pytest.raises(ConfigError):
        top_words(model, 1)


# ---------------------------------------------------------------- coherence

def test_umass_hand_oracle():
    model = _toy_model([[0.6, 0.3, 0.1]], ["a", "b", "c"])
    ref = [["a", "b"], ["a"], ["b", "c"], ["a", "b", "c"]]
    scores, mean = umass_coherence(model, ref, top_n=3)
    # pairs: (b,a): ln(3/3)=0; (c,a): ln(2/3); (c,b): ln(3/3)=0
    assert scores == [pytest.approx(math.log(2 / 3))]
    assert mean == pytest.approx(math.log(2 / 3))


def test_umass_requires_observed_words():
    model = _toy_model([[0.6, 0.3, 0.1]], ["a", "b", "c"])
    with pytest.raises(DataError):
        umass_coherence(model, [["b", "c"]], top_n=3)  # "a" never occurs
    with pytest.raises(DataError):
        umass_coherence(model, [], top_n=2)


def test_npmi_hand_oracle():
    model = _toy_model([[0.5, 0.4, 0.1]], ["a", "b", "x"])
    ref = [["a", "b"], ["x", "b"], ["a", "x"], ["a", "b"]]
    scores, mean = npmi_coherence(model, ref, top_n=2, window=2)
    expected = math.log((1 / 2) / (3 / 4 * 3 / 4)) / (-math.log(1 / 2))
    assert scores == [pytest.approx(expected)]
    assert mean == pytest.approx(expected)


def test_npmi_exact_one_and_floor():
    model = _toy_model([[0.5, 0.4, 0.1]], ["a", "b", "x"])
    scores, _ = npmi_coherence(model, [["a", "b"]], top_n=2, window=2)
    assert scores == [1.0]
    scores, _ = npmi_coherence(model, [["a"], ["b"]], top_n=2, window=2)
    expected = math.log(1e-12 / (0.5 * 0.5)) / (-math.log(1e-12))
    assert scores == [pytest.approx(expected)]


def test_npmi_window_slides():
    model = _toy_model([[0.5, 0.5]], ["a", "b"])
    # length-3 doc with window 2 yields windows [a,b] and [b,a]: a and b
    # co-occur in both, scoring exactly 1
    scores, _ = npmi_coherence(model, [["a", "b", "a"]], top_n=2, window=2)
    assert scores == [1.0]


# -------------------------------------------------------------------- sweep

def test_coherence_sweep_structure():
    docs, _, _ = planted_lda_corpus(n_docs=200, doc_len=20, seed=7)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    base = LdaParams(iterations=120, burn_in=60, sample_every=10)
    result = coherence_sweep(docs, vocab, [2, 3, 4, 5], base, measure="umass",
                             master_seed=42, top_n=10)
    ks = [k for k, _ in result.curve]
    assert ks == [2, 3, 4, 5]
    assert result.failures == {}
    best = max(result.curve, key=lambda item: (item[1], -item[0]))
    assert result.selected_k == best[0]


def test_coherence_sweep_captures_failures():
    docs = [["term00", "term01", "term02"]]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    base = LdaParams(iterations=40, burn_in=20)
    result = coherence_sweep(docs, vocab, [2, 8], base, measure="umass", master_seed=1,
                             top_n=3)
    assert [k for k, _ in result.curve] == [2]
    assert 8 in result.failures  # more topics than tokens cannot fit


def test_sweep_seeds_derived_per_k():
    docs, _, _ = planted_lda_corpus(n_docs=100, doc_len=15, seed=8)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    params = LdaParams(k=3, iterations=60, burn_in=30,
                       seed=derive_seed(42, "lda-K=3"))
    model, _ = lda_fit(docs, vocab, params)
    base = LdaParams(iterations=60, burn_in=30)
    result = coherence_sweep(docs, vocab, [3], base, measure="umass", master_seed=42,
                             top_n=10)
    scores, mean = umass_coherence(model, docs, 10)
    assert result.curve[0][1] == pytest.approx(mean)


# ------------------------------------------------------------ distributions

def test_topic_distribution_counts_and_percent():
    dts = [DocTopics(theta=np.array([0.9, 0.1]), dominant=0),
           DocTopics(theta=np.array([0.2, 0.8]), dominant=1),
           DocTopics(theta=np.array([0.6, 0.4]), dominant=0),
           DocTopics(theta=np.array([0.5, 0.5]), dominant=0, all_oov=True)]
    percents, counts = topic_distribution(dts, 2)
    assert counts == [2, 1]  # the all_oov doc is excluded
    assert percents == [pytest.approx(66.7), pytest.approx(33.3)]
    with pytest.raises(DataError):
        topic_distribution([dts[3]], 2)


# -------------------------------------------------------------------- infer

def test_lda_infer_matches_block():
    _, planted, terms, _, model, _ = _fit_planted()
    # map each recovered topic to the planted block it matched
    doc = ["term00", "term01", "term02", "term03", "term04"] * 3
    dt = lda_infer(model, doc, iterations=100, seed=4)
    assert dt.theta.sum() == pytest.approx(1.0, abs=1e-9)
    block_topic = int(np.argmax(model.phi[:, 0:10].sum(axis=1)))
    assert dt.dominant == block_topic
    again = lda_infer(model, doc, iterations=100, seed=4)
    assert np.array_equal(dt.theta, again.theta)


def test_lda_infer_oov_uniform():
    _, _, _, _, model, _ = _fit_planted(n_docs=50, iterations=60, burn_in=30)
    dt = lda_infer(model, ["never-seen"], iterations=50, seed=0)
    assert dt.all_oov
    assert np.allclose(dt.theta, 0.25)
    with pytest.raises(ConfigError):
        lda_infer(model, ["term00"], iterations=1)


# -------------------------------------------------------------- persistence

def test_lda_model_round_trip(tmp_path):
    docs, _, _ = planted_lda_corpus(n_docs=60, doc_len=12, seed=9)
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
    model, doc_topics = lda_fit(docs, vocab, LdaParams(k=3, iterations=60, burn_in=30, seed=2))
    path = tmp_path / "lda.json"
    save_lda_model(model, path)
    loaded = load_lda_model(path, vocab)
    assert loaded.k == 3
    assert np.allclose(loaded.phi, model.phi)
    assert loaded.terms == model.terms

    other_vocab = build_vocabulary([["x", "y", "z"]], min_df=1, max_df_ratio=1.0)
    with pytest.raises(DataError):
        load_lda_model(path, other_vocab)


def test_doc_topics_round_trip(tmp_path):
    dts = [DocTopics(theta=np.array([0.75, 0.25]), dominant=0),
           DocTopics(theta=np.array([0.5, 0.5]), dominant=0, all_oov=True)]
    path = tmp_path / "dt.jsonl"
    save_doc_topics(dts, ["a", "b"], path)
    ids, loaded = load_doc_topics(path)
    assert ids == ["a", "b"]
    assert np.allclose(loaded[0].theta, [0.75, 0.25])
    assert loaded[1].all_oov and not loaded[0].all_oov

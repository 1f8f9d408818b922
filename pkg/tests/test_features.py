"""Vocabulary, TF-IDF vectors, embeddings, and PCA."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topicflow.errors import ConfigError, DataError, NumericError
from topicflow.features import (
    PcaModel, SparseVector, Vocabulary, build_vocabulary, load_embeddings,
    pca_fit, pca_transform, save_embeddings, tfidf_matrix, tfidf_vector,
)

DOCS = [
    ["virus", "case", "rise"],
    ["case", "case", "fall"],
    ["virus", "talli", "rise", "rise"],
    ["quiet", "day"],
]


# --------------------------------------------------------------- vocabulary

def test_vocabulary_lexicographic_and_df():
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=1.0)
    assert vocab.terms == sorted(vocab.terms)
    assert vocab.terms == ["case", "day", "fall", "quiet", "rise", "talli", "virus"]
    assert vocab.doc_freq[vocab.index["case"]] == 2  # document frequency, not raw count
    assert vocab.doc_freq[vocab.index["rise"]] == 2
    assert vocab.n_docs == 4


def test_vocabulary_df_filters_inclusive():
    vocab = build_vocabulary(DOCS, min_df=2, max_df_ratio=1.0)
    assert vocab.terms == ["case", "rise", "virus"]
    # max_df_ratio 0.5 keeps terms in exactly half the docs (inclusive cap)
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=0.5)
    assert "case" in vocab.terms and "rise" in vocab.terms


def test_vocabulary_validation():
    with pytest.raises(ConfigError):
        build_vocabulary(DOCS, min_df=0, max_df_ratio=1.0)
    with pytest.raises(ConfigError):
        build_vocabulary(DOCS, min_df=1, max_df_ratio=0.0)
    with pytest.raises(ConfigError):
        build_vocabulary(DOCS, min_df=1, max_df_ratio=1.5)
    with pytest.raises(DataError):
        build_vocabulary(DOCS, min_df=10, max_df_ratio=1.0)


def test_vocabulary_round_trip_and_fingerprint(tmp_path):
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=1.0)
    path = tmp_path / "vocab.json"
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded.terms == vocab.terms
    assert loaded.fingerprint() == vocab.fingerprint()
    other = build_vocabulary(DOCS, min_df=2, max_df_ratio=1.0)
    assert other.fingerprint() != vocab.fingerprint()


# ------------------------------------------------------------ sparse vector

def test_sparse_vector_dot_and_norm():
    a = SparseVector([0, 2, 5], [1.0, 2.0, 3.0], 6)
    b = SparseVector([2, 3, 5], [4.0, 9.0, 1.0], 6)
    assert a.dot(b) == pytest.approx(2 * 4 + 3 * 1)
    assert a.norm() == pytest.approx(math.sqrt(1 + 4 + 9))
    dense = b.to_dense()
    assert a.dot_dense(dense) == pytest.approx(a.dot(b))
    assert a.nnz == 3


def test_sparse_vector_validation():
    with pytest.raises(ValueError):
        SparseVector([2, 1], [1.0, 1.0], 5)  # not increasing
    with pytest.raises(ValueError):
        SparseVector([0, 5], [1.0, 1.0], 5)  # out of range
    with pytest.raises(ValueError):
        SparseVector([0], [0.0], 5)  # explicit zero


# ------------------------------------------------------------------- tf-idf

def _brute_force_tfidf(docs, vocab):
    n = vocab.n_docs
    out = []
    for doc in docs:
        row = np.zeros(len(vocab.terms))
        for pos, term in enumerate(vocab.terms):
            tf = sum(1 for t in doc if t == term)
            idf = math.log((1 + n) / (1 + vocab.doc_freq[pos])) + 1.0
            row[pos] = tf * idf
        norm = math.sqrt((row * row).sum())
        if norm > 0:
            row /= norm
        out.append(row)
    return out


def test_tfidf_matches_brute_force():
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=1.0)
    vectors = tfidf_matrix(DOCS, vocab)
    expected = _brute_force_tfidf(DOCS, vocab)
    for vec, exp in zip(vectors, expected):
        assert np.allclose(vec.to_dense(), exp, atol=1e-12)


def test_tfidf_random_corpora_match_brute_force():
    rng = np.random.default_rng(1234)
    terms = [f"w{i}" for i in range(12)]
    for trial in range(100):
        n_docs = int(rng.integers(2, 8))
        docs = [[terms[int(t)] for t in rng.integers(0, 12, size=rng.integers(1, 15))]
                for _ in range(n_docs)]
        vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0)
        vectors = tfidf_matrix(docs, vocab)
        expected = _brute_force_tfidf(docs, vocab)
        for vec, exp in zip(vectors, expected):
            assert np.allclose(vec.to_dense(), exp, atol=1e-12), trial


def test_tfidf_unit_norm_or_empty():
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=1.0)
    vec = tfidf_vector(["virus", "case"], vocab)
    assert vec.norm() == pytest.approx(1.0)
    empty = tfidf_vector(["unseen"], vocab)
    assert empty.nnz == 0
    assert empty.norm() == 0.0


def test_tfidf_oov_terms_ignored():
    vocab = build_vocabulary(DOCS, min_df=1, max_df_ratio=1.0)
    a = tfidf_vector(["virus", "case"], vocab)
    b = tfidf_vector(["virus", "case", "zzz"], vocab)
    assert np.allclose(a.to_dense(), b.to_dense())


# --------------------------------------------------------------- embeddings

def test_embeddings_round_trip(tmp_path):
    path = tmp_path / "emb.tsv"
    table = {"a": np.array([1.0, 2.0]), "b": np.array([-0.5, 3.25])}
    save_embeddings(table, 2, path)
    loaded, dim = load_embeddings(path)
    assert dim == 2
    assert set(loaded) == {"a", "b"}
    assert np.allclose(loaded["a"], [1.0, 2.0])


def test_embeddings_errors(tmp_path):
    path = tmp_path / "emb.tsv"
    path.write_text("dim=2\na\t1.0\n", encoding="utf-8")
    with pytest.raises(DataError, match=":2"):
        load_embeddings(path)
    path.write_text("dim=2\na\t1.0 2.0\na\t3.0 4.0\n", encoding="utf-8")
    with pytest.raises(DataError, match="duplicate"):
        load_embeddings(path)
    path.write_text("dim=2\na\t1.0 nan\n", encoding="utf-8")
    with pytest.raises(DataError, match="finite"):
        load_embeddings(path)
    path.write_text("a\t1.0 2.0\n", encoding="utf-8")
    with pytest.raises(DataError, match="dim"):
        load_embeddings(path)


# ---------------------------------------------------------------------- pca

def test_pca_matches_eigendecomposition():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(40, 6)) @ np.diag([5, 3, 2, 1, 0.5, 0.2])
    model = pca_fit(X, 4)
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / (X.shape[0] - 1)
    eigval, eigvec = np.linalg.eigh(cov)
    order = np.argsort(eigval)[::-1]
    assert np.allclose(model.explained_variance, eigval[order][:4], atol=1e-9)
    for i in range(4):
        ref = eigvec[:, order[i]]
        got = model.components[i]
        assert min(np.linalg.norm(got - ref), np.linalg.norm(got + ref)) < 1e-8


def test_pca_sign_convention():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(30, 5))
    model = pca_fit(X, 3)
    for row in model.components:
        assert row[np.argmax(np.abs(row))] > 0


def test_pca_transform_reconstructs_low_rank():
    rng = np.random.default_rng(9)
    basis = rng.normal(size=(2, 8))
    X = rng.normal(size=(25, 2)) @ basis
    model = pca_fit(X, 2)
    Z = pca_transform(model, X)
    recon = Z @ model.components + model.mean
    assert np.allclose(recon, X, atol=1e-8)


def test_pca_transform_single_vector():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(10, 4))
    model = pca_fit(X, 2)
    single = pca_transform(model, X[0])
    batch = pca_transform(model, X)
    assert single.shape == (2,)
    assert np.allclose(single, batch[0])


def test_pca_variance_decreasing_and_positive():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(50, 7))
    model = pca_fit(X, 6)
    ev = model.explained_variance
    assert np.all(ev[:-1] >= ev[1:] - 1e-12)
    assert np.all(ev >= 0)
    total = np.var(X, axis=0, ddof=1).sum()
    assert ev.sum() <= total + 1e-9


def test_pca_errors():
    rng = np.random.default_rng(12)
    X = rng.normal(size=(10, 4))
    with pytest.raises(ConfigError):
        pca_fit(X, 0)
    with pytest.raises(ConfigError):
        pca_fit(X, 5)  # exceeds the feature dimension
    with pytest.raises(DataError):
        pca_fit(X[0], 1)  # 1-d input
    with pytest.raises(DataError):
        pca_fit(X[:1], 1)  # fewer than 2 rows
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(NumericError):
        pca_fit(bad, 2)
    with pytest.raises(NumericError):
        pca_fit(np.ones((5, 3)), 1)  # zero variance
    with pytest.raises(DataError):
        pca_transform(pca_fit(X, 2), np.zeros(5))  # dimension mismatch


def test_pca_round_trip(tmp_path):
    rng = np.random.default_rng(13)
    X = rng.normal(size=(20, 5))
    model = pca_fit(X, 3)
    path = tmp_path / "pca.json"
    model.save(path)
    loaded = PcaModel.load(path)
    assert loaded.fingerprint() == model.fingerprint()
    assert np.allclose(pca_transform(loaded, X), pca_transform(model, X))


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=30, deadline=None)
def test_pca_projection_variance_bounded(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(15, 4)) * rng.uniform(0.5, 3.0, size=4)
    model = pca_fit(X, 2)
    Z = pca_transform(model, X)
    proj_var = Z.var(axis=0, ddof=1)
    assert np.allclose(proj_var, model.explained_variance[:2], rtol=1e-8, atol=1e-10)

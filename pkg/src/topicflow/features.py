"""Feature construction: TF-IDF vectors, embedding ingestion, PCA.

Two feature routes feed the classifiers: sparse TF-IDF over a filtered
vocabulary, and dense precomputed embeddings reduced with PCA. Both carry
sha256 fingerprints so models refuse mismatched feature spaces at predict
time.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, NumericError


@dataclass(eq=False)
class Vocabulary:
    """Immutable term index in lexicographic order with document frequencies."""

    terms: list[str]
    doc_freq: np.ndarray
    n_docs: int

    def __post_init__(self) -> None:
        self.doc_freq = np.asarray(self.doc_freq, dtype=np.int64)
        self.index = {term: i for i, term in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def fingerprint(self) -> str:
        payload = json.dumps(
            {"terms": self.terms, "doc_freq": self.doc_freq.tolist(), "n_docs": self.n_docs},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(
                {"terms": self.terms, "doc_freq": self.doc_freq.tolist(), "n_docs": self.n_docs},
                fh, sort_keys=True,
            )

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        path = Path(path)
        if not path.exists():
            raise DataError(f"vocabulary file not found: {path}")
        with path.open("r", encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            return cls(terms=list(obj["terms"]), doc_freq=obj["doc_freq"], n_docs=int(obj["n_docs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed vocabulary file: {exc}") from exc


def build_vocabulary(
    token_docs: list[list[str]],
    min_df: int = 1,
    max_df_ratio: float = 1.0,
) -> Vocabulary:
    """Build a lexicographically ordered vocabulary with df filtering.

    Terms survive when min_df <= doc_freq <= max_df_ratio * n_docs. Raises
    DataError when every term is filtered out.
    """
    if min_df < 1:
        raise ConfigError(f"min_df must be >= 1, got {min_df}")
    if not (0.0 < max_df_ratio <= 1.0):
        raise ConfigError(f"max_df_ratio must be in (0, 1], got {max_df_ratio}")
    n_docs = len(token_docs)
    if n_docs == 0:
        raise DataError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for tokens in token_docs:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    cap = max_df_ratio * n_docs
    terms = sorted(t for t, c in df.items() if c >= min_df and c <= cap)
    if not terms:
        raise DataError("vocabulary is empty after document-frequency filtering")
    freq = np.array([df[t] for t in terms], dtype=np.int64)
    return Vocabulary(terms=terms, doc_freq=freq, n_docs=n_docs)


class SparseVector(object):
    """Sorted-coordinate sparse vector (strictly increasing indices, no zeros)."""

    __slots__ = ("indices", "values", "dim")

    def __init__(self, indices, values, dim: int) -> None:
        self.indices = np.asarray(indices, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        self.dim = int(dim)
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must have equal length")
        if self.indices.size:
            if self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("index out of range")
            if np.any(np.diff(self.indices) <= 0):
                raise ValueError("indices must be strictly increasing")
            if np.any(self.values == 0.0):
                raise ValueError("explicit zeros are not allowed")

    def __len__(self) -> int:
        return self.dim

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def dot(self, other: "SparseVector") -> float:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        i = j = 0
        total = 0.0
        a_idx, a_val = self.indices, self.values
        b_idx, b_val = other.indices, other.values
        while i < a_idx.size and j < b_idx.size:
            ai, bj = a_idx[i], b_idx[j]
            if ai == bj:
                total += a_val[i] * b_val[j]
                i += 1
                j += 1
            elif ai < bj:
                i += 1
            else:
                j += 1
        return total

    def dot_dense(self, w: np.ndarray) -> float:
        return float(np.dot(w[self.indices], self.values)) if self.indices.size else 0.0

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        if self.indices.size:
            out[self.indices] = self.values
        return out


def tfidf_vector(tokens: list[str], vocab: Vocabulary) -> SparseVector:
    """TF-IDF for one document: raw counts times smoothed log idf, L2-normalized.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1. Out-of-vocabulary tokens are
    ignored; a document with no in-vocabulary tokens yields the zero vector.
    """
    counts: dict[int, int] = {}
    index = vocab.index
    for tok in tokens:
        idx = index.get(tok)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return SparseVector(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), len(vocab))
    indices = np.array(sorted(counts), dtype=np.int64)
    n = vocab.n_docs
    values = np.array(
        [counts[i] * (math.log((1.0 + n) / (1.0 + vocab.doc_freq[i])) + 1.0) for i in indices],
        dtype=np.float64,
    )
    norm = math.sqrt(float(np.dot(values, values)))
    if norm > 0.0:
        values = values / norm
    return SparseVector(indices, values, len(vocab))


def tfidf_matrix(token_docs: list[list[str]], vocab: Vocabulary) -> list[SparseVector]:
    return [tfidf_vector(tokens, vocab) for tokens in token_docs]


def load_embeddings(path: str | Path) -> tuple[dict[str, np.ndarray], int]:
    """Load id -> vector rows from a 'dim=<d>' headed whitespace table."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise DataError(f"{path}:1: expected 'dim=<d>' header, got {header!r}")
        try:
            dim = int(header[4:])
        except ValueError as exc:
            raise DataError(f"{path}:1: invalid dimension in header {header!r}") from exc
        if dim < 1:
            raise DataError(f"{path}:1: dimension must be positive, got {dim}")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            where = f"{path}:{lineno}"
            if not line.strip():
                continue
            doc_id, sep, rest = line.rstrip("\n").partition("\t")
            if not sep:
                raise DataError(f"{where}: expected '<id>\\t<w1> ... <wd>'")
            if not doc_id:
                raise DataError(f"{where}: missing or empty id")
            if doc_id in vectors:
                raise DataError(f"{where}: duplicate id {doc_id!r}")
            parts = rest.split()
            if len(parts) != dim:
                raise DataError(f"{where}: expected {dim} values, got {len(parts)}")
            try:
                vec = np.array([float(p) for p in parts], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{where}: non-numeric value: {exc}") from exc
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{where}: non-finite embedding value")
            vectors[doc_id] = vec
    return vectors, dim


def save_embeddings(vectors: dict[str, np.ndarray], dim: int, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"dim={dim}\n")
        for doc_id, vec in vectors.items():
            fh.write(doc_id + "\t" + " ".join(repr(float(x)) for x in vec) + "\n")


@dataclass(eq=False)
class PcaModel:
    """Principal components of the training data, row per component."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.mean, dtype=np.float64).tobytes())
        digest.update(np.ascontiguousarray(self.components, dtype=np.float64).tobytes())
        digest.update(np.ascontiguousarray(self.explained_variance, dtype=np.float64).tobytes())
        return digest.hexdigest()

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(
                {
                    "mean": self.mean.tolist(),
                    "components": self.components.tolist(),
                    "explained_variance": self.explained_variance.tolist(),
                },
                fh, sort_keys=True,
            )

    @classmethod
    def load(cls, path: str | Path) -> "PcaModel":
        path = Path(path)
        if not path.exists():
            raise DataError(f"PCA model file not found: {path}")
        with path.open("r", encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            return cls(
                mean=np.asarray(obj["mean"], dtype=np.float64),
                components=np.asarray(obj["components"], dtype=np.float64),
                explained_variance=np.asarray(obj["explained_variance"], dtype=np.float64),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed PCA model file: {exc}") from exc


def pca_fit(matrix: np.ndarray, k: int) -> PcaModel:
    """Fit k principal components via SVD of the centered matrix.

    Component signs follow a fixed convention: the entry of largest
    magnitude in each component is positive. Requires 1 <= k <= min(d, n-1)
    and at least two rows; all-identical rows raise NumericError.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise DataError("pca_fit expects a 2-d matrix")
    n, d = x.shape
    if n < 2:
        raise DataError(f"pca_fit needs at least 2 rows, got {n}")
    if not np.all(np.isfinite(x)):
        raise NumericError("pca_fit input contains non-finite values")
    if not (1 <= k <= min(d, n - 1)):
        raise ConfigError(f"k must be in [1, min(d, n-1)] = [1, {min(d, n - 1)}], got {k}")
    mean = x.mean(axis=0)
    centered = x - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if not np.any(singular > 1e-12):
        raise NumericError("pca_fit input has zero variance (all rows identical)")
    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = (singular[:k] ** 2) / (n - 1)
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def pca_transform(model: PcaModel, matrix: np.ndarray) -> np.ndarray:
    """Project rows onto the fitted components."""
    x = np.asarray(matrix, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.mean.shape[0]:
        raise DataError(
            f"dimension mismatch: vectors have {x.shape[1]} features, model expects {model.mean.shape[0]}"
        )
    out = (x - model.mean) @ model.components.T
    return out[0] if single else out

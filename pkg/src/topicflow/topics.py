"""Topic discovery: LDA via collapsed Gibbs sampling plus coherence scoring.

The sampler draws z for every token from the collapsed conditional
p(z=k) ~ (n_dk + alpha) * (n_wk + beta) / (n_k + V*beta), then averages
phi and theta over post-burn-in checkpoints. Coherence (UMass primary,
NPMI alternative) scores fitted models and drives the K sweep.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _gibbs
from .errors import ConfigError, DataError, NumericError
from .features import Vocabulary
from .rng import derive_seed

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class LdaParams:
    """Sampler settings; alpha defaults to 50/k when left as None."""

    k: int = 8
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_every: int = 10
    seed: int = 0
    check_counts: bool = False

    def resolved_alpha(self) -> float:
        return 50.0 / self.k if self.alpha is None else self.alpha

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.resolved_alpha() <= 0.0:
            raise ConfigError(f"alpha must be > 0, got {self.resolved_alpha()}")
        if self.beta <= 0.0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")
        if self.iterations <= self.burn_in:
            raise ConfigError(
                f"iterations ({self.iterations}) must exceed burn_in ({self.burn_in})"
            )
        if self.burn_in < 0:
            raise ConfigError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.sample_every < 1:
            raise ConfigError(f"sample_every must be >= 1, got {self.sample_every}")


@dataclass(eq=False)
class LdaModel:
    k: int
    alpha: float
    beta: float
    phi: np.ndarray
    terms: list[str]
    vocab_fingerprint: str
    seed: int
    iterations: int
    burn_in: int = 0
    sample_every: int = 1
    ll_trace: list = field(default_factory=list)
    topic_counts: np.ndarray | None = None


@dataclass
class DocTopics:
    theta: np.ndarray
    dominant: int
    assignments: np.ndarray | None = None
    all_oov: bool = False


def _encode_docs(token_docs: list[list[str]], vocab: Vocabulary):
    doc_ids = []
    word_ids = []
    doc_len = np.zeros(len(token_docs), dtype=np.int64)
    index = vocab.index
    for d, tokens in enumerate(token_docs):
        for tok in tokens:
            idx = index.get(tok)
            if idx is not None:
                doc_ids.append(d)
                word_ids.append(idx)
                doc_len[d] += 1
    words = np.array(word_ids, dtype=np.int32)
    docs = np.array(doc_ids, dtype=np.int32)
    return words, docs, doc_len


def lda_fit(
    token_docs: list[list[str]],
    vocab: Vocabulary,
    params: LdaParams,
) -> tuple[LdaModel, list[DocTopics]]:
    """Fit LDA on the in-vocabulary tokens of each document.

    Documents whose tokens are all out of vocabulary stay in the output
    with a uniform theta and all_oov=True. Raises DataError when no
    in-vocabulary tokens remain at all or when k exceeds the token count.
    """
    params.validate()
    if not token_docs:
        raise DataError("cannot fit topics on an empty corpus")
    words, docs, doc_len = _encode_docs(token_docs, vocab)
    n_tokens = int(words.shape[0])
    if n_tokens == 0:
        raise DataError("no in-vocabulary tokens remain; corpus is effectively empty")
    if params.k > n_tokens:
        raise DataError(f"k={params.k} exceeds the corpus token count {n_tokens}")
    alpha = params.resolved_alpha()
    result = _gibbs.gibbs_run(
        words, docs, doc_len, params.k, len(vocab),
        float(alpha), float(params.beta),
        params.iterations, params.burn_in, params.sample_every,
        np.uint64(params.seed & _U64),
        params.check_counts,
    )
    z, n_wk, n_dk, n_k, phi_acc, theta_acc, n_checkpoints, ll_trace, fail_sweep = result
    if params.check_counts and fail_sweep != 0:
        raise NumericError(f"count tables lost conservation at sweep {fail_sweep}")
    if n_checkpoints < 1:
        raise NumericError("no posterior checkpoints were collected")
    phi = phi_acc / n_checkpoints
    theta = theta_acc / n_checkpoints
    model = LdaModel(
        k=params.k,
        alpha=alpha,
        beta=params.beta,
        phi=phi,
        terms=list(vocab.terms),
        vocab_fingerprint=vocab.fingerprint(),
        seed=params.seed,
        iterations=params.iterations,
        burn_in=params.burn_in,
        sample_every=params.sample_every,
        ll_trace=[float(v) for v in ll_trace],
        topic_counts=np.asarray(n_k, dtype=np.int64),
    )
    doc_topics: list[DocTopics] = []
    starts = np.zeros(len(token_docs) + 1, dtype=np.int64)
    np.cumsum(doc_len, out=starts[1:])
    for d in range(len(token_docs)):
        row = theta[d]
        empty = doc_len[d] == 0
        doc_topics.append(DocTopics(
            theta=row.copy(),
            dominant=int(np.argmax(row)),
            assignments=np.asarray(z[starts[d]:starts[d + 1]], dtype=np.int32),
            all_oov=bool(empty),
        ))
    return model, doc_topics


def lda_infer(
    model: LdaModel,
    tokens: list[str],
    iterations: int = 100,
    seed: int = 0,
) -> DocTopics:
    """Estimate theta for an unseen document with phi held fixed.

    theta is averaged over the last half of the sweeps. A document with no
    in-vocabulary tokens gets a uniform theta and all_oov=True.
    """
    if iterations < 2:
        raise ConfigError(f"iterations must be >= 2, got {iterations}")
    index = {term: i for i, term in enumerate(model.terms)}
    ids = [index[tok] for tok in tokens if tok in index]
    if not ids:
        theta = np.full(model.k, 1.0 / model.k)
        return DocTopics(theta=theta, dominant=0, assignments=None, all_oov=True)
    theta = _gibbs.infer_doc(
        np.array(ids, dtype=np.int32),
        np.ascontiguousarray(model.phi, dtype=np.float64),
        float(model.alpha),
        iterations,
        np.uint64(seed & _U64),
    )
    return DocTopics(theta=theta, dominant=int(np.argmax(theta)), assignments=None)


def top_words(model: LdaModel, topic: int, n: int = 10) -> list[tuple[str, float]]:
    """Top-n (term, probability) pairs; probability ties break lexicographically."""
    if not (0 <= topic < model.k):
        raise ConfigError(f"topic must be in [0, {model.k - 1}], got {topic}")
    row = model.phi[topic]
    ranked = sorted(zip(model.terms, row), key=lambda item: (-item[1], item[0]))
    return [(term, float(p)) for term, p in ranked[:n]]


def _doc_sets(token_docs: list[list[str]], tracked: set[str]) -> dict[str, set[int]]:
    occur: dict[str, set[int]] = {w: set() for w in tracked}
    for d, tokens in enumerate(token_docs):
        for tok in set(tokens):
            if tok in tracked:
                occur[tok].add(d)
    return occur


def umass_coherence(
    model: LdaModel,
    token_docs: list[list[str]],
    top_n: int = 10,
) -> tuple[list[float], float]:
    """UMass coherence per topic and its mean.

    For top words w_1..w_n (descending phi):
    score = sum_{i=2..n} sum_{j<i} ln((D(w_i, w_j) + 1) / D(w_j)) using
    document co-occurrence counts over the reference corpus.
    """
    if not token_docs:
        raise DataError("coherence needs a non-empty reference corpus")
    tops = [[w for w, _ in top_words(model, k, top_n)] for k in range(model.k)]
    tracked = {w for words in tops for w in words}
    occur = _doc_sets(token_docs, tracked)
    scores: list[float] = []
    for words in tops:
        total = 0.0
        for i in range(1, len(words)):
            for j in range(i):
                d_j = len(occur[words[j]])
                if d_j == 0:
                    raise DataError(
                        f"top word {words[j]!r} never occurs in the reference corpus"
                    )
                d_ij = len(occur[words[i]] & occur[words[j]])
                total += math.log((d_ij + 1.0) / d_j)
        scores.append(total)
    return scores, sum(scores) / len(scores)


def npmi_coherence(
    model: LdaModel,
    token_docs: list[list[str]],
    top_n: int = 10,
    window: int = 10,
) -> tuple[list[float], float]:
    """NPMI coherence from boolean sliding windows of the given size.

    A document of length L contributes max(1, L - window + 1) windows.
    Pairs never co-occurring score with P_ij = 1e-12; pairs co-occurring
    in every window score exactly 1.
    """
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    if not token_docs:
        raise DataError("coherence needs a non-empty reference corpus")
    tops = [[w for w, _ in top_words(model, k, top_n)] for k in range(model.k)]
    tracked = {w for words in tops for w in words}
    word_counts: dict[str, int] = {w: 0 for w in tracked}
    pair_counts: dict[tuple[str, str], int] = {}
    n_windows = 0
    for tokens in token_docs:
        length = len(tokens)
        span = max(1, length - window + 1)
        for start in range(span):
            n_windows += 1
            present = sorted({t for t in tokens[start:start + window] if t in tracked})
            for a in present:
                word_counts[a] += 1
            for ai in range(len(present)):
                for bi in range(ai + 1, len(present)):
                    key = (present[ai], present[bi])
                    pair_counts[key] = pair_counts.get(key, 0) + 1
    eps = 1e-12
    scores: list[float] = []
    for words in tops:
        vals: list[float] = []
        for i in range(1, len(words)):
            for j in range(i):
                a, b = sorted((words[i], words[j]))
                p_a = word_counts[a] / n_windows
                p_b = word_counts[b] / n_windows
                if p_a == 0.0 or p_b == 0.0:
                    raise DataError(
                        f"top word {a if p_a == 0.0 else b!r} never occurs in any window"
                    )
                p_ab = pair_counts.get((a, b), 0) / n_windows
                if p_ab >= 1.0:
                    vals.append(1.0)
                    continue
                if p_ab == 0.0:
                    p_ab = eps
                vals.append(math.log(p_ab / (p_a * p_b)) / (-math.log(p_ab)))
        scores.append(sum(vals) / len(vals) if vals else 0.0)
    return scores, sum(scores) / len(scores)


@dataclass
class SweepResult:
    curve: list
    selected_k: int
    failures: dict = field(default_factory=dict)


def coherence_sweep(
    token_docs: list[list[str]],
    vocab: Vocabulary,
    k_values: list[int],
    base_params: LdaParams = LdaParams(),
    measure: str = "umass",
    master_seed: int = 0,
    top_n: int = 10,
    window: int = 10,
) -> SweepResult:
    """Fit LDA for each K, score coherence, and pick the argmax.

    Each K gets its own derived seed. A K whose fit fails is recorded in
    failures and skipped; score ties select the smallest K.
    """
    if not k_values:
        raise ConfigError("k_values must be non-empty")
    if measure not in ("umass", "npmi"):
        raise ConfigError(f"unknown coherence measure {measure!r}")
    curve: list[tuple[int, float]] = []
    failures: dict[int, str] = {}
    for k in sorted(set(k_values)):
        params = replace(base_params, k=k, seed=derive_seed(master_seed, f"lda-K={k}"))
        try:
            model, _ = lda_fit(token_docs, vocab, params)
            if measure == "umass":
                _, mean_score = umass_coherence(model, token_docs, top_n)
            else:
                _, mean_score = npmi_coherence(model, token_docs, top_n, window)
        except Exception as exc:  # noqa: BLE001 - per-K failures must not kill the sweep
            failures[k] = str(exc)
            continue
        curve.append((k, float(mean_score)))
    if not curve:
        raise DataError("coherence sweep failed for every K")
    selected = min(curve, key=lambda item: (-item[1], item[0]))[0]
    return SweepResult(curve=curve, selected_k=selected, failures=failures)


def topic_distribution(doc_topics: list[DocTopics], k: int) -> tuple[list[float], list[int]]:
    """Share of documents per dominant topic (percent, 1 decimal) plus raw counts.

    Documents flagged all_oov are excluded from the tally.
    """
    counts = [0] * k
    total = 0
    for dt in doc_topics:
        if dt.all_oov:
            continue
        counts[dt.dominant] += 1
        total += 1
    if total == 0:
        raise DataError("no documents with topic assignments")
    percents = [round(100.0 * c / total, 1) for c in counts]
    return percents, counts


def save_lda_model(model: LdaModel, path: str | Path) -> None:
    payload = {
        "k": model.k,
        "alpha": model.alpha,
        "beta": model.beta,
        "vocab_fingerprint": model.vocab_fingerprint,
        "phi": [[float(v) for v in row] for row in model.phi],
        "seed": model.seed,
        "iterations": model.iterations,
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_lda_model(path: str | Path, vocab: Vocabulary) -> LdaModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"topic model file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        fingerprint = obj["vocab_fingerprint"]
        if fingerprint != vocab.fingerprint():
            raise DataError(f"{path}: vocabulary fingerprint mismatch")
        phi = np.asarray(obj["phi"], dtype=np.float64)
        k = int(obj["k"])
        if phi.shape != (k, len(vocab)):
            raise DataError(f"{path}: phi shape {phi.shape} does not match k={k}, V={len(vocab)}")
        return LdaModel(
            k=k,
            alpha=float(obj["alpha"]),
            beta=float(obj["beta"]),
            phi=phi,
            terms=list(vocab.terms),
            vocab_fingerprint=fingerprint,
            seed=int(obj["seed"]),
            iterations=int(obj["iterations"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed topic model file: {exc}") from exc


def save_doc_topics(doc_topics: list[DocTopics], ids: list[str], path: str | Path) -> None:
    if len(doc_topics) != len(ids):
        raise DataError("ids and doc_topics must align")
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id, dt in zip(ids, doc_topics):
            record = {
                "id": doc_id,
                "theta": [float(v) for v in dt.theta],
                "dominant": dt.dominant,
                "all_oov": dt.all_oov,
            }
            fh.write(json.dumps(record) + "\n")


def load_doc_topics(path: str | Path) -> tuple[list[str], list[DocTopics]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"document-topics file not found: {path}")
    ids: list[str] = []
    out: list[DocTopics] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                theta = np.asarray(obj["theta"], dtype=np.float64)
                ids.append(obj["id"])
                out.append(DocTopics(
                    theta=theta,
                    dominant=int(obj["dominant"]),
                    assignments=None,
                    all_oov=bool(obj.get("all_oov", False)),
                ))
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed record: {exc}") from exc
    return ids, out

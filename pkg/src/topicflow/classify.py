"""Relevance classifiers: deterministic SGD training, splits, CV, metrics.

Two linear models share the pipeline: logistic regression trained by
plain SGD with schedule eta_t = eta0 / (1 + t/T), and a linear SVM trained
with the Pegasos schedule eta_t = 1 / (lambda * t). Label 1 means relevant
and is the positive class everywhere; a raw score of exactly 0 predicts
relevant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .balance import smote
from .errors import ConfigError, DataError, NumericError
from .features import SparseVector
from .rng import Xoshiro256, derive_seed

KIND_LOGREG = "logreg"
KIND_SVM = "svm"

FEATURE_TFIDF = "tfidf"
FEATURE_EMBEDDING = "embedding_pca"
FEATURE_RAW = "raw"

ORIGIN_REAL = "real"
ORIGIN_SYNTHETIC = "synthetic"


@dataclass
class LabeledPoint:
    features: object
    label: int
    origin: str = ORIGIN_REAL


@dataclass(frozen=True)
class SplitSpec:
    """Fractions for the train/test/validation split (must sum to 1)."""

    train_frac: float = 0.75
    test_frac: float = 0.15
    val_frac: float = 0.10
    stratified: bool = True
    seed: int = 0

    def validate(self) -> None:
        for name, frac in (("train_frac", self.train_frac),
                           ("test_frac", self.test_frac),
                           ("val_frac", self.val_frac)):
            if frac < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {frac}")
        total = self.train_frac + self.test_frac + self.val_frac
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must sum to 1, got {total}")


@dataclass(frozen=True)
class LogRegParams:
    epochs: int = 100
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 0


@dataclass(frozen=True)
class SvmParams:
    epochs: int = 50
    lam: float = 1e-4
    seed: int = 0


@dataclass(eq=False)
class LinearModel:
    kind: str
    feature_kind: str
    weights: np.ndarray
    bias: float
    training_meta: dict = field(default_factory=dict)
    fingerprints: dict = field(default_factory=dict)


@dataclass
class Prediction:
    label: int
    score: float
    probability: float | None = None


def _apportion(available: list[int], quotas: list[float], total: int) -> list[int]:
    """Largest-remainder allocation of `total` across classes, capped by availability."""
    base = [min(int(math.floor(q)), a) for q, a in zip(quotas, available)]
    give = total - sum(base)
    order = sorted(range(len(quotas)),
                   key=lambda c: (-(quotas[c] - math.floor(quotas[c])), c))
    while give > 0:
        progressed = False
        for c in order:
            if give == 0:
                break
            if base[c] < available[c]:
                base[c] += 1
                give -= 1
                progressed = True
        if not progressed:
            raise DataError("split allocation exceeds available points")
    return base


def split_indices(labels: list, spec: SplitSpec) -> tuple[list[int], list[int], list[int]]:
    """Deterministic train/test/val index split.

    Test and validation sizes are floor(frac * n); rounding remainders go
    to train. Under stratification each split's class counts follow a
    largest-remainder apportionment of floor(frac * n) per class, keeping
    every class proportion within one point of the global fraction.
    """
    spec.validate()
    n = len(labels)
    if n == 0:
        raise DataError("cannot split an empty dataset")
    n_test = int(math.floor(spec.test_frac * n))
    n_val = int(math.floor(spec.val_frac * n))
    rng = Xoshiro256(spec.seed)

    if not spec.stratified:
        idx = list(range(n))
        rng.shuffle(idx)
        n_train = n - n_test - n_val
        train = sorted(idx[:n_train])
        test = sorted(idx[n_train:n_train + n_test])
        val = sorted(idx[n_train + n_test:])
        return train, test, val

    if any(lab is None for lab in labels):
        raise DataError("stratified split requires a label on every point")
    classes = sorted(set(labels))
    by_class = {c: [i for i, lab in enumerate(labels) if lab == c] for c in classes}
    for c in classes:
        rng.shuffle(by_class[c])
    counts = [len(by_class[c]) for c in classes]
    test_alloc = _apportion(counts, [spec.test_frac * m for m in counts], n_test)
    left = [m - t for m, t in zip(counts, test_alloc)]
    val_alloc = _apportion(left, [spec.val_frac * m for m in counts], n_val)
    train, test, val = [], [], []
    for ci, c in enumerate(classes):
        pool = by_class[c]
        t, v = test_alloc[ci], val_alloc[ci]
        test.extend(pool[:t])
        val.extend(pool[t:t + v])
        train.extend(pool[t + v:])
    return sorted(train), sorted(test), sorted(val)


def split(dataset: list[LabeledPoint], spec: SplitSpec):
    """Split labeled points; returns (train, test, val) lists."""
    idx_train, idx_test, idx_val = split_indices([p.label for p in dataset], spec)
    return ([dataset[i] for i in idx_train],
            [dataset[i] for i in idx_test],
            [dataset[i] for i in idx_val])


def _sigmoid(s: float) -> float:
    if s >= 0.0:
        return 1.0 / (1.0 + math.exp(-s))
    z = math.exp(s)
    return z / (1.0 + z)


def _softplus(s: float) -> float:
    return max(s, 0.0) + math.log1p(math.exp(-abs(s)))


def _feature_dim(x) -> int:
    return x.dim if isinstance(x, SparseVector) else int(np.asarray(x).shape[0])


def _check_point(x) -> None:
    if isinstance(x, SparseVector):
        if not np.all(np.isfinite(x.values)):
            raise NumericError("feature vector contains non-finite values")
    else:
        if not np.all(np.isfinite(np.asarray(x, dtype=np.float64))):
            raise NumericError("feature vector contains non-finite values")


def _dot(w: np.ndarray, x) -> float:
    if isinstance(x, SparseVector):
        return x.dot_dense(w)
    return float(np.dot(w, x))


def _add_scaled(w: np.ndarray, alpha: float, x) -> None:
    if isinstance(x, SparseVector):
        if x.indices.size:
            w[x.indices] += alpha * x.values
    else:
        w += alpha * x


def _prepare(train: list[LabeledPoint]) -> int:
    if not train:
        raise DataError("training set is empty")
    dim = _feature_dim(train[0].features)
    for p in train:
        if _feature_dim(p.features) != dim:
            raise DataError("training points have mixed feature dimensions")
        if p.label not in (0, 1):
            raise DataError(f"labels must be 0 or 1, got {p.label!r}")
        _check_point(p.features)
    return dim


def train_logreg(
    train: list[LabeledPoint],
    params: LogRegParams = LogRegParams(),
    feature_kind: str = FEATURE_RAW,
    fingerprints: dict | None = None,
) -> LinearModel:
    """SGD logistic regression with a decaying schedule.

    eta_t = learning_rate / (1 + t/T) where t counts samples processed and
    T is the training-set size; the l2 penalty never touches the bias. The
    visit order reshuffles every epoch from a seeded stream.
    """
    dim = _prepare(train)
    if params.epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {params.epochs}")
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    rng = Xoshiro256(params.seed)
    order = list(range(len(train)))
    t_samples = float(len(train))
    step = 0
    for _ in range(params.epochs):
        rng.shuffle(order)
        for i in order:
            point = train[i]
            eta = params.learning_rate / (1.0 + step / t_samples)
            g = _sigmoid(_dot(w, point.features) + b) - point.label
            if params.l2 > 0.0:
                w *= 1.0 - eta * params.l2
            _add_scaled(w, -eta * g, point.features)
            b -= eta * g
            step += 1
    if not (np.all(np.isfinite(w)) and math.isfinite(b)):
        raise NumericError("training diverged to non-finite weights")
    meta = {
        "epochs": params.epochs,
        "learning_rate": params.learning_rate,
        "l2": params.l2,
        "seed": params.seed,
        "schedule": "eta0/(1+t/T)",
        "n_train": len(train),
    }
    return LinearModel(KIND_LOGREG, feature_kind, w, b, meta, dict(fingerprints or {}))


def train_svm(
    train: list[LabeledPoint],
    params: SvmParams = SvmParams(),
    feature_kind: str = FEATURE_RAW,
    fingerprints: dict | None = None,
) -> LinearModel:
    """Pegasos linear SVM: eta_t = 1/(lambda*t), hinge subgradient steps.

    The weight vector shrinks by (1 - eta*lambda) every step; margin
    violations additionally add eta*y*x and move the unregularized bias.
    """
    dim = _prepare(train)
    if params.epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {params.epochs}")
    if params.lam <= 0.0:
        raise ConfigError(f"lambda must be > 0, got {params.lam}")
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    rng = Xoshiro256(params.seed)
    order = list(range(len(train)))
    t = 1
    for _ in range(params.epochs):
        rng.shuffle(order)
        for i in order:
            point = train[i]
            eta = 1.0 / (params.lam * t)
            y = 2.0 * point.label - 1.0
            margin = y * (_dot(w, point.features) + b)
            w *= 1.0 - eta * params.lam
            if margin < 1.0:
                _add_scaled(w, eta * y, point.features)
                b += eta * y
            t += 1
    if not (np.all(np.isfinite(w)) and math.isfinite(b)):
        raise NumericError("training diverged to non-finite weights")
    meta = {
        "epochs": params.epochs,
        "lambda": params.lam,
        "seed": params.seed,
        "schedule": "1/(lambda*t)",
        "n_train": len(train),
    }
    return LinearModel(KIND_SVM, feature_kind, w, b, meta, dict(fingerprints or {}))


def logreg_loss_and_grad(w: np.ndarray, b: float, features: list, labels, l2: float):
    """Full-batch regularized log-loss and its analytic gradient.

    loss = mean_i softplus(s_i) - y_i * s_i + (l2/2)*||w||^2, bias excluded
    from the penalty. Returns (loss, grad_w, grad_b).
    """
    n = len(features)
    if n == 0:
        raise DataError("loss needs at least one point")
    labels = np.asarray(labels, dtype=np.float64)
    grad_w = np.zeros_like(w)
    grad_b = 0.0
    loss = 0.0
    for x, y in zip(features, labels):
        s = _dot(w, x) + b
        loss += _softplus(s) - y * s
        g = _sigmoid(s) - y
        _add_scaled(grad_w, g, x)
        grad_b += g
    loss = loss / n + 0.5 * l2 * float(np.dot(w, w))
    grad_w = grad_w / n + l2 * w
    grad_b /= n
    return loss, grad_w, grad_b


def predict(model: LinearModel, x) -> Prediction:
    _check_point(x)
    if _feature_dim(x) != model.weights.shape[0]:
        raise DataError(
            f"feature dimension {_feature_dim(x)} does not match model ({model.weights.shape[0]})"
        )
    score = _dot(model.weights, x) + model.bias
    label = 1 if score >= 0.0 else 0
    prob = _sigmoid(score) if model.kind == KIND_LOGREG else None
    return Prediction(label=label, score=score, probability=prob)


@dataclass
class Metrics:
    """Binary metrics with relevant (label 1) as the positive class.

    confusion is [[tp, fn], [fp, tn]]: rows are true relevant/irrelevant,
    columns predicted relevant/irrelevant. precision/recall are weighted by
    class support; f1 is the harmonic mean of those two numbers. Zero
    denominators yield 0 and are listed in zero_division.
    """

    confusion: list = None
    accuracy: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    per_class: dict = field(default_factory=dict)
    zero_division: list = field(default_factory=list)


def compute_metrics(y_true, y_pred) -> Metrics:
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred) or not y_true:
        raise DataError("metrics need equal-length, non-empty label lists")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 0)
    n = tp + fn + fp + tn
    flags: list[str] = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            flags.append(name)
            return 0.0
        return num / den

    def harmonic(p: float, r: float, name: str) -> float:
        if p + r == 0.0:
            flags.append(name)
            return 0.0
        return 2.0 * p * r / (p + r)

    prec_rel = ratio(tp, tp + fp, "precision:relevant")
    rec_rel = ratio(tp, tp + fn, "recall:relevant")
    prec_irr = ratio(tn, tn + fn, "precision:irrelevant")
    rec_irr = ratio(tn, tn + fp, "recall:irrelevant")
    support_rel = tp + fn
    support_irr = fp + tn
    precision = (support_rel * prec_rel + support_irr * prec_irr) / n
    recall = (support_rel * rec_rel + support_irr * rec_irr) / n
    return Metrics(
        confusion=[[tp, fn], [fp, tn]],
        accuracy=(tp + tn) / n,
        precision=precision,
        recall=recall,
        f1=harmonic(precision, recall, "f1"),
        per_class={
            "relevant": {
                "precision": prec_rel,
                "recall": rec_rel,
                "f1": harmonic(prec_rel, rec_rel, "f1:relevant"),
                "support": support_rel,
            },
            "irrelevant": {
                "precision": prec_irr,
                "recall": rec_irr,
                "f1": harmonic(prec_irr, rec_irr, "f1:irrelevant"),
                "support": support_irr,
            },
        },
        zero_division=flags,
    )


def evaluate(model: LinearModel, dataset: list[LabeledPoint]) -> Metrics:
    if not dataset:
        raise DataError("cannot evaluate on an empty dataset")
    preds = [predict(model, p.features).label for p in dataset]
    return compute_metrics([p.label for p in dataset], preds)


@dataclass
class CvResult:
    fold_metrics: list
    mean: dict
    std: dict


def _train_by_kind(kind: str, train: list[LabeledPoint], params, feature_kind: str) -> LinearModel:
    if kind == KIND_LOGREG:
        return train_logreg(train, params or LogRegParams(), feature_kind)
    if kind == KIND_SVM:
        return train_svm(train, params or SvmParams(), feature_kind)
    raise ConfigError(f"unknown model kind {kind!r}")


def balance_training_set(points: list[LabeledPoint], k: int, seed: int) -> list[LabeledPoint]:
    """Append SMOTE synthetics so both classes match the majority count."""
    pos = [p for p in points if p.label == 1]
    neg = [p for p in points if p.label == 0]
    if not pos or not neg or len(pos) == len(neg):
        return list(points)
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    feats = minority[0].features
    if isinstance(feats, SparseVector):
        min_feats = [p.features for p in minority]
    else:
        min_feats = np.array([np.asarray(p.features, dtype=np.float64) for p in minority])
    synthetic = smote(min_feats, len(majority), k=k, seed=seed)
    label = minority[0].label
    extra = [LabeledPoint(features=s, label=label, origin=ORIGIN_SYNTHETIC) for s in synthetic]
    return list(points) + extra


def cross_validate(
    dataset: list[LabeledPoint],
    kind: str,
    k_folds: int = 5,
    seed: int = 0,
    params=None,
    use_smote: bool = False,
    smote_k: int = 5,
    feature_kind: str = FEATURE_RAW,
) -> CvResult:
    """Stratified k-fold CV; SMOTE (when enabled) only ever sees fold-train data.

    Folds are assigned round-robin over a per-class shuffle, so fold class
    counts differ by at most one. Aggregates are the unweighted mean and
    population standard deviation over folds.
    """
    n = len(dataset)
    if not (2 <= k_folds <= n):
        raise ConfigError(f"k_folds must be in [2, {n}], got {k_folds}")
    rng = Xoshiro256(derive_seed(seed, "cv-folds"))
    classes = sorted({p.label for p in dataset})
    folds: list[list[int]] = [[] for _ in range(k_folds)]
    for c in classes:
        idx = [i for i, p in enumerate(dataset) if p.label == c]
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[pos % k_folds].append(i)
    fold_metrics: list[Metrics] = []
    for f in range(k_folds):
        test_idx = set(folds[f])
        if not test_idx or len(test_idx) == n:
            raise DataError(f"fold {f} is degenerate")
        train_pts = [dataset[i] for i in range(n) if i not in test_idx]
        test_pts = [dataset[i] for i in sorted(test_idx)]
        if use_smote:
            train_pts = balance_training_set(
                train_pts, k=smote_k, seed=derive_seed(seed, f"cv-fold-{f}-smote")
            )
        fold_params = params
        if fold_params is None:
            fold_params = LogRegParams() if kind == KIND_LOGREG else SvmParams()
        fold_params = replace(fold_params, seed=derive_seed(seed, f"cv-fold-{f}-train"))
        model = _train_by_kind(kind, train_pts, fold_params, feature_kind)
        fold_metrics.append(evaluate(model, test_pts))
    names = ("accuracy", "precision", "recall", "f1")
    values = {m: np.array([getattr(fm, m) for fm in fold_metrics]) for m in names}
    return CvResult(
        fold_metrics=fold_metrics,
        mean={m: float(v.mean()) for m, v in values.items()},
        std={m: float(v.std()) for m, v in values.items()},
    )


def bulk_label(model: LinearModel, ids: list[str], features: list) -> tuple[list, dict]:
    """Label every document; returns (rows, summary).

    rows are (id, label_string, score) in input order; the summary counts
    both classes and reports the relevant fraction rounded to 3 decimals.
    """
    if not ids:
        raise DataError("cannot label an empty corpus")
    if len(ids) != len(features):
        raise DataError("ids and features must align")
    rows = []
    n_rel = 0
    for doc_id, x in zip(ids, features):
        pred = predict(model, x)
        n_rel += pred.label
        rows.append((doc_id, "relevant" if pred.label == 1 else "irrelevant", pred.score))
    summary = {
        "n_docs": len(ids),
        "n_relevant": n_rel,
        "n_irrelevant": len(ids) - n_rel,
        "relevant_fraction": round(n_rel / len(ids), 3),
    }
    return rows, summary


def metrics_to_dict(metrics: Metrics) -> dict:
    return {
        "confusion": metrics.confusion,
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "per_class": metrics.per_class,
        "zero_division": metrics.zero_division,
    }


def save_model(model: LinearModel, path: str | Path) -> None:
    payload = {
        "kind": model.kind,
        "feature_kind": model.feature_kind,
        "weights": [float(x) for x in model.weights],
        "bias": float(model.bias),
        "training_meta": model.training_meta,
        "fingerprints": model.fingerprints,
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_model(path: str | Path) -> LinearModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        kind = obj["kind"]
        if kind not in (KIND_LOGREG, KIND_SVM):
            raise DataError(f"{path}: unknown model kind {kind!r}")
        return LinearModel(
            kind=kind,
            feature_kind=obj["feature_kind"],
            weights=np.asarray(obj["weights"], dtype=np.float64),
            bias=float(obj["bias"]),
            training_meta=dict(obj.get("training_meta", {})),
            fingerprints=dict(obj.get("fingerprints", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed model file: {exc}") from exc

"""Minority-class oversampling via SMOTE.

Synthetic points interpolate between a minority point and one of its k
nearest minority neighbours: x_new = x_i + u * (x_nn - x_i) with u drawn
uniformly from [0, 1). Base points are visited round-robin so the synthetic
mass spreads evenly; all randomness comes from one seeded xoshiro256**
stream (per sample: neighbour index first, then u).
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import ConfigError, DataError, NumericError
from .features import SparseVector
from .rng import Xoshiro256


def knn_indices(points, query_index: int, k: int) -> list[int]:
    """Indices of the k nearest points to points[query_index] (excluded).

    Euclidean distance; exact distance ties break toward the lower index.
    """
    n = len(points)
    if not (0 <= query_index < n):
        raise ConfigError(f"query_index {query_index} out of range for {n} points")
    if not (1 <= k <= n - 1):
        raise ConfigError(f"k must be in [1, {n - 1}], got {k}")
    if isinstance(points, np.ndarray):
        diff = points - points[query_index]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
    else:
        q = points[query_index]
        qq = q.dot(q)
        dist = np.empty(n, dtype=np.float64)
        for i, p in enumerate(points):
            d2 = p.dot(p) + qq - 2.0 * p.dot(q)
            dist[i] = np.sqrt(max(d2, 0.0))
    order = np.lexsort((np.arange(n), dist))
    return [int(i) for i in order if i != query_index][:k]


def _interpolate_dense(a: np.ndarray, b: np.ndarray, u: float) -> np.ndarray:
    return a + u * (b - a)


def _interpolate_sparse(a: SparseVector, b: SparseVector, u: float) -> SparseVector:
    union = np.union1d(a.indices, b.indices)
    av = np.zeros(union.size, dtype=np.float64)
    bv = np.zeros(union.size, dtype=np.float64)
    av[np.searchsorted(union, a.indices)] = a.values
    bv[np.searchsorted(union, b.indices)] = b.values
    vals = av + u * (bv - av)
    mask = vals != 0.0
    return SparseVector(union[mask], vals[mask], a.dim)


def smote(minority, target_count: int, k: int = 5, seed: int = 0):
    """Generate target_count - len(minority) synthetic minority points.

    Accepts a dense (m, d) array or a list of SparseVector and returns the
    synthetic points in the matching representation. k is clamped to m - 1
    with a warning when the minority class is smaller than k + 1.
    """
    m = len(minority)
    if m < 2:
        raise DataError(f"SMOTE needs at least 2 minority points, got {m}")
    if target_count < m:
        raise ConfigError(f"target_count {target_count} is below minority size {m}")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    dense = isinstance(minority, np.ndarray)
    if dense:
        if minority.ndim != 2:
            raise DataError("dense minority input must be a 2-d array")
        if not np.all(np.isfinite(minority)):
            raise NumericError("minority points contain non-finite values")
    else:
        dims = {p.dim for p in minority}
        if len(dims) != 1:
            raise DataError(f"minority points have mixed dimensions: {sorted(dims)}")
    k_eff = min(k, m - 1)
    if k_eff < k:
        warnings.warn(
            f"SMOTE k clamped from {k} to {k_eff} (minority size {m})",
            RuntimeWarning,
            stacklevel=2,
        )
    rng = Xoshiro256(seed)
    n_synthetic = target_count - m
    neighbours: dict[int, list[int]] = {}
    out = []
    for j in range(n_synthetic):
        i = j % m
        if i not in neighbours:
            neighbours[i] = knn_indices(minority, i, k_eff)
        nn = neighbours[i][rng.randbelow(k_eff)]
        u = rng.uniform()
        if dense:
            out.append(_interpolate_dense(minority[i], minority[nn], u))
        else:
            out.append(_interpolate_sparse(minority[i], minority[nn], u))
    if dense:
        d = minority.shape[1]
        return np.array(out, dtype=np.float64).reshape(n_synthetic, d)
    return out

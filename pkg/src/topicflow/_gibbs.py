"""Compiled kernels for collapsed Gibbs sampling.

The xoshiro256** primitives here mirror topicflow.rng bit for bit (same
splitmix64 seeding, same uniform and bounded-integer derivations), so the
sampler's draws are reproducible against the pure-Python generator.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def xs_init(seed):
    """Expand a uint64 seed into a xoshiro256** state via splitmix64."""
    state = np.empty(4, dtype=np.uint64)
    x = np.uint64(seed)
    for i in range(4):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        z = x
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        state[i] = z ^ (z >> np.uint64(31))
    return state


@njit(cache=True, inline="always")
def xs_next(state):
    s1 = state[1]
    r = s1 * np.uint64(5)
    r = ((r << np.uint64(7)) | (r >> np.uint64(57))) * np.uint64(9)
    t = s1 << np.uint64(17)
    state[2] ^= state[0]
    state[3] ^= s1
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    s3 = state[3]
    state[3] = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
    return r


@njit(cache=True, inline="always")
def xs_uniform(state):
    return (xs_next(state) >> np.uint64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def xs_randbelow(state, n):
    un = np.uint64(n)
    rem = (_U64_MAX % un + np.uint64(1)) % un
    if rem == np.uint64(0):
        return xs_next(state) % un
    limit = np.uint64(0) - rem
    while True:
        x = xs_next(state)
        if x < limit:
            return x % un


@njit(cache=True)
def gibbs_run(words, doc_ids, doc_len, n_topics, vocab_size,
              alpha, beta, iterations, burn_in, sample_every, seed,
              check_counts):
    """Collapsed Gibbs sampler over a flattened corpus.

    words[i], doc_ids[i] give token i's term and document; tokens are
    visited in flat order every sweep. Posterior means of phi and theta
    are averaged over checkpoints taken every sample_every sweeps after
    burn-in (the final sweep is always a checkpoint). With check_counts
    the three count tables are re-validated after every sweep; the second
    return value is the 1-based sweep where conservation first failed, or
    0 when all checks passed.
    """
    n_tokens = words.shape[0]
    n_docs = doc_len.shape[0]
    state = xs_init(seed)

    z = np.empty(n_tokens, dtype=np.int32)
    n_wk = np.zeros((vocab_size, n_topics), dtype=np.int64)
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
    n_k = np.zeros(n_topics, dtype=np.int64)
    for i in range(n_tokens):
        k = int(xs_randbelow(state, n_topics))
        z[i] = k
        n_wk[words[i], k] += 1
        n_dk[doc_ids[i], k] += 1
        n_k[k] += 1

    word_totals = np.zeros(vocab_size, dtype=np.int64)
    for i in range(n_tokens):
        word_totals[words[i]] += 1

    vbeta = vocab_size * beta
    kalpha = n_topics * alpha
    cumulative = np.empty(n_topics, dtype=np.float64)
    phi_acc = np.zeros((n_topics, vocab_size), dtype=np.float64)
    theta_acc = np.zeros((n_docs, n_topics), dtype=np.float64)
    n_checkpoints = 0
    n_ll = iterations // 10
    ll_trace = np.zeros(n_ll, dtype=np.float64)
    fail_sweep = 0

    for sweep in range(1, iterations + 1):
        for i in range(n_tokens):
            w = words[i]
            d = doc_ids[i]
            old = z[i]
            n_wk[w, old] -= 1
            n_dk[d, old] -= 1
            n_k[old] -= 1
            total = 0.0
            for k in range(n_topics):
                total += (n_dk[d, k] + alpha) * (n_wk[w, k] + beta) / (n_k[k] + vbeta)
                cumulative[k] = total
            r = xs_uniform(state) * total
            new = n_topics - 1
            for k in range(n_topics):
                if r < cumulative[k]:
                    new = k
                    break
            z[i] = new
            n_wk[w, new] += 1
            n_dk[d, new] += 1
            n_k[new] += 1

        if check_counts and fail_sweep == 0:
            ok = True
            s_k = np.int64(0)
            for k in range(n_topics):
                s_k += n_k[k]
            if s_k != n_tokens:
                ok = False
            if ok:
                for d in range(n_docs):
                    row = np.int64(0)
                    for k in range(n_topics):
                        row += n_dk[d, k]
                    if row != doc_len[d]:
                        ok = False
                        break
            if ok:
                for w in range(vocab_size):
                    row = np.int64(0)
                    for k in range(n_topics):
                        row += n_wk[w, k]
                    if row != word_totals[w]:
                        ok = False
                        break
            if not ok:
                fail_sweep = sweep

        if sweep % 10 == 0 and n_ll > 0:
            ll = 0.0
            for i in range(n_tokens):
                w = words[i]
                d = doc_ids[i]
                p = 0.0
                for k in range(n_topics):
                    theta_dk = (n_dk[d, k] + alpha) / (doc_len[d] + kalpha)
                    phi_kw = (n_wk[w, k] + beta) / (n_k[k] + vbeta)
                    p += theta_dk * phi_kw
                ll += np.log(p)
            ll_trace[sweep // 10 - 1] = ll

        if sweep > burn_in and ((sweep - burn_in) % sample_every == 0 or sweep == iterations):
            for k in range(n_topics):
                denom = n_k[k] + vbeta
                for w in range(vocab_size):
                    phi_acc[k, w] += (n_wk[w, k] + beta) / denom
            for d in range(n_docs):
                denom = doc_len[d] + kalpha
                for k in range(n_topics):
                    theta_acc[d, k] += (n_dk[d, k] + alpha) / denom
            n_checkpoints += 1

    return z, n_wk, n_dk, n_k, phi_acc, theta_acc, n_checkpoints, ll_trace, fail_sweep


@njit(cache=True)
def infer_doc(word_ids, phi, alpha, iterations, seed):
    """Fold in one document against fixed topic-word distributions.

    Samples topic assignments with phi held constant and returns theta
    averaged over the last half of the sweeps.
    """
    n_topics = phi.shape[0]
    n = word_ids.shape[0]
    state = xs_init(seed)
    z = np.empty(n, dtype=np.int32)
    n_k = np.zeros(n_topics, dtype=np.int64)
    for i in range(n):
        k = int(xs_randbelow(state, n_topics))
        z[i] = k
        n_k[k] += 1
    cumulative = np.empty(n_topics, dtype=np.float64)
    theta_acc = np.zeros(n_topics, dtype=np.float64)
    kalpha = n_topics * alpha
    burn = iterations // 2
    count = 0
    for sweep in range(1, iterations + 1):
        for i in range(n):
            w = word_ids[i]
            old = z[i]
            n_k[old] -= 1
            total = 0.0
            for k in range(n_topics):
                total += (n_k[k] + alpha) * phi[k, w]
                cumulative[k] = total
            r = xs_uniform(state) * total
            new = n_topics - 1
            for k in range(n_topics):
                if r < cumulative[k]:
                    new = k
                    break
            z[i] = new
            n_k[new] += 1
        if sweep > burn:
            for k in range(n_topics):
                theta_acc[k] += (n_k[k] + alpha) / (n + kalpha)
            count += 1
    return theta_acc / count

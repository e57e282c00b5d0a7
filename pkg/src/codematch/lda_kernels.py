"""Collapsed Gibbs sampling kernels for LDA.

Randomness is an explicit MINSTD LCG so the numba and pure-Python
backends are bit-identical, and query fold-in draws from an independent
stream derived from (seed, query id).
"""

import numpy as np

from .accel import jit_kernel

_LCG_M = 2147483647
_LCG_A = 48271


@jit_kernel
def _gibbs_fit(words, doc_of, n_docs, n_topics, n_vocab, alpha, beta,
               iterations, seed):
    """Run collapsed Gibbs over the token stream.

    words[t] = vocab index, doc_of[t] = owning document. Returns
    (n_dk, n_kw, n_k) count matrices after the final sweep.
    """
    n_tokens = len(words)
    state = np.int64(seed % (_LCG_M - 1) + 1)

    z = np.empty(n_tokens, dtype=np.int64)
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
    n_kw = np.zeros((n_topics, n_vocab), dtype=np.int64)
    n_k = np.zeros(n_topics, dtype=np.int64)

    for t in range(n_tokens):
        state = state * _LCG_A % _LCG_M
        k = state % n_topics
        z[t] = k
        n_dk[doc_of[t], k] += 1
        n_kw[k, words[t]] += 1
        n_k[k] += 1

    probs = np.empty(n_topics, dtype=np.float64)
    vbeta = n_vocab * beta
    for _sweep in range(iterations):
        for t in range(n_tokens):
            d = doc_of[t]
            w = words[t]
            k = z[t]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1

            total = 0.0
            for kk in range(n_topics):
                p = ((n_dk[d, kk] + alpha) * (n_kw[kk, w] + beta)
                     / (n_k[kk] + vbeta))
                total += p
                probs[kk] = total

            state = state * _LCG_A % _LCG_M
            u = (state - 1) / (_LCG_M - 2) * total
            k = 0
            while k < n_topics - 1 and probs[k] < u:
                k += 1

            z[t] = k
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1

    return n_dk, n_kw, n_k


@jit_kernel
def _gibbs_fold_in(words, n_kw, n_k, n_topics, n_vocab, alpha, beta,
                   sweeps, seed):
    """Infer a topic-count vector for an unseen document against fixed
    topic-word counts."""
    n_tokens = len(words)
    state = np.int64(seed % (_LCG_M - 1) + 1)

    z = np.empty(n_tokens, dtype=np.int64)
    n_qk = np.zeros(n_topics, dtype=np.int64)
    for t in range(n_tokens):
        state = state * _LCG_A % _LCG_M
        k = state % n_topics
        z[t] = k
        n_qk[k] += 1

    probs = np.empty(n_topics, dtype=np.float64)
    vbeta = n_vocab * beta
    for _sweep in range(sweeps):
        for t in range(n_tokens):
            w = words[t]
            k = z[t]
            n_qk[k] -= 1
            total = 0.0
            for kk in range(n_topics):
                p = ((n_qk[kk] + alpha) * (n_kw[kk, w] + beta)
                     / (n_k[kk] + vbeta))
                total += p
                probs[kk] = total
            state = state * _LCG_A % _LCG_M
            u = (state - 1) / (_LCG_M - 2) * total
            k = 0
            while k < n_topics - 1 and probs[k] < u:
                k += 1
            z[t] = k
            n_qk[k] += 1

    return n_qk

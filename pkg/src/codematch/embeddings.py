"""Token embeddings backing the WMD ground cost.

Embeddings are trained on the union of both languages' corpora so the
two languages share one vector space through their shared tokens
(keywords, identifiers, literals); cross-language WMD is meaningless
without a shared space.
"""

import math
import threading

import numpy as np

from .accel import NUMBA_ENABLED
from .sgns_kernels import _train_kernel

__all__ = ["EmbeddingTable", "train_embeddings", "load_embeddings",
           "save_embeddings", "ground_cost"]


class EmbeddingTable:
    """Dense (V, d) matrix aligned to a Vocabulary's index space, with a
    coverage mask for tokens that have no vector."""

    def __init__(self, dimension, vectors, covered):
        vectors = np.asarray(vectors, dtype=np.float64)
        covered = np.asarray(covered, dtype=bool)
        if dimension < 1 or vectors.shape[1] != dimension:
            raise ValueError("bad embedding dimension")
        if not np.all(np.isfinite(vectors[covered])):
            raise ValueError("non-finite embedding entries")
        self.dimension = dimension
        self.vectors = vectors
        self.covered = covered

    def coverage(self):
        return float(self.covered.mean()) if len(self.covered) else 0.0

    def vector(self, index):
        if not self.covered[index]:
            raise KeyError(f"token index {index} has no embedding")
        return self.vectors[index]


def _negative_table(counts, size, rng):
    weights = np.power(counts.astype(np.float64), 0.75)
    weights /= weights.sum()
    slots = np.maximum(1, np.rint(weights * size).astype(np.int64))
    table = np.repeat(np.arange(len(counts), dtype=np.int64), slots)
    rng.shuffle(table)
    return table


def train_embeddings(documents, vocab, d=100, window=5, negatives=5,
                     epochs=5, seed=0, lr=0.025, workers=1):
    """Skip-gram negative-sampling embeddings over tokenized documents.

    Every vocabulary token that occurs in the documents gets a vector.
    workers=1 is bit-deterministic; workers>1 trains hogwild-style over
    document shards and is documented as non-deterministic.
    """
    if d < 1:
        raise ValueError("embedding dimension must be >= 1")
    documents = list(documents)
    if not documents:
        raise ValueError("cannot train embeddings on an empty corpus")

    seqs = []
    counts = np.zeros(len(vocab), dtype=np.int64)
    for doc in documents:
        idx = [vocab.index[t] for t in doc.token_texts() if t in vocab]
        for i in idx:
            counts[i] += 1
        if idx:
            seqs.append(np.array(idx, dtype=np.int64))
    if not seqs:
        raise ValueError("no in-vocabulary tokens to train on")

    data = np.concatenate(seqs)
    offsets = np.zeros(len(seqs) + 1, dtype=np.int64)
    np.cumsum([len(s) for s in seqs], out=offsets[1:])

    rng = np.random.default_rng(seed)
    win = (rng.random((len(vocab), d)) - 0.5) / d
    wout = np.zeros((len(vocab), d), dtype=np.float64)
    neg_table = _negative_table(np.maximum(counts, 0) + (counts == 0),
                                max(len(vocab) * 16, 1 << 16), rng)

    if workers <= 1 or not NUMBA_ENABLED:
        _train_kernel(data, offsets, win, wout, neg_table, window,
                      negatives, epochs, lr, 1e-4, seed)
    else:
        # hogwild over document shards; relies on nogil kernels
        bounds = np.linspace(0, len(seqs), workers + 1).astype(int)
        threads = []
        for w in range(workers):
            lo, hi = bounds[w], bounds[w + 1]
            if lo == hi:
                continue
            shard = data[offsets[lo]:offsets[hi]]
            shard_off = offsets[lo:hi + 1] - offsets[lo]
            threads.append(threading.Thread(
                target=_train_kernel,
                args=(shard, shard_off, win, wout, neg_table, window,
                      negatives, epochs, lr, 1e-4, seed + 7919 * (w + 1))))
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    covered = counts > 0
    return EmbeddingTable(dimension=d, vectors=win, covered=covered)


def save_embeddings(table, vocab, path):
    """Text format: first line "V d", then "token v1 ... vd" per line,
    shortest round-tripping decimals (load is bit-exact)."""
    covered_tokens = [(t, vocab.index[t]) for t in vocab.tokens
                      if table.covered[vocab.index[t]]]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(covered_tokens)} {table.dimension}\n")
        for token, idx in covered_tokens:
            vals = " ".join(repr(v) for v in table.vectors[idx].tolist())
            fh.write(f"{token} {vals}\n")


def load_embeddings(path, expected_vocab):
    """Load a text vector file, restricted to expected_vocab.

    Tokens outside the vocabulary are ignored; vocabulary tokens missing
    from the file are uncovered (queryable via coverage())."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("embeddings file: malformed header (want 'V d')")
        count, dim = int(header[0]), int(header[1])
        if count < 1:
            raise ValueError("embeddings file: no vectors")
        vectors = np.zeros((len(expected_vocab), dim), dtype=np.float64)
        covered = np.zeros(len(expected_vocab), dtype=bool)
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise ValueError(
                    f"embeddings file line {lineno}: expected {dim} values, "
                    f"got {len(parts) - 1}")
            token = parts[0]
            if token not in expected_vocab.index:
                continue
            idx = expected_vocab.index[token]
            try:
                vectors[idx] = [float(v) for v in parts[1:]]
            except ValueError:
                raise ValueError(f"embeddings file line {lineno}: bad float")
            covered[idx] = True
    return EmbeddingTable(dimension=dim, vectors=vectors, covered=covered)


def ground_cost(table, i, j):
    """Euclidean distance between the vectors of token indices i and j."""
    xi = table.vector(i)
    xj = table.vector(j)
    return math.sqrt(float(np.sum((xi - xj) ** 2)))

"""The four non-transport similarity engines: TF-IDF cosine, Okapi-BM25,
LSI, and LDA, behind one fit/distance/top_k interface.

Every engine returns distances where lower means more similar, so they
plug straight into the matching algorithm. top_k is exact (no
approximate shortcuts) and breaks ties by target id.
"""

import pickle
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .lda_kernels import _gibbs_fit, _gibbs_fold_in
from .lexer import token_counts
from .vectorizer import UnrepresentableDocument, tfidf_vector

__all__ = ["EngineConfig", "FittedIndex", "fit", "bm25_score",
           "save_index", "load_index"]

_INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EngineConfig:
    method: str = "tfidf"       # tfidf | bm25 | lsi | lda
    k1: float = 1.5             # BM25 tf saturation
    b: float = 0.75             # BM25 length normalization
    lsi_rank: int = 200
    lda_topics: int = 100
    lda_alpha: float | None = None   # None -> 50/K
    lda_beta: float = 0.01
    lda_iterations: int = 1000
    lda_fold_in_sweeps: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("tfidf", "bm25", "lsi", "lda"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.k1 < 0 or not 0 <= self.b <= 1:
            raise ValueError("need k1 >= 0 and 0 <= b <= 1")
        if self.lsi_rank < 1 or self.lda_topics < 2:
            raise ValueError("need lsi_rank >= 1 and lda_topics >= 2")

    @property
    def alpha(self):
        return self.lda_alpha if self.lda_alpha is not None \
            else 50.0 / self.lda_topics

    def to_dict(self):
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        return d


def _query_counts(doc, vocab):
    counts = token_counts(doc.tokens)
    items = sorted((vocab.index[t], c) for t, c in counts.items()
                   if t in vocab)
    if not items:
        raise UnrepresentableDocument(
            f"query {doc.id!r} has no in-vocabulary tokens")
    idx = np.array([i for i, _ in items], dtype=np.int64)
    cnt = np.array([c for _, c in items], dtype=np.float64)
    return idx, cnt


def _counts_csr(corpus, vocab):
    rows, cols, vals = [], [], []
    for r, doc in enumerate(corpus):
        for t, c in token_counts(doc.tokens).items():
            if t in vocab:
                rows.append(r)
                cols.append(vocab.index[t])
                vals.append(c)
    return sp.csr_matrix((vals, (rows, cols)),
                         shape=(len(corpus), len(vocab)), dtype=np.float64)


def _tfidf_csr(corpus, vocab):
    counts = _counts_csr(corpus, vocab)
    lengths = np.asarray(counts.sum(axis=1)).ravel()
    lengths[lengths == 0] = 1.0
    tf = sp.diags(1.0 / lengths) @ counts
    return tf @ sp.diags(vocab.idf_array())


class FittedIndex:
    """Common surface: distance(query_doc, target_id) and
    top_k(query_doc, k). Immutable after fit."""

    method = None

    def __init__(self, vocab, doc_ids, config):
        self.vocab = vocab
        self.doc_ids = list(doc_ids)
        self.config = config
        self._pos = {i: p for p, i in enumerate(self.doc_ids)}

    def _all_distances(self, query_doc):
        raise NotImplementedError

    def distance(self, query_doc, target_id):
        return float(self._all_distances(query_doc)[self._pos[target_id]])

    def top_k(self, query_doc, k):
        if k < 1:
            raise ValueError("k must be positive")
        dist = self._all_distances(query_doc)
        order = sorted(range(len(self.doc_ids)),
                       key=lambda t: (dist[t], self.doc_ids[t]))
        return [(self.doc_ids[t], float(dist[t])) for t in order[:k]]


class TfidfIndex(FittedIndex):
    method = "tfidf"

    def __init__(self, corpus, vocab, config):
        super().__init__(vocab, corpus.ids(), config)
        mat = _tfidf_csr(corpus, vocab)
        norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
        norms[norms == 0] = 1.0
        self.matrix = sp.diags(1.0 / norms) @ mat  # L2-normalized rows

    def _all_distances(self, query_doc):
        vec = tfidf_vector(query_doc, self.vocab)
        if len(vec) == 0:
            raise UnrepresentableDocument(
                f"query {query_doc.id!r} has no in-vocabulary tokens")
        q = np.zeros(len(self.vocab))
        q[vec.indices] = vec.weights
        q /= np.linalg.norm(q)
        return 1.0 - self.matrix @ q


class Bm25Index(FittedIndex):
    """Okapi-BM25 over the target corpus.

    Document-level score for a query = sum of per-token BM25 scores over
    the query's distinct tokens; distance = the negated sum (more
    negative = more similar).
    """

    method = "bm25"

    def __init__(self, corpus, vocab, config):
        super().__init__(vocab, corpus.ids(), config)
        self.counts = _counts_csr(corpus, vocab).tocsc()
        self.lengths = np.asarray(self.counts.sum(axis=1)).ravel()
        self.avg_length = float(self.lengths.mean())
        # df within the target corpus, not the union vocabulary
        self.doc_freq = np.asarray((self.counts > 0).sum(axis=0)).ravel()
        n = len(self.doc_ids)
        self.idf = np.log((n - self.doc_freq + 0.5)
                          / (self.doc_freq + 0.5) + 1.0)

    def _score_column(self, vocab_idx):
        tf = np.asarray(self.counts[:, vocab_idx].todense()).ravel()
        k1, b = self.config.k1, self.config.b
        denom = tf + k1 * (1.0 - b + b * self.lengths / self.avg_length)
        return self.idf[vocab_idx] * tf * (k1 + 1.0) / denom

    def score(self, token, target_id):
        """BM25 score of one token in one indexed document."""
        if token not in self.vocab:
            return 0.0
        col = self.vocab.index[token]
        return float(self._score_column(col)[self._pos[target_id]])

    def _all_distances(self, query_doc):
        idx, _ = _query_counts(query_doc, self.vocab)
        total = np.zeros(len(self.doc_ids))
        for col in idx:
            total += self._score_column(int(col))
        return -total


class LsiIndex(FittedIndex):
    method = "lsi"

    def __init__(self, corpus, vocab, config):
        super().__init__(vocab, corpus.ids(), config)
        mat = _tfidf_csr(corpus, vocab)
        max_rank = min(mat.shape)
        rank = config.lsi_rank
        if rank > max_rank:
            warnings.warn(f"lsi_rank {rank} clamped to {max_rank}")
            rank = max_rank
        u, s, vt = np.linalg.svd(mat.toarray(), full_matrices=False)
        u, s, vt = u[:, :rank], s[:rank], vt[:rank]
        # deterministic sign convention: largest-|.| basis component > 0
        for r in range(rank):
            pivot = np.argmax(np.abs(vt[r]))
            if vt[r, pivot] < 0:
                vt[r] *= -1.0
                u[:, r] *= -1.0
        self.basis = vt.T          # (V, rank)
        self.docs = u * s          # (n_docs, rank)
        self._doc_norms = np.linalg.norm(self.docs, axis=1)

    def _all_distances(self, query_doc):
        vec = tfidf_vector(query_doc, self.vocab)
        if len(vec) == 0:
            raise UnrepresentableDocument(
                f"query {query_doc.id!r} has no in-vocabulary tokens")
        q = np.zeros(len(self.vocab))
        q[vec.indices] = vec.weights
        proj = q @ self.basis
        qn = np.linalg.norm(proj)
        denom = np.maximum(self._doc_norms * qn, 1e-300)
        return 1.0 - (self.docs @ proj) / denom


class LdaIndex(FittedIndex):
    """LDA via collapsed Gibbs; similarity = cosine of topic mixtures.
    Queries are folded in with an independent per-query RNG stream
    derived from (seed, query id)."""

    method = "lda"

    def __init__(self, corpus, vocab, config):
        super().__init__(vocab, corpus.ids(), config)
        words, doc_of = [], []
        for r, doc in enumerate(corpus):
            for t in doc.token_texts():
                if t in vocab:
                    words.append(vocab.index[t])
                    doc_of.append(r)
        n_dk, n_kw, n_k = _gibbs_fit(
            np.array(words, dtype=np.int64),
            np.array(doc_of, dtype=np.int64),
            len(self.doc_ids), config.lda_topics, len(vocab),
            config.alpha, config.lda_beta, config.lda_iterations,
            config.seed)
        self.n_kw = n_kw
        self.n_k = n_k
        doc_len = n_dk.sum(axis=1, keepdims=True)
        self.theta = ((n_dk + config.alpha)
                      / (doc_len + config.lda_topics * config.alpha))
        self.phi = ((n_kw + config.lda_beta)
                    / (n_k[:, None] + len(vocab) * config.lda_beta))

    def infer_theta(self, query_doc):
        idx = [self.vocab.index[t] for t in query_doc.token_texts()
               if t in self.vocab]
        if not idx:
            raise UnrepresentableDocument(
                f"query {query_doc.id!r} has no in-vocabulary tokens")
        cfg = self.config
        qseed = (cfg.seed * 2654435761
                 + zlib.crc32(query_doc.id.encode("utf-8"))) % (2 ** 31 - 2)
        n_qk = _gibbs_fold_in(
            np.array(idx, dtype=np.int64), self.n_kw, self.n_k,
            cfg.lda_topics, len(self.vocab), cfg.alpha, cfg.lda_beta,
            cfg.lda_fold_in_sweeps, qseed)
        return ((n_qk + cfg.alpha)
                / (len(idx) + cfg.lda_topics * cfg.alpha))

    def _all_distances(self, query_doc):
        q = self.infer_theta(query_doc)
        qn = np.linalg.norm(q)
        dn = np.linalg.norm(self.theta, axis=1)
        return 1.0 - (self.theta @ q) / (dn * qn)


_ENGINES = {c.method: c for c in (TfidfIndex, Bm25Index, LsiIndex, LdaIndex)}


def fit(target_corpus, union_vocab, config):
    """Fit a similarity index of config.method on the target corpus."""
    if len(target_corpus) == 0:
        raise ValueError("cannot fit an index on an empty corpus")
    for doc in target_corpus:
        if doc.tokens is None:
            raise ValueError("corpus must be tokenized before fitting")
    return _ENGINES[config.method](target_corpus, union_vocab, config)


def bm25_score(token, target_id, index):
    """Eq-style BM25 score of one word in one indexed document."""
    if index.method != "bm25":
        raise ValueError("bm25_score needs a bm25 index")
    return index.score(token, target_id)


def save_index(index, path):
    with open(path, "wb") as fh:
        pickle.dump({"format_version": _INDEX_FORMAT_VERSION,
                     "index": index}, fh)


def load_index(path):
    with open(path, "rb") as fh:
        blob = pickle.load(fh)
    if blob.get("format_version") != _INDEX_FORMAT_VERSION:
        raise ValueError("unsupported index format version")
    return blob["index"]

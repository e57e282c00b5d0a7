"""Vocabulary construction and sparse document representations.

The vocabulary is always built on the UNION of both corpora so that
cross-language shared tokens (keywords, identifiers, literals) align
index spaces; every similarity method compares documents across
languages in this one space.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lexer import token_counts

__all__ = [
    "Vocabulary", "SparseVector", "UnrepresentableDocument",
    "build_vocabulary", "bow", "tfidf_vector", "nbow",
    "save_vocabulary", "load_vocabulary",
]


class UnrepresentableDocument(Exception):
    """Raised when a document has no in-vocabulary tokens; the matcher
    treats such a document as unmatched rather than crashing."""


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse vector: strictly increasing indices, no explicit
    zeros, finite weights."""
    indices: np.ndarray  # int64
    weights: np.ndarray  # float64

    def __len__(self):
        return len(self.indices)

    def pairs(self):
        return list(zip(self.indices.tolist(), self.weights.tolist()))


class Vocabulary:
    """token -> dense index mapping plus document frequencies.

    Index assignment is lexicographic by token, so any two builds over
    the same documents are identical.
    """

    def __init__(self, index, doc_freq, num_documents):
        self.index = index              # token -> int
        self.tokens = sorted(index, key=index.get)
        self.doc_freq = doc_freq        # token -> df
        self.num_documents = num_documents

    def __len__(self):
        return len(self.index)

    def __contains__(self, token):
        return token in self.index

    def idf(self, token):
        """Smoothed idf: ln((1+N)/(1+df)) + 1. Bounded and never zero."""
        return math.log((1 + self.num_documents)
                        / (1 + self.doc_freq[token])) + 1.0

    def idf_array(self):
        n = self.num_documents
        df = np.array([self.doc_freq[t] for t in self.tokens], dtype=np.float64)
        return np.log((1.0 + n) / (1.0 + df)) + 1.0


def build_vocabulary(documents, min_df=1, max_df_fraction=1.0):
    """Build a Vocabulary over tokenized documents.

    Keeps tokens with min_df <= df and df/N <= max_df_fraction. Defaults
    do no pruning.
    """
    documents = list(documents)
    if not documents:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    df = {}
    for doc in documents:
        for token in set(doc.token_texts()):
            df[token] = df.get(token, 0) + 1
    n = len(documents)
    kept = sorted(t for t, f in df.items()
                  if f >= min_df and f / n <= max_df_fraction)
    return Vocabulary(index={t: i for i, t in enumerate(kept)},
                      doc_freq={t: df[t] for t in kept},
                      num_documents=n)


def _sorted_counts(doc, vocab):
    counts = token_counts(doc.tokens)
    items = sorted((vocab.index[t], c) for t, c in counts.items()
                   if t in vocab)
    idx = np.array([i for i, _ in items], dtype=np.int64)
    cnt = np.array([c for _, c in items], dtype=np.float64)
    return idx, cnt


def bow(doc, vocab):
    """Raw in-vocabulary token counts; OOV tokens are ignored."""
    idx, cnt = _sorted_counts(doc, vocab)
    return SparseVector(idx, cnt)


def tfidf_vector(doc, vocab):
    """Length-normalized tf times smoothed idf.

    weight(w) = count(w)/|doc| * (ln((1+N)/(1+df(w))) + 1), where |doc|
    counts in-vocabulary tokens.
    """
    idx, cnt = _sorted_counts(doc, vocab)
    if len(idx) == 0:
        return SparseVector(idx, cnt)
    total = cnt.sum()
    idf = np.array([vocab.idf(vocab.tokens[i]) for i in idx])
    return SparseVector(idx, cnt / total * idf)


def nbow(doc, vocab):
    """Normalized bag of words: in-vocabulary counts as a probability
    distribution. Errors on documents with no in-vocabulary tokens."""
    idx, cnt = _sorted_counts(doc, vocab)
    if len(idx) == 0:
        raise UnrepresentableDocument(
            f"document {doc.id!r} has no in-vocabulary tokens")
    return SparseVector(idx, cnt / cnt.sum())


def save_vocabulary(vocab, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#num_documents\t{vocab.num_documents}\n")
        for token in vocab.tokens:
            fh.write(f"{token}\t{vocab.index[token]}\t{vocab.doc_freq[token]}\n")


def load_vocabulary(path):
    index, doc_freq = {}, {}
    num_documents = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#num_documents\t"):
                num_documents = int(line.split("\t")[1])
                continue
            token, idx, df = line.split("\t")
            index[token] = int(idx)
            doc_freq[token] = int(df)
    return Vocabulary(index=index, doc_freq=doc_freq,
                      num_documents=num_documents)

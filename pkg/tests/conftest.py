import numpy as np
import pytest
from scipy.optimize import linprog

from codematch.corpus import Corpus, Document, tokenize_corpus
from codematch.embeddings import EmbeddingTable
from codematch.lexer import LexerConfig


def make_corpus(texts, language="x", prefix="d", config=LexerConfig()):
    """Tokenized corpus out of raw text snippets, ids prefix0..prefixN."""
    width = len(str(max(len(texts) - 1, 0)))
    docs = tuple(Document(id=f"{prefix}{i:0{width}d}", language=language,
                          text=t) for i, t in enumerate(texts))
    return tokenize_corpus(Corpus(language=language, documents=docs),
                           config)


def random_token_corpus(rng, n_docs, vocab_size, min_len=5, max_len=25,
                        language="x", prefix="d"):
    """Documents of random 'tNNN' identifier tokens."""
    texts = []
    for _ in range(n_docs):
        length = int(rng.integers(min_len, max_len + 1))
        words = rng.integers(0, vocab_size, size=length)
        texts.append(" ".join(f"t{w}" for w in words))
    return make_corpus(texts, language=language, prefix=prefix)


def random_table(rng, vocab, d=20, scale=1.0):
    vectors = rng.normal(size=(len(vocab), d)) * scale
    return EmbeddingTable(dimension=d, vectors=vectors,
                          covered=np.ones(len(vocab), dtype=bool))


def lp_oracle(a, b, cost):
    """Independent dense-LP reference for the transportation problem."""
    m, n = cost.shape
    rows = []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n:(i + 1) * n] = 1.0
        rows.append(row)
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1.0
        rows.append(row)
    res = linprog(cost.ravel(), A_eq=np.array(rows),
                  b_eq=np.concatenate([a, b]), bounds=(0, None),
                  method="highs")
    assert res.status == 0
    return res.fun


_ADJ = ["red", "bold", "calm", "deep", "fast", "gray", "huge", "iron",
        "jade", "keen", "lush", "mild", "neat", "opal", "pale", "quick",
        "rough", "soft", "tall", "vast"]
_NOUN = ["cursor", "matrix", "bucket", "ledger", "packet", "sensor",
         "widget", "vector", "tensor", "branch", "cache", "socket",
         "parser", "kernel", "buffer", "signal", "record", "stream",
         "filter", "portal"]

_TEMPLATE_A = """\
func {f}({a}, {b}) {{
    var {v} = {n0};
    while ({v} < {n1}) {{
        {v} = {v} + {n2};
        emit("{s}");
    }}
    return {v};
}}
"""

_TEMPLATE_B = """\
def {f}({a}, {b}):
    let {v} := {n0}
    loop {v} < {n1}:
        {v} := {v} + {n2}
        show('{s}')
    give {v}
"""


def paired_toy_corpora(n, seed=0):
    """n paired programs in two toy surface syntaxes sharing
    identifiers and literals but not keywords/punctuation.

    Returns (corpus_a, corpus_b, truth) with truth mapping a-ids to
    their b counterparts.
    """
    rng = np.random.default_rng(seed)

    def ident(i):
        return (f"{_ADJ[rng.integers(len(_ADJ))]}_"
                f"{_NOUN[rng.integers(len(_NOUN))]}_{i}")

    texts_a, texts_b = [], []
    for i in range(n):
        fields = {
            "f": ident(i), "a": ident(i), "b": ident(i), "v": ident(i),
            "n0": int(rng.integers(0, 10000)),
            "n1": int(rng.integers(0, 10000)),
            "n2": int(rng.integers(0, 10000)),
            "s": f"{_ADJ[rng.integers(len(_ADJ))]} "
                 f"{_NOUN[rng.integers(len(_NOUN))]} {i}",
        }
        texts_a.append(_TEMPLATE_A.format(**fields))
        texts_b.append(_TEMPLATE_B.format(**fields))

    corpus_a = make_corpus(texts_a, language="alang", prefix="a")
    corpus_b = make_corpus(texts_b, language="blang", prefix="b")
    truth = {da.id: db.id
             for da, db in zip(corpus_a.documents, corpus_b.documents)}
    return corpus_a, corpus_b, truth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

"""Acceptance suite: one test per release criterion, each printing a
single PASS/FAIL/SKIP line on the live terminal (capture bypassed), so a
plain ``pytest tests/test_acceptance.py`` reads as a checklist.

Criterion 7 depends on an external aligned Java/Python corpus that is
not redistributable; when it is absent the test SKIPs and criterion 8
(the always-run synthetic ground-truth benchmark) stands in for it.
"""

import contextlib
import json
import os
import time

import numpy as np
import pytest

from codematch.corpus import export_records, ingest_records
from codematch.embeddings import (load_embeddings, save_embeddings,
                                  train_embeddings)
from codematch.engines import EngineConfig, bm25_score, fit
from codematch.evaluation import inject_noise, match_accuracy
from codematch.matcher import (MatchConfig, MatchedPair, ParallelCorpus,
                               create_parallel_corpus, export_pairs,
                               import_pairs)
from codematch.vectorizer import build_vocabulary, nbow
from codematch.wmd import (WmdRetriever, rwmd_lower_bound, wcd_lower_bound,
                           wmd_distance)
from codematch.cli import main as cli_main
from conftest import (lp_oracle, make_corpus, paired_toy_corpora,
                      random_table, random_token_corpus)


@contextlib.contextmanager
def _criterion(capsys, number, name):
    """Print one live PASS/FAIL/SKIP line per criterion."""
    verdict = "FAIL"
    try:
        yield
        verdict = "PASS"
    except pytest.skip.Exception:
        verdict = "SKIP"
        raise
    finally:
        with capsys.disabled():
            print(f"\n[acceptance] criterion {number:2d} ({name}): {verdict}")


# 1 ------------------------------------------------------------------

def test_criterion_01_pruned_wmd_equals_exhaustive(capsys):
    with _criterion(capsys, 1, "pruned top-k == exhaustive WMD"):
        start = time.time()
        for trial in range(20):
            rng = np.random.default_rng(1000 + trial)
            target = random_token_corpus(rng, 200, 300, min_len=5,
                                         max_len=15, prefix="t")
            query = random_token_corpus(rng, 1, 300, min_len=5,
                                        max_len=15, prefix="q").documents[0]
            vocab = build_vocabulary(list(target.documents) + [query])
            assert len(vocab) <= 500
            table = random_table(rng, vocab, d=20)

            q = nbow(query, vocab)
            brute = sorted(
                ((t.id, wmd_distance(q, nbow(t, vocab), table))
                 for t in target.documents),
                key=lambda p: (p[1], p[0]))
            retr = WmdRetriever(target, vocab, table)
            for k in (1, 5, 10):
                got = retr.top_k(query, k)
                assert [g[0] for g in got] == [b[0] for b in brute[:k]]
                assert np.allclose([g[1] for g in got],
                                   [b[1] for b in brute[:k]], atol=1e-9)
        assert time.time() - start < 300


# 2 ------------------------------------------------------------------

def test_criterion_02_lp_oracle(capsys):
    from codematch.emd import TransportProblem, emd_solve
    with _criterion(capsys, 2, "emd_solve vs dense LP oracle"):
        rng = np.random.default_rng(2)
        for _ in range(100):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 7))
            a = rng.random(m) + 1e-3
            a /= a.sum()
            b = rng.random(n) + 1e-3
            b /= b.sum()
            cost = rng.random((m, n)) * 5
            plan = emd_solve(TransportProblem(a, b, cost))
            assert abs(plan.objective - lp_oracle(a, b, cost)) < 1e-7
            assert np.abs(plan.flow.sum(axis=1) - a).max() < 1e-9
            assert np.abs(plan.flow.sum(axis=0) - b).max() < 1e-9


# 3 ------------------------------------------------------------------

def test_criterion_03_scoring_fixtures(capsys):
    import math
    with _criterion(capsys, 3, "BM25 fixture + TF-IDF dense oracle"):
        # worked single-document case: score("a") = ln(4/3) * 10/7
        single = make_corpus(["a b a"], prefix="w")
        idx = fit(single, build_vocabulary(single.documents),
                  EngineConfig(method="bm25"))
        assert abs(bm25_score("a", "w0", idx)
                   - math.log(4.0 / 3.0) * 10.0 / 7.0) < 1e-12

        # 5-document fixture, every (token, doc) score hand-evaluated
        texts = ["a a b", "b c c c", "a d", "d d d d", "b d"]
        corpus = make_corpus(texts, prefix="t")
        vocab = build_vocabulary(corpus.documents)
        index = fit(corpus, vocab, EngineConfig(method="bm25"))
        n, k1, b = 5, 1.5, 0.75
        lengths = [3, 4, 2, 4, 2]
        avg = sum(lengths) / n
        df = {"a": 2, "b": 3, "c": 1, "d": 3}
        tf = [{"a": 2, "b": 1}, {"b": 1, "c": 3}, {"a": 1, "d": 1},
              {"d": 4}, {"b": 1, "d": 1}]
        for d_i in range(5):
            for token in vocab.tokens:
                t = tf[d_i].get(token, 0)
                idf = math.log((n - df[token] + 0.5) / (df[token] + 0.5)
                               + 1.0)
                want = idf * t * (k1 + 1) / (
                    t + k1 * (1 - b + b * lengths[d_i] / avg))
                got = bm25_score(token, f"t{d_i}", index)
                assert abs(got - want) < 1e-12

        # TF-IDF cosine distances against a dense oracle
        tindex = fit(corpus, vocab, EngineConfig(method="tfidf"))

        def dense(doc):
            v = np.zeros(len(vocab))
            for tok in set(doc.token_texts()):
                v[vocab.index[tok]] = (doc.token_texts().count(tok)
                                       / len(doc.token_texts())
                                       * vocab.idf(tok))
            return v

        for qdoc in corpus.documents:
            qv = dense(qdoc)
            for tdoc in corpus.documents:
                tv = dense(tdoc)
                cos = qv @ tv / (np.linalg.norm(qv) * np.linalg.norm(tv))
                assert abs(tindex.distance(qdoc, tdoc.id)
                           - (1.0 - cos)) < 1e-9


# 4 ------------------------------------------------------------------

def test_criterion_04_metric_axioms(capsys):
    with _criterion(capsys, 4, "WMD metric axioms + bound soundness"):
        rng = np.random.default_rng(4)
        corpus = random_token_corpus(rng, 60, 80, min_len=5, max_len=12)
        vocab = build_vocabulary(corpus.documents)
        table = random_table(rng, vocab, d=12)
        vecs = [nbow(d, vocab) for d in corpus.documents]

        cache = {}
        def dist(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                cache[key] = wmd_distance(vecs[key[0]], vecs[key[1]], table)
            return cache[key]

        for _ in range(1000):
            i, j, k = (int(v) for v in rng.integers(0, 60, size=3))
            assert dist(i, i) < 1e-9                        # identity
            assert abs(wmd_distance(vecs[i], vecs[j], table)
                       - wmd_distance(vecs[j], vecs[i], table)) < 1e-9
            assert dist(i, k) <= dist(i, j) + dist(j, k) + 1e-7
            for a, b in ((i, j), (j, k), (i, k)):
                exact = dist(a, b)
                assert wcd_lower_bound(vecs[a], vecs[b], table) \
                    <= exact + 1e-9
                assert rwmd_lower_bound(vecs[a], vecs[b], table) \
                    <= exact + 1e-9


# 5 ------------------------------------------------------------------

class _TableRetriever:
    method = "fixture"

    def __init__(self, table):
        self.table = table

    def top_k(self, doc, k):
        return sorted(self.table[doc.id], key=lambda p: (p[1], p[0]))[:k]


def test_criterion_05_matching_invariants(capsys):
    with _criterion(capsys, 5, "greedy pairing invariants + 3x3 fixture"):
        # hand-simulated 3x3 fixture
        table = {
            "s1": [("t1", 1.0), ("t2", 2.0), ("t3", 9.0)],
            "s2": [("t1", 1.0), ("t2", 3.0), ("t3", 9.0)],
            "s3": [("t1", 9.0), ("t2", 9.0), ("t3", 2.0)],
        }
        fixture_src = make_corpus(["x", "x", "x"], prefix="src")
        docs = tuple(type(d)(id=f"s{i + 1}", language=d.language,
                             text=d.text, tokens=d.tokens)
                     for i, d in enumerate(fixture_src.documents))
        pc = create_parallel_corpus(docs, None, _TableRetriever(table),
                                    MatchConfig(method="wmd", delta=5.0))
        assert [(p.source_id, p.target_id, p.distance)
                for p in pc.pairs] == [("s1", "t1", 1.0), ("s3", "t3", 2.0),
                                       ("s2", "t2", 3.0)]

        # 100 random instances
        for trial in range(100):
            rng = np.random.default_rng(5000 + trial)
            target = random_token_corpus(rng, 12, 10, prefix="t")
            source = random_token_corpus(rng, 10, 10, prefix="s")
            vocab = build_vocabulary(list(source.documents)
                                     + list(target.documents))
            index = fit(target, vocab, EngineConfig(method="tfidf"))
            cfg = MatchConfig(method="tfidf",
                              delta=float(rng.uniform(0.2, 0.95)))
            first = create_parallel_corpus(source, target, index, cfg)
            again = create_parallel_corpus(source, target, index, cfg)
            assert first.pairs == again.pairs
            assert first.unmatched_source_ids == again.unmatched_source_ids
            sources = [p.source_id for p in first.pairs]
            targets = [p.target_id for p in first.pairs]
            assert len(set(sources)) == len(sources)
            assert len(set(targets)) == len(targets)
            assert all(p.distance <= cfg.delta for p in first.pairs)
            dists = [p.distance for p in first.pairs]
            assert dists == sorted(dists)
            assert len(first.pairs) + len(first.unmatched_source_ids) \
                == len(source)


# 6 ------------------------------------------------------------------

def test_criterion_06_noise_injector(capsys):
    with _criterion(capsys, 6, "noise injector exact counts, no fixed "
                                "points"):
        pairs = [(f"s{i}", f"t{i}") for i in range(1000)]
        for x in (0.0, 0.1, 0.3, 0.7, 1.0):
            noisy, prov = inject_noise(pairs, x, seed=6)
            want = int(round(x * 1000))
            changed = [i for i in range(1000) if noisy[i] != pairs[i]]
            assert len(changed) == want
            for i in changed:
                assert noisy[i][0] == pairs[i][0]       # source untouched
                assert noisy[i][1] != pairs[i][1]       # no fixed point
            assert sorted(t for _, t in noisy) \
                == sorted(t for _, t in pairs)          # conservation
        full, _ = inject_noise(pairs, 1.0, seed=6)
        assert all(full[i][1] != pairs[i][1] for i in range(1000))


# 7 ------------------------------------------------------------------

def test_criterion_07_aligned_java_python_corpus(capsys):
    """Needs the aligned Java/Python web-scraped corpus (1,418 pairs);
    point CODEMATCH_G4G_ROOT at a directory with java/ and python/
    subtrees of aligned files to enable it."""
    with _criterion(capsys, 7, "aligned-corpus reproduction"):
        root = os.environ.get("CODEMATCH_G4G_ROOT", "")
        if not root or not os.path.isdir(root):
            pytest.skip("aligned Java/Python corpus not available in this "
                        "environment; criterion 8 is the substitute")
        pytest.fail("corpus present but protocol not wired up")


# 8 ------------------------------------------------------------------

def _benchmark_accuracy(source, target, truth, retriever, method):
    pc = create_parallel_corpus(
        source, target, retriever,
        MatchConfig(method=method, delta=1e18, candidate_k=10))
    return match_accuracy(pc, truth).accuracy


def test_criterion_08_synthetic_benchmark(capsys):
    with _criterion(capsys, 8, "synthetic 500-pair benchmark"):
        start = time.time()
        source, target, truth = paired_toy_corpora(500, seed=8)
        union = list(source.documents) + list(target.documents)
        vocab = build_vocabulary(union)

        table = train_embeddings(union, vocab, d=20, window=5,
                                 negatives=5, epochs=3, seed=8)
        acc_wmd = _benchmark_accuracy(
            source, target, truth, WmdRetriever(target, vocab, table),
            "wmd")
        acc_bm25 = _benchmark_accuracy(
            source, target, truth,
            fit(target, vocab, EngineConfig(method="bm25")), "bm25")
        acc_lda = _benchmark_accuracy(
            source, target, truth,
            fit(target, vocab, EngineConfig(method="lda", lda_topics=10,
                                            lda_iterations=100, seed=8)),
            "lda")
        with capsys.disabled():
            print(f"\n[acceptance]   benchmark accuracy: wmd={acc_wmd:.4f} "
                  f"bm25={acc_bm25:.4f} lda={acc_lda:.4f}")
        assert acc_wmd >= 0.90
        assert acc_bm25 >= 0.90
        assert acc_lda < acc_wmd
        assert acc_lda < acc_bm25
        assert time.time() - start < 600


# 9 ------------------------------------------------------------------

def _write_record_file(path, language, texts, prefix):
    with open(path, "w", encoding="utf-8") as fh:
        for i, text in enumerate(texts):
            fh.write(json.dumps({"id": f"{prefix}{i:02d}",
                                 "language": language, "text": text,
                                 "problem_set": None}) + "\n")


def test_criterion_09_end_to_end_determinism(capsys, tmp_path):
    with _criterion(capsys, 9, "byte-identical reruns for every method"):
        src_a, src_b, _ = paired_toy_corpora(12, seed=9)
        src_path = tmp_path / "src.jsonl"
        tgt_path = tmp_path / "tgt.jsonl"
        _write_record_file(src_path, "alang",
                           [d.text for d in src_a.documents], "s")
        _write_record_file(tgt_path, "blang",
                           [d.text for d in src_b.documents], "t")

        runs = {
            "tfidf": ["--delta", "0.9"],
            "bm25": ["--delta", "0.0"],
            "lsi": ["--lsi-rank", "4", "--delta", "0.9"],
            "lda": ["--lda-topics", "4", "--lda-iterations", "60",
                    "--delta", "0.9"],
            "wmd": ["--embed-dim", "10", "--embed-epochs", "2",
                    "--delta", "50.0"],
        }
        for method, extra in runs.items():
            outputs = []
            for run in ("one", "two"):
                out = tmp_path / f"{method}-{run}"
                rc = cli_main(["match", "--src", str(src_path),
                               "--tgt", str(tgt_path), "--method", method,
                               "--seed", "9", "--workers", "1",
                               "--out", str(out), *extra])
                assert rc == 0
                outputs.append((out / "pairs.jsonl").read_bytes())
            assert outputs[0] == outputs[1], f"{method} rerun differs"


# 10 -----------------------------------------------------------------

def test_criterion_10_round_trips(capsys, tmp_path):
    with _criterion(capsys, 10, "export/import round-trips bit-exact"):
        # corpus records
        corpus, _, _ = paired_toy_corpora(10, seed=10)
        rec_path = tmp_path / "corpus.jsonl"
        export_records(corpus, str(rec_path))
        back = ingest_records(str(rec_path))
        assert [(d.id, d.language, d.text, d.problem_set)
                for d in back] == \
               [(d.id, d.language, d.text, d.problem_set) for d in corpus]

        # embedding tables
        vocab = build_vocabulary(corpus.documents)
        table = train_embeddings(corpus.documents, vocab, d=7, epochs=1,
                                 seed=10)
        vec_path = tmp_path / "vectors.txt"
        save_embeddings(table, vocab, str(vec_path))
        loaded = load_embeddings(str(vec_path), vocab)
        assert np.array_equal(loaded.covered, table.covered)
        assert np.array_equal(loaded.vectors[table.covered],
                              table.vectors[table.covered])

        # pair files
        target = make_corpus(["x y", "y z"], language="blang", prefix="t")
        source = make_corpus(["x y", "q r"], language="alang", prefix="s")
        pc = ParallelCorpus(
            pairs=(MatchedPair("s0", "t0", 0.12345678901234567, "tfidf"),
                   MatchedPair("s1", "t1", 0.9999999999999999, "tfidf")),
            unmatched_source_ids=())
        pair_path = tmp_path / "pairs.jsonl"
        export_pairs(pc, str(pair_path), fmt="jsonl",
                     source_corpus=source, target_corpus=target)
        records = import_pairs(str(pair_path))
        assert [(r["src_id"], r["tgt_id"], r["distance"])
                for r in records] == \
               [(p.source_id, p.target_id, p.distance) for p in pc.pairs]

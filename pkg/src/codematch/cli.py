"""Command-line surface: ingest -> tokenize -> fit -> match -> evaluate
-> export, with reproducible run manifests.

Exit codes: 0 success, 1 pipeline error, 2 usage error. Every value
option can be overridden by an environment variable named
CODEMATCH_<OPTION> (dashes as underscores, uppercase).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .corpus import (ingest_directory, ingest_records, export_records,
                     filter_by_token_count, tokenize_corpus,
                     ProblemSetCorpus)
from .embeddings import load_embeddings, save_embeddings, train_embeddings
from .engines import EngineConfig, fit
from .evaluation import (dataset_stats, inject_noise, match_accuracy,
                         pseudo_match_accuracy, sample_test_split,
                         similarity_histogram)
from .lexer import LexerConfig
from .manifest import build_manifest, write_manifest
from .matcher import (DEFAULT_DELTA, MatchConfig, MatchedPair,
                      ParallelCorpus, create_parallel_corpus, export_pairs,
                      import_pairs)
from .vectorizer import build_vocabulary
from .wmd import WmdRetriever


def _env(name, default):
    return os.environ.get("CODEMATCH_" + name.upper().replace("-", "_"),
                          default)


def _add_lexer_flags(p):
    p.add_argument("--split-subtokens", action="store_true",
                   default=bool(_env("split-subtokens", False)))
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--drop-comments", action="store_true")
    p.add_argument("--drop-string-contents", action="store_true")


def _lexer_config(args):
    return LexerConfig(split_subtokens=args.split_subtokens,
                       lowercase=not args.no_lowercase,
                       keep_comments=not args.drop_comments,
                       keep_string_literal_contents=not
                       args.drop_string_contents)


def _load_corpus(path, language):
    if os.path.isdir(path):
        if not language:
            raise ValueError(f"{path} is a directory; a language tag is "
                             "required (--src-lang/--tgt-lang)")
        return ingest_directory(path, layout="flat", language=language)
    return ingest_records(path, language=language or None)


def _records_to_pc(records, unmatched=()):
    pairs = tuple(MatchedPair(r["src_id"], r["tgt_id"],
                              float(r["distance"]), "imported")
                  for r in records)
    return ParallelCorpus(pairs=pairs,
                          unmatched_source_ids=tuple(unmatched))


def _sidecar_unmatched(pairs_path):
    manifest_path = pairs_path + ".manifest.json"
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            return json.load(fh).get("unmatched_source_ids", [])
    return []


def cmd_ingest(args):
    corpus = ingest_directory(args.root, layout=args.layout,
                              language=args.language)
    export_records(corpus, args.out)
    print(f"ingested {len(corpus)} documents "
          f"({corpus.skipped} skipped) -> {args.out}")
    return 0


def cmd_train_embeddings(args):
    config = _lexer_config(args)
    src = tokenize_corpus(_load_corpus(args.src, args.src_lang), config)
    tgt = tokenize_corpus(_load_corpus(args.tgt, args.tgt_lang), config)
    union = list(src) + list(tgt)
    vocab = build_vocabulary(union)
    table = train_embeddings(union, vocab, d=args.dim, window=args.window,
                             negatives=args.negatives, epochs=args.epochs,
                             seed=args.seed, workers=args.workers)
    save_embeddings(table, vocab, args.out)
    print(f"trained {args.dim}-d embeddings for "
          f"{int(table.covered.sum())}/{len(vocab)} tokens -> {args.out}")
    return 0


def cmd_match(args):
    lexer_config = _lexer_config(args)
    src = tokenize_corpus(_load_corpus(args.src, args.src_lang),
                          lexer_config)
    tgt = tokenize_corpus(_load_corpus(args.tgt, args.tgt_lang),
                          lexer_config)
    if args.max_tokens:
        src = filter_by_token_count(src, args.max_tokens)
        tgt = filter_by_token_count(tgt, args.max_tokens)
    vocab = build_vocabulary(list(src) + list(tgt))

    delta = args.delta if args.delta is not None \
        else DEFAULT_DELTA[args.method]
    match_config = MatchConfig(method=args.method, delta=delta,
                               candidate_k=args.candidate_k,
                               iteration_order=args.order)
    embedding_params = None
    engine_config = None
    if args.method == "wmd":
        if args.embeddings:
            table = load_embeddings(args.embeddings, vocab)
            embedding_params = {"source": args.embeddings,
                                "coverage": table.coverage()}
        else:
            embedding_params = {"d": args.embed_dim, "window": 5,
                                "negatives": 5, "epochs": args.embed_epochs,
                                "seed": args.seed, "workers": 1}
            table = train_embeddings(list(src) + list(tgt), vocab,
                                     d=args.embed_dim,
                                     epochs=args.embed_epochs,
                                     seed=args.seed)
        retriever = WmdRetriever(tgt, vocab, table)
    else:
        engine_config = EngineConfig(
            method=args.method, k1=args.k1, b=args.b,
            lsi_rank=args.lsi_rank, lda_topics=args.lda_topics,
            lda_iterations=args.lda_iterations, seed=args.seed)
        retriever = fit(tgt, vocab, engine_config)

    manifest = build_manifest(
        lexer_config=lexer_config, engine_config=engine_config,
        match_config=match_config, embedding_params=embedding_params,
        source_corpus=src, target_corpus=tgt, seed=args.seed,
        extra={"max_tokens": args.max_tokens, "workers": args.workers})
    pc = create_parallel_corpus(src, tgt, retriever, match_config,
                                manifest=manifest, workers=args.workers)

    os.makedirs(args.out, exist_ok=True)
    pairs_path = os.path.join(args.out, "pairs.jsonl")
    export_pairs(pc, pairs_path, fmt="jsonl", source_corpus=src,
                 target_corpus=tgt)
    write_manifest(manifest, os.path.join(args.out, "manifest.json"))

    distances = [p.distance for p in pc.pairs]
    print(f"pairs: {len(pc.pairs)}")
    print(f"unmatched sources: {len(pc.unmatched_source_ids)}")
    if distances:
        qs = np.quantile(distances, [0.0, 0.25, 0.5, 0.75, 1.0])
        print("distance quantiles (min/q25/med/q75/max): "
              + " ".join(f"{q:.6g}" for q in qs))
    return 0


def cmd_eval(args):
    records = import_pairs(args.pairs)
    pc = _records_to_pc(records, unmatched=_sidecar_unmatched(args.pairs))
    if args.mode == "match":
        with open(args.truth, encoding="utf-8") as fh:
            truth = json.load(fh)
        report = match_accuracy(pc, truth)
    else:
        with open(args.labels, encoding="utf-8") as fh:
            labels = json.load(fh)
        report = pseudo_match_accuracy(pc, labels["source"],
                                       labels["target"])
    if args.out:
        report.write_json(args.out)
    if args.csv:
        report.write_csv(args.csv)
    print(f"{report.metric}: {report.accuracy:.4f} "
          f"({report.numerator}/{report.denominator})")
    return 0


def cmd_inject_noise(args):
    records = import_pairs(args.pairs)
    src_halves = [(r["src_id"], r["src_lang"], r["src_text"])
                  for r in records]
    tgt_halves = [(r["tgt_id"], r["tgt_lang"], r["tgt_text"])
                  for r in records]
    noisy, provenance = inject_noise(list(zip(src_halves, tgt_halves)),
                                     args.x, seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for i, ((sid, slang, stext), (tid, tlang, ttext)) in enumerate(noisy):
            moved = provenance[i] != i
            fh.write(json.dumps({
                "src_id": sid, "tgt_id": tid, "src_lang": slang,
                "tgt_lang": tlang,
                "distance": None if moved else records[i]["distance"],
                "src_text": stext, "tgt_text": ttext,
            }, ensure_ascii=False) + "\n")
    if args.provenance:
        with open(args.provenance, "w", encoding="utf-8") as fh:
            json.dump({str(i): j for i, j in provenance.items()}, fh)
    changed = sum(1 for i, j in provenance.items() if i != j)
    print(f"misaligned {changed}/{len(records)} pairs -> {args.out}")
    return 0


def cmd_stats(args):
    by_pair = {}
    for path in args.pairs:
        records = import_pairs(path)
        if not records:
            continue
        key = (records[0]["src_lang"], records[0]["tgt_lang"])
        by_pair[key] = _records_to_pc(records)
    stats = dataset_stats(by_pair)
    langs = stats["languages"]
    lines = ["src/tgt," + ",".join(langs)]
    for src in langs:
        row = [src]
        for tgt in langs:
            if tgt == src:
                row.append("x")
            else:
                count = stats["matrix"][src].get(tgt)
                row.append("" if count is None else str(count))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text, end="")
    return 0


def cmd_hist(args):
    pc = _records_to_pc(import_pairs(args.pairs))
    rows = similarity_histogram(pc, args.bins)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("bin_low,bin_high,count\n")
        for low, high, count in rows:
            fh.write(f"{low!r},{high!r},{count}\n")
    print(f"{sum(r[2] for r in rows)} pairs in {len(rows)} bins "
          f"-> {args.out}")
    return 0


def cmd_sample_test_set(args):
    corpus = ingest_directory(args.root, layout="problem_set",
                              language=args.language)
    psc = ProblemSetCorpus.from_corpora([corpus])
    exclude = []
    if args.exclude:
        with open(args.exclude, encoding="utf-8") as fh:
            exclude = [line.strip() for line in fh if line.strip()]
    docs = sample_test_split(psc, args.n_problems, args.per_problem,
                             args.seed, exclude=exclude,
                             language=args.language)
    with open(args.out, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps({"id": doc.id, "language": doc.language,
                                 "text": doc.text,
                                 "problem_set": doc.problem_set},
                                ensure_ascii=False) + "\n")
    print(f"sampled {len(docs)} documents -> {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="codematch",
                                     description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="directory tree -> records file")
    p.add_argument("--root", required=True)
    p.add_argument("--layout", choices=["flat", "problem_set"],
                   default=_env("layout", "flat"))
    p.add_argument("--language", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train-embeddings",
                       help="train skip-gram embeddings on two corpora")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--src-lang", default=_env("src-lang", ""))
    p.add_argument("--tgt-lang", default=_env("tgt-lang", ""))
    p.add_argument("--dim", type=int, default=int(_env("dim", 100)))
    p.add_argument("--window", type=int, default=int(_env("window", 5)))
    p.add_argument("--negatives", type=int,
                   default=int(_env("negatives", 5)))
    p.add_argument("--epochs", type=int, default=int(_env("epochs", 5)))
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    p.add_argument("--out", required=True)
    _add_lexer_flags(p)
    p.set_defaults(func=cmd_train_embeddings)

    p = sub.add_parser("match", help="run the pairing pipeline end to end")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--src-lang", default=_env("src-lang", ""))
    p.add_argument("--tgt-lang", default=_env("tgt-lang", ""))
    p.add_argument("--method", default=_env("method", "wmd"),
                   choices=["tfidf", "bm25", "lsi", "lda", "wmd"])
    p.add_argument("--delta", type=float,
                   default=(lambda v: float(v) if v is not None else None)(
                       _env("delta", None)))
    p.add_argument("--max-tokens", type=int,
                   default=int(_env("max-tokens", 512)))
    p.add_argument("--candidate-k", type=int,
                   default=int(_env("candidate-k", 10)))
    p.add_argument("--order", default=_env("order", "corpus_order"),
                   choices=["corpus_order", "global_greedy"])
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    p.add_argument("--k1", type=float, default=float(_env("k1", 1.5)))
    p.add_argument("--b", type=float, default=float(_env("b", 0.75)))
    p.add_argument("--lsi-rank", type=int,
                   default=int(_env("lsi-rank", 200)))
    p.add_argument("--lda-topics", type=int,
                   default=int(_env("lda-topics", 100)))
    p.add_argument("--lda-iterations", type=int,
                   default=int(_env("lda-iterations", 1000)))
    p.add_argument("--embeddings", default=_env("embeddings", None),
                   help="pre-trained vector file for wmd; trains on the "
                        "union when omitted")
    p.add_argument("--embed-dim", type=int,
                   default=int(_env("embed-dim", 100)))
    p.add_argument("--embed-epochs", type=int,
                   default=int(_env("embed-epochs", 5)))
    p.add_argument("--out", required=True, help="output directory")
    _add_lexer_flags(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="match / pseudo-match accuracy")
    p.add_argument("--pairs", required=True)
    p.add_argument("--mode", choices=["match", "pseudo"], default="match")
    p.add_argument("--truth", help="JSON mapping source_id -> target_id")
    p.add_argument("--labels",
                   help='JSON {"source": {id: label}, "target": {...}}')
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--csv", help="report CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inject-noise",
                       help="misalign a fraction of a pairs file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--out", required=True)
    p.add_argument("--provenance")
    p.set_defaults(func=cmd_inject_noise)

    p = sub.add_parser("stats", help="pair-count matrix over pairs files")
    p.add_argument("--pairs", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("hist", help="similarity-score histogram CSV")
    p.add_argument("--pairs", required=True)
    p.add_argument("--bins", type=int, default=int(_env("bins", 20)))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("sample-test-set",
                       help="held-out problems from a problem_set tree")
    p.add_argument("--root", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--n-problems", type=int,
                   default=int(_env("n-problems", 100)))
    p.add_argument("--per-problem", type=int,
                   default=int(_env("per-problem", 5)))
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--exclude", help="file with one problem label per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample_test_set)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # pipeline error contract: status 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Greedy unique-pairing of two monolingual corpora under a similarity
threshold.

The faithful mode iterates source documents in pinned id-sorted order
and gives each its best still-unclaimed candidate within the threshold;
output therefore depends on source order, which is exactly why corpora
are always id-sorted. ``global_greedy`` is a labeled extension that
sorts all candidate edges by distance first; it never produces a larger
total distance than the ordered scan.
"""

import json
from dataclasses import dataclass, field

from .vectorizer import UnrepresentableDocument

__all__ = ["MatchConfig", "MatchedPair", "ParallelCorpus",
           "get_similar_documents", "create_parallel_corpus",
           "export_pairs", "import_pairs"]

DEFAULT_DELTA = {"wmd": 3.0, "tfidf": 0.6, "lsi": 0.6, "lda": 0.6,
                 "bm25": -5.0}


@dataclass(frozen=True)
class MatchConfig:
    method: str = "wmd"
    delta: float | None = None       # None -> per-method default
    candidate_k: int = 10
    iteration_order: str = "corpus_order"  # or "global_greedy"

    def __post_init__(self):
        if self.candidate_k < 1:
            raise ValueError("candidate_k must be >= 1")
        if self.iteration_order not in ("corpus_order", "global_greedy"):
            raise ValueError(
                f"unknown iteration_order {self.iteration_order!r}")
        if self.delta is None:
            object.__setattr__(self, "delta", DEFAULT_DELTA[self.method])

    def to_dict(self):
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class MatchedPair:
    source_id: str
    target_id: str
    distance: float
    method: str


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple = ()                 # ascending by (distance, source_id)
    unmatched_source_ids: tuple = ()
    manifest: dict = field(default_factory=dict)


def get_similar_documents(doc, retriever, k):
    """Ranked candidate targets for one source document; an
    unrepresentable document yields an empty candidate list."""
    try:
        return retriever.top_k(doc, k)
    except UnrepresentableDocument:
        return []


def create_parallel_corpus(source, target, retriever, config,
                           manifest=None, workers=1):
    """Produce unique (source, target) pairs under the threshold.

    Candidate retrieval is a pure per-source query (parallelizable);
    the acceptance pass is a single sequential scan in pinned order.
    """
    method = getattr(retriever, "method", config.method)
    delta = config.delta

    source_docs = list(source)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            candidate_lists = list(pool.map(
                lambda d: get_similar_documents(d, retriever,
                                                config.candidate_k),
                source_docs))
    else:
        candidate_lists = [
            get_similar_documents(d, retriever, config.candidate_k)
            for d in source_docs]

    pairs = []
    used_targets = set()
    unmatched = []
    if config.iteration_order == "corpus_order":
        for doc, candidates in zip(source_docs, candidate_lists):
            for target_id, distance in candidates:
                if target_id not in used_targets and distance <= delta:
                    used_targets.add(target_id)
                    pairs.append(MatchedPair(doc.id, target_id,
                                             float(distance), method))
                    break
            else:
                unmatched.append(doc.id)
    else:  # global_greedy
        edges = []
        for doc, candidates in zip(source_docs, candidate_lists):
            for target_id, distance in candidates:
                if distance <= delta:
                    edges.append((float(distance), doc.id, target_id))
        edges.sort()
        used_sources = set()
        for distance, source_id, target_id in edges:
            if source_id in used_sources or target_id in used_targets:
                continue
            used_sources.add(source_id)
            used_targets.add(target_id)
            pairs.append(MatchedPair(source_id, target_id, distance,
                                     method))
        unmatched = [d.id for d in source_docs
                     if d.id not in used_sources]

    pairs.sort(key=lambda p: (p.distance, p.source_id))
    return ParallelCorpus(pairs=tuple(pairs),
                          unmatched_source_ids=tuple(unmatched),
                          manifest=dict(manifest or {}))


def export_pairs(pc, path, fmt="jsonl", source_corpus=None,
                 target_corpus=None):
    """Write pairs in distance order plus a manifest alongside.

    jsonl embeds texts/languages (requires both corpora); tsv is ids and
    distance only.
    """
    if fmt == "jsonl":
        if source_corpus is None or target_corpus is None:
            raise ValueError("jsonl export needs source and target corpora")
        src = {d.id: d for d in source_corpus}
        tgt = {d.id: d for d in target_corpus}
        with open(path, "w", encoding="utf-8") as fh:
            for p in pc.pairs:
                fh.write(json.dumps({
                    "src_id": p.source_id,
                    "tgt_id": p.target_id,
                    "src_lang": src[p.source_id].language,
                    "tgt_lang": tgt[p.target_id].language,
                    "distance": p.distance,
                    "src_text": src[p.source_id].text,
                    "tgt_text": tgt[p.target_id].text,
                }, ensure_ascii=False) + "\n")
    elif fmt == "tsv":
        with open(path, "w", encoding="utf-8") as fh:
            for p in pc.pairs:
                fh.write(f"{p.source_id}\t{p.target_id}\t{p.distance!r}\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")

    manifest = dict(pc.manifest)
    manifest["unmatched_source_ids"] = list(pc.unmatched_source_ids)
    manifest["pair_count"] = len(pc.pairs)
    with open(str(path) + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def import_pairs(path):
    """Read a jsonl pairs file back into record dicts (sorted order is
    preserved from export)."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records

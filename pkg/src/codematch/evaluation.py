"""Measurement suite: match accuracy, pseudo-match accuracy, controlled
noise injection, similarity histograms, dataset statistics, and
held-out test-set sampling.

Unmatched source documents count as incorrect in both accuracy metrics
(the denominator is all sources); the matched-only alternative inflates
accuracy and is rejected.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GroundTruthAlignment", "EvaluationReport", "match_accuracy",
           "pseudo_match_accuracy", "inject_noise", "invert_noise",
           "similarity_histogram", "dataset_stats", "sample_test_split"]


@dataclass(frozen=True)
class GroundTruthAlignment:
    mapping: dict  # source_id -> true target_id

    def __post_init__(self):
        targets = list(self.mapping.values())
        if len(set(targets)) != len(targets):
            raise ValueError("ground truth must be injective")

    def __len__(self):
        return len(self.mapping)


@dataclass(frozen=True)
class EvaluationReport:
    metric: str
    numerator: int
    denominator: int
    verdicts: tuple = ()             # per-pair diagnostic records
    histogram: tuple = ()            # (bin_low, bin_high, count) rows

    @property
    def accuracy(self):
        return self.numerator / self.denominator if self.denominator else 0.0

    def to_dict(self):
        return {"metric": self.metric, "accuracy": self.accuracy,
                "numerator": self.numerator,
                "denominator": self.denominator,
                "verdicts": list(self.verdicts),
                "histogram": [list(r) for r in self.histogram]}

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("metric,value,n\n")
            fh.write(f"{self.metric},{self.accuracy!r},{self.denominator}\n")


def match_accuracy(pc, truth):
    """Fraction of sources matched to their ground-truth counterpart;
    unmatched sources count as wrong."""
    mapping = truth.mapping if isinstance(truth, GroundTruthAlignment) \
        else truth
    verdicts = []
    numerator = 0
    for p in pc.pairs:
        if p.source_id not in mapping:
            raise ValueError(f"source {p.source_id!r} absent from truth")
        correct = mapping[p.source_id] == p.target_id
        numerator += correct
        verdicts.append({"source_id": p.source_id, "target_id": p.target_id,
                         "expected": mapping[p.source_id],
                         "distance": p.distance, "correct": correct})
    for sid in pc.unmatched_source_ids:
        if sid not in mapping:
            raise ValueError(f"source {sid!r} absent from truth")
        verdicts.append({"source_id": sid, "target_id": None,
                         "expected": mapping[sid], "distance": None,
                         "correct": False})
    return EvaluationReport(metric="match_accuracy", numerator=numerator,
                            denominator=len(mapping),
                            verdicts=tuple(verdicts))


def pseudo_match_accuracy(pc, source_labels, target_labels):
    """Fraction of sources whose match solves the same problem set;
    unmatched sources count as wrong."""
    verdicts = []
    numerator = 0
    for p in pc.pairs:
        if p.source_id not in source_labels:
            raise ValueError(f"unlabeled source {p.source_id!r}")
        if p.target_id not in target_labels:
            raise ValueError(f"unlabeled target {p.target_id!r}")
        correct = source_labels[p.source_id] == target_labels[p.target_id]
        numerator += correct
        verdicts.append({"source_id": p.source_id, "target_id": p.target_id,
                         "distance": p.distance, "correct": correct})
    denominator = len(pc.pairs) + len(pc.unmatched_source_ids)
    return EvaluationReport(metric="pseudo_match_accuracy",
                            numerator=numerator, denominator=denominator,
                            verdicts=tuple(verdicts))


def inject_noise(pairs, x, seed=0):
    """Misalign round(x * |pairs|) pairs with a derangement of their
    target sides; the rest stay untouched.

    pairs: sequence of (source, target) two-tuples. Returns
    (noisy_pairs, provenance) where provenance[i] = j means output pair
    i carries the target of input pair j. A derangement (not an
    arbitrary permutation) guarantees every selected pair is actually
    wrong.
    """
    pairs = list(pairs)
    if not 0 <= x <= 1:
        raise ValueError("noise fraction must be in [0, 1]")
    n = len(pairs)
    m = int(round(x * n))
    if m == 0:
        return list(pairs), {i: i for i in range(n)}
    if n < 2:
        raise ValueError("need at least 2 pairs to inject noise")
    if m == 1:
        warnings.warn("a 1-element derangement is impossible; "
                      "expanding selection to 2 pairs")
        m = 2

    rng = np.random.default_rng(seed)
    selected = np.sort(rng.choice(n, size=m, replace=False))
    # rejection-sample a derangement of the selected positions
    while True:
        perm = rng.permutation(m)
        if not np.any(perm == np.arange(m)):
            break

    provenance = {i: i for i in range(n)}
    out = list(pairs)
    for local, pos in enumerate(selected):
        from_pos = int(selected[perm[local]])
        out[int(pos)] = (pairs[int(pos)][0], pairs[from_pos][1])
        provenance[int(pos)] = from_pos
    return out, provenance


def invert_noise(noisy_pairs, provenance):
    """Undo inject_noise via its provenance map (targets were moved,
    sources never were)."""
    targets = [None] * len(noisy_pairs)
    for i, j in provenance.items():
        targets[j] = noisy_pairs[i][1]
    return [(noisy_pairs[i][0], targets[i])
            for i in range(len(noisy_pairs))]


def similarity_histogram(pc, bins):
    """Equal-width bins over [0, max distance]; counts sum to |pairs|.
    Returns (bin_low, bin_high, count) rows."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    distances = [p.distance for p in pc.pairs]
    if not distances:
        return []
    top = max(max(distances), np.finfo(float).tiny)
    counts, edges = np.histogram(distances, bins=bins, range=(0.0, top))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i]))
            for i in range(bins)]


def dataset_stats(corpora_by_pair):
    """Source-language x target-language matrix of pair counts.

    corpora_by_pair: {(src_lang, tgt_lang): ParallelCorpus}. Diagonal
    cells are absent (None).
    """
    langs = sorted({l for pair in corpora_by_pair for l in pair})
    matrix = {src: {tgt: None for tgt in langs if tgt != src}
              for src in langs}
    for (src, tgt), pc in corpora_by_pair.items():
        if src == tgt:
            raise ValueError("diagonal language pair")
        matrix[src][tgt] = len(pc.pairs)
    return {"languages": langs, "matrix": matrix}


def sample_test_split(psc, n_problems, per_problem, seed, exclude=(),
                      language=None):
    """Seeded held-out sample: n_problems problems disjoint from
    ``exclude``, then per_problem distinct documents from each."""
    exclude = set(exclude)
    eligible = []
    for label in psc.labels():
        if label in exclude:
            continue
        slices = psc.problems[label]
        if language is not None and language not in slices:
            continue
        eligible.append(label)
    if len(eligible) < n_problems:
        raise ValueError(
            f"only {len(eligible)} eligible problems, need {n_problems}")

    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(eligible, size=n_problems, replace=False)
                    .tolist())
    sample = []
    for label in chosen:
        slices = psc.problems[label]
        docs = []
        for lang in sorted(slices):
            if language is None or lang == language:
                docs.extend(slices[lang].documents)
        take = min(per_problem, len(docs))
        if take < per_problem:
            warnings.warn(f"problem {label!r} has only {len(docs)} "
                          f"documents, wanted {per_problem}")
        picks = rng.choice(len(docs), size=take, replace=False)
        sample.extend(docs[i] for i in sorted(picks.tolist()))
    return sample

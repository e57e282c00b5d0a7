"""Word Mover's Distance: exact transport distance between documents,
lower bounds, and pruned top-k retrieval.

Pruning (centroid bound ordering + relaxed-WMD screening) never changes
the result: both bounds are provable underestimates of the exact
distance, so the k nearest targets are exactly those of an exhaustive
scan.
"""

import heapq

import numpy as np

from .emd import TransportProblem, emd_solve
from .vectorizer import UnrepresentableDocument, nbow

__all__ = ["wmd_distance", "wcd_lower_bound", "rwmd_lower_bound",
           "WmdRetriever", "wmd_top_k", "doc_signature"]


def _covered(vec, table):
    """Restrict an nBOW vector to embedding-covered tokens and
    renormalize. Errors when nothing is covered."""
    keep = table.covered[vec.indices]
    idx = vec.indices[keep]
    if len(idx) == 0:
        raise UnrepresentableDocument(
            "document has no embedding-covered tokens")
    mass = vec.weights[keep]
    return idx, mass / mass.sum()


def doc_signature(doc, vocab, table):
    """(token indices, masses, centroid) of a document's covered nBOW."""
    idx, mass = _covered(nbow(doc, vocab), table)
    centroid = mass @ table.vectors[idx]
    return idx, mass, centroid


def _cost_matrix(table, idx_a, idx_b):
    xa = table.vectors[idx_a]
    xb = table.vectors[idx_b]
    sq = (np.sum(xa * xa, axis=1)[:, None] + np.sum(xb * xb, axis=1)[None, :]
          - 2.0 * (xa @ xb.T))
    cost = np.sqrt(np.maximum(sq, 0.0))
    # the expansion above leaves ~1e-8 cancellation noise where both
    # sides are the same token; the true distance there is exactly 0
    cost[idx_a[:, None] == idx_b[None, :]] = 0.0
    return cost


def wmd_distance(a, b, table):
    """Exact WMD between two nBOW vectors under Euclidean ground cost."""
    idx_a, mass_a = _covered(a, table)
    idx_b, mass_b = _covered(b, table)
    cost = _cost_matrix(table, idx_a, idx_b)
    plan = emd_solve(TransportProblem(mass_a, mass_b, cost))
    return plan.objective


def wcd_lower_bound(a, b, table):
    """Word centroid distance: ||sum_i d_i x_i - sum_j d'_j x_j||_2.
    Always <= wmd_distance."""
    idx_a, mass_a = _covered(a, table)
    idx_b, mass_b = _covered(b, table)
    ca = mass_a @ table.vectors[idx_a]
    cb = mass_b @ table.vectors[idx_b]
    return float(np.linalg.norm(ca - cb))


def rwmd_lower_bound(a, b, table):
    """Relaxed WMD: drop one marginal constraint so every token ships
    all its mass to the nearest counterpart; max of the two one-sided
    relaxations. Always <= wmd_distance."""
    idx_a, mass_a = _covered(a, table)
    idx_b, mass_b = _covered(b, table)
    cost = _cost_matrix(table, idx_a, idx_b)
    one = float(mass_a @ cost.min(axis=1))
    two = float(mass_b @ cost.min(axis=0))
    return max(one, two)


class WmdRetriever:
    """Fitted WMD side of the engine interface: exact k-nearest targets
    by prefetch-and-prune.

    Targets that are unrepresentable (no covered tokens) are skipped at
    fit time and counted in ``skipped_target_ids``.
    """

    method = "wmd"

    def __init__(self, target_corpus, vocab, table):
        self.vocab = vocab
        self.table = table
        self.doc_ids = []
        self.skipped_target_ids = []
        sigs = []
        for doc in target_corpus:
            try:
                sigs.append(doc_signature(doc, vocab, table))
            except UnrepresentableDocument:
                self.skipped_target_ids.append(doc.id)
                continue
            self.doc_ids.append(doc.id)
        self._idx = [s[0] for s in sigs]
        self._mass = [s[1] for s in sigs]
        self._centroids = (np.vstack([s[2] for s in sigs])
                           if sigs else np.zeros((0, table.dimension)))

    def _exact(self, q_idx, q_mass, t):
        cost = _cost_matrix(self.table, q_idx, self._idx[t])
        return emd_solve(
            TransportProblem(q_mass, self._mass[t], cost)).objective

    def _rwmd(self, q_idx, q_mass, t):
        cost = _cost_matrix(self.table, q_idx, self._idx[t])
        return max(float(q_mass @ cost.min(axis=1)),
                   float(self._mass[t] @ cost.min(axis=0)))

    def top_k(self, query_doc, k):
        """Exactly the k nearest targets by WMD, ascending, ties broken
        by target id."""
        if k < 1:
            raise ValueError("k must be positive")
        q_idx, q_mass, q_cent = doc_signature(query_doc, self.vocab,
                                              self.table)
        n = len(self.doc_ids)
        if n == 0:
            return []
        wcd = np.linalg.norm(self._centroids - q_cent, axis=1)
        order = sorted(range(n), key=lambda t: (wcd[t], self.doc_ids[t]))

        # exact-solve the first k candidates, then screen the rest
        best = []  # max-heap of (-dist, rev_id, t) keeping the k best
        def push(dist, t):
            item = (-dist, _RevStr(self.doc_ids[t]), t)
            if len(best) < k:
                heapq.heappush(best, item)
            elif item > best[0]:
                heapq.heapreplace(best, item)

        for rank, t in enumerate(order):
            if rank < k:
                push(self._exact(q_idx, q_mass, t), t)
                continue
            kth = -best[0][0]
            if len(best) == k and wcd[t] > kth:
                break  # wcd-sorted: everything later is also out
            if len(best) == k and self._rwmd(q_idx, q_mass, t) > kth:
                continue
            push(self._exact(q_idx, q_mass, t), t)

        out = [(self.doc_ids[t], -negd) for negd, _, t in best]
        out.sort(key=lambda p: (p[1], p[0]))
        return out


class _RevStr(str):
    """String with reversed ordering, so a max-heap on (-dist, id)
    prefers smaller ids at equal distance."""
    def __lt__(self, other):
        return str.__gt__(self, other)
    def __gt__(self, other):
        return str.__lt__(self, other)


def wmd_top_k(query_doc, targets, vocab, table, k):
    """One-shot exact k-nearest-targets query (fits a retriever)."""
    return WmdRetriever(targets, vocab, table).top_k(query_doc, k)

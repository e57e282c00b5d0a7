"""Skip-gram negative-sampling training loop.

Deterministic given a single worker: randomness comes from an explicit
MINSTD LCG threaded through the loop, so the numba and pure-Python
backends produce bit-identical tables.
"""

import math

import numpy as np

from .accel import jit_kernel

_LCG_M = 2147483647
_LCG_A = 48271


@jit_kernel(nogil=True)
def _train_kernel(data, offsets, win, wout, neg_table, window, negatives,
                  epochs, lr_start, lr_min, seed):
    """Train in place over documents data[offsets[d]:offsets[d+1]]."""
    dim = win.shape[1]
    state = np.int64(seed % (_LCG_M - 1) + 1)
    total = np.int64(epochs) * np.int64(len(data))
    processed = np.int64(0)
    grad = np.empty(dim, dtype=np.float64)
    tlen = len(neg_table)

    for _epoch in range(epochs):
        for d in range(len(offsets) - 1):
            start = offsets[d]
            end = offsets[d + 1]
            for pos in range(start, end):
                center = data[pos]
                frac = processed / total
                lr = lr_start + (lr_min - lr_start) * frac
                processed += 1

                state = state * _LCG_A % _LCG_M
                b = 1 + state % window
                lo = max(start, pos - b)
                hi = min(end, pos + b + 1)
                for cpos in range(lo, hi):
                    if cpos == pos:
                        continue
                    context = data[cpos]
                    for g in range(dim):
                        grad[g] = 0.0
                    for neg in range(negatives + 1):
                        if neg == 0:
                            target = context
                            label = 1.0
                        else:
                            state = state * _LCG_A % _LCG_M
                            target = neg_table[state % tlen]
                            if target == context:
                                continue
                            label = 0.0
                        dot = 0.0
                        for g in range(dim):
                            dot += win[center, g] * wout[target, g]
                        if dot > 6.0:
                            pred = 1.0
                        elif dot < -6.0:
                            pred = 0.0
                        else:
                            pred = 1.0 / (1.0 + math.exp(-dot))
                        delta = lr * (label - pred)
                        for g in range(dim):
                            grad[g] += delta * wout[target, g]
                            wout[target, g] += delta * win[center, g]
                    for g in range(dim):
                        win[center, g] += grad[g]

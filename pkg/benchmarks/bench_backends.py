"""Compare the numba-compiled kernels against their pure-Python
fallbacks on the three hot loops (transport simplex, Gibbs sweeps,
skip-gram training).

Run: python benchmarks/bench_backends.py [--repeat 3] [--scale 1.0]
Requires the numba extra; both paths compute identical results, so the
table is purely about speed.
"""

import argparse
import time

import numpy as np

from codematch.accel import NUMBA_ENABLED
from codematch import emd_kernels, lda_kernels, sgns_kernels


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_emd(rng, scale):
    m = n = int(60 * scale)
    total = 2 ** 40
    supply = rng.multinomial(total, np.ones(m) / m).astype(np.int64)
    demand = rng.multinomial(total, np.ones(n) / n).astype(np.int64)
    cost = rng.random((m, n))
    return (emd_kernels._solve_kernel, (supply, demand, cost))


def bench_lda(rng, scale):
    n_tokens = int(40000 * scale)
    n_docs, n_vocab, n_topics = 200, 800, 20
    words = rng.integers(0, n_vocab, size=n_tokens).astype(np.int64)
    doc_of = np.sort(rng.integers(0, n_docs, size=n_tokens)).astype(np.int64)
    return (lda_kernels._gibbs_fit,
            (words, doc_of, n_docs, n_topics, n_vocab, 0.5, 0.01, 20, 0))


def bench_sgns(rng, scale):
    n_tokens = int(50000 * scale)
    vocab, d = 500, 32
    data = rng.integers(0, vocab, size=n_tokens).astype(np.int64)
    offsets = np.arange(0, n_tokens + 1, 100, dtype=np.int64)
    if offsets[-1] != n_tokens:
        offsets = np.append(offsets, n_tokens)
    neg_table = rng.integers(0, vocab, size=1 << 16).astype(np.int64)

    def run(kernel):
        win = (rng.random((vocab, d)) - 0.5) / d
        wout = np.zeros((vocab, d))
        kernel(data, offsets, win, wout, neg_table, 5, 5, 1, 0.025,
               1e-4, 0)

    return (run, ())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scale", type=float, default=1.0,
                        help="problem-size multiplier")
    args = parser.parse_args()

    if not NUMBA_ENABLED:
        parser.error("numba backend is inactive (not installed, or "
                     "CODEMATCH_NO_NUMBA is set); nothing to compare")

    rng = np.random.default_rng(0)
    cases = [("emd network simplex", *bench_emd(rng, args.scale)),
             ("lda gibbs sweeps", *bench_lda(rng, args.scale)),
             ("sgns training epoch", *bench_sgns(rng, args.scale))]

    print(f"{'kernel':<22} {'numba (s)':>10} {'python (s)':>11} "
          f"{'speedup':>8}")
    for name, fn, fn_args in cases:
        if hasattr(fn, "py_func"):
            jit_fn, py_fn = fn, fn.py_func
        else:  # wrapper closure around the kernel
            jit_fn = lambda: fn(sgns_kernels._train_kernel)
            py_fn = lambda: fn(sgns_kernels._train_kernel.py_func)
            fn_args = ()
        jit_fn(*fn_args)  # warm the JIT cache outside the timer
        t_jit, _ = timed(jit_fn, *fn_args, repeat=args.repeat)
        t_py, _ = timed(py_fn, *fn_args, repeat=max(1, args.repeat // 3))
        print(f"{name:<22} {t_jit:>10.4f} {t_py:>11.4f} "
              f"{t_py / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()

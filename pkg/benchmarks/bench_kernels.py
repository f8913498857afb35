"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 300 1000 3000] [--repeat 3]

Each kernel is called once per backend before timing so JIT compilation is
excluded. Agglomeration results are compared for exact equality.
"""

import argparse
import time

import numpy as np

from semaxes.kernels import numba_impl, numpy_impl


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def similarity(rng, n):
    # a realistic shape: rows of 10 noisy copies of n/10 sources
    base = rng.laplace(size=(max(n // 10, 1), 2000))
    rows = np.repeat(base, 10, axis=0)[:n] + 0.3 * rng.normal(size=(n, 2000))
    U = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    S = np.abs(U @ U.T)
    S = np.triu(S, 1)
    S = S + S.T
    np.fill_diagonal(S, 1.0)
    return S


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[300, 1000, 3000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if numba_impl is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    # compile
    small = similarity(rng, 20)
    for impl in (numba_impl, numpy_impl):
        impl.agglomerate(small, 2, 0)
        impl.label_block_sums(small, np.zeros(20, dtype=np.int64), 1)
        impl.contrast(rng.normal(size=(2, 10)), 0)

    print(f"{'kernel':<18}{'size':>8}{'numpy s':>12}{'numba s':>12}{'speedup':>10}  equal")
    for n in args.sizes:
        S = similarity(rng, n)
        target = max(n // 10, 1)
        t_np, a = best_of(lambda: numpy_impl.agglomerate(S, target, 0), args.repeat)
        t_nb, b = best_of(lambda: numba_impl.agglomerate(S, target, 0), args.repeat)
        same = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"{'agglomerate':<18}{n:>8}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}  {same}")

        labels = a[0]
        k = int(labels.max()) + 1
        t_np, a = best_of(lambda: numpy_impl.label_block_sums(S, labels, k), args.repeat)
        t_nb, b = best_of(lambda: numba_impl.label_block_sums(S, labels, k), args.repeat)
        close = np.allclose(a, b, rtol=1e-12)
        print(f"{'label_block_sums':<18}{n:>8}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}  {close}")

        Y = rng.normal(size=(min(n, 300), 50000))
        for kind, name in enumerate(("logcosh", "exp", "cube")):
            t_np, a = best_of(lambda: numpy_impl.contrast(Y, kind), args.repeat)
            t_nb, b = best_of(lambda: numba_impl.contrast(Y, kind), args.repeat)
            close = np.allclose(a[0], b[0], rtol=1e-12) and np.allclose(a[1], b[1], rtol=1e-12)
            print(f"{'contrast/' + name:<18}{Y.shape[0]:>8}{t_np:>12.4f}{t_nb:>12.4f}"
                  f"{t_np / t_nb:>10.1f}  {close}")


if __name__ == "__main__":
    main()

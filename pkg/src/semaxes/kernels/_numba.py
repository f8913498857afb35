"""numba-compiled twins of the kernels in ``_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True)
def _row_best(D, active, i, best_val, best_col):
    n = D.shape[0]
    bv = -np.inf
    bc = -1
    for c in range(i + 1, n):
        if active[c] and (bc < 0 or D[i, c] > bv):
            bv = D[i, c]
            bc = c
    best_val[i] = bv
    best_col[i] = bc


@njit(cache=True)
def agglomerate(sim, target, linkage):
    n = sim.shape[0]
    D = sim.astype(np.float64).copy()
    size = np.ones(n, dtype=np.float64)
    active = np.ones(n, dtype=np.bool_)
    labels = np.arange(n).astype(np.int64)
    best_val = np.full(n, -np.inf)
    best_col = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        _row_best(D, active, i, best_val, best_col)

    n_merges = n - target
    merges = np.empty((n_merges, 2), dtype=np.int64)
    heights = np.empty(n_merges, dtype=np.float64)
    for step in range(n_merges):
        i = -1
        bv = -np.inf
        for r in range(n):
            if active[r] and best_col[r] >= 0 and (i < 0 or best_val[r] > bv):
                bv = best_val[r]
                i = r
        j = best_col[i]
        merges[step, 0] = i
        merges[step, 1] = j
        heights[step] = bv

        si = size[i]
        sj = size[j]
        for k in range(n):
            if active[k] and k != i and k != j:
                a = D[i, k]
                b = D[j, k]
                if linkage == 0:
                    v = (si * a + sj * b) / (si + sj)
                elif linkage == 1:
                    v = a if a > b else b
                else:
                    v = a if a < b else b
                D[i, k] = v
                D[k, i] = v
        size[i] = si + sj
        active[j] = False
        for c in range(n):
            if labels[c] == j:
                labels[c] = i

        _row_best(D, active, i, best_val, best_col)
        for k in range(i):
            if not active[k]:
                continue
            if best_col[k] == i or best_col[k] == j:
                _row_best(D, active, k, best_val, best_col)
            else:
                v = D[k, i]
                if v > best_val[k] or (v == best_val[k] and i < best_col[k]):
                    best_val[k] = v
                    best_col[k] = i
        for k in range(i + 1, j):
            if active[k] and best_col[k] == j:
                _row_best(D, active, k, best_val, best_col)
    return labels, merges, heights


@njit(cache=True)
def label_block_sums(sim, labels, k):
    n = sim.shape[0]
    B = np.zeros((k, k), dtype=np.float64)
    for i in range(n):
        li = labels[i]
        for j in range(n):
            B[li, labels[j]] += sim[i, j]
    return B


@njit(cache=True)
def contrast(Y, kind):
    d, n = Y.shape
    g = np.empty_like(Y)
    gp = np.empty(d, dtype=np.float64)
    for r in range(d):
        acc = 0.0
        for c in range(n):
            y = Y[r, c]
            if kind == 0:
                t = np.tanh(y)
                g[r, c] = t
                acc += 1.0 - t * t
            elif kind == 1:
                e = np.exp(-0.5 * y * y)
                g[r, c] = y * e
                acc += (1.0 - y * y) * e
            else:
                g[r, c] = y * y * y
                acc += 3.0 * y * y
        gp[r] = acc / n
    return g, gp

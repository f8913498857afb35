"""Pure-numpy implementations of the hot kernels.

Every function here has a twin in ``_numba`` with an identical signature.
``agglomerate`` performs the same floating-point operations in the same order
on both paths, so merges and labels agree exactly; reductions elsewhere may
differ in the last ulp because numpy sums pairwise.
"""

import numpy as np


def _row_best(D, active, i, best_val, best_col):
    n = D.shape[0]
    if i + 1 >= n:
        best_val[i] = -np.inf
        best_col[i] = -1
        return
    mask = active[i + 1:]
    if not mask.any():
        best_val[i] = -np.inf
        best_col[i] = -1
        return
    vals = np.where(mask, D[i, i + 1:], -np.inf)
    k = int(np.argmax(vals))
    best_val[i] = vals[k]
    best_col[i] = i + 1 + k


def agglomerate(sim, target, linkage):
    """Merge singletons by maximal linkage similarity until ``target`` remain.

    Returns ``(labels, merges, heights)``. ``labels[c]`` is the surviving row
    index of the cluster holding component ``c`` (always its smallest member).
    Ties go to the lexicographically smallest ``(row, col)`` pair.
    """
    n = sim.shape[0]
    D = np.array(sim, dtype=np.float64, copy=True)
    size = np.ones(n, dtype=np.float64)
    active = np.ones(n, dtype=np.bool_)
    labels = np.arange(n, dtype=np.int64)
    best_val = np.full(n, -np.inf)
    best_col = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        _row_best(D, active, i, best_val, best_col)

    n_merges = n - target
    merges = np.empty((n_merges, 2), dtype=np.int64)
    heights = np.empty(n_merges, dtype=np.float64)
    for step in range(n_merges):
        cand = np.where(active & (best_col >= 0), best_val, -np.inf)
        i = int(np.argmax(cand))
        j = int(best_col[i])
        merges[step, 0] = i
        merges[step, 1] = j
        heights[step] = best_val[i]

        others = active.copy()
        others[i] = False
        others[j] = False
        a = D[i]
        b = D[j]
        if linkage == 0:
            new = (size[i] * a + size[j] * b) / (size[i] + size[j])
        elif linkage == 1:
            new = np.maximum(a, b)
        else:
            new = np.minimum(a, b)
        D[i, others] = new[others]
        D[others, i] = new[others]
        size[i] += size[j]
        active[j] = False
        labels[labels == j] = i

        _row_best(D, active, i, best_val, best_col)
        ks = np.nonzero(active[:i])[0]
        stale = (best_col[ks] == i) | (best_col[ks] == j)
        for k in ks[stale]:
            _row_best(D, active, k, best_val, best_col)
        rest = ks[~stale]
        v = D[rest, i]
        upd = (v > best_val[rest]) | ((v == best_val[rest]) & (i < best_col[rest]))
        best_val[rest[upd]] = v[upd]
        best_col[rest[upd]] = i
        mid = np.arange(i + 1, j)
        mid = mid[active[mid] & (best_col[mid] == j)]
        for k in mid:
            _row_best(D, active, k, best_val, best_col)
    return labels, merges, heights


def label_block_sums(sim, labels, k):
    """``B[a, b]`` = sum of ``sim[i, j]`` over ``labels[i] == a``, ``labels[j] == b``."""
    n = sim.shape[0]
    onehot = np.zeros((n, k), dtype=np.float64)
    onehot[np.arange(n), labels] = 1.0
    return onehot.T @ sim @ onehot


def contrast(Y, kind):
    """FastICA nonlinearity: returns ``g(Y)`` and the row means of ``g'(Y)``."""
    if kind == 0:
        g = np.tanh(Y)
        gp = (1.0 - g * g).mean(axis=1)
    elif kind == 1:
        e = np.exp(-0.5 * Y * Y)
        g = Y * e
        gp = ((1.0 - Y * Y) * e).mean(axis=1)
    else:
        g = Y * Y * Y
        gp = (3.0 * Y * Y).mean(axis=1)
    return g, gp

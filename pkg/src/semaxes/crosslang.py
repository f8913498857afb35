"""Cross-language matching of axes with multiple-testing control.

Axes from two languages are compared on the translation-aligned leading
columns only. Under the null hypothesis that two axes are independent, the
squared correlation follows Beta(1/2, (n - 2)/2), which gives exact p-values.
Bonferroni control of the family-wise false positive rate decides which pairs
may found a cluster; Benjamini-Hochberg control of the false discovery rate
decides which further axes may join one.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import special

from .errors import DataError


@dataclass
class CrossSimilarity:
    lang_a: str
    lang_b: str
    matrix: np.ndarray
    n_common: int


@dataclass
class SignificancePolicy:
    alpha_fd: float
    alpha_fp: float
    n_tests: int
    corrected_fd: float
    corrected_fp: float
    sim_threshold_fd: float
    sim_threshold_fp: float
    n_common: int
    n_tests_convention: str = "pairs"
    n_fdr_rejections: int = 0


@dataclass
class CrossLanguageCluster:
    members: list[tuple[str, int]]
    sigma: dict[tuple[tuple[str, int], tuple[str, int]], float] = field(default_factory=dict)
    pvalues: dict[tuple[tuple[str, int], tuple[str, int]], float] = field(default_factory=dict)

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(lang for lang, _ in self.members)


def cross_similarity(S_a, S_b, n_common: int, lang_a: str = "a", lang_b: str = "b") -> CrossSimilarity:
    """Absolute cosine between every row of ``S_a`` and of ``S_b`` restricted
    to the first ``n_common`` columns."""
    if n_common < 3:
        raise ValueError("n_common must be at least 3")
    S_a = np.asarray(S_a, dtype=np.float64)
    S_b = np.asarray(S_b, dtype=np.float64)
    if S_a.shape[1] < n_common or S_b.shape[1] < n_common:
        raise DataError(f"axes have fewer than n_common={n_common} columns")
    A = S_a[:, :n_common]
    B = S_b[:, :n_common]
    na = np.sqrt(np.einsum("ij,ij->i", A, A))
    nb = np.sqrt(np.einsum("ij,ij->i", B, B))
    if np.any(na == 0) or np.any(nb == 0):
        raise DataError("an axis is identically zero on the aligned columns")
    M = np.abs((A / na[:, None]) @ (B / nb[:, None]).T)
    np.clip(M, 0.0, 1.0, out=M)
    return CrossSimilarity(lang_a=lang_a, lang_b=lang_b, matrix=M, n_common=n_common)


def correlation_pvalue(sigma, n: int):
    """P(|R| >= sigma) for the correlation of independent samples of size ``n``.

    Uses R**2 ~ Beta(1/2, (n - 2)/2). Accepts scalars or arrays.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    s = np.asarray(sigma, dtype=np.float64)
    if np.any((s < 0) | (s > 1)) or np.any(np.isnan(s)):
        raise ValueError("sigma must lie in [0, 1]")
    p = special.betaincc(0.5, 0.5 * (n - 2), s * s)
    return float(p) if p.ndim == 0 else p


def similarity_threshold(alpha: float, n: int, tol: float = 1e-12) -> float:
    """Smallest similarity whose p-value does not exceed ``alpha``, by bisection.

    The returned value ``t`` satisfies ``correlation_pvalue(t, n) <= alpha``
    and ``correlation_pvalue(t - tol, n) > alpha``.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if alpha >= 1:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if correlation_pvalue(mid, n) <= alpha:
            hi = mid
        else:
            lo = mid
    return hi


def bonferroni_policy(alpha_fp: float, n_tests: int) -> float:
    if n_tests < 1:
        raise ValueError("n_tests must be >= 1")
    return alpha_fp / n_tests


def bh_fdr_select(pvals, alpha_fd: float):
    """Benjamini-Hochberg step-up.

    Returns ``(rejected, threshold)``: the sorted indices of rejected
    hypotheses and the largest rejected p-value (0.0 when nothing is rejected).
    """
    p = np.asarray(pvals, dtype=np.float64).ravel()
    if p.size == 0:
        return np.empty(0, dtype=np.int64), 0.0
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    order = np.argsort(p, kind="stable")
    m = p.size
    ok = np.nonzero(p[order] <= alpha_fd * np.arange(1, m + 1) / m)[0]
    if ok.size == 0:
        return np.empty(0, dtype=np.int64), 0.0
    k = ok[-1] + 1
    return np.sort(order[:k]), float(p[order[k - 1]])


def count_tests(sims: Sequence[CrossSimilarity]) -> int:
    """Default Bonferroni family size: every cross-language axis pair."""
    return int(sum(s.matrix.size for s in sims))


def make_policy(sims: Sequence[CrossSimilarity], alpha_fd: float = 0.01, alpha_fp: float = 0.01,
                n_tests: int | None = None) -> SignificancePolicy:
    """Corrected levels and similarity cutoffs for a set of language pairs.

    The FDR level is the Benjamini-Hochberg critical value ``k * alpha_fd / m``
    over all ``m`` cross-language pairs, ``k`` being the number rejected (with
    ``k = 1`` standing in when nothing is rejected, which yields a cutoff no
    observed pair reaches).
    """
    if not sims:
        raise ValueError("no similarity matrices given")
    n_common = {s.n_common for s in sims}
    if len(n_common) != 1:
        raise DataError(f"language pairs disagree on n_common: {sorted(n_common)}")
    n_common = n_common.pop()
    convention = "pairs"
    if n_tests is None:
        n_tests = max(count_tests(sims), 1)
    else:
        convention = "explicit"
    corrected_fp = bonferroni_policy(alpha_fp, n_tests)

    pv = np.concatenate([correlation_pvalue(s.matrix, n_common).ravel() for s in sims])
    rejected, _ = bh_fdr_select(pv, alpha_fd)
    m = max(pv.size, 1)
    corrected_fd = alpha_fd * max(rejected.size, 1) / m

    return SignificancePolicy(
        alpha_fd=alpha_fd,
        alpha_fp=alpha_fp,
        n_tests=n_tests,
        corrected_fd=corrected_fd,
        corrected_fp=corrected_fp,
        sim_threshold_fd=similarity_threshold(corrected_fd, n_common),
        sim_threshold_fp=similarity_threshold(corrected_fp, n_common),
        n_common=n_common,
        n_tests_convention=convention,
        n_fdr_rejections=int(rejected.size),
    )


def cluster_across_languages(sims: Sequence[CrossSimilarity],
                             policy: SignificancePolicy) -> list[CrossLanguageCluster]:
    """Average-linkage agglomeration of axes under significance constraints.

    A cluster never holds two axes of one language. Two unclustered axes may
    found a cluster only if their similarity passes the FPR cutoff; any merge
    that involves an existing cluster needs an average-linkage similarity
    passing the FDR cutoff. The admissible merge with the highest linkage goes
    first, ties by the smallest (language, index) members. Only clusters with
    at least two members are returned, ordered by their first member.
    """
    languages: list[str] = []
    sizes: dict[str, int] = {}
    for s in sims:
        for lang, size in ((s.lang_a, s.matrix.shape[0]), (s.lang_b, s.matrix.shape[1])):
            if lang in sizes and sizes[lang] != size:
                raise DataError(f"inconsistent axis count for {lang}")
            if lang not in sizes:
                sizes[lang] = size
                languages.append(lang)

    nodes = [(lang, i) for lang in languages for i in range(sizes[lang])]
    offset = dict(zip(languages, np.cumsum([0] + [sizes[l] for l in languages[:-1]])))
    n = len(nodes)
    lang_of = np.repeat(np.arange(len(languages)), [sizes[l] for l in languages])

    sigma = np.full((n, n), np.nan)
    for s in sims:
        a0, b0 = offset[s.lang_a], offset[s.lang_b]
        sigma[a0:a0 + s.matrix.shape[0], b0:b0 + s.matrix.shape[1]] = s.matrix
        sigma[b0:b0 + s.matrix.shape[1], a0:a0 + s.matrix.shape[0]] = s.matrix.T

    # cluster ids are their smallest member; SUM holds summed cross similarities
    SUM = np.nan_to_num(sigma, nan=0.0)
    size = np.ones(n)
    mask = (np.int64(1) << lang_of.astype(np.int64))
    alive = np.ones(n, dtype=bool)
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    upper = np.triu(np.ones((n, n), dtype=bool), 1)

    while True:
        link = SUM / np.outer(size, size)
        ok = upper & np.outer(alive, alive) & ((mask[:, None] & mask[None, :]) == 0)
        founding = np.outer(size == 1, size == 1)
        cutoff = np.where(founding, policy.sim_threshold_fp, policy.sim_threshold_fd)
        ok &= link >= cutoff
        if not ok.any():
            break
        # argmax returns the first maximum in row-major order: lowest (a, b)
        a, b = np.unravel_index(np.argmax(np.where(ok, link, -np.inf)), link.shape)
        SUM[a, :] += SUM[b, :]
        SUM[:, a] += SUM[:, b]
        SUM[a, a] = 0.0
        size[a] += size[b]
        mask[a] |= mask[b]
        alive[b] = False
        members[a] = sorted(members[a] + members.pop(b))

    out = []
    for c in sorted(members):
        group = members[c]
        if len(group) < 2:
            continue
        cl = CrossLanguageCluster(members=[nodes[i] for i in group])
        for i, j in itertools.combinations(group, 2):
            key = (nodes[i], nodes[j])
            cl.sigma[key] = float(sigma[i, j])
            cl.pvalues[key] = correlation_pvalue(float(sigma[i, j]), policy.n_common)
        out.append(cl)
    return out


def summary(clusters: Sequence[CrossLanguageCluster], policy: SignificancePolicy,
            axis_counts: Mapping[str, int]) -> dict:
    """Counts and corrected levels in the layout of a detailed-results table."""
    total = int(sum(axis_counts.values()))
    clustered = int(sum(len(c.members) for c in clusters))
    combos: dict[str, int] = {}
    for c in clusters:
        key = "-".join(c.languages)
        combos[key] = combos.get(key, 0) + 1
    return {
        "Number of Clusters Found": len(clusters),
        "Number of Clustered Vectors": clustered,
        "Total Vectors": total,
        "Clustered Vector Percentage": 100.0 * clustered / total if total else 0.0,
        "Average Number of Vectors per Cluster": clustered / len(clusters) if clusters else 0.0,
        "alpha_FD": policy.alpha_fd,
        "alpha_FD_corr": policy.corrected_fd,
        "Minimum Similarity Considered Significant by FDR": policy.sim_threshold_fd,
        "alpha_FP": policy.alpha_fp,
        "alpha_FP_corr": policy.corrected_fp,
        "Minimum Similarity Considered Significant by FPR": policy.sim_threshold_fp,
        "n_tests": policy.n_tests,
        "n_tests_convention": policy.n_tests_convention,
        "n_common": policy.n_common,
        "Language Combinations": dict(sorted(combos.items())),
    }


def _node(key):
    return f"{key[0]}:{key[1]}"


def cluster_report(clusters: Sequence[CrossLanguageCluster], policy: SignificancePolicy,
                   axis_counts: Mapping[str, int]) -> dict:
    return {
        "summary": summary(clusters, policy, axis_counts),
        "policy": {k: getattr(policy, k) for k in policy.__dataclass_fields__},
        "clusters": [
            {
                "members": [[lang, idx] for lang, idx in c.members],
                "links": [
                    {"a": _node(a), "b": _node(b), "sigma": c.sigma[(a, b)],
                     "pvalue": c.pvalues[(a, b)]}
                    for a, b in c.sigma
                ],
            }
            for c in clusters
        ],
    }


def cluster_report_json(clusters, policy, axis_counts) -> str:
    return json.dumps(cluster_report(clusters, policy, axis_counts), ensure_ascii=False, indent=1)


def similarity_histogram_tsv(sim: CrossSimilarity, bins: int = 50, top_fraction: float = 0.05) -> str:
    """Histogram of pairwise similarities with the top-``top_fraction`` cutoff.

    The first line is a comment carrying the cutoff; each bin row flags
    whether it lies at or above it.
    """
    values = sim.matrix.ravel()
    cut = float(np.quantile(values, 1.0 - top_fraction)) if values.size else float("nan")
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    lines = [f"# {sim.lang_a}-{sim.lang_b}\ttop_{top_fraction:g}_quantile\t{cut!r}",
             "bin_lo\tbin_hi\tcount\tabove_cut"]
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        lines.append(f"{lo:.4f}\t{hi:.4f}\t{int(c)}\t{int(lo >= cut)}")
    return "\n".join(lines) + "\n"

"""Icasso: cluster components from repeated ICA runs and score reliability.

Similarity between two component rows is the absolute cosine of the raw
rows (no re-centring). ICA outputs are already centred over all observations,
so on full rows this equals the absolute Pearson correlation; on partial rows
the two differ slightly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DataError
from .ica import IcaConfig, IcaResult, WhitenedData, center_and_whiten, run_many


@dataclass
class SimilarityMatrix:
    values: np.ndarray
    run: np.ndarray
    component: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def flat_index(self, run: int, component: int) -> int:
        hits = np.nonzero((self.run == run) & (self.component == component))[0]
        if hits.size == 0:
            raise KeyError((run, component))
        return int(hits[0])

    @classmethod
    def from_array(cls, values) -> "SimilarityMatrix":
        values = np.asarray(values, dtype=np.float64)
        n = values.shape[0]
        return cls(values=values, run=np.zeros(n, dtype=np.int64),
                   component=np.arange(n, dtype=np.int64))


@dataclass
class ComponentCluster:
    members: np.ndarray
    quality: float
    centrotype: int
    centroid_row: np.ndarray | None = None


@dataclass
class IcassoResult:
    clusters: list[ComponentCluster]
    runs: list[IcaResult]
    similarity: SimilarityMatrix
    quality_threshold: float
    reliable_axes: np.ndarray = field(repr=False, default=None)

    @property
    def reliable(self) -> list[ComponentCluster]:
        return [c for c in self.clusters if c.quality > self.quality_threshold]

    def quality_curve(self) -> np.ndarray:
        return np.array([c.quality for c in self.clusters])


def component_similarity(s_i, s_j) -> float:
    s_i = np.asarray(s_i, dtype=np.float64)
    s_j = np.asarray(s_j, dtype=np.float64)
    if s_i.shape != s_j.shape:
        raise ValueError("component rows differ in length")
    ni2 = np.dot(s_i, s_i)
    nj2 = np.dot(s_j, s_j)
    if ni2 == 0 or nj2 == 0:
        raise DataError("zero-norm component row")
    # one square root of the product: identical rows give exactly 1
    return float(min(1.0, abs(np.dot(s_i, s_j)) / np.sqrt(ni2 * nj2)))


def similarity_from_rows(rows) -> np.ndarray:
    """Absolute cosine similarity between every pair of rows.

    The upper triangle is mirrored so the result is exactly symmetric, and the
    diagonal is set to 1.
    """
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", rows, rows))
    if np.any(norms == 0):
        raise DataError("zero-norm component row")
    U = rows / norms[:, None]
    G = np.abs(U @ U.T)
    np.clip(G, 0.0, 1.0, out=G)
    G = np.triu(G, 1)
    G = G + G.T
    np.fill_diagonal(G, 1.0)
    return G


def build_similarity_matrix(runs: Sequence[IcaResult]) -> SimilarityMatrix:
    if not runs:
        raise ValueError("no runs given")
    shapes = {r.S.shape for r in runs}
    if len(shapes) != 1:
        raise DataError(f"runs disagree on component matrix shape: {sorted(shapes)}")
    p = runs[0].S.shape[0]
    rows = np.vstack([r.S for r in runs])
    m = len(runs)
    return SimilarityMatrix(
        values=similarity_from_rows(rows),
        run=np.repeat(np.arange(m, dtype=np.int64), p),
        component=np.tile(np.arange(p, dtype=np.int64), m),
    )


def _as_values(sim) -> np.ndarray:
    return sim.values if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=np.float64)


def agglomerate(sim, target_clusters: int, linkage: str = "average") -> list[np.ndarray]:
    """Hierarchical clustering by maximum inter-cluster similarity.

    Starts from singletons and merges the most similar pair of clusters until
    ``target_clusters`` remain. Ties go to the pair with the lowest flat
    indices (each cluster is identified by its smallest member). Returns
    sorted member arrays ordered by smallest member.
    """
    S = _as_values(sim)
    n = S.shape[0]
    if not 1 <= target_clusters <= n:
        raise ValueError(f"target_clusters must be in [1, {n}], got {target_clusters}")
    try:
        code = kernels.LINKAGE_CODES[linkage]
    except KeyError:
        raise ValueError(f"unknown linkage {linkage!r}") from None
    labels, _, _ = kernels.agglomerate(np.ascontiguousarray(S), target_clusters, code)
    return [np.nonzero(labels == lab)[0] for lab in np.unique(labels)]


def quality_index(members, sim) -> float:
    """Mean similarity inside the cluster minus mean similarity to the rest.

    The diagonal (self-similarity 1) counts towards the inside mean. When the
    cluster holds every component the outside term is 0.
    """
    S = _as_values(sim)
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError("empty cluster")
    outside = np.setdiff1d(np.arange(S.shape[0]), members)
    inner = S[np.ix_(members, members)].sum() / members.size ** 2
    if outside.size == 0:
        return float(inner)
    outer = S[np.ix_(members, outside)].sum() / (members.size * outside.size)
    return float(inner - outer)


def quality_indices(clusters: Sequence[np.ndarray], sim) -> np.ndarray:
    """``quality_index`` for every cluster of a partition in one pass."""
    S = _as_values(sim)
    n = S.shape[0]
    k = len(clusters)
    labels = np.empty(n, dtype=np.int64)
    for lab, members in enumerate(clusters):
        labels[members] = lab
    B = kernels.label_block_sums(np.ascontiguousarray(S), labels, k)
    sizes = np.array([len(c) for c in clusters], dtype=np.float64)
    inner = np.diag(B) / sizes ** 2
    outer_n = sizes * (n - sizes)
    outer_sum = B.sum(axis=1) - np.diag(B)
    outer = np.divide(outer_sum, outer_n, out=np.zeros(k), where=outer_n > 0)
    return inner - outer


def centrotype(members, sim) -> int:
    """The member with the largest summed similarity to its cluster mates."""
    S = _as_values(sim)
    members = np.sort(np.asarray(members, dtype=np.int64))
    if members.size == 0:
        raise ValueError("empty cluster")
    # correctly rounded sums so exact ties stay ties and go to the lowest index
    totals = [math.fsum(row) for row in S[np.ix_(members, members)]]
    return int(members[int(np.argmax(totals))])


def cluster_runs(runs: Sequence[IcaResult], target_clusters: int | None = None,
                 quality_threshold: float = 0.8, linkage: str = "average",
                 similarity: SimilarityMatrix | None = None) -> IcassoResult:
    """Cluster precomputed runs; the back half of ``run_icasso``."""
    if similarity is None:
        similarity = build_similarity_matrix(runs)
    if target_clusters is None:
        target_clusters = runs[0].S.shape[0]
    parts = agglomerate(similarity, target_clusters, linkage)
    qualities = quality_indices(parts, similarity)
    rows = np.vstack([r.S for r in runs])

    clusters = []
    for members, q in zip(parts, qualities):
        c = centrotype(members, similarity)
        clusters.append(ComponentCluster(members=members, quality=float(q), centrotype=c,
                                         centroid_row=rows[c]))
    # descending quality, ties by smallest member
    clusters.sort(key=lambda c: (-c.quality, int(c.members[0])))
    result = IcassoResult(clusters=clusters, runs=list(runs), similarity=similarity,
                          quality_threshold=quality_threshold)
    reliable = result.reliable
    n_obs = rows.shape[1]
    result.reliable_axes = (np.vstack([c.centroid_row for c in reliable])
                            if reliable else np.empty((0, n_obs)))
    return result


def run_icasso(X, m: int = 10, target_clusters: int | None = None,
               quality_threshold: float = 0.8, seeds: Sequence[int] | None = None,
               config: IcaConfig | None = None, retain: int | None = None,
               linkage: str = "average", checkpoint_dir=None,
               white: WhitenedData | None = None) -> IcassoResult:
    """Repeated FastICA followed by reliability clustering.

    ``target_clusters`` defaults to the number of retained components and
    ``seeds`` to ``range(m)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if seeds is None:
        seeds = list(range(m))
    if len(seeds) != m:
        raise ValueError(f"expected {m} seeds, got {len(seeds)}")
    if white is None:
        white = center_and_whiten(X, retain)
    runs = run_many(X, retain, seeds, config, checkpoint_dir=checkpoint_dir, white=white)
    return cluster_runs(runs, target_clusters, quality_threshold, linkage)


def cluster_report(result: IcassoResult) -> dict:
    sim = result.similarity
    return {
        "n_runs": len(result.runs),
        "n_components": sim.size,
        "quality_threshold": result.quality_threshold,
        "n_reliable": len(result.reliable),
        "clusters": [
            {
                "rank": rank,
                "quality": c.quality,
                "size": int(len(c.members)),
                "centrotype": [int(sim.run[c.centrotype]), int(sim.component[c.centrotype])],
                "members": [[int(sim.run[i]), int(sim.component[i])] for i in c.members],
            }
            for rank, c in enumerate(result.clusters)
        ],
    }


def cluster_report_json(result: IcassoResult) -> str:
    return json.dumps(cluster_report(result), indent=1)


def quality_curve_tsv(result: IcassoResult) -> str:
    lines = ["rank\tquality"]
    lines += [f"{rank}\t{float(q)!r}" for rank, q in enumerate(result.quality_curve(), start=1)]
    return "\n".join(lines) + "\n"

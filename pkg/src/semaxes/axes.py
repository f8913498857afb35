"""Label components with the words that load most strongly on them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass
class SemanticAxis:
    language: str
    cluster_rank: int
    quality: float
    top_words: list[tuple[str, float]] = field(default_factory=list)

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.top_words]

    def label(self) -> str:
        return " ".join(self.words)


def top_indices(row, k: int) -> np.ndarray:
    """Indices of the ``k`` largest entries, descending; ties by ascending index."""
    row = np.asarray(row, dtype=np.float64)
    if not 1 <= k <= row.size:
        raise ValueError(f"k must be in [1, {row.size}], got {k}")
    if k < row.size:
        # partition on the k-th largest value, then resolve order (and ties
        # at the boundary) with a stable sort over the survivors only
        kth = np.partition(row, row.size - k)[row.size - k]
        cand = np.nonzero(row >= kth)[0]
    else:
        cand = np.arange(row.size)
    order = np.argsort(-row[cand], kind="stable")
    return cand[order[:k]]


def interpret_component(s_row, vocab: Sequence[str], k: int = 3, language: str = "",
                        cluster_rank: int = 0, quality: float = float("nan")) -> SemanticAxis:
    s_row = np.asarray(s_row, dtype=np.float64)
    if s_row.ndim != 1 or s_row.size != len(vocab):
        raise ValueError(f"row length {s_row.size} does not match vocabulary size {len(vocab)}")
    idx = top_indices(s_row, k)
    return SemanticAxis(language=language, cluster_rank=cluster_rank, quality=quality,
                        top_words=[(vocab[j], float(s_row[j])) for j in idx])


def interpret_all(S_r, vocab: Sequence[str], k: int = 3, language: str = "",
                  qualities: Sequence[float] | None = None) -> list[SemanticAxis]:
    """Interpret each row of ``S_r``; row ``i`` becomes the axis of rank ``i``."""
    S_r = np.asarray(S_r, dtype=np.float64)
    if S_r.ndim != 2:
        raise ValueError("S_r must be 2-D")
    if qualities is None:
        qualities = [float("nan")] * S_r.shape[0]
    return [interpret_component(row, vocab, k, language, rank, float(q))
            for rank, (row, q) in enumerate(zip(S_r, qualities))]


def axes_to_json(axes: Sequence[SemanticAxis]) -> str:
    payload = [
        {
            "language": a.language,
            "cluster_rank": a.cluster_rank,
            "quality": a.quality,
            "top_words": [{"word": w, "score": s} for w, s in a.top_words],
        }
        for a in axes
    ]
    return json.dumps(payload, ensure_ascii=False, indent=1)


def axes_table_tsv(axes: Sequence[SemanticAxis]) -> str:
    """One row per axis: rank, quality, then the words and their scores."""
    lines = ["language\trank\tquality\twords\tscores"]
    for a in axes:
        scores = " ".join(f"{s:.6g}" for _, s in a.top_words)
        lines.append(f"{a.language}\t{a.cluster_rank}\t{a.quality:.6f}\t{a.label()}\t{scores}")
    return "\n".join(lines) + "\n"


def aligned_table_tsv(groups: Sequence[dict[str, SemanticAxis]], languages: Sequence[str]) -> str:
    """Side-by-side labels, one row per group of matched axes and one column
    per language (empty where a language has no member)."""
    lines = ["\t".join(languages)]
    for group in groups:
        lines.append("\t".join(group[lang].label() if lang in group else "" for lang in languages))
    return "\n".join(lines) + "\n"

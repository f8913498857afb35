"""Synthetic ICA problems with known sources, and source matching.

Used as the ground-truth oracle in tests and for demo fixtures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError

SOURCE_LAWS = ("laplace", "uniform", "mixture")


@dataclass
class SyntheticScenario:
    """Parameters of a synthetic problem.

    ``shared_indices`` maps a dataset pair ``(a, b)`` with ``a < b`` to the
    source rows that dataset ``b`` copies verbatim from dataset ``a``.
    """

    d: int
    n: int
    n_datasets: int = 1
    source_law: str = "laplace"
    shared_indices: Mapping[tuple[int, int], Sequence[int]] = field(default_factory=dict)
    max_condition: float = 10.0
    noise_sigma: float = 0.0
    seed: int = 0


@dataclass
class SyntheticDataset:
    X: np.ndarray
    A_true: np.ndarray
    S_true: np.ndarray


@dataclass
class MatchResult:
    assignment: np.ndarray
    scores: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.scores.mean())


def sample_sources(rng, law, d, n):
    """``d x n`` i.i.d. sources with zero mean and unit variance."""
    if law == "laplace":
        return rng.laplace(0.0, 1.0 / np.sqrt(2.0), size=(d, n))
    if law == "uniform":
        return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=(d, n))
    if law == "mixture":
        # symmetric bimodal mixture: +-0.9 with sd sqrt(0.19)
        centres = rng.choice([-0.9, 0.9], size=(d, n))
        return centres + rng.normal(0.0, np.sqrt(0.19), size=(d, n))
    raise ValueError(f"unknown source law {law!r}; choose from {SOURCE_LAWS}")


def random_mixing(rng, d, max_condition, attempts=100):
    """Random ``d x d`` matrix with condition number at most ``max_condition``.

    Built as ``U diag(s) V^T`` from Haar-random orthogonal factors with
    singular values spread over ``[1, max_condition]``.
    """
    if not max_condition >= 1.0:
        raise DataError(f"condition number bound {max_condition} is infeasible")
    for _ in range(attempts):
        U, _ = np.linalg.qr(rng.standard_normal((d, d)))
        V, _ = np.linalg.qr(rng.standard_normal((d, d)))
        s = np.exp(rng.uniform(0.0, np.log(max_condition), size=d))
        s[0], s[-1] = 1.0, max_condition
        A = (U * s) @ V.T
        if np.linalg.cond(A) <= max_condition * (1 + 1e-9):
            return A
    raise DataError(f"could not sample a mixing matrix with condition <= {max_condition}")


def generate(scenario: SyntheticScenario) -> list[SyntheticDataset]:
    sc = scenario
    if sc.d < 2 or sc.n < 10 * sc.d:
        raise ValueError("need d >= 2 and n >= 10 * d")
    if sc.noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    for (a, b), rows in sc.shared_indices.items():
        if not 0 <= a < b < sc.n_datasets:
            raise ValueError(f"invalid dataset pair {(a, b)}")
        if any(not 0 <= r < sc.d for r in rows):
            raise ValueError(f"shared row index out of range for pair {(a, b)}")

    rng = np.random.default_rng(sc.seed)
    sources = [sample_sources(rng, sc.source_law, sc.d, sc.n) for _ in range(sc.n_datasets)]
    for (a, b), rows in sorted(sc.shared_indices.items()):
        rows = list(rows)
        sources[b][rows] = sources[a][rows]
    out = []
    for S in sources:
        A = random_mixing(rng, sc.d, sc.max_condition)
        X = A @ S
        if sc.noise_sigma > 0:
            X = X + rng.normal(0.0, sc.noise_sigma, size=X.shape)
        out.append(SyntheticDataset(X=X, A_true=A, S_true=S))
    return out


def abs_corr(S_est, S_true) -> np.ndarray:
    """Absolute Pearson correlation between rows of the two matrices."""
    a = np.asarray(S_est, dtype=np.float64)
    b = np.asarray(S_true, dtype=np.float64)
    a = a - a.mean(axis=1, keepdims=True)
    b = b - b.mean(axis=1, keepdims=True)
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    return np.abs(a @ b.T)


def match_components(S_est, S_true) -> MatchResult:
    """One-to-one matching maximising total |corr|.

    ``assignment[i]`` is the estimated row matched to true row ``i``.
    """
    S_est = np.asarray(S_est)
    S_true = np.asarray(S_true)
    if S_est.shape[0] != S_true.shape[0]:
        raise ValueError("row counts differ")
    C = abs_corr(S_est, S_true)
    est_idx, true_idx = linear_sum_assignment(C, maximize=True)
    assignment = np.empty(S_true.shape[0], dtype=np.int64)
    assignment[true_idx] = est_idx
    scores = C[assignment, np.arange(S_true.shape[0])]
    return MatchResult(assignment=assignment, scores=scores)


def greedy_match(S_est, S_true) -> MatchResult:
    """Repeatedly pair the highest remaining |corr| entry."""
    full = abs_corr(S_est, S_true)
    C = full.copy()
    d = C.shape[0]
    assignment = np.empty(d, dtype=np.int64)
    scores = np.empty(d)
    for _ in range(d):
        i, j = np.unravel_index(np.argmax(C), C.shape)
        assignment[j] = i
        scores[j] = full[i, j]
        C[i, :] = -1.0
        C[:, j] = -1.0
    return MatchResult(assignment=assignment, scores=scores)

"""PCA whitening and symmetric FastICA.

Data are laid out as ``d x n`` (variables by observations). Sample
covariances use the ``1/n`` normalisation throughout, so "unit variance"
means ``mean(s**2) == 1`` for a centred row ``s``.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DataError, NumericalError

logger = logging.getLogger(__name__)

_RANK_TOL = 1e-12


@dataclass
class WhitenedData:
    Z: np.ndarray
    whitening_map: np.ndarray
    dewhitening_map: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray

    @property
    def retain(self) -> int:
        return self.Z.shape[0]


@dataclass
class IcaConfig:
    nonlinearity: str = "logcosh"
    max_iter: int = 1000
    tol: float = 1e-6

    def __post_init__(self):
        if self.nonlinearity not in kernels.NONLINEARITY_CODES:
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}; "
                             f"choose from {sorted(kernels.NONLINEARITY_CODES)}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class IcaResult:
    """One decomposition ``X ~= A @ S + mean``.

    ``unmixing`` maps centred data straight to components
    (``S = unmixing @ (X - mean)``).
    """

    A: np.ndarray
    S: np.ndarray
    unmixing: np.ndarray
    mean: np.ndarray
    seed: int
    converged: bool
    iterations: int


def center_and_whiten(X, retain: int | None = None) -> WhitenedData:
    """Centre the rows of ``X`` and project onto the top ``retain`` principal
    directions scaled to unit variance."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError("X must be a 2-D array")
    d, n = X.shape
    if retain is None:
        retain = d
    if not 1 <= retain <= d:
        raise ValueError(f"retain must be in [1, {d}], got {retain}")
    if n <= retain:
        raise DataError(f"need more observations than retained components ({n} <= {retain})")
    if not np.isfinite(X).all():
        raise DataError("X contains non-finite values")

    mean = X.mean(axis=1)
    Xc = X - mean[:, None]
    cov = (Xc @ Xc.T) / n
    cov = 0.5 * (cov + cov.T)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:retain]
    evals = evals[order]
    evecs = evecs[:, order]
    floor = _RANK_TOL * max(1.0, float(evals[0]))
    if evals[-1] < floor:
        raise DataError(
            f"centred data has rank below {retain} (eigenvalue {evals[-1]:.3e})")
    # eigh's eigenvector signs are arbitrary; pin them so results are portable
    flip = np.sign(evecs[np.abs(evecs).argmax(axis=0), np.arange(retain)])
    evecs = evecs * flip

    scale = np.sqrt(evals)
    whitening = evecs.T / scale[:, None]
    dewhitening = evecs * scale[None, :]
    Z = whitening @ Xc
    return WhitenedData(Z=Z, whitening_map=whitening, dewhitening_map=dewhitening,
                        mean=mean, eigenvalues=evals)


def _sym_decorrelate(W):
    # (W W^T)^{-1/2} W
    s, u = np.linalg.eigh(W @ W.T)
    s = np.clip(s, np.finfo(np.float64).tiny, None)
    return (u / np.sqrt(s)) @ u.T @ W


def fastica(white: WhitenedData, seed: int, config: IcaConfig | None = None) -> IcaResult:
    """Symmetric fixed-point FastICA on already whitened data.

    Non-convergence within ``config.max_iter`` is reported through
    ``converged=False`` rather than raised.
    """
    config = config or IcaConfig()
    Z = white.Z
    p, n = Z.shape
    kind = kernels.NONLINEARITY_CODES[config.nonlinearity]

    rng = np.random.default_rng(seed)
    W = _sym_decorrelate(rng.standard_normal((p, p)))
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        g, gp = kernels.contrast(W @ Z, kind)
        W_new = _sym_decorrelate((g @ Z.T) / n - gp[:, None] * W)
        if not np.isfinite(W_new).all():
            raise NumericalError(f"FastICA produced non-finite values (seed {seed}, iteration {it})")
        lim = np.max(np.abs(np.abs(np.einsum("ij,ij->i", W_new, W)) - 1.0))
        W = W_new
        if lim < config.tol:
            converged = True
            break
    if not converged:
        logger.info("FastICA seed %d did not converge in %d iterations", seed, config.max_iter)

    S = W @ Z
    skew = np.mean(S ** 3, axis=1)
    sign = np.where(skew < 0, -1.0, 1.0)
    W = W * sign[:, None]
    S = S * sign[:, None]
    A = white.dewhitening_map @ W.T
    return IcaResult(A=A, S=S, unmixing=W @ white.whitening_map, mean=white.mean,
                     seed=int(seed), converged=converged, iterations=it)


def run_many(X, retain: int | None, seeds: Sequence[int], config: IcaConfig | None = None,
             checkpoint_dir=None, white: WhitenedData | None = None) -> list[IcaResult]:
    """Run FastICA once per seed on a single shared whitening of ``X``.

    With ``checkpoint_dir`` each run is stored as ``ica_seed<seed>.bin`` and
    reloaded on later calls instead of being recomputed.
    """
    seeds = [int(s) for s in seeds]
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    if white is None:
        white = center_and_whiten(X, retain)
    if checkpoint_dir is not None:
        checkpoint_dir = Path(checkpoint_dir)
        checkpoint_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for seed in seeds:
        ckpt = checkpoint_dir / f"ica_seed{seed}.bin" if checkpoint_dir is not None else None
        if ckpt is not None and ckpt.exists():
            res = load_ica_result(ckpt)
        else:
            res = fastica(white, seed, config)
            if ckpt is not None:
                save_ica_result(res, ckpt)
        results.append(res)
    return results


_MAGIC = b"SICA"
_HEADER = struct.Struct("<4sqqqqqq")


def save_ica_result(result: IcaResult, path) -> None:
    """Binary dump for checkpointing.

    Layout: header (magic, d, d_w, n, seed, iterations, converged) as
    little-endian int64s, then ``A`` (d x d_w), ``S`` (d_w x n), ``unmixing``
    (d_w x d) and ``mean`` (d) as little-endian row-major float64.
    """
    d, p = result.A.shape
    n = result.S.shape[1]
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, d, p, n, result.seed, result.iterations,
                              int(result.converged)))
        for arr in (result.A, result.S, result.unmixing, result.mean):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    tmp.replace(path)


def load_ica_result(path) -> IcaResult:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise DataError(f"{path}: truncated ICA dump")
        magic, d, p, n, seed, iterations, converged = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise DataError(f"{path}: not an ICA dump")
        body = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    shapes = [(d, p), (p, n), (p, d), (d,)]
    sizes = [int(np.prod(s)) for s in shapes]
    if body.size != sum(sizes):
        raise DataError(f"{path}: size mismatch")
    parts = np.split(body, np.cumsum(sizes)[:-1])
    A, S, unmixing, mean = (part.reshape(s) for part, s in zip(parts, shapes))
    return IcaResult(A=A, S=S, unmixing=unmixing, mean=mean, seed=int(seed),
                     converged=bool(converged), iterations=int(iterations))

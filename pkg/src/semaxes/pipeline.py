"""End-to-end run: ingest, per-language Icasso, labelling, cross-language
matching, reports.

Every report is written atomically and recorded with its SHA-256 in
``manifest.json``. Intermediate results (whitening, each ICA run, the
similarity matrix) are checkpointed under ``checkpoints/<fingerprint>/`` so an
interrupted run resumes where it stopped; the fingerprint covers the whole
resolved config, so changing any setting starts afresh.
"""

from __future__ import annotations

import hashlib
import io
import itertools
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import axes as axes_mod
from . import crosslang, evalkappa, icasso
from .config import PipelineConfig
from .embeddings import (VocabularyPlan, build_vocabulary_plan, load_bilingual_dictionary,
                         load_frequency_list, materialize, parse_vec_file)
from .errors import DataError, NumericalError, SemaxesError
from .ica import IcaConfig, WhitenedData, center_and_whiten, run_many

logger = logging.getLogger(__name__)


def atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def exit_code(self) -> int:
        c = self.cause
        if isinstance(c, SemaxesError):
            return c.exit_code
        if isinstance(c, (ArithmeticError, np.linalg.LinAlgError)):
            return NumericalError.exit_code
        if isinstance(c, (ValueError, OSError, KeyError)):
            return DataError.exit_code
        return 1


@dataclass
class Artifacts:
    root: Path
    entries: list[dict] = field(default_factory=list)

    def write(self, rel: str, content, stage: str) -> Path:
        data = content.encode("utf-8") if isinstance(content, str) else content
        path = self.root / rel
        atomic_write(path, data)
        self.entries.append({"path": rel, "stage": stage,
                             "sha256": hashlib.sha256(data).hexdigest()})
        return path

    def manifest(self, status: str, failed_stage: str | None = None) -> dict:
        out = {"status": status, "artifacts": self.entries}
        if failed_stage is not None:
            out["failed_stage"] = failed_stage
        return out


@dataclass
class PipelineResult:
    exit_code: int
    manifest: dict
    error: str | None = None


def _save_npz(path: Path, **arrays) -> None:
    buf = io.BytesIO()
    np.savez(buf, **arrays)
    atomic_write(path, buf.getvalue())


def _save_npy(path: Path, array) -> None:
    buf = io.BytesIO()
    np.save(buf, array)
    atomic_write(path, buf.getvalue())


def _ingest(cfg: PipelineConfig, art: Artifacts, ckpt: Path):
    done = ckpt / "ingest.npz"
    plan_path = ckpt / "plan.json"
    if done.exists() and plan_path.exists():
        plan = VocabularyPlan.from_json(plan_path.read_text(encoding="utf-8"))
        with np.load(done) as z:
            mats = [z[name] for name in cfg.language_names]
        logger.info("ingest: loaded checkpoint")
    else:
        embs = [parse_vec_file(l.embeddings, l.limit) for l in cfg.languages]
        pivot = cfg.languages[0].name
        dicts = [load_bilingual_dictionary(l.dictionary, pivot, l.name) for l in cfg.languages[1:]]
        freqs = [load_frequency_list(l.frequency) for l in cfg.languages]
        plan = build_vocabulary_plan(dicts, freqs, embs, cfg.total_size, cfg.language_names)
        mats = [m.values for m in materialize(plan, embs)]
        _save_npz(done, **dict(zip(cfg.language_names, mats)))
        atomic_write(plan_path, plan.to_json().encode("utf-8"))
    if plan.common_size < 3:
        raise DataError(f"only {plan.common_size} aligned common words; need at least 3")
    art.write("vocabulary_plan.json", plan.to_json(), "ingest")
    return plan, mats


def _whiten(X, cfg, ckpt: Path) -> WhitenedData:
    path = ckpt / "whitening.npz"
    if path.exists():
        with np.load(path) as z:
            return WhitenedData(**{k: z[k] for k in z.files})
    white = center_and_whiten(X, cfg.retain)
    _save_npz(path, Z=white.Z, whitening_map=white.whitening_map,
              dewhitening_map=white.dewhitening_map, mean=white.mean,
              eigenvalues=white.eigenvalues)
    return white


def _icasso(name, X, cfg: PipelineConfig, art: Artifacts, ckpt: Path):
    ckpt.mkdir(parents=True, exist_ok=True)
    white = _whiten(X, cfg, ckpt)
    ica_cfg = IcaConfig(nonlinearity=cfg.nonlinearity, max_iter=cfg.max_iter, tol=cfg.tol)
    runs = run_many(X, cfg.retain, cfg.seeds, ica_cfg, checkpoint_dir=ckpt, white=white)
    sim_path = ckpt / "similarity.npy"
    if sim_path.exists():
        sim = icasso.SimilarityMatrix(
            values=np.load(sim_path),
            run=np.repeat(np.arange(len(runs), dtype=np.int64), cfg.retain),
            component=np.tile(np.arange(cfg.retain, dtype=np.int64), len(runs)))
    else:
        sim = icasso.build_similarity_matrix(runs)
        _save_npy(sim_path, sim.values)
    result = icasso.cluster_runs(runs, cfg.target_clusters, cfg.quality_threshold,
                                 cfg.linkage, similarity=sim)
    n_conv = sum(r.converged for r in runs)
    report = icasso.cluster_report(result)
    report["converged_runs"] = n_conv
    art.write(f"{name}/icasso_clusters.json", json.dumps(report, indent=1), "icasso")
    art.write(f"{name}/quality_curve.tsv", icasso.quality_curve_tsv(result), "icasso")
    buf = io.BytesIO()
    np.save(buf, result.reliable_axes)
    art.write(f"{name}/reliable_axes.npy", buf.getvalue(), "icasso")
    return result


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    art = Artifacts(out)
    resolved = cfg.to_ini()
    fingerprint = hashlib.sha256(resolved.encode("utf-8")).hexdigest()[:16]
    ckpt = out / "checkpoints" / fingerprint
    stage = "config"
    try:
        art.write("resolved_config.ini", resolved, stage)

        stage = "ingest"
        plan, mats = _ingest(cfg, art, ckpt)
        vocab = {name: plan.words(k) for k, name in enumerate(cfg.language_names)}

        stage = "icasso"
        results = {}
        for name, X in zip(cfg.language_names, mats):
            logger.info("icasso: %s", name)
            results[name] = _icasso(name, X, cfg, art, ckpt / name)

        stage = "axes"
        labelled = {}
        for name, res in results.items():
            qualities = [c.quality for c in res.reliable]
            ax = axes_mod.interpret_all(res.reliable_axes, vocab[name], cfg.top_k, name, qualities)
            labelled[name] = ax
            art.write(f"{name}/axes.json", axes_mod.axes_to_json(ax), stage)
            art.write(f"{name}/axes.tsv", axes_mod.axes_table_tsv(ax), stage)

        stage = "crosslang"
        sims = []
        for a, b in itertools.combinations(cfg.language_names, 2):
            s = crosslang.cross_similarity(results[a].reliable_axes, results[b].reliable_axes,
                                           plan.common_size, a, b)
            sims.append(s)
            art.write(f"crosslang/similarity_hist_{a}_{b}.tsv",
                      crosslang.similarity_histogram_tsv(s, cfg.histogram_bins), stage)
        policy = crosslang.make_policy(sims, cfg.alpha_fd, cfg.alpha_fp, cfg.n_tests)
        logger.info("crosslang: Bonferroni family size %d (%s convention)",
                    policy.n_tests, policy.n_tests_convention)
        clusters = crosslang.cluster_across_languages(sims, policy)
        counts = {name: int(res.reliable_axes.shape[0]) for name, res in results.items()}
        art.write("crosslang/clusters.json",
                  crosslang.cluster_report_json(clusters, policy, counts), stage)
        art.write("crosslang/summary.json",
                  json.dumps(crosslang.summary(clusters, policy, counts), indent=1), stage)
        lookup = {(name, i): ax for name, axs in labelled.items() for i, ax in enumerate(axs)}
        groups = [{lang: lookup[(lang, idx)] for lang, idx in c.members} for c in clusters]
        art.write("crosslang/aligned_axes.tsv",
                  axes_mod.aligned_table_tsv(groups, cfg.language_names), stage)

        stage = "questionnaire"
        art.write("questionnaire.txt",
                  evalkappa.export_questionnaire(clusters, lookup, cfg.top_k), stage)
    except Exception as exc:  # noqa: BLE001 - every failure is reported with its stage
        err = StageError(stage, exc)
        manifest = art.manifest("failed", stage)
        atomic_write(out / "manifest.json", json.dumps(manifest, indent=1).encode("utf-8"))
        logger.info("%s", err)
        return PipelineResult(err.exit_code, manifest, str(err))

    manifest = art.manifest("ok")
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=1).encode("utf-8"))
    return PipelineResult(0, manifest)

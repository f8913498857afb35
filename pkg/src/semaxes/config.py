"""Pipeline configuration: an INI file with one section per language.

Example::

    [pipeline]
    output_dir = out
    languages = en, ja, zh
    total_size = 50000

    [lang.en]
    embeddings = cc.en.300.vec
    frequency = en_freq.txt

    [lang.ja]
    embeddings = cc.ja.300.vec
    dictionary = en-ja.txt
    frequency = ja_freq.txt

The first language is the dictionary pivot; every other language needs a
``dictionary`` mapping pivot words to its own. Relative paths resolve against
the directory holding the config file.
"""

from __future__ import annotations

import configparser
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .kernels import LINKAGE_CODES, NONLINEARITY_CODES


@dataclass
class LanguageSpec:
    name: str
    embeddings: Path
    frequency: Path
    dictionary: Path | None = None
    limit: int | None = None


@dataclass
class PipelineConfig:
    languages: list[LanguageSpec]
    output_dir: Path
    total_size: int = 50000
    top_k: int = 3
    # icasso
    m: int = 10
    target_clusters: int | None = None
    quality_threshold: float = 0.8
    seeds: list[int] = field(default_factory=list)
    linkage: str = "average"
    # ica
    nonlinearity: str = "logcosh"
    tol: float = 1e-6
    max_iter: int = 1000
    retain: int = 300
    # crosslang
    alpha_fd: float = 0.01
    alpha_fp: float = 0.01
    n_tests: int | None = None
    histogram_bins: int = 50

    @property
    def language_names(self) -> list[str]:
        return [lang.name for lang in self.languages]

    def to_ini(self) -> str:
        """Fully resolved config text; ``validate_config`` on it round-trips."""
        cp = configparser.ConfigParser(interpolation=None)
        cp["pipeline"] = {
            "output_dir": str(self.output_dir),
            "languages": ", ".join(self.language_names),
            "total_size": str(self.total_size),
            "top_k": str(self.top_k),
        }
        cp["icasso"] = {
            "m": str(self.m),
            "target_clusters": str(self.target_clusters),
            "quality_threshold": repr(self.quality_threshold),
            "seeds": ", ".join(str(s) for s in self.seeds),
            "linkage": self.linkage,
        }
        cp["ica"] = {
            "nonlinearity": self.nonlinearity,
            "tol": repr(self.tol),
            "max_iter": str(self.max_iter),
            "retain": str(self.retain),
        }
        cp["crosslang"] = {
            "alpha_fd": repr(self.alpha_fd),
            "alpha_fp": repr(self.alpha_fp),
            "n_tests": "" if self.n_tests is None else str(self.n_tests),
            "histogram_bins": str(self.histogram_bins),
        }
        for lang in self.languages:
            sec = {"embeddings": str(lang.embeddings), "frequency": str(lang.frequency)}
            if lang.dictionary is not None:
                sec["dictionary"] = str(lang.dictionary)
            if lang.limit is not None:
                sec["limit"] = str(lang.limit)
            cp[f"lang.{lang.name}"] = sec
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


_KNOWN = {
    "pipeline": {"output_dir", "languages", "total_size", "top_k"},
    "icasso": {"m", "target_clusters", "quality_threshold", "seeds", "linkage"},
    "ica": {"nonlinearity", "tol", "max_iter", "retain"},
    "crosslang": {"alpha_fd", "alpha_fp", "n_tests", "histogram_bins"},
    "lang": {"embeddings", "frequency", "dictionary", "limit"},
}


def _get(cp, section, key, conv, default):
    if not cp.has_section(section) or not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    if raw == "" or raw.lower() == "none":
        return default
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _int_list(raw: str) -> list[int]:
    return [int(x) for x in raw.replace(",", " ").split()]


def _resolve(base: Path, raw: str) -> Path:
    p = Path(raw).expanduser()
    return p if p.is_absolute() else (base / p).resolve()


def validate_config(path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.resolve().parent

    for section in cp.sections():
        kind = "lang" if section.startswith("lang.") else section
        if kind not in _KNOWN:
            warnings.warn(f"{path}: unknown section [{section}] ignored", stacklevel=2)
            continue
        for key in cp.options(section):
            if key not in _KNOWN[kind]:
                warnings.warn(f"{path}: unknown key [{section}] {key} ignored", stacklevel=2)

    names_raw = _get(cp, "pipeline", "languages", str, None)
    if names_raw is None:
        names = [s[len("lang."):] for s in cp.sections() if s.startswith("lang.")]
    else:
        names = [x.strip() for x in names_raw.split(",") if x.strip()]
    if len(names) < 2:
        raise ConfigError("at least two languages are required")
    if len(set(names)) != len(names):
        raise ConfigError("duplicate language names")

    langs = []
    for k, name in enumerate(names):
        sec = f"lang.{name}"
        if not cp.has_section(sec):
            raise ConfigError(f"missing section [{sec}]")
        emb = _get(cp, sec, "embeddings", str, None)
        freq = _get(cp, sec, "frequency", str, None)
        dic = _get(cp, sec, "dictionary", str, None)
        if emb is None or freq is None:
            raise ConfigError(f"[{sec}] needs both 'embeddings' and 'frequency'")
        if k > 0 and dic is None:
            raise ConfigError(f"[{sec}] needs a 'dictionary' from {names[0]}")
        spec = LanguageSpec(
            name=name,
            embeddings=_resolve(base, emb),
            frequency=_resolve(base, freq),
            dictionary=_resolve(base, dic) if (dic is not None and k > 0) else None,
            limit=_get(cp, sec, "limit", int, None),
        )
        for p in (spec.embeddings, spec.frequency, spec.dictionary):
            if p is not None and not p.is_file():
                raise ConfigError(f"[{sec}] file not found: {p}")
        if spec.limit is not None and spec.limit < 1:
            raise ConfigError(f"[{sec}] limit must be positive")
        langs.append(spec)

    out = _get(cp, "pipeline", "output_dir", str, "output")
    cfg = PipelineConfig(
        languages=langs,
        output_dir=_resolve(base, out),
        total_size=_get(cp, "pipeline", "total_size", int, 50000),
        top_k=_get(cp, "pipeline", "top_k", int, 3),
        m=_get(cp, "icasso", "m", int, 10),
        target_clusters=_get(cp, "icasso", "target_clusters", int, None),
        quality_threshold=_get(cp, "icasso", "quality_threshold", float, 0.8),
        seeds=_get(cp, "icasso", "seeds", _int_list, []),
        linkage=_get(cp, "icasso", "linkage", str, "average"),
        nonlinearity=_get(cp, "ica", "nonlinearity", str, "logcosh"),
        tol=_get(cp, "ica", "tol", float, 1e-6),
        max_iter=_get(cp, "ica", "max_iter", int, 1000),
        retain=_get(cp, "ica", "retain", int, 300),
        alpha_fd=_get(cp, "crosslang", "alpha_fd", float, 0.01),
        alpha_fp=_get(cp, "crosslang", "alpha_fp", float, 0.01),
        n_tests=_get(cp, "crosslang", "n_tests", int, None),
        histogram_bins=_get(cp, "crosslang", "histogram_bins", int, 50),
    )
    if cfg.target_clusters is None:
        cfg.target_clusters = cfg.retain
    if not cfg.seeds:
        cfg.seeds = list(range(cfg.m))
    _check_ranges(cfg)
    return cfg


def _check_ranges(cfg: PipelineConfig) -> None:
    def bad(msg):
        raise ConfigError(msg)

    for name in ("alpha_fd", "alpha_fp"):
        v = getattr(cfg, name)
        if not 0 < v < 1:
            bad(f"{name} must lie in (0, 1), got {v}")
    if cfg.m < 1:
        bad("m must be >= 1")
    if len(cfg.seeds) != cfg.m:
        bad(f"{len(cfg.seeds)} seeds given for m = {cfg.m}")
    if len(set(cfg.seeds)) != len(cfg.seeds):
        bad("seeds must be distinct")
    if cfg.retain < 1:
        bad("retain must be >= 1")
    if not 1 <= cfg.target_clusters <= cfg.m * cfg.retain:
        bad(f"target_clusters must be in [1, m * retain = {cfg.m * cfg.retain}]")
    if not -1 <= cfg.quality_threshold <= 1:
        bad("quality_threshold must lie in [-1, 1]")
    if cfg.top_k < 1:
        bad("top_k must be >= 1")
    if cfg.total_size < cfg.retain + 1:
        bad("total_size must exceed retain")
    if cfg.linkage not in LINKAGE_CODES:
        bad(f"linkage must be one of {sorted(LINKAGE_CODES)}")
    if cfg.nonlinearity not in NONLINEARITY_CODES:
        bad(f"nonlinearity must be one of {sorted(NONLINEARITY_CODES)}")
    if not cfg.tol > 0:
        bad("tol must be positive")
    if cfg.max_iter < 1:
        bad("max_iter must be >= 1")
    if cfg.n_tests is not None and cfg.n_tests < 1:
        bad("n_tests must be >= 1")
    if cfg.histogram_bins < 1:
        bad("histogram_bins must be >= 1")

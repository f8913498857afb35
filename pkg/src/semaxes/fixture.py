"""Write a synthetic multi-language corpus to disk in the real input formats.

Each "language" is one synthetic dataset whose columns are given made-up
words. Word ``j`` of the pivot language translates to word ``j`` of every
other language for ``j < n_common``, and the first ``shared`` sources are
identical across languages, so exactly ``shared`` cross-language matches are
expected.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .embeddings import EmbeddingMatrix, write_vec_file
from .synth import SyntheticScenario, generate


def fixture_scenario(n_languages: int = 2, d: int = 10, n: int = 2000, shared: int = 5,
                     seed: int = 0, source_law: str = "laplace") -> SyntheticScenario:
    """The scenario behind ``write_synthetic_fixture``: the first ``shared``
    sources of the pivot dataset are copied into every other dataset."""
    if not 0 <= shared <= d:
        raise ValueError("shared must lie in [0, d]")
    return SyntheticScenario(
        d=d, n=n, n_datasets=n_languages, source_law=source_law,
        shared_indices={(0, b): list(range(shared)) for b in range(1, n_languages)},
        seed=seed,
    )


def write_synthetic_fixture(out_dir, languages: Sequence[str] = ("en", "ja"), d: int = 10,
                            n: int = 2000, n_common: int | None = None, shared: int = 5,
                            seed: int = 0, m: int = 10, source_law: str = "laplace",
                            output_dir: str = "output") -> Path:
    """Create the fixture files and a ready-to-run ``config.ini``; returns its path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if n_common is None:
        n_common = n
    if not 3 <= n_common <= n:
        raise ValueError("n_common must lie in [3, n]")
    datasets = generate(fixture_scenario(len(languages), d, n, shared, seed, source_law))

    pivot = languages[0]
    lines = ["[pipeline]", f"output_dir = {output_dir}", f"languages = {', '.join(languages)}",
             f"total_size = {n}", "top_k = 3", "",
             "[icasso]", f"m = {m}", f"target_clusters = {d}", "",
             "[ica]", f"retain = {d}", ""]
    for lang, ds in zip(languages, datasets):
        words = [f"{lang}_{j:06d}" for j in range(n)]
        write_vec_file(EmbeddingMatrix(words=words, values=ds.X), out / f"{lang}.vec")
        (out / f"{lang}.freq.txt").write_text("\n".join(words) + "\n", encoding="utf-8")
        lines += [f"[lang.{lang}]", f"embeddings = {lang}.vec", f"frequency = {lang}.freq.txt"]
        if lang != pivot:
            pairs = [f"{pivot}_{j:06d} {lang}_{j:06d}" for j in range(n_common)]
            (out / f"{pivot}-{lang}.txt").write_text("\n".join(pairs) + "\n", encoding="utf-8")
            lines.append(f"dictionary = {pivot}-{lang}.txt")
        lines.append("")
    cfg = out / "config.ini"
    cfg.write_text("\n".join(lines), encoding="utf-8")
    return cfg

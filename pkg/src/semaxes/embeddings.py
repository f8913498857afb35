"""Embedding files, bilingual dictionaries and vocabulary construction.

Matrices are stored the ICA way round: one column per word, one row per
embedding dimension. All text is UTF-8 and tokens are split on ASCII
whitespace only (files are read as bytes), so words containing non-ASCII
spaces survive intact.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingMatrix:
    """A ``dim x n`` matrix whose column ``j`` embeds ``words[j]``."""

    words: list[str]
    values: np.ndarray
    duplicates_skipped: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise DataError(f"embedding values must be 2-D, got shape {self.values.shape}")
        if self.values.shape[1] != len(self.words):
            raise DataError(
                f"{self.values.shape[1]} columns but {len(self.words)} words")
        if len(set(self.words)) != len(self.words):
            raise DataError("duplicate words in embedding matrix")
        if not np.isfinite(self.values).all():
            raise DataError("embedding matrix contains non-finite values")

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def index(self) -> dict[str, int]:
        return {w: j for j, w in enumerate(self.words)}


@dataclass
class BilingualDictionary:
    pairs: list[tuple[str, str]]
    source_lang: str | None = None
    target_lang: str | None = None

    def __len__(self):
        return len(self.pairs)


@dataclass
class VocabularyPlan:
    """Per-language word lists: an aligned common block, then frequency fill.

    ``common_triples`` holds one tuple per aligned column, with one word per
    language (three languages in the standard setup, but any count >= 2 works).
    """

    languages: list[str]
    common_triples: list[tuple[str, ...]]
    fill_words: list[list[str]]
    total_size: int
    skipped: dict[str, int] = field(default_factory=dict)

    @property
    def common_size(self) -> int:
        return len(self.common_triples)

    def words(self, lang: int) -> list[str]:
        return [t[lang] for t in self.common_triples] + list(self.fill_words[lang])

    def to_json(self) -> str:
        payload = {
            "languages": self.languages,
            "total_size": self.total_size,
            "common_size": self.common_size,
            "common_triples": [list(t) for t in self.common_triples],
            "fill_words": self.fill_words,
            "skipped": self.skipped,
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "VocabularyPlan":
        payload = json.loads(text)
        return cls(
            languages=payload["languages"],
            common_triples=[tuple(t) for t in payload["common_triples"]],
            fill_words=payload["fill_words"],
            total_size=payload["total_size"],
            skipped=payload.get("skipped", {}),
        )


def _decode(token: bytes, path, lineno) -> str:
    try:
        return token.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}:{lineno}: invalid UTF-8 ({exc})") from None


def parse_vec_file(path, limit: int | None = None) -> EmbeddingMatrix:
    """Read a FastText-style ``.vec`` text file.

    Parameters
    ----------
    path : str or Path
        File whose first line is ``"<count> <dim>"`` followed by one
        ``"word v1 ... vdim"`` line per word.
    limit : int, optional
        Read at most this many word lines.

    Returns
    -------
    EmbeddingMatrix
        Columns in file order. Repeated words keep their first occurrence;
        the number dropped is stored in ``duplicates_skipped``.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be a positive integer")
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline()
        if not header.strip():
            raise DataError(f"{path}: empty file")
        parts = header.split()
        try:
            if len(parts) != 2:
                raise ValueError
            _, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{path}: malformed header {header[:80]!r}") from None
        if dim < 1:
            raise DataError(f"{path}: non-positive dimension in header")

        words: list[str] = []
        seen: set[str] = set()
        rows: list[np.ndarray] = []
        dupes = 0
        read = 0
        for lineno, line in enumerate(fh, start=2):
            if limit is not None and read >= limit:
                break
            fields = line.split()
            if not fields:
                continue
            read += 1
            if len(fields) - 1 != dim:
                raise DataError(
                    f"{path}:{lineno}: expected {dim} values, found {len(fields) - 1}")
            word = _decode(fields[0], path, lineno)
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}:{lineno}: unparsable number") from None
            if not np.isfinite(vec).all():
                raise DataError(f"{path}:{lineno}: non-finite value for {word!r}")
            if word in seen:
                dupes += 1
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)

    if dupes:
        logger.warning("%s: skipped %d duplicate words", path, dupes)
    values = np.stack(rows, axis=1) if rows else np.zeros((dim, 0))
    return EmbeddingMatrix(words=words, values=values, duplicates_skipped=dupes)


def write_vec_file(matrix: EmbeddingMatrix, path) -> None:
    """Write ``matrix`` in ``.vec`` layout with 10 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{matrix.n} {matrix.dim}\n")
        for j, word in enumerate(matrix.words):
            nums = " ".join(f"{v:.10g}" for v in matrix.values[:, j])
            fh.write(f"{word} {nums}\n")


def load_bilingual_dictionary(path, source_lang=None, target_lang=None) -> BilingualDictionary:
    """Read ``"<source> <target>"`` lines, dropping exact duplicate pairs.

    Blank lines are ignored.
    """
    pairs: list[tuple[str, str]] = []
    seen = set()
    with open(path, "rb") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 tokens, found {len(fields)}")
            pair = (_decode(fields[0], path, lineno), _decode(fields[1], path, lineno))
            if pair in seen:
                continue
            seen.add(pair)
            pairs.append(pair)
    return BilingualDictionary(pairs, source_lang=source_lang, target_lang=target_lang)


def load_frequency_list(path) -> list[str]:
    """One word per line, most frequent first. Only the first token is kept."""
    words = []
    with open(path, "rb") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if fields:
                words.append(_decode(fields[0], path, lineno))
    return words


def build_vocabulary_plan(
    dicts: Sequence[BilingualDictionary],
    freq_lists: Sequence[Sequence[str]],
    embeddings: Sequence[EmbeddingMatrix],
    total_size: int,
    languages: Sequence[str] | None = None,
) -> VocabularyPlan:
    """Plan the per-language vocabularies.

    ``dicts[k]`` maps pivot-language (index 0) words to language ``k + 1``.
    For each pivot word, in order of first appearance in ``dicts[0]``, the
    first translation (file order) present in the target embeddings and not
    already used in that language is taken; the pivot word is dropped if any
    language has no such translation. The remaining slots are filled from each
    language's frequency list.
    """
    n_lang = len(embeddings)
    if n_lang < 2 or len(dicts) != n_lang - 1 or len(freq_lists) != n_lang:
        raise ValueError("need one embedding and frequency list per language "
                         "and one dictionary per non-pivot language")
    if languages is None:
        languages = [f"lang{k}" for k in range(n_lang)]
    pivots = {d.source_lang for d in dicts if d.source_lang is not None}
    if len(pivots) > 1:
        raise DataError(f"dictionaries disagree on the pivot language: {sorted(pivots)}")

    vocab = [set(e.words) for e in embeddings]
    translations = []
    for d in dicts:
        table: dict[str, list[str]] = {}
        for src, tgt in d.pairs:
            table.setdefault(src, []).append(tgt)
        translations.append(table)

    skipped = {"pivot_missing": 0, "no_translation": 0, "fill_missing": 0}
    used = [set() for _ in range(n_lang)]
    common: list[tuple[str, ...]] = []
    for src in dict.fromkeys(s for s, _ in dicts[0].pairs):
        if src not in vocab[0]:
            skipped["pivot_missing"] += 1
            continue
        row = [src]
        for k, table in enumerate(translations, start=1):
            pick = next((t for t in table.get(src, ())
                         if t in vocab[k] and t not in used[k]), None)
            if pick is None:
                break
            row.append(pick)
        if len(row) != n_lang:
            skipped["no_translation"] += 1
            continue
        for k, w in enumerate(row):
            used[k].add(w)
        common.append(tuple(row))

    if total_size < len(common):
        raise DataError(
            f"total_size {total_size} is smaller than the common block ({len(common)})")

    need = total_size - len(common)
    fill: list[list[str]] = []
    for k in range(n_lang):
        chosen = []
        taken = set(used[k])
        for w in freq_lists[k]:
            if len(chosen) == need:
                break
            if w in taken:
                continue
            if w not in vocab[k]:
                skipped["fill_missing"] += 1
                continue
            taken.add(w)
            chosen.append(w)
        if len(chosen) < need:
            raise DataError(
                f"frequency list for {languages[k]} exhausted: "
                f"{len(chosen)} of {need} fill words found")
        fill.append(chosen)

    return VocabularyPlan(
        languages=list(languages),
        common_triples=common,
        fill_words=fill,
        total_size=total_size,
        skipped=skipped,
    )


def materialize(plan: VocabularyPlan, embeddings: Sequence[EmbeddingMatrix]) -> list[EmbeddingMatrix]:
    """Gather each language's planned columns, common block first."""
    out = []
    for k, emb in enumerate(embeddings):
        index = emb.index()
        words = plan.words(k)
        try:
            cols = [index[w] for w in words]
        except KeyError as exc:
            raise RuntimeError(f"planned word {exc.args[0]!r} missing from "
                               f"{plan.languages[k]} embeddings") from None
        out.append(EmbeddingMatrix(words=words, values=emb.values[:, cols]))
    return out

"""Fleiss' kappa over human judgements of matched axes, plus the
questionnaire used to collect them."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError

CATEGORIES = ("no", "yes")

# Landis & Koch style bands
_BANDS = [
    (0.0, "poor agreement"),
    (0.2, "slight agreement"),
    (0.4, "fair agreement"),
    (0.6, "moderate agreement"),
    (0.8, "substantial agreement"),
    (1.0, "almost perfect agreement"),
]


@dataclass
class RatingTable:
    """Item-by-category counts; every row sums to the same number of raters."""

    counts: np.ndarray
    items: list[str] | None = None

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2:
            raise DataError("rating table must be 2-D")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.round(counts)):
                raise DataError("rating counts must be integers")
            counts = counts.astype(np.int64)
        if (counts < 0).any():
            raise DataError("rating counts must be non-negative")
        sums = counts.sum(axis=1)
        if sums.size and not (sums == sums[0]).all():
            raise DataError("every item needs the same number of raters")
        self.counts = counts

    @property
    def raters_per_item(self) -> int:
        return int(self.counts[0].sum()) if self.counts.shape[0] else 0


@dataclass
class KappaResult:
    kappa: float
    p_bar: float
    p_bar_e: float
    defined: bool = True

    @property
    def band(self) -> str:
        return interpretation_band(self.kappa) if self.defined else "undefined"

    def to_dict(self) -> dict:
        return {"kappa": self.kappa if self.defined else None, "p_bar": self.p_bar,
                "p_bar_e": self.p_bar_e, "defined": self.defined, "band": self.band}


def interpretation_band(kappa: float) -> str:
    if kappa <= 0:
        return _BANDS[0][1]
    for upper, name in _BANDS[1:]:
        if kappa <= upper:
            return name
    return _BANDS[-1][1]


def kappa_from_agreements(p_bar: float, p_bar_e: float) -> KappaResult:
    if p_bar_e == 1.0:
        return KappaResult(float("nan"), p_bar, p_bar_e, defined=False)
    return KappaResult((p_bar - p_bar_e) / (1.0 - p_bar_e), p_bar, p_bar_e)


def fleiss_kappa(table: RatingTable) -> KappaResult:
    """Fleiss' kappa. When all ratings fall into one category the expected
    agreement is 1 and kappa is undefined (``defined=False``, kappa NaN)."""
    counts = table.counts.astype(np.float64)
    n_items, n_cat = counts.shape
    r = table.raters_per_item
    if n_items < 1 or n_cat < 2 or r < 2:
        raise DataError("need at least one item, two categories and two raters per item")
    p_j = counts.sum(axis=0) / (n_items * r)
    P_i = (np.sum(counts * counts, axis=1) - r) / (r * (r - 1))
    return kappa_from_agreements(float(P_i.mean()), float(np.dot(p_j, p_j)))


def load_ratings_csv(path) -> RatingTable:
    """Read ``item,rater,rating`` rows (rating 0 = no, 1 = yes). A header row
    is optional."""
    votes: dict[str, dict[str, int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and not row[-1].strip().lstrip("+-").isdigit():
                continue  # header
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected item,rater,rating")
            item, rater, rating = (c.strip() for c in row)
            if rating not in {"0", "1"}:
                raise DataError(f"{path}:{lineno}: rating must be 0 or 1, got {rating!r}")
            per_item = votes.setdefault(item, {})
            if rater in per_item:
                raise DataError(f"{path}:{lineno}: rater {rater!r} rated item {item!r} twice")
            per_item[rater] = int(rating)
    return ratings_from_votes(votes)


def ratings_from_votes(votes: Mapping[str, Mapping[str, int]]) -> RatingTable:
    items = list(votes)
    counts = np.zeros((len(items), 2), dtype=np.int64)
    for i, item in enumerate(items):
        for v in votes[item].values():
            counts[i, int(v)] += 1
    return RatingTable(counts, items=items)


INSTRUCTIONS = """\
Each numbered line lists, per language, the top words of one matched axis in
the form lang:[`word' `word' `word'].

Mark the box ([x]) if the word lists of all languages on the line share one
meaning category. Leave it empty ([ ]) if any list is incoherent or unrelated
to the others.
"""

_ITEM_RE = re.compile(r"^\[(?P<mark>[ xX])\]\s+(?P<id>Q\d+)\s+(?P<body>.*)$")


def format_item(words_by_lang: Mapping[str, Sequence[str]]) -> str:
    parts = []
    for lang, words in words_by_lang.items():
        parts.append(f"{lang}:[" + " ".join(f"`{w}'" for w in words) + "]")
    return " ".join(parts)


def export_questionnaire(clusters, axes: Mapping[tuple[str, int], object], k: int = 3) -> str:
    """Render one checkbox item per cross-language cluster.

    ``axes`` maps ``(language, axis index)`` to a ``SemanticAxis`` (anything
    with a ``words`` attribute works).
    """
    lines = [INSTRUCTIONS, ""]
    for q, cluster in enumerate(clusters, start=1):
        words_by_lang = {}
        for member in cluster.members:
            if member not in axes:
                raise DataError(f"no interpreted axis for cluster member {member}")
            words_by_lang[member[0]] = list(axes[member].words)[:k]
        lines.append(f"[ ] Q{q} {format_item(words_by_lang)}")
    return "\n".join(lines) + "\n"


def parse_questionnaire(text: str) -> dict[str, bool]:
    """Checkbox state per item id of a filled-in form."""
    marks = {}
    for line in text.splitlines():
        m = _ITEM_RE.match(line.strip())
        if m:
            marks[m.group("id")] = m.group("mark") != " "
    return marks


def ratings_from_forms(forms: Sequence[str]) -> RatingTable:
    """One filled-in form per rater; items must match across forms."""
    if not forms:
        raise DataError("no forms given")
    parsed = [parse_questionnaire(f) for f in forms]
    ids = list(parsed[0])
    if any(list(p) != ids for p in parsed[1:]):
        raise DataError("forms list different items")
    votes = {item: {str(r): int(p[item]) for r, p in enumerate(parsed)} for item in ids}
    return ratings_from_votes(votes)


def kappa_report_json(result: KappaResult, table: RatingTable) -> str:
    payload = result.to_dict()
    payload.update(n_items=int(table.counts.shape[0]), raters_per_item=table.raters_per_item,
                   categories=list(CATEGORIES))
    return json.dumps(payload, indent=1)

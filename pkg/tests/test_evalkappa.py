import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semaxes.axes import SemanticAxis
from semaxes.crosslang import CrossLanguageCluster
from semaxes.errors import DataError
from semaxes.evalkappa import (RatingTable, export_questionnaire, fleiss_kappa, interpretation_band,
                               kappa_from_agreements, kappa_report_json, load_ratings_csv,
                               parse_questionnaire, ratings_from_forms)

from oracles import naive_fleiss


def test_perfect_agreement():
    res = fleiss_kappa(RatingTable(np.array([[3, 0], [0, 3], [3, 0]])))
    assert res.p_bar == 1.0 and res.kappa == 1.0


def test_reported_agreements():
    res = kappa_from_agreements(0.702, 0.531)
    assert abs(res.kappa - 0.3646) <= 1e-3
    assert abs(res.kappa - 0.364) <= 1e-3
    assert res.band == "fair agreement"


def test_small_table_matches_definition():
    counts = [[2, 0], [1, 1], [0, 2]]
    res = fleiss_kappa(RatingTable(np.array(counts)))
    k, p, pe = naive_fleiss(counts)
    assert res.kappa == pytest.approx(k, abs=1e-15)
    assert (res.p_bar, res.p_bar_e) == pytest.approx((p, pe), abs=1e-15)
    # hand values: P_i = 1, 0, 1 -> P_bar 2/3; p_j = 1/2 -> P_e 1/2; kappa 1/3
    assert res.kappa == pytest.approx(1 / 3, abs=1e-15)


def test_undefined_and_invalid():
    res = fleiss_kappa(RatingTable(np.array([[4, 0], [4, 0]])))
    assert not res.defined and math.isnan(res.kappa) and res.band == "undefined"
    with pytest.raises(DataError):
        fleiss_kappa(RatingTable(np.array([[1, 0]])))
    with pytest.raises(DataError):
        RatingTable(np.array([[1, 1], [2, 1]]))
    with pytest.raises(DataError):
        RatingTable(np.array([[-1, 3]]))


def random_table(rng):
    items = int(rng.integers(1, 30))
    cats = int(rng.integers(2, 5))
    raters = int(rng.integers(2, 8))
    counts = np.zeros((items, cats), dtype=np.int64)
    for i in range(items):
        np.add.at(counts[i], rng.integers(0, cats, size=raters), 1)
    return counts


def test_permutation_invariance_and_oracle():
    rng = np.random.default_rng(0)
    done = 0
    while done < 100:
        counts = random_table(rng)
        base = fleiss_kappa(RatingTable(counts))
        if not base.defined:
            continue
        done += 1
        k, _, _ = naive_fleiss(counts.tolist())
        assert base.kappa == pytest.approx(k, abs=1e-12)
        shuffled = counts[rng.permutation(counts.shape[0])][:, rng.permutation(counts.shape[1])]
        assert fleiss_kappa(RatingTable(shuffled)).kappa == pytest.approx(base.kappa, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_kappa_one_iff_rows_concentrated(seed):
    counts = random_table(np.random.default_rng(seed))
    if (counts.sum(axis=0) > 0).sum() < 2:
        return
    concentrated = bool(((counts > 0).sum(axis=1) == 1).all())
    assert (fleiss_kappa(RatingTable(counts)).kappa == pytest.approx(1.0, abs=1e-12)) == concentrated


def test_bands():
    assert interpretation_band(-0.1) == "poor agreement"
    assert interpretation_band(0.1) == "slight agreement"
    assert interpretation_band(0.364) == "fair agreement"
    assert interpretation_band(0.5) == "moderate agreement"
    assert interpretation_band(0.95) == "almost perfect agreement"


def test_ratings_csv(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("item,rater,rating\nQ1,a,1\nQ1,b,1\nQ2,a,0\nQ2,b,1\n\n", encoding="utf-8")
    t = load_ratings_csv(p)
    assert t.items == ["Q1", "Q2"]
    assert t.counts.tolist() == [[0, 2], [1, 1]]
    rep = json.loads(kappa_report_json(fleiss_kappa(t), t))
    assert rep["n_items"] == 2 and rep["raters_per_item"] == 2
    p.write_text("Q1,a,1\nQ1,a,0\n", encoding="utf-8")
    with pytest.raises(DataError, match="twice"):
        load_ratings_csv(p)
    p.write_text("Q1,a,2\n", encoding="utf-8")
    with pytest.raises(DataError, match="0 or 1"):
        load_ratings_csv(p)


def axis(lang, words):
    return SemanticAxis(lang, 0, 1.0, [(w, 1.0) for w in words])


def test_questionnaire_layout_and_roundtrip():
    assert parse_questionnaire(export_questionnaire([], {})) == {}
    lookup = {("en", 0): axis("en", ["eyes", "see", "rib", "extra"]),
              ("ja", 2): axis("ja", ["視界", "網膜", "凝視"]),
              ("zh", 1): axis("zh", ["觀看", "凝視", "眼"]),
              ("en", 5): axis("en", ["a", "b", "c"]),
              ("ja", 0): axis("ja", ["x", "y", "z"])}
    clusters = [CrossLanguageCluster([("en", 0), ("ja", 2), ("zh", 1)]),
                CrossLanguageCluster([("en", 5), ("ja", 0)])]
    form = export_questionnaire(clusters, lookup)
    items = [l for l in form.splitlines() if l.startswith("[ ]")]
    assert items[0] == ("[ ] Q1 en:[`eyes' `see' `rib'] ja:[`視界' `網膜' `凝視'] "
                        "zh:[`觀看' `凝視' `眼']")
    assert len(items) == 2
    checked = form.replace("[ ] Q", "[x] Q")
    t = ratings_from_forms([checked, checked, checked])
    assert t.counts.tolist() == [[0, 3], [0, 3]]
    half = checked.replace("[x] Q2", "[ ] Q2")
    assert ratings_from_forms([checked, half]).counts.tolist() == [[0, 2], [1, 1]]
    with pytest.raises(DataError, match="no interpreted axis"):
        export_questionnaire([CrossLanguageCluster([("en", 9), ("ja", 0)])], lookup)

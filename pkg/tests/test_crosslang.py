import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from semaxes import crosslang
from semaxes.crosslang import (CrossSimilarity, bh_fdr_select, bonferroni_policy,
                               cluster_across_languages, correlation_pvalue, cross_similarity,
                               make_policy, similarity_threshold)
from semaxes.errors import DataError

from oracles import naive_bh


def test_cross_similarity_duplicate_row_and_errors():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(3, 50))
    B = rng.normal(size=(4, 60))
    B[2, :40] = A[1, :40]
    cs = cross_similarity(A, B, 40, "en", "ja")
    assert cs.matrix.shape == (3, 4)
    assert cs.matrix[1, 2] == pytest.approx(1.0, abs=1e-14)
    assert (cs.matrix >= 0).all() and (cs.matrix <= 1).all()
    with pytest.raises(ValueError):
        cross_similarity(A, B, 2)
    with pytest.raises(DataError):
        cross_similarity(A, B, 55)


def test_independent_rows_concentrate_near_zero():
    rng = np.random.default_rng(1)
    cs = cross_similarity(rng.normal(size=(40, 6903)), rng.normal(size=(40, 6903)), 6903)
    assert np.quantile(cs.matrix, 0.95) < 0.03


def test_pvalue_boundaries_and_errors():
    assert correlation_pvalue(0.0, 10) == 1.0
    assert correlation_pvalue(1.0, 10) == 0.0
    with pytest.raises(ValueError):
        correlation_pvalue(1.2, 10)
    with pytest.raises(ValueError):
        correlation_pvalue(0.5, 2)


def test_pvalue_matches_student_t_route():
    # independent route: t = r sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom
    for r, n in [(0.05, 500), (0.111, 6903), (0.2, 100), (0.7, 5), (0.01, 3)]:
        t = r * np.sqrt((n - 2) / (1 - r * r))
        assert correlation_pvalue(r, n) == pytest.approx(2 * stats.t.sf(t, n - 2), rel=1e-9)


def test_pvalue_frozen_values():
    # the beta survival function is a second scipy route
    assert correlation_pvalue(0.1110, 6903) == pytest.approx(
        stats.beta.sf(0.1110 ** 2, 0.5, 6901 / 2), rel=1e-10)
    # 40-digit quadrature of the correlation density (1 - r^2)^((n-4)/2) / B(1/2, (n-2)/2)
    assert correlation_pvalue(0.2, 100) == pytest.approx(0.046036286460054138, rel=1e-10)
    assert correlation_pvalue(0.05, 500) == pytest.approx(0.26445048634802573, rel=1e-10)
    assert correlation_pvalue(0.1110, 6903) == pytest.approx(2.2600978207635851e-20, rel=1e-8)


def test_threshold_inversion():
    for alpha, n in [(2.754821e-5, 6903), (1e-4, 2000), (0.05, 30), (0.3, 4)]:
        t = similarity_threshold(alpha, n)
        assert correlation_pvalue(t, n) <= alpha
        assert correlation_pvalue(max(t - 1e-9, 0.0), n) > alpha
        assert t == pytest.approx(np.sqrt(stats.beta.isf(alpha, 0.5, (n - 2) / 2)), abs=1e-9)
    assert similarity_threshold(1.0, 10) == 0.0


def test_bonferroni_examples():
    assert bonferroni_policy(0.05, 1) == 0.05
    assert bonferroni_policy(0.01, 100) == pytest.approx(1e-4, rel=1e-15)
    assert abs(bonferroni_policy(0.01, 363) - 2.754821e-5) <= 1e-11
    with pytest.raises(ValueError):
        bonferroni_policy(0.01, 0)


def test_bh_examples():
    rej, thr = bh_fdr_select([0.001, 0.008, 0.039, 0.041, 0.042, 0.06], 0.05)
    assert rej.tolist() == [0, 1] and thr == 0.008
    rej, thr = bh_fdr_select([1.0] * 5, 0.05)
    assert rej.size == 0 and thr == 0.0
    rej, thr = bh_fdr_select([0.05], 0.05)
    assert rej.tolist() == [0] and thr == 0.05
    assert bh_fdr_select([], 0.05)[0].size == 0
    with pytest.raises(ValueError):
        bh_fdr_select([0.5, 1.5], 0.05)


@given(st.lists(st.sampled_from([0.0, 0.001, 0.004, 0.01, 0.02, 0.05, 0.3, 1.0])
                | st.floats(0, 1), min_size=1, max_size=40),
       st.sampled_from([0.01, 0.05, 0.2]))
@settings(max_examples=200, deadline=None)
def test_bh_matches_naive_oracle(pvals, alpha):
    rej, thr = bh_fdr_select(pvals, alpha)
    expect = naive_bh(pvals, alpha)
    assert set(rej.tolist()) == expect
    assert thr == (max(pvals[i] for i in expect) if expect else 0.0)


@given(st.integers(3, 200), st.floats(0.01, 0.98), st.floats(0.001, 0.01))
@settings(max_examples=100, deadline=None)
def test_pvalue_monotone(n, s, ds):
    assert correlation_pvalue(s + ds, n) < correlation_pvalue(s, n)
    assert correlation_pvalue(s, n + 5) <= correlation_pvalue(s, n)


def shared_axes(rng, da, db, n, shared):
    A = rng.laplace(size=(da, n))
    B = rng.laplace(size=(db, n))
    for i, j in shared:
        B[j] = A[i]
    return A, B


def test_single_shared_axis_gives_one_cluster():
    rng = np.random.default_rng(3)
    A, B = shared_axes(rng, 6, 5, 3000, [(2, 4)])
    sims = [cross_similarity(A, B, 3000, "en", "ja")]
    pol = make_policy(sims)
    cl = cluster_across_languages(sims, pol)
    assert len(cl) == 1
    assert cl[0].members == [("en", 2), ("ja", 4)]
    key = (("en", 2), ("ja", 4))
    assert cl[0].sigma[key] == pytest.approx(1.0)
    assert cl[0].pvalues[key] == 0.0


def test_policy_fields():
    rng = np.random.default_rng(4)
    A, B = shared_axes(rng, 4, 4, 1000, [(0, 0)])
    sims = [cross_similarity(A, B, 1000)]
    pol = make_policy(sims, 0.01, 0.01)
    assert pol.n_tests == 16 and pol.n_tests_convention == "pairs"
    assert pol.corrected_fp == 0.01 / 16
    assert pol.n_fdr_rejections == 1
    assert pol.corrected_fd == pytest.approx(0.01 * 1 / 16)
    assert pol.sim_threshold_fp >= pol.sim_threshold_fd
    pol2 = make_policy(sims, n_tests=363)
    assert pol2.n_tests_convention == "explicit" and pol2.corrected_fp == 0.01 / 363
    with pytest.raises(DataError):
        make_policy([sims[0], CrossSimilarity("a", "c", np.zeros((4, 2)), 999)])


def test_three_language_cluster_and_constraints():
    rng = np.random.default_rng(5)
    n = 2000
    E = rng.laplace(size=(5, n))
    J = rng.laplace(size=(5, n))
    Z = rng.laplace(size=(5, n))
    J[1] = E[0]
    Z[3] = E[0] + 0.3 * rng.normal(size=n)
    J[4] = E[2]
    J[2] = 0.8 * E[2] + 0.6 * rng.normal(size=n)  # second ja axis near en:2
    sims = [cross_similarity(E, J, n, "en", "ja"), cross_similarity(E, Z, n, "en", "zh"),
            cross_similarity(J, Z, n, "ja", "zh")]
    pol = make_policy(sims)
    cl = cluster_across_languages(sims, pol)
    members = [c.members for c in cl]
    assert [("en", 0), ("ja", 1), ("zh", 3)] in members
    assert [("en", 2), ("ja", 4)] in members
    for c in cl:
        langs = c.languages
        assert len(set(langs)) == len(langs) >= 2
        assert max(c.sigma.values()) >= pol.sim_threshold_fp
    # ja:2 may not join a cluster that already holds a ja axis
    assert all(("ja", 2) not in m for m in members if ("en", 2) in m)


def test_founding_needs_fpr_joining_needs_fdr():
    # hand-built similarities straddling the two cutoffs
    n = 500
    pol = make_policy([CrossSimilarity("a", "b", np.zeros((1, 1)), n)], n_tests=10)
    fp, fd = pol.sim_threshold_fp, pol.sim_threshold_fd
    mid = 0.5 * (fp + fd)
    assert fd < mid < fp
    ab = CrossSimilarity("a", "b", np.array([[mid]]), n)
    ac = CrossSimilarity("a", "c", np.array([[0.0]]), n)
    bc = CrossSimilarity("b", "c", np.array([[0.0]]), n)
    assert cluster_across_languages([ab, ac, bc], pol) == []
    ab.matrix[0, 0] = 0.99
    ac.matrix[0, 0] = bc.matrix[0, 0] = 2 * mid
    got = cluster_across_languages([ab, ac, bc], pol)
    # linkage of c to {a, b} is mean(2 mid, 2 mid) = 2 mid, above the FDR cutoff
    assert [c.members for c in got] == [[("a", 0), ("b", 0), ("c", 0)]]


def test_summary_and_reports():
    rng = np.random.default_rng(6)
    A, B = shared_axes(rng, 5, 5, 1500, [(0, 1), (3, 3)])
    sims = [cross_similarity(A, B, 1500, "en", "ja")]
    pol = make_policy(sims)
    cl = cluster_across_languages(sims, pol)
    s = crosslang.summary(cl, pol, {"en": 5, "ja": 5})
    assert s["Number of Clusters Found"] == 2
    assert s["Number of Clustered Vectors"] == 4
    assert s["Clustered Vector Percentage"] == 40.0
    assert s["Average Number of Vectors per Cluster"] == 2.0
    assert s["Language Combinations"] == {"en-ja": 2}
    for key in ("alpha_FD_corr", "alpha_FP_corr", "Minimum Similarity Considered Significant by FDR",
                "Minimum Similarity Considered Significant by FPR"):
        assert key in s
    rep = json.loads(crosslang.cluster_report_json(cl, pol, {"en": 5, "ja": 5}))
    assert rep["clusters"][0]["members"] == [["en", 0], ["ja", 1]]
    assert rep["policy"]["n_tests"] == 25
    hist = crosslang.similarity_histogram_tsv(sims[0], bins=10).splitlines()
    assert hist[0].startswith("# en-ja\ttop_0.05_quantile\t")
    cut = float(hist[0].split("\t")[2])
    assert cut == pytest.approx(np.quantile(sims[0].matrix, 0.95))
    rows = [r.split("\t") for r in hist[2:]]
    assert len(rows) == 10 and sum(int(r[2]) for r in rows) == 25
    assert rows[-1][3] == "1"

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semaxes.embeddings import (BilingualDictionary, EmbeddingMatrix, VocabularyPlan,
                                build_vocabulary_plan, load_bilingual_dictionary,
                                load_frequency_list, materialize, parse_vec_file, write_vec_file)
from semaxes.errors import DataError


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def emb(words, dim=3, seed=0):
    rng = np.random.default_rng(seed)
    return EmbeddingMatrix(words=list(words), values=rng.normal(size=(dim, len(words))))


# ---- parse_vec_file

def test_parse_small_file(tmp_path):
    m = parse_vec_file(write(tmp_path, "a.vec", "2 3\ncat 1 0 0\ndog 0 1 0\n"))
    assert m.words == ["cat", "dog"]
    assert m.values.shape == (3, 2)
    np.testing.assert_array_equal(m.values, [[1, 0], [0, 1], [0, 0]])
    assert m.duplicates_skipped == 0


def test_field_count_mismatch(tmp_path):
    with pytest.raises(DataError, match="expected 3 values"):
        parse_vec_file(write(tmp_path, "a.vec", "1 3\ncat 1 0\n"))


def test_duplicate_word_skipped_and_counted(tmp_path):
    m = parse_vec_file(write(tmp_path, "a.vec", "3 2\ncat 1 2\ndog 3 4\ncat 5 6\n"))
    assert m.words == ["cat", "dog"]
    assert m.duplicates_skipped == 1
    # first occurrence wins
    np.testing.assert_array_equal(m.values[:, 0], [1, 2])


@pytest.mark.parametrize("text,msg", [
    ("", "empty"),
    ("two 3\ncat 1 2 3\n", "malformed header"),
    ("1\ncat 1\n", "malformed header"),
    ("1 2\ncat 1 nan\n", "non-finite"),
    ("1 2\ncat 1 inf\n", "non-finite"),
    ("1 2\ncat 1 x\n", "unparsable"),
])
def test_parse_errors(tmp_path, text, msg):
    with pytest.raises(DataError, match=msg):
        parse_vec_file(write(tmp_path, "a.vec", text))


def test_invalid_utf8(tmp_path):
    p = tmp_path / "a.vec"
    p.write_bytes(b"1 1\n\xff\xfe 1\n")
    with pytest.raises(DataError, match="UTF-8"):
        parse_vec_file(p)


def test_limit_and_unicode(tmp_path):
    p = write(tmp_path, "a.vec", "3 2\n単語 1 2\n言葉 3 4\nword 5 6\n")
    m = parse_vec_file(p, limit=2)
    assert m.words == ["単語", "言葉"]
    with pytest.raises(ValueError):
        parse_vec_file(p, limit=0)


@given(st.integers(2, 6), st.integers(1, 12), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_write_parse_roundtrip(tmp_path_factory, d, n, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(scale=10.0 ** rng.integers(-3, 4), size=(d, n))
    m = EmbeddingMatrix(words=[f"w{j}" for j in range(n)], values=vals)
    p = tmp_path_factory.mktemp("rt") / "x.vec"
    write_vec_file(m, p)
    back = parse_vec_file(p)
    assert back.words == m.words
    np.testing.assert_allclose(back.values, vals, rtol=1e-9, atol=0)


def test_embedding_matrix_invariants():
    with pytest.raises(DataError):
        EmbeddingMatrix(words=["a", "a"], values=np.zeros((2, 2)))
    with pytest.raises(DataError):
        EmbeddingMatrix(words=["a"], values=np.zeros((2, 2)))
    with pytest.raises(DataError):
        EmbeddingMatrix(words=["a"], values=np.array([[np.nan], [0.0]]))


# ---- dictionaries and frequency lists

def test_dictionary_one_to_many_and_dedup(tmp_path):
    d = load_bilingual_dictionary(write(tmp_path, "d.txt", "word 単語\nword 言葉\nword 単語\n\n"))
    assert d.pairs == [("word", "単語"), ("word", "言葉")]


def test_dictionary_empty_and_bad(tmp_path):
    assert len(load_bilingual_dictionary(write(tmp_path, "e.txt", ""))) == 0
    with pytest.raises(DataError, match="expected 2 tokens"):
        load_bilingual_dictionary(write(tmp_path, "b.txt", "a b c\n"))


def test_frequency_list_first_token(tmp_path):
    assert load_frequency_list(write(tmp_path, "f.txt", "the 123\nof\n\nand 7\n")) == ["the", "of", "and"]


# ---- vocabulary plan

def three_lang_setup():
    e0 = emb(["a", "b", "c", "d", "e", "f"])
    e1 = emb(["x", "y", "z", "x2", "p", "q"], seed=1)
    e2 = emb(["u", "v", "w", "r", "s"], seed=2)
    d1 = BilingualDictionary([("a", "x"), ("b", "y"), ("b", "y2"), ("c", "z"), ("zz", "q")], "en", "ja")
    d2 = BilingualDictionary([("a", "u"), ("b", "missing"), ("b", "v"), ("c", "MISSING")], "en", "zh")
    freqs = [["d", "a", "e", "f"], ["p", "x", "q", "z"], ["r", "s", "u", "w"]]
    return [d1, d2], freqs, [e0, e1, e2]


def test_single_pivot_triple():
    e = [emb(["a", "f0"]), emb(["x", "f1"]), emb(["y", "f2"])]
    d = [BilingualDictionary([("a", "x")]), BilingualDictionary([("a", "y")])]
    plan = build_vocabulary_plan(d, [["f0"], ["f1"], ["f2"]], e, 1)
    assert plan.common_triples == [("a", "x", "y")]
    assert plan.common_size == 1


def test_plan_rules():
    dicts, freqs, embs = three_lang_setup()
    plan = build_vocabulary_plan(dicts, freqs, embs, 4, ["en", "ja", "zh"])
    # "b": first present translation per language; "c": zh translation missing
    assert plan.common_triples == [("a", "x", "u"), ("b", "y", "v")]
    assert plan.fill_words == [["d", "e"], ["p", "q"], ["r", "s"]]
    for k in range(3):
        words = plan.words(k)
        assert len(words) == 4 == len(set(words))
    assert plan.skipped["no_translation"] == 1
    assert plan.skipped["pivot_missing"] == 1


def test_plan_errors():
    dicts, freqs, embs = three_lang_setup()
    with pytest.raises(DataError, match="smaller than the common block"):
        build_vocabulary_plan(dicts, freqs, embs, 1)
    with pytest.raises(DataError, match="exhausted"):
        build_vocabulary_plan(dicts, freqs, embs, 10)
    bad = [dicts[0], BilingualDictionary(dicts[1].pairs, "fr", "zh")]
    with pytest.raises(DataError, match="pivot"):
        build_vocabulary_plan(bad, freqs, embs, 4)


def test_plan_is_deterministic_and_json_roundtrips():
    dicts, freqs, embs = three_lang_setup()
    a = build_vocabulary_plan(dicts, freqs, embs, 4, ["en", "ja", "zh"])
    b = build_vocabulary_plan(dicts, freqs, embs, 4, ["en", "ja", "zh"])
    assert a.to_json().encode() == b.to_json().encode()
    assert VocabularyPlan.from_json(a.to_json()) == a


def test_materialize_alignment_and_order():
    dicts, freqs, embs = three_lang_setup()
    plan = build_vocabulary_plan(dicts, freqs, embs, 4, ["en", "ja", "zh"])
    mats = materialize(plan, embs)
    for k, m in enumerate(mats):
        assert m.words == plan.words(k)
        idx = embs[k].index()
        for j, w in enumerate(m.words):
            np.testing.assert_array_equal(m.values[:, j], embs[k].values[:, idx[w]])
    # aligned columns are dictionary pairs, verified by re-lookup
    pairs = [set(d.pairs) for d in dicts]
    for j in range(plan.common_size):
        for k in (1, 2):
            assert (mats[0].words[j], mats[k].words[j]) in pairs[k - 1]


def test_permuting_fill_permutes_only_fill_columns():
    dicts, freqs, embs = three_lang_setup()
    plan = build_vocabulary_plan(dicts, freqs, embs, 4)
    swapped = VocabularyPlan(plan.languages, plan.common_triples,
                             [list(reversed(f)) for f in plan.fill_words], plan.total_size)
    a, b = materialize(plan, embs), materialize(swapped, embs)
    c = plan.common_size
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.values[:, :c], y.values[:, :c])
        np.testing.assert_array_equal(x.values[:, c:], y.values[:, c:][:, ::-1])


def test_materialize_missing_word_is_internal_error():
    dicts, freqs, embs = three_lang_setup()
    plan = build_vocabulary_plan(dicts, freqs, embs, 4)
    plan.fill_words[0][0] = "ghost"
    with pytest.raises(RuntimeError, match="ghost"):
        materialize(plan, embs)


def test_plan_with_two_languages():
    e = [emb(["a", "b", "c"]), emb(["x", "y", "z"])]
    plan = build_vocabulary_plan([BilingualDictionary([("b", "y")])], [["a", "c"], ["z", "x"]], e, 2)
    assert plan.words(0) == ["b", "a"]
    assert plan.words(1) == ["y", "z"]

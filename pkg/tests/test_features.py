import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from appsent.features import (FeatureConfig, Scheme, Vocabulary, all_configs, build_vocabulary,
                              extract_ngrams, vectorize, vectorize_corpus)


@pytest.mark.parametrize("tokens, n, grams", [
    (["good", "app"], 2, ["good app"]), (["a", "b", "c"], 1, ["a", "b", "c"]),
    (["a", "b"], 3, []), (["a", "b", "c"], 2, ["a b", "b c"])])
def test_extract_ngrams(tokens, n, grams):
    assert extract_ngrams(tokens, n) == grams


def test_nine_configs_in_table_order():
    tags = [c.tag for c in all_configs()]
    assert tags == ["Unigram+TP", "Unigram+TF", "Unigram+TF-IDF", "Bigram+TP", "Bigram+TF",
                    "Bigram+TF-IDF", "Trigram+TP", "Trigram+TF", "Trigram+TF-IDF"]
    assert [FeatureConfig.from_tag(t).tag for t in tags] == tags
    with pytest.raises(ValueError):
        FeatureConfig(4, Scheme.TP)


def test_min_df_defaults():
    assert FeatureConfig(1, Scheme.TP).min_document_frequency == 1
    assert FeatureConfig(2, Scheme.TP).min_document_frequency == 2
    assert FeatureConfig(3, Scheme.TF, 1).min_document_frequency == 1


def test_build_vocabulary_examples():
    v = build_vocabulary([["a", "b"], ["b"]], FeatureConfig(1, Scheme.TP, 1))
    assert v.term_to_index == {"a": 0, "b": 1} and v.df("a") == 1 and v.df("b") == 2
    assert v.corpus_size == 2
    v2 = build_vocabulary([["a", "b"], ["b"]], FeatureConfig(1, Scheme.TP, 2))
    assert v2.terms == ["b"]
    v3 = build_vocabulary([["a", "a"]], FeatureConfig(1, Scheme.TF, 1))
    assert v3.df("a") == 1
    with pytest.raises(ValueError):
        build_vocabulary([], FeatureConfig(1, Scheme.TP))


def _toy():
    corpus = [["good", "app"], ["bad", "app"], ["good", "good"]]
    return corpus, build_vocabulary(corpus, FeatureConfig(1, Scheme.TFIDF, 1))


def test_tfidf_hand_value():
    corpus, v = _toy()
    vec = vectorize(corpus[2], v, Scheme.TFIDF)
    assert vec.as_dict() == {v.term_to_index["good"]: pytest.approx(2 * math.log(3 / 2),
                                                                    abs=1e-12)}
    assert abs(vec.weights[0] - 0.810930) < 1e-6
    assert vectorize(corpus[2], v, Scheme.TP).as_dict() == {v.term_to_index["good"]: 1.0}
    assert vectorize(corpus[2], v, Scheme.TF).as_dict() == {v.term_to_index["good"]: 2.0}


def test_tfidf_zero_when_term_everywhere():
    v = build_vocabulary([["app", "a"], ["app"]], FeatureConfig(1, Scheme.TFIDF, 1))
    vec = vectorize(["app"], v, Scheme.TFIDF)
    assert vec.weights.tolist() == [0.0]


def test_oov_ignored_and_l2_norm():
    _, v = _toy()
    vec = vectorize(["good", "zzz", "app", "app"], v, Scheme.TF)
    assert sorted(vec.as_dict().values()) == [1.0, 2.0]
    assert vec.l2_norm == pytest.approx(math.sqrt(5))


def test_export_roundtrip_and_digest():
    corpus, v = _toy()
    text = v.export()
    assert text.splitlines()[0] == "C=3"
    back = Vocabulary.from_export("# a comment\n" + text)
    assert back.term_to_index == v.term_to_index and back.digest == v.digest
    assert back.corpus_size == 3
    bi = build_vocabulary(corpus, FeatureConfig(2, Scheme.TF, 1))
    assert Vocabulary.from_export(bi.export()).ngram_order == 2


def test_vectorize_corpus_matches_single():
    corpus, v = _toy()
    for scheme in Scheme:
        X = vectorize_corpus(corpus, v, scheme)
        for i, doc in enumerate(corpus):
            row = X.getrow(i)
            assert dict(zip(row.indices.tolist(), row.data.tolist())) == vectorize(
                doc, v, scheme).as_dict()


tokens = st.lists(st.sampled_from(list("abcdef")), max_size=8)


@settings(max_examples=300)
@given(st.lists(tokens, min_size=1, max_size=6), tokens, st.integers(1, 3))
def test_vector_invariants(corpus, doc, n):
    v = build_vocabulary(corpus, FeatureConfig(n, Scheme.TF, 1))
    assert np.all(v.document_frequency >= 1) and np.all(v.document_frequency <= len(corpus))
    assert sorted(v.term_to_index.values()) == list(range(len(v)))
    tp, tf, tfidf = (vectorize(doc, v, s) for s in Scheme)
    assert tp.indices.tolist() == tf.indices.tolist() == tfidf.indices.tolist()
    assert np.all(np.diff(tp.indices) > 0) and np.all(tp.weights == 1)
    in_vocab = sum(g in v.term_to_index for g in extract_ngrams(doc, n))
    assert tf.weights.sum() == in_vocab
    assert np.all(tfidf.weights >= 0)
    zero = tfidf.weights == 0
    assert np.array_equal(zero, v.document_frequency[tfidf.indices] == len(corpus))
    shuffled = build_vocabulary(list(reversed(corpus)), FeatureConfig(n, Scheme.TF, 1))
    assert vectorize(doc, shuffled, Scheme.TFIDF).as_dict() == tfidf.as_dict()

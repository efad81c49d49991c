import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from appsent.classifiers import (MODEL_NAMES, KnnModel, LinearKind, LinearModel, gini,
                                 one_vs_rest_train, predict_knn, predict_linear, predict_nb,
                                 train_bagged, train_knn, train_linear, train_model, train_nb,
                                 train_rf)
from appsent.classifiers.ensemble import BaggedModel, bootstrap_rows
from appsent.classifiers.linear import gradient, objective
from appsent.classifiers.persist import ModelFileError, dumps, loads
from appsent.features import DocumentVector, FeatureConfig, Scheme, build_vocabulary, vectorize
from appsent.sentiment import Sentiment
from conftest import INVARIANT_CASES

P, N, U = Sentiment.Positive, Sentiment.Negative, Sentiment.Neutral


def vec(d):
    idx = np.array(sorted(d), dtype=np.int64)
    return DocumentVector(idx, np.array([float(d[i]) for i in idx.tolist()]))


def nb_toy():
    docs = [["good", "good"], ["good", "app"], ["bad", "app"]]
    labels = [P, P, N]
    vocab = build_vocabulary(docs, FeatureConfig(1, Scheme.TF, 1))
    X = [vectorize(d, vocab, Scheme.TF) for d in docs]
    return train_nb(X, labels, alpha=1.0), vocab


# --- naive Bayes ----------------------------------------------------------

def test_nb_hand_values():
    model, vocab = nb_toy()
    ip, ineg = model.classes.index(P), model.classes.index(N)
    like = np.exp(model.term_log_likelihoods)
    assert abs(like[ip, vocab.term_to_index["good"]] - 4 / 7) < 1e-9
    assert abs(like[ineg, vocab.term_to_index["bad"]] - 2 / 5) < 1e-9
    assert abs(math.exp(model.class_log_priors[ip]) - 2 / 3) < 1e-9
    assert np.allclose(like.sum(axis=1), 1.0, atol=1e-9)
    assert abs(np.exp(model.class_log_priors).sum() - 1) < 1e-9


def test_nb_posterior_example():
    model, vocab = nb_toy()
    label, scores = predict_nb(model, vectorize(["good", "bad"], vocab, Scheme.TF))
    assert label is P
    assert abs(math.exp(scores[P]) - 2 / 3 * 4 / 7 * 1 / 7) < 1e-9
    assert abs(math.exp(scores[N]) - 1 / 3 * 1 / 5 * 2 / 5) < 1e-9
    assert predict_nb(model, vec({}))[0] is P


def test_nb_degenerate_cases():
    single = train_nb([vec({0: 1}), vec({1: 2})], [N, N])
    assert single.predict([vec({0: 3}), vec({})]) == [N, N]
    tie = train_nb([vec({0: 1}), vec({0: 1})], [N, P])
    assert tie.predict([vec({0: 5})]) == [P]
    huge = train_nb([vec({0: 5}), vec({1: 1})], [P, N], alpha=1e12, n_features=4)
    assert np.allclose(np.exp(huge.term_log_likelihoods), 0.25, atol=1e-9)
    with pytest.raises(ValueError):
        train_nb([vec({0: 1})], [P], alpha=0)


@settings(max_examples=200)
@given(st.floats(-50, 50))
def test_nb_argmax_shift_invariant(c):
    model, vocab = nb_toy()
    x = vectorize(["good", "bad", "app"], vocab, Scheme.TF)
    before = model.predict([x])
    model.class_log_priors = model.class_log_priors + c
    assert model.predict([x]) == before


# --- linear models --------------------------------------------------------

def test_linear_gradient_at_zero():
    X = sp.csr_matrix(np.array([[1.0, 0.0, 0.0]]))
    gw, gb = gradient(np.zeros(3), 0.0, X, np.array([1.0]), LinearKind.Logistic, 0.0)
    assert gw.tolist() == [-0.5, 0.0, 0.0] and gb == -0.5


def _fd_gradient(w, b, X, y, kind, lam, h=1e-6):
    gw = np.zeros_like(w)
    for j in range(len(w)):
        e = np.zeros_like(w)
        e[j] = h
        gw[j] = (objective(w + e, b, X, y, kind, lam) - objective(w - e, b, X, y, kind, lam)) / (
            2 * h)
    gb = (objective(w, b + h, X, y, kind, lam) - objective(w, b - h, X, y, kind, lam)) / (2 * h)
    return gw, gb


def _rel_err(a, b):
    # relative error, with entries near zero compared absolutely
    a, b = np.ravel(a), np.ravel(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-2)))


@pytest.mark.parametrize("kind", list(LinearKind))
@pytest.mark.parametrize("seed", range(5))
def test_linear_gradients_match_finite_differences(kind, seed):
    rng = np.random.default_rng(seed)
    X = sp.random(8, 5, density=0.6, random_state=seed, format="csr")
    y = np.where(rng.random(8) < 0.5, 1.0, -1.0)
    w, b = rng.normal(0, 0.7, 5), float(rng.normal())
    m = y * (X @ w + b)
    # keep the hinge away from its kink so the derivative exists
    if kind is LinearKind.HingeSvm:
        assert np.min(np.abs(m - 1)) > 1e-3
    gw, gb = gradient(w, b, X, y, kind, 0.01)
    fw, fb = _fd_gradient(w, b, X, y, kind, 0.01)
    assert _rel_err(np.append(gw, gb), np.append(fw, fb)) < 1e-6


@pytest.mark.parametrize("kind", list(LinearKind))
def test_linear_separable_pair(kind):
    X, y = [vec({0: 1}), vec({1: 1})], [P, N]
    model = train_linear(X, y, kind, l2_lambda=0.0, n_features=2)
    assert model.predict(X) == y
    assert all(math.isfinite(v) for v in model.loss_history) and len(model.loss_history) == 20


def test_linear_preconditions():
    with pytest.raises(ValueError):
        train_linear([vec({0: 1})], [P], epochs=0)
    with pytest.raises(ValueError, match="one_vs_rest"):
        train_linear([vec({0: 1}), vec({1: 1}), vec({2: 1})], [P, N, U])


def test_predict_linear_examples():
    assert predict_linear(LinearModel(np.zeros(4), 0.0, "Logistic", 0), vec({1: 3})) == (P, 0.0)
    w = np.zeros(4)
    w[3] = 2.0
    assert predict_linear(LinearModel(w, 0.0, "HingeSvm", 0), vec({3: 1.5})) == (P, 3.0)
    w = np.zeros(1)
    w[0] = -1.0
    assert predict_linear(LinearModel(w, 0.0, "Logistic", 0), vec({0: 2}))[0] is N


def test_l2_shrinks_weights():
    rng = np.random.default_rng(3)
    X = sp.random(60, 12, density=0.3, random_state=3, format="csr")
    y = [P if v else N for v in rng.random(60) < 0.5]
    for kind in LinearKind:
        free = train_linear(X, y, kind, l2_lambda=0.0, seed=4)
        reg = train_linear(X, y, kind, l2_lambda=0.5, seed=4)
        assert np.linalg.norm(reg.weights) <= np.linalg.norm(free.weights)


def test_linear_seed_reproducible():
    X = sp.random(30, 6, density=0.4, random_state=1, format="csr")
    y = [P, N] * 15
    a = train_linear(X, y, seed=9)
    b = train_linear(X, y, seed=9)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


# --- KNN ------------------------------------------------------------------

def test_knn_examples():
    stored = [vec({0: 1}), vec({1: 1}), vec({2: 1})]
    model = train_knn(stored, [N, P, N], k=1)
    assert predict_knn(model, vec({1: 2})) is P
    eq = train_knn([vec({0: 1}), vec({0: 1}), vec({0: 1})], [P, P, N], k=3)
    assert predict_knn(eq, vec({0: 1})) is P
    lowest = train_knn([vec({0: 1}), vec({1: 1}), vec({2: 1})], [N, N, P], k=1)
    assert predict_knn(lowest, vec({})) is N


def test_knn_tie_on_similarity_goes_to_lower_index():
    model = train_knn([vec({0: 1}), vec({0: 2}), vec({1: 1})], [N, P, P], k=1)
    assert predict_knn(model, vec({0: 5})) is N


def test_knn_k_validation():
    with pytest.raises(ValueError):
        KnnModel([vec({0: 1})], [P], k=3)
    with pytest.raises(ValueError):
        KnnModel([vec({0: 1}), vec({1: 1})], [P, N], k=2)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.dictionaries(st.integers(0, 5), st.integers(1, 3), max_size=3),
                          st.sampled_from([P, N])), min_size=1, max_size=9).filter(
    lambda d: len(d) % 2 == 1),
    st.dictionaries(st.integers(0, 5), st.integers(1, 3), max_size=3))
def test_knn_full_k_predicts_majority(data, query):
    labels = [lab for _, lab in data]
    model = train_knn([vec(d) for d, _ in data], labels, k=len(data), n_features=6)
    majority = P if labels.count(P) > labels.count(N) else N
    assert predict_knn(model, vec(query)) is majority


# --- random forest and bagging ---------------------------------------------

def test_gini_values():
    assert gini([2, 2]) == pytest.approx(0.5, abs=1e-12)
    assert gini([2, 0]) == 0.0 and gini([0, 2]) == 0.0
    assert gini([1, 2]) == pytest.approx(1 - 1 / 9 - 4 / 9, abs=1e-12)


def test_rf_pure_single_tree():
    model = train_rf([vec({0: 1}), vec({1: 2})], [N, N], n_trees=1, bootstrap=False)
    assert model.trees[0].n_nodes == 1
    assert model.predict([vec({0: 9}), vec({})]) == [N, N]
    with pytest.raises(ValueError):
        train_rf([vec({0: 1})], [P], n_trees=0)


def test_rf_fits_separable_data():
    X = [vec({0: 1}), vec({0: 2}), vec({1: 1}), vec({1: 3})]
    model = train_rf(X, [P, P, N, N], n_trees=1, bootstrap=False, feature_subsample=2)
    assert model.predict(X) == [P, P, N, N]


def test_bagging_examples():
    X = [vec({0: 1}), vec({1: 1}), vec({0: 2}), vec({1: 3})]
    y = [P, N, P, N]
    one = train_bagged("nb", X, y, n_members=1, seed=7)
    rows = bootstrap_rows(4, 7)
    Xm = [X[i] for i in rows]
    ym = [y[i] for i in rows]
    if len(set(ym)) > 1:
        base = train_nb(Xm, ym, n_features=2)
        assert one.predict(X) == base.predict(X)

    class Fixed:
        def __init__(self, label):
            self.label = label

        def predict(self, X):
            return [self.label]

    assert BaggedModel("nb", [Fixed(P), Fixed(P), Fixed(N)], 0).predict([vec({0: 1})]) == [P]
    assert BaggedModel("nb", [Fixed(N)] * 3, 0).predict([vec({0: 1})]) == [N]
    with pytest.raises(ValueError):
        train_bagged("nb", X, y, n_members=2)
    with pytest.raises(ValueError):
        train_bagged("svm", X, y)


small_data = st.lists(st.tuples(st.dictionaries(st.integers(0, 5), st.integers(1, 4),
                                                max_size=3),
                                st.sampled_from([P, N])), min_size=2, max_size=12)


@settings(max_examples=INVARIANT_CASES)
@given(small_data, st.integers(0, 2 ** 32))
def test_forest_reproducible(data, seed):
    X = [vec(d) for d, _ in data]
    y = [lab for _, lab in data]
    a = train_rf(X, y, n_trees=3, seed=seed, n_features=6)
    b = train_rf(X, y, n_trees=3, seed=seed, n_features=6)
    assert dumps(a) == dumps(b)
    assert a.predict(X) == b.predict(X)


@settings(max_examples=INVARIANT_CASES)
@given(small_data, st.integers(0, 2 ** 32), st.sampled_from(["nb", "lr"]))
def test_bagging_reproducible(data, seed, base):
    X = [vec(d) for d, _ in data]
    y = [lab for _, lab in data]
    params = {"epochs": 2} if base == "lr" else {}
    a = train_bagged(base, X, y, n_members=3, seed=seed, n_features=6, **params)
    b = train_bagged(base, X, y, n_members=3, seed=seed, n_features=6, **params)
    assert dumps(a) == dumps(b)
    assert a.predict(X) == b.predict(X)


# --- one-vs-rest ----------------------------------------------------------

def test_ovr_binary_matches_direct_model():
    rng = np.random.default_rng(0)
    X = sp.random(40, 8, density=0.4, random_state=0, format="csr")
    y = [P if v else N for v in rng.random(40) < 0.5]
    direct = train_linear(X, y, LinearKind.HingeSvm, seed=2)
    ovr = one_vs_rest_train("svm", X, y, seed=2)
    assert ovr.predict(X) == direct.predict(X)


def test_ovr_three_disjoint_classes():
    X = [vec({0: 1}), vec({1: 1}), vec({2: 1})]
    y = [P, N, U]
    model = one_vs_rest_train("lr", X, y, epochs=200, learning_rate=0.5, l2_lambda=0.0)
    assert model.predict(X) == y


def test_ovr_equal_margins_prefer_positive():
    model = one_vs_rest_train("lr", [vec({0: 1}), vec({1: 1}), vec({2: 1})], [P, N, U])
    for m in model.models:
        m.weights[:] = 0.0
        m.bias = 0.0
    assert model.predict([vec({0: 1})]) == [P]


# --- grid names and persistence -------------------------------------------

def _grid_data():
    rng = np.random.default_rng(5)
    X = sp.random(30, 10, density=0.3, random_state=5, format="csr")
    y = [P if v else N for v in rng.random(30) < 0.5]
    return X, y


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_persistence_roundtrip(name):
    X, y = _grid_data()
    params = {"rf": {"n_trees": 5}, "bagging": {"n_members": 3}}
    model = train_model(name, X, y, seed=1, params=params)
    text = dumps(model, config="Unigram+TF", vocab_digest="abc")
    back, meta = loads(text, "abc")
    assert meta["config"] == "Unigram+TF"
    assert back.predict(X) == model.predict(X)
    assert dumps(back, config="Unigram+TF", vocab_digest="abc") == text
    with pytest.raises(ModelFileError):
        loads(text, "other")


def test_train_model_rejects_unknown_name():
    X, y = _grid_data()
    with pytest.raises(ValueError):
        train_model("GBM", X, y)


def test_ternary_grid_models():
    X = [vec({0: 1}), vec({1: 1}), vec({2: 1})] * 3
    y = [P, N, U] * 3
    for name in MODEL_NAMES:
        params = {"rf": {"n_trees": 5}, "bagging": {"n_members": 3}, "knn": {"k": 1}}
        model = train_model(name, X, y, seed=0, params=params, multiclass=True)
        assert set(model.predict(X)) <= {P, N, U}

"""Classical classifiers over sparse document vectors.

``train_model`` maps the grid's model names to the trainers::

    SVM, KNN, LR, RF, NB, LR (Bagging), NB (Bagging)
"""
from appsent.classifiers.base import ConstantModel, split_pairs
from appsent.classifiers.ensemble import (BaggedModel, OneVsRestModel, one_vs_rest_train,
                                          train_bagged)
from appsent.classifiers.forest import RandomForestModel, gini, train_rf
from appsent.classifiers.knn import KnnModel, predict_knn, train_knn
from appsent.classifiers.linear import (LinearKind, LinearModel, predict_linear,
                                        train_linear)
from appsent.classifiers.nb import NaiveBayesModel, predict_nb, train_nb

MODEL_NAMES = ("SVM", "KNN", "LR", "RF", "NB", "LR (Bagging)", "NB (Bagging)")

DEFAULT_PARAMS = {
    "linear": {"epochs": 20, "learning_rate": 0.1, "l2_lambda": 1e-4},
    "nb": {"alpha": 1.0},
    "knn": {"k": 5},
    "rf": {"n_trees": 100, "max_depth": 32, "feature_subsample": None},
    "bagging": {"n_members": 25},
}


def _merged(params, key):
    out = dict(DEFAULT_PARAMS[key])
    out.update((params or {}).get(key, {}))
    return out


def train_model(name, X, y, seed=0, params=None, multiclass=False):
    """Train one of :data:`MODEL_NAMES`. Linear models go through one-vs-rest when
    ``multiclass`` is set."""
    lin = _merged(params, "linear")
    nb = _merged(params, "nb")
    if name in ("SVM", "LR"):
        kind = LinearKind.HingeSvm if name == "SVM" else LinearKind.Logistic
        if multiclass:
            return one_vs_rest_train(name.lower(), X, y, seed=seed, **lin)
        return train_linear(X, y, kind, seed=seed, **lin)
    if name == "NB":
        return train_nb(X, y, **nb)
    if name == "KNN":
        return train_knn(X, y, **_merged(params, "knn"))
    if name == "RF":
        return train_rf(X, y, seed=seed, **_merged(params, "rf"))
    if name in ("LR (Bagging)", "NB (Bagging)"):
        base = name.split()[0].lower()
        n_members = _merged(params, "bagging")["n_members"]
        return train_bagged(base, X, y, n_members=n_members, seed=seed,
                            **(lin if base == "lr" else nb))
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")


__all__ = [
    "BaggedModel", "ConstantModel", "KnnModel", "LinearKind", "LinearModel", "MODEL_NAMES",
    "NaiveBayesModel", "OneVsRestModel", "RandomForestModel", "gini", "one_vs_rest_train",
    "predict_knn", "predict_linear", "predict_nb", "split_pairs", "train_bagged",
    "train_knn", "train_linear", "train_model", "train_nb", "train_rf",
]

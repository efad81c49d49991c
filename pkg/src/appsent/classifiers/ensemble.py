"""Bootstrap aggregation and the one-vs-rest wrapper."""
import numpy as np

from appsent.classifiers.base import ConstantModel, classes_of, label_array, to_matrix
from appsent.classifiers.linear import LinearKind, LinearModel, train_linear
from appsent.classifiers.nb import NaiveBayesModel, train_nb
from appsent.rng import stream
from appsent.sentiment import Sentiment

BAGGABLE = ("lr", "nb")


def _fit_base(base_kind, X, y, seed, params):
    if len(np.unique(y)) < 2:
        return ConstantModel(Sentiment(int(y[0])))
    if base_kind == "lr" and len(np.unique(y)) > 2:
        return one_vs_rest_train("lr", X, y, seed=seed, **params)
    if base_kind == "lr":
        return train_linear(X, [Sentiment(int(v)) for v in y], LinearKind.Logistic, seed=seed,
                            **params)
    return train_nb(X, [Sentiment(int(v)) for v in y], **params)


class BaggedModel:
    kind = "bagged"

    def __init__(self, base_kind, members, seed):
        self.base_kind = base_kind
        self.members = list(members)
        self.seed = int(seed)

    def votes(self, X):
        X = to_matrix(X)
        votes = np.zeros((X.shape[0], len(Sentiment)), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for m in self.members:
            votes[rows, [int(p) for p in m.predict(X)]] += 1
        return votes

    def predict(self, X):
        return [Sentiment(int(i)) for i in np.argmax(self.votes(X), axis=1)]

    def to_state(self):
        from appsent.classifiers.persist import model_state
        return {"base_kind": self.base_kind, "seed": self.seed,
                "members": [model_state(m) for m in self.members]}

    @classmethod
    def from_state(cls, s):
        from appsent.classifiers.persist import model_from_state
        return cls(s["base_kind"], [model_from_state(m) for m in s["members"]], s["seed"])


def bootstrap_rows(n, seed):
    return stream(seed).integers(0, n, size=n)


def train_bagged(base_kind, X, y, n_members=25, seed=0, n_features=None, **params):
    """Member ``i`` is fitted on ``len(y)`` draws with replacement seeded by ``seed + i``."""
    base_kind = base_kind.lower()
    if base_kind not in BAGGABLE:
        raise ValueError(f"bagging supports base learners {BAGGABLE}, got {base_kind!r}")
    if n_members < 1 or n_members % 2 == 0:
        raise ValueError("n_members must be odd and >= 1")
    X = to_matrix(X, n_features)
    y = label_array(y)
    members = []
    for i in range(n_members):
        rows = bootstrap_rows(len(y), seed + i)
        members.append(_fit_base(base_kind, X[rows], y[rows], seed + i, params))
    return BaggedModel(base_kind, members, seed)


class OneVsRestModel:
    """One binary model per class; the highest margin wins, ties go to enum order."""

    kind = "ovr"

    def __init__(self, classes, models):
        self.classes = tuple(classes)
        self.models = list(models)

    def margins(self, X):
        X = to_matrix(X, len(self.models[0].weights))
        return np.column_stack([m.margins(X) for m in self.models])

    def predict(self, X):
        return [self.classes[i] for i in np.argmax(self.margins(X), axis=1)]

    def to_state(self):
        return {"classes": [c.name for c in self.classes],
                "models": [m.to_state() for m in self.models]}

    @classmethod
    def from_state(cls, s):
        return cls([Sentiment[c] for c in s["classes"]],
                   [LinearModel.from_state(m) for m in s["models"]])


def one_vs_rest_train(base_kind, X, y, seed=0, n_features=None, **params):
    kind = {"lr": LinearKind.Logistic, "svm": LinearKind.HingeSvm}[base_kind.lower()]
    X = to_matrix(X, n_features)
    y = label_array(y)
    classes = classes_of(y)
    if len(classes) < 2:
        raise ValueError("one-vs-rest needs at least two classes")
    models = []
    for c in classes:
        binary = [Sentiment.Positive if v == int(c) else Sentiment.Negative for v in y]
        models.append(train_linear(X, binary, kind, seed=seed, **params))
    return OneVsRestModel(classes, models)


__all__ = ["BaggedModel", "OneVsRestModel", "train_bagged", "one_vs_rest_train",
           "NaiveBayesModel"]

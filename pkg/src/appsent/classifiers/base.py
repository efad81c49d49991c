"""Shared helpers for the classifier implementations."""
import numpy as np
import scipy.sparse as sp

from appsent.features import DocumentVector, as_matrix
from appsent.sentiment import Sentiment


def to_matrix(X, n_features=None):
    """CSR matrix from a sparse matrix, DocumentVectors or a single vector."""
    if isinstance(X, DocumentVector):
        X = [X]
    if sp.issparse(X):
        X = sp.csr_matrix(X, dtype=np.float64)
        if n_features is not None and X.shape[1] != n_features:
            X = sp.csr_matrix((X.data, X.indices, X.indptr), shape=(X.shape[0], n_features))
        return X
    if n_features is None:
        n_features = 1 + max((int(v.indices.max()) for v in X if len(v)), default=-1)
    return as_matrix(list(X), n_features)


def label_array(y):
    return np.array([int(Sentiment.parse(v)) for v in y], dtype=np.int64)


def classes_of(y):
    return tuple(Sentiment(int(c)) for c in np.unique(y))


def split_pairs(data):
    """``[(vector, label), ...]`` -> ``(vectors, labels)``."""
    vectors = [v for v, _ in data]
    labels = [Sentiment.parse(lab) for _, lab in data]
    return vectors, labels


def majority(labels):
    """Most frequent label; ties go to the earlier Sentiment."""
    counts = np.bincount([int(v) for v in labels], minlength=len(Sentiment))
    return Sentiment(int(np.argmax(counts)))


class ConstantModel:
    """Predicts one class. Stands in for a base learner fed a single-class resample."""

    kind = "constant"

    def __init__(self, label):
        self.label = Sentiment.parse(label)

    def predict(self, X):
        return [self.label] * to_matrix(X).shape[0]

    def to_state(self):
        return {"label": self.label.name}

    @classmethod
    def from_state(cls, state):
        return cls(Sentiment[state["label"]])

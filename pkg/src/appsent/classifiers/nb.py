import numpy as np

from appsent.classifiers.base import classes_of, label_array, to_matrix
from appsent.sentiment import Sentiment


class NaiveBayesModel:
    """Multinomial naive Bayes with additive smoothing."""

    kind = "nb"

    def __init__(self, classes, class_log_priors, term_log_likelihoods, smoothing_alpha):
        self.classes = tuple(classes)
        self.class_log_priors = np.asarray(class_log_priors, dtype=np.float64)
        self.term_log_likelihoods = np.asarray(term_log_likelihoods, dtype=np.float64)
        self.smoothing_alpha = float(smoothing_alpha)

    @property
    def vocab_size(self):
        return self.term_log_likelihoods.shape[1]

    def log_scores(self, X):
        X = to_matrix(X, self.vocab_size)
        return np.asarray(X @ self.term_log_likelihoods.T) + self.class_log_priors

    def predict(self, X):
        # np.argmax keeps the first maximum, and classes are in enum order
        return [self.classes[i] for i in np.argmax(self.log_scores(X), axis=1)]

    def to_state(self):
        return {"classes": [c.name for c in self.classes],
                "class_log_priors": self.class_log_priors.tolist(),
                "term_log_likelihoods": self.term_log_likelihoods.tolist(),
                "smoothing_alpha": self.smoothing_alpha}

    @classmethod
    def from_state(cls, state):
        return cls([Sentiment[c] for c in state["classes"]], state["class_log_priors"],
                   state["term_log_likelihoods"], state["smoothing_alpha"])


def train_nb(X, y, alpha=1.0, n_features=None):
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    y = label_array(y)
    if len(y) == 0:
        raise ValueError("cannot train on empty data")
    X = to_matrix(X, n_features)
    classes = classes_of(y)
    V = X.shape[1]
    priors = []
    likelihoods = []
    for c in classes:
        mask = y == int(c)
        counts = np.asarray(X[mask].sum(axis=0)).ravel()
        priors.append(np.log(mask.sum() / len(y)))
        likelihoods.append(np.log((counts + alpha) / (counts.sum() + alpha * V)))
    return NaiveBayesModel(classes, priors, np.array(likelihoods).reshape(len(classes), V), alpha)


def predict_nb(model, vec):
    """Label and per-class log-score for a single document."""
    scores = model.log_scores([vec])[0]
    return model.classes[int(np.argmax(scores))], dict(zip(model.classes, scores.tolist()))

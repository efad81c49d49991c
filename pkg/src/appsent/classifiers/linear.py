"""Logistic regression and linear SVM trained by per-sample SGD.

Both minimise ``mean(loss) + (lam / 2) * ||w||^2``; the bias is not
regularised. The step size at update ``t`` (1-based, counted across epochs)
is ``learning_rate / sqrt(t)``.
"""
import enum
import math

import numba
import numpy as np

from appsent.classifiers.base import label_array, to_matrix
from appsent.rng import stream
from appsent.sentiment import Sentiment


class LinearKind(enum.Enum):
    Logistic = "Logistic"
    HingeSvm = "HingeSvm"


_KIND_CODE = {LinearKind.Logistic: 0, LinearKind.HingeSvm: 1}


class LinearModel:
    def __init__(self, weights, bias, kind, l2_lambda, loss_history=()):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.kind = LinearKind(kind)
        self.l2_lambda = float(l2_lambda)
        self.loss_history = list(loss_history)

    def margins(self, X):
        return to_matrix(X, len(self.weights)) @ self.weights + self.bias

    def predict(self, X):
        return [Sentiment.Positive if m >= 0 else Sentiment.Negative for m in self.margins(X)]

    def to_state(self):
        return {"kind": self.kind.value, "weights": self.weights.tolist(), "bias": self.bias,
                "l2_lambda": self.l2_lambda, "loss_history": self.loss_history}

    @classmethod
    def from_state(cls, state):
        return cls(state["weights"], state["bias"], state["kind"], state["l2_lambda"],
                   state.get("loss_history", ()))


def predict_linear(model, vec):
    m = float(model.margins([vec] if not hasattr(vec, "shape") else vec)[0])
    return (Sentiment.Positive if m >= 0 else Sentiment.Negative), m


def _signs(y):
    y = label_array(y)
    present = set(np.unique(y).tolist())
    if not present <= {int(Sentiment.Positive), int(Sentiment.Negative)}:
        raise ValueError("train_linear is binary (Positive/Negative); "
                         "use one_vs_rest_train for three classes")
    return np.where(y == int(Sentiment.Positive), 1.0, -1.0)


def sample_losses(margins, y, kind):
    z = y * margins
    if LinearKind(kind) is LinearKind.Logistic:
        return np.logaddexp(0.0, -z)
    return np.maximum(0.0, 1.0 - z)


def objective(weights, bias, X, y, kind, l2_lambda):
    """Mean loss plus the L2 penalty, with ``y`` in {+1, -1}."""
    m = X @ weights + bias
    return float(sample_losses(m, y, kind).mean() + 0.5 * l2_lambda * weights @ weights)


def gradient(weights, bias, X, y, kind, l2_lambda):
    """Analytic gradient of :func:`objective` with respect to (weights, bias)."""
    m = X @ weights + bias
    z = y * m
    if LinearKind(kind) is LinearKind.Logistic:
        g = -y * 0.5 * (1.0 - np.tanh(0.5 * z))  # -y * sigmoid(-z)
    else:
        g = np.where(z < 1.0, -y, 0.0)
    n = X.shape[0]
    return X.T @ g / n + l2_lambda * weights, float(g.sum() / n)


@numba.njit(cache=True)
def _sgd_epoch(indptr, indices, data, y, order, v, state, lr, lam, kind):
    # state = [scale, bias, t]; the weights are scale * v
    scale, bias, t = state[0], state[1], state[2]
    for k in range(order.shape[0]):
        i = order[k]
        t += 1.0
        eta = lr / math.sqrt(t)
        m = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            m += v[indices[p]] * data[p]
        m = scale * m + bias
        z = y[i] * m
        if kind == 0:
            if z >= 0:
                e = math.exp(-z)
                g = -y[i] * e / (1.0 + e)
            else:
                g = -y[i] / (1.0 + math.exp(z))
        else:
            g = -y[i] if z < 1.0 else 0.0
        shrink = 1.0 - eta * lam
        if shrink <= 1e-9:
            v[:] = 0.0
            scale = 1.0
        else:
            scale *= shrink
            if scale < 1e-9:
                v *= scale
                scale = 1.0
        if g != 0.0:
            step = eta * g / scale
            for p in range(indptr[i], indptr[i + 1]):
                v[indices[p]] -= step * data[p]
        bias -= eta * g
    state[0], state[1], state[2] = scale, bias, t


def train_linear(X, y, kind=LinearKind.Logistic, epochs=20, learning_rate=0.1,
                 l2_lambda=1e-4, seed=0, n_features=None):
    kind = LinearKind(kind)
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    signs = _signs(y)
    X = to_matrix(X, n_features)
    X.sort_indices()
    v = np.zeros(X.shape[1])
    state = np.array([1.0, 0.0, 0.0])
    history = []
    for epoch in range(epochs):
        order = stream(seed, epoch).permutation(X.shape[0]).astype(np.int64)
        _sgd_epoch(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, signs,
                   order, v, state, float(learning_rate), float(l2_lambda), _KIND_CODE[kind])
        w = v * state[0]
        loss = objective(w, state[1], X, signs, kind, l2_lambda)
        if not math.isfinite(loss):
            raise FloatingPointError(f"linear training diverged at epoch {epoch}")
        history.append(loss)
    return LinearModel(v * state[0], state[1], kind, l2_lambda, history)

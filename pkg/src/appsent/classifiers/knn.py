import numba
import numpy as np
import scipy.sparse as sp

from appsent.classifiers.base import label_array, to_matrix
from appsent.sentiment import Sentiment


def _unit_rows(X):
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sp.diags(inv) @ X


@numba.njit(cache=True)
def _vote(indptr, indices, sims, labels, k, n_stored, n_labels):
    """Majority label among each query's k most similar stored rows.

    Rows absent from the sparse similarity row have similarity 0. Equal
    similarities go to the lower stored index.
    """
    n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    votes = np.zeros(n_labels, dtype=np.int64)
    for r in range(n):
        votes[:] = 0
        a, b = indptr[r], indptr[r + 1]
        cols = indices[a:b]
        vals = sims[a:b]
        keep = vals > 0.0
        cols = cols[keep]
        vals = vals[keep]
        by_col = np.argsort(cols)
        cols = cols[by_col]
        vals = vals[by_col]
        order = np.argsort(-vals, kind="mergesort")
        taken = 0
        for o in range(min(k, order.shape[0])):
            votes[labels[cols[order[o]]]] += 1
            taken += 1
        # fill with zero-similarity rows, lowest index first
        j = 0
        c = 0
        while taken < k and j < n_stored:
            if c < cols.shape[0] and cols[c] == j:
                c += 1
            else:
                votes[labels[j]] += 1
                taken += 1
            j += 1
        best = 0
        for lab in range(n_labels):
            if votes[lab] > votes[best]:
                best = lab
        out[r] = best
    return out


class KnnModel:
    """Cosine-similarity k-nearest-neighbours over stored training vectors."""

    kind = "knn"

    def __init__(self, stored_vectors, labels, k=5):
        self.stored = to_matrix(stored_vectors)
        self.labels = label_array(labels)
        if k < 1 or k > self.stored.shape[0]:
            raise ValueError(f"k must be in 1..{self.stored.shape[0]}, got {k}")
        if k % 2 == 0:
            raise ValueError(f"k must be odd so binary votes cannot tie, got {k}")
        self.k = int(k)
        self._unit = _unit_rows(self.stored).tocsr()

    def predict(self, X, chunk=512):
        Q = _unit_rows(to_matrix(X, self.stored.shape[1])).tocsr()
        out = []
        for start in range(0, Q.shape[0], chunk):
            sims = (Q[start:start + chunk] @ self._unit.T).tocsr()
            codes = _vote(sims.indptr.astype(np.int64), sims.indices.astype(np.int64),
                          sims.data.astype(np.float64), self.labels, self.k,
                          self.stored.shape[0], len(Sentiment))
            out.extend(Sentiment(int(i)) for i in codes)
        return out

    def to_state(self):
        S = self.stored
        return {"k": self.k, "labels": self.labels.tolist(), "shape": list(S.shape),
                "indptr": S.indptr.tolist(), "indices": S.indices.tolist(),
                "data": S.data.tolist()}

    @classmethod
    def from_state(cls, state):
        S = sp.csr_matrix((state["data"], state["indices"], state["indptr"]),
                          shape=tuple(state["shape"]))
        return cls(S, [Sentiment(v) for v in state["labels"]], state["k"])


def train_knn(X, y, k=5, n_features=None):
    return KnnModel(to_matrix(X, n_features), y, k)


def predict_knn(model, vec):
    return model.predict([vec] if not hasattr(vec, "shape") else vec)[0]

"""Random forest of Gini decision trees over sparse non-negative features.

Each tree sees a bootstrap resample and, at every node, a random subset of
``feature_subsample`` features. Features are split as ``x <= threshold`` go
left. The split search visits only the nonzero entries of the node's rows,
so a whole tree level costs one pass over the resample's nonzeros.

Node-level feature draws use splitmix64 seeded from the tree's stream, so a
forest is reproducible from ``(seed, data order)`` alone.
"""
import math

import numba
import numpy as np

from appsent.classifiers.base import label_array, to_matrix
from appsent.rng import child_seed, stream
from appsent.sentiment import Sentiment

_MASK64 = (1 << 64) - 1


def gini(counts):
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p * p).sum())


@numba.njit(cache=True)
def _splitmix(state):
    state[0] = (state[0] + np.uint64(0x9E3779B97F4A7C15))
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _randint(state, n):
    return np.int64(_splitmix(state) % np.uint64(n))


@numba.njit(cache=True)
def _gini_sum(counts, n):
    # n * gini impurity
    if n == 0:
        return 0.0
    s = 0.0
    for c in range(counts.shape[0]):
        s += counts[c] * counts[c]
    return n - s / n


@numba.njit(cache=True)
def _build_tree(indptr, indices, data, y, n_classes, n_features, feature_subsample,
                max_depth, seed):
    n = y.shape[0]
    rng = np.empty(1, dtype=np.uint64)
    rng[0] = np.uint64(seed)

    cap = 2 * n + 1
    feat = np.full(cap, -1, dtype=np.int64)
    thresh = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap, dtype=np.int64)
    n_nodes = 1

    samples = np.arange(n)
    # stack entries: node id, start, end (into samples), depth
    stack = np.empty((cap, 4), dtype=np.int64)
    stack[0, 0], stack[0, 1], stack[0, 2], stack[0, 3] = 0, 0, n, 0
    top = 1

    cand_pos = np.full(n_features, -1, dtype=np.int64)
    m = min(feature_subsample, n_features)
    cands = np.empty(m, dtype=np.int64)
    node_counts = np.zeros(n_classes, dtype=np.int64)

    while top > 0:
        top -= 1
        node, start, end, depth = stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3]
        size = end - start
        node_counts[:] = 0
        for s in range(start, end):
            node_counts[y[samples[s]]] += 1
        best_class = 0
        for c in range(n_classes):
            if node_counts[c] > node_counts[best_class]:
                best_class = c
        value[node] = best_class
        if depth >= max_depth or size < 2 or node_counts[best_class] == size:
            continue

        # Floyd's algorithm: m distinct features out of n_features
        k = 0
        for j in range(n_features - m, n_features):
            t = _randint(rng, j + 1)
            if cand_pos[t] >= 0:
                t = j
            cand_pos[t] = k
            cands[k] = t
            k += 1

        # gather (value, class) of nonzero candidate entries, grouped per candidate
        per = np.zeros(m + 1, dtype=np.int64)
        for s in range(start, end):
            r = samples[s]
            for p in range(indptr[r], indptr[r + 1]):
                if data[p] > 0.0 and cand_pos[indices[p]] >= 0:
                    per[cand_pos[indices[p]] + 1] += 1
        for c in range(m):
            per[c + 1] += per[c]
        fill = per[:m].copy()
        vals = np.empty(per[m])
        labs = np.empty(per[m], dtype=np.int64)
        for s in range(start, end):
            r = samples[s]
            for p in range(indptr[r], indptr[r + 1]):
                if data[p] > 0.0 and cand_pos[indices[p]] >= 0:
                    q = fill[cand_pos[indices[p]]]
                    vals[q] = data[p]
                    labs[q] = y[r]
                    fill[cand_pos[indices[p]]] += 1

        parent = _gini_sum(node_counts.astype(np.float64), float(size))
        best_score = parent - 1e-12
        best_feat = -1
        best_thr = 0.0
        lc = np.zeros(n_classes)
        rc = np.zeros(n_classes)
        for c in range(m):
            a, b = per[c], per[c + 1]
            nnz = b - a
            if nnz == 0:
                continue
            order = np.argsort(vals[a:b], kind="mergesort")
            # left starts as the implicit zeros
            for cl in range(n_classes):
                lc[cl] = node_counts[cl]
                rc[cl] = 0.0
            for q in range(a, b):
                lc[labs[q]] -= 1.0
                rc[labs[q]] += 1.0
            n_left = size - nnz
            for o in range(nnz):
                cur = vals[a + order[o]]
                prev = 0.0 if o == 0 else vals[a + order[o - 1]]
                if o == 0 or cur != prev:
                    n_right = size - n_left
                    if n_left > 0 and n_right > 0:
                        score = _gini_sum(lc, float(n_left)) + _gini_sum(rc, float(n_right))
                        if score < best_score:
                            best_score = score
                            best_feat = cands[c]
                            best_thr = 0.5 * (prev + cur)
                lab = labs[a + order[o]]
                lc[lab] += 1.0
                rc[lab] -= 1.0
                n_left += 1

        for c in range(m):
            cand_pos[cands[c]] = -1
        if best_feat < 0:
            continue

        # partition samples[start:end] by the chosen split
        lo = start
        hi = end - 1
        while lo <= hi:
            r = samples[lo]
            x = 0.0
            for p in range(indptr[r], indptr[r + 1]):
                if indices[p] == best_feat:
                    x = data[p]
                    break
            if x <= best_thr:
                lo += 1
            else:
                samples[lo], samples[hi] = samples[hi], samples[lo]
                hi -= 1
        feat[node] = best_feat
        thresh[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3] = n_nodes, start, lo, depth + 1
        top += 1
        stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3] = n_nodes + 1, lo, end, depth + 1
        top += 1
        n_nodes += 2

    return feat[:n_nodes], thresh[:n_nodes], left[:n_nodes], right[:n_nodes], value[:n_nodes]


@numba.njit(cache=True)
def _apply_tree(indptr, indices, data, feat, thresh, left, right, value):
    n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    for r in range(n):
        node = 0
        while feat[node] >= 0:
            x = 0.0
            lo, hi = indptr[r], indptr[r + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < feat[node]:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < indptr[r + 1] and indices[lo] == feat[node]:
                x = data[lo]
            node = left[node] if x <= thresh[node] else right[node]
        out[r] = value[node]
    return out


class DecisionTree:
    def __init__(self, feature, threshold, left, right, value, classes):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.int64)
        self.classes = tuple(classes)

    @property
    def n_nodes(self):
        return len(self.feature)

    def predict_codes(self, X):
        X = X.tocsr()
        X.sort_indices()
        codes = _apply_tree(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data,
                            self.feature, self.threshold, self.left, self.right, self.value)
        return np.array([int(self.classes[c]) for c in codes], dtype=np.int64)

    def to_state(self):
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist(), "classes": [c.name for c in self.classes]}

    @classmethod
    def from_state(cls, s):
        return cls(s["feature"], s["threshold"], s["left"], s["right"], s["value"],
                   [Sentiment[c] for c in s["classes"]])


def fit_tree(X, y, feature_subsample, max_depth, seed):
    X = to_matrix(X)
    X.sort_indices()
    y = label_array(y)
    classes = tuple(Sentiment(int(c)) for c in np.unique(y))
    codes = np.searchsorted(np.array([int(c) for c in classes]), y).astype(np.int64)
    parts = _build_tree(X.indptr.astype(np.int64), X.indices.astype(np.int64),
                        X.data.astype(np.float64), codes, len(classes), X.shape[1],
                        max(1, int(feature_subsample)), int(max_depth),
                        np.uint64(seed & _MASK64))
    return DecisionTree(*parts, classes)


class RandomForestModel:
    kind = "rf"

    def __init__(self, trees, feature_subsample, seed, n_features):
        if not trees:
            raise ValueError("a forest needs at least one tree")
        self.trees = list(trees)
        self.feature_subsample = int(feature_subsample)
        self.seed = int(seed)
        self.n_features = int(n_features)

    def predict(self, X):
        X = to_matrix(X, self.n_features)
        votes = np.zeros((X.shape[0], len(Sentiment)), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for t in self.trees:
            votes[rows, t.predict_codes(X)] += 1
        return [Sentiment(int(i)) for i in np.argmax(votes, axis=1)]

    def to_state(self):
        return {"feature_subsample": self.feature_subsample, "seed": self.seed,
                "n_features": self.n_features, "trees": [t.to_state() for t in self.trees]}

    @classmethod
    def from_state(cls, s):
        return cls([DecisionTree.from_state(t) for t in s["trees"]], s["feature_subsample"],
                   s["seed"], s["n_features"])


def train_rf(X, y, n_trees=100, max_depth=32, feature_subsample=None, seed=0,
             bootstrap=True, n_features=None):
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    X = to_matrix(X, n_features)
    y = label_array(y)
    if feature_subsample is None:
        feature_subsample = math.ceil(math.sqrt(X.shape[1]))
    trees = []
    for t in range(n_trees):
        if bootstrap:
            rows = stream(seed, t).integers(0, X.shape[0], size=X.shape[0])
        else:
            rows = np.arange(X.shape[0])
        trees.append(fit_tree(X[rows], y[rows], feature_subsample, max_depth,
                              child_seed(seed, t, 1)))
    return RandomForestModel(trees, feature_subsample, seed, X.shape[1])

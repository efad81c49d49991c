"""N-gram vocabularies and TP / TF / TF-IDF document vectors."""
import enum
import hashlib
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class Scheme(enum.Enum):
    TP = "TP"
    TF = "TF"
    TFIDF = "TF-IDF"


ORDER_NAMES = {1: "Unigram", 2: "Bigram", 3: "Trigram"}


@dataclass(frozen=True)
class FeatureConfig:
    ngram_order: int
    scheme: Scheme
    min_document_frequency: int | None = None

    def __post_init__(self):
        if self.ngram_order not in ORDER_NAMES:
            raise ValueError(f"ngram_order must be 1, 2 or 3, got {self.ngram_order}")
        if not isinstance(self.scheme, Scheme):
            object.__setattr__(self, "scheme", parse_scheme(self.scheme))
        if self.min_document_frequency is None:
            # trigram vocabularies explode without pruning
            object.__setattr__(self, "min_document_frequency", 1 if self.ngram_order == 1 else 2)
        if self.min_document_frequency < 1:
            raise ValueError("min_document_frequency must be positive")

    @property
    def tag(self):
        return f"{ORDER_NAMES[self.ngram_order]}+{self.scheme.value}"

    @classmethod
    def from_tag(cls, tag, min_document_frequency=None):
        order, _, scheme = tag.partition("+")
        orders = {v.lower(): k for k, v in ORDER_NAMES.items()}
        return cls(orders[order.lower()], parse_scheme(scheme), min_document_frequency)


def parse_scheme(value):
    key = str(value).upper().replace("-", "").replace("_", "")
    return {"TP": Scheme.TP, "TF": Scheme.TF, "TFIDF": Scheme.TFIDF}[key]


def all_configs():
    """The nine (order, scheme) configurations in grid order."""
    return [FeatureConfig(n, s) for n in (1, 2, 3) for s in Scheme]


def extract_ngrams(tokens, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


@dataclass(frozen=True)
class Vocabulary:
    term_to_index: dict
    document_frequency: np.ndarray
    corpus_size: int
    ngram_order: int = 1

    def __len__(self):
        return len(self.term_to_index)

    @property
    def terms(self):
        return sorted(self.term_to_index, key=self.term_to_index.__getitem__)

    def df(self, term):
        return int(self.document_frequency[self.term_to_index[term]])

    def idf(self):
        return np.log(self.corpus_size / self.document_frequency)

    def export(self):
        lines = [f"C={self.corpus_size}"]
        lines += [f"{t}\t{int(df)}" for t, df in zip(self.terms, self.document_frequency)]
        return "\n".join(lines) + "\n"

    @property
    def digest(self):
        return hashlib.sha256(self.export().encode("utf-8")).hexdigest()

    @classmethod
    def from_export(cls, text):
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        if not lines or not lines[0].startswith("C="):
            raise ValueError("vocabulary file must start with a 'C=<corpus_size>' line")
        corpus_size = int(lines[0][2:])
        pairs = [ln.rsplit("\t", 1) for ln in lines[1:] if ln]
        terms = sorted(t for t, _ in pairs)
        dfs = dict(pairs)
        order = len(terms[0].split(" ")) if terms else 1
        return cls({t: i for i, t in enumerate(terms)},
                   np.array([int(dfs[t]) for t in terms], dtype=np.int64),
                   corpus_size, order)


def build_vocabulary(corpus, config):
    if not corpus:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    df = Counter()
    for tokens in corpus:
        df.update(set(extract_ngrams(tokens, config.ngram_order)))
    terms = sorted(t for t, c in df.items() if c >= config.min_document_frequency)
    return Vocabulary({t: i for i, t in enumerate(terms)},
                      np.array([df[t] for t in terms], dtype=np.int64),
                      len(corpus), config.ngram_order)


@dataclass(frozen=True)
class DocumentVector:
    indices: np.ndarray
    weights: np.ndarray

    @property
    def l2_norm(self):
        return float(math.sqrt(float(np.dot(self.weights, self.weights))))

    def as_dict(self):
        return dict(zip(self.indices.tolist(), self.weights.tolist()))

    def __len__(self):
        return len(self.indices)


def _counts(tokens, vocab):
    counts = Counter()
    for gram in extract_ngrams(tokens, vocab.ngram_order):
        idx = vocab.term_to_index.get(gram)
        if idx is not None:
            counts[idx] += 1
    return counts


def _weigh(counts, vocab, scheme):
    idx = np.array(sorted(counts), dtype=np.int64)
    tf = np.array([counts[i] for i in idx.tolist()], dtype=np.float64)
    if scheme is Scheme.TP:
        return idx, np.ones_like(tf)
    if scheme is Scheme.TF:
        return idx, tf
    if len(idx) == 0:
        return idx, tf
    return idx, tf * np.log(vocab.corpus_size / vocab.document_frequency[idx])


def vectorize(tokens, vocab, scheme):
    idx, w = _weigh(_counts(tokens, vocab), vocab, scheme)
    return DocumentVector(idx, w)


def vectorize_corpus(corpus, vocab, scheme):
    """Row-per-document CSR matrix with the same weights as :func:`vectorize`."""
    indptr = [0]
    indices = []
    data = []
    for tokens in corpus:
        idx, w = _weigh(_counts(tokens, vocab), vocab, scheme)
        indices.append(idx)
        data.append(w)
        indptr.append(indptr[-1] + len(idx))
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    data = np.concatenate(data) if data else np.zeros(0)
    return sp.csr_matrix((data, indices, np.array(indptr)), shape=(len(corpus), len(vocab)))


def as_matrix(vectors, n_features):
    """Stack DocumentVectors (or pass a sparse matrix through) into CSR form."""
    if sp.issparse(vectors):
        return sp.csr_matrix(vectors)
    indptr = np.cumsum([0] + [len(v) for v in vectors])
    indices = (np.concatenate([v.indices for v in vectors]) if vectors
               else np.zeros(0, dtype=np.int64))
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), n_features))

"""GloVe text vectors and padded token-id batches."""
import io
import math
import os
from dataclasses import dataclass

import numpy as np

from appsent.rng import stream
from appsent.sentiment import Sentiment

PAD_ID = 0


class GloveError(Exception):
    pass


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict
    diagnostics: list

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word):
        return word in self.vectors


def load_glove(source):
    """Read ``word v1 ... vd`` lines. The first valid line fixes ``d``."""
    if isinstance(source, (str, os.PathLike)):
        fh = open(source, encoding="utf-8")
    elif isinstance(source, (bytes, bytearray)):
        fh = io.StringIO(bytes(source).decode("utf-8"))
    else:
        fh = source
    vectors = {}
    diagnostics = []
    dim = None
    with fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2 or not parts[0]:
                if line.strip():
                    diagnostics.append((lineno, "too few fields"))
                continue
            word, comps = parts[0], parts[1:]
            if dim is not None and len(comps) != dim:
                raise GloveError(f"line {lineno}: {len(comps)} components, expected {dim}")
            try:
                vec = np.array([float(c) for c in comps])
            except ValueError:
                diagnostics.append((lineno, "non-numeric component"))
                continue
            if not np.all(np.isfinite(vec)):
                diagnostics.append((lineno, "non-finite component"))
                continue
            dim = len(comps)
            if word in vectors:
                diagnostics.append((lineno, f"duplicate word {word!r}, last wins"))
            vectors[word] = vec
    if dim is None:
        raise GloveError("no vectors found; embedding dimension undeterminable")
    return EmbeddingTable(dim, vectors, diagnostics)


def build_embedding_matrix(vocab, table, seed=0):
    """Row 0 is the zero pad vector; row ``i + 1`` belongs to vocabulary term ``i``.

    Terms missing from the table get uniform components in [-0.05, 0.05]
    drawn from a stream keyed by the term index, so a row depends only on
    ``(seed, index)``.
    """
    terms = vocab.terms
    M = np.zeros((len(terms) + 1, table.dimension))
    for i, term in enumerate(terms):
        vec = table.vectors.get(term)
        if vec is None:
            M[i + 1] = stream(seed, i).uniform(-0.05, 0.05, size=table.dimension)
        else:
            M[i + 1] = vec
    return M


@dataclass
class SequenceBatch:
    token_ids: np.ndarray
    lengths: np.ndarray
    labels: np.ndarray | None
    max_len: int
    pad_id: int = PAD_ID

    def __len__(self):
        return len(self.lengths)

    def subset(self, rows):
        rows = np.asarray(rows)
        return SequenceBatch(self.token_ids[rows], self.lengths[rows],
                             None if self.labels is None else self.labels[rows], self.max_len)

    def trimmed(self, min_width=1):
        """Drop all-pad trailing columns; results are unchanged by padding."""
        width = max(int(self.lengths.max(initial=0)), min_width)
        ids = self.token_ids[:, :width]
        if ids.shape[1] < width:
            ids = np.pad(ids, ((0, 0), (0, width - ids.shape[1])))
        return SequenceBatch(ids, self.lengths, self.labels, width)


def encode_sequences(docs, vocab, max_len, labels=None):
    """Map token lists to ids (vocabulary index + 1), keep the first ``max_len``
    in-vocabulary tokens and right-pad with 0. Tokens outside the vocabulary are
    skipped."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    index = vocab.term_to_index
    ids = np.zeros((len(docs), max_len), dtype=np.int64)
    lengths = np.zeros(len(docs), dtype=np.int64)
    for r, tokens in enumerate(docs):
        row = [index[t] + 1 for t in tokens if t in index][:max_len]
        ids[r, :len(row)] = row
        lengths[r] = len(row)
    lab = None
    if labels is not None:
        lab = np.array([int(Sentiment.parse(v)) for v in labels], dtype=np.int64)
        if np.any(lab > int(Sentiment.Negative)):
            raise ValueError("neural models are binary; drop Neutral documents first")
    return SequenceBatch(ids, lengths, lab, max_len)


def batches(n, batch_size, rng=None):
    order = np.arange(n) if rng is None else rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def n_batches(n, batch_size):
    return math.ceil(n / batch_size)

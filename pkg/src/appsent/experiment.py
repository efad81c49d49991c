"""Split, featurize and evaluate: the pieces the grid and neural runs share."""
import traceback
from dataclasses import dataclass

import numpy as np

from appsent.classifiers import train_model
from appsent.features import (FeatureConfig, build_vocabulary, vectorize_corpus)
from appsent.metrics import BINARY, TERNARY, evaluate
from appsent.rng import child_seed, stream
from appsent.sentiment import Sentiment

# first element of every stream key, so the consumers never share a stream
SPLIT_KEY = 0
GRID_KEY = 1
NN_KEY = 2

GRID_FIELDS = ("config", "model", "val_accuracy", "val_positive_f", "val_macro_f",
               "sar_accuracy", "sar_positive_f", "sar_macro_f", "error")


def stratified_split(labels, fraction, seed):
    """Hold out ``round(fraction * n_c)`` documents of each class ``c``.

    Returns sorted (train_rows, validation_rows).
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError("validation fraction must be in [0, 1)")
    codes = np.array([int(Sentiment.parse(v)) for v in labels], dtype=np.int64)
    train, val = [], []
    for c in sorted(set(codes.tolist())):
        rows = np.flatnonzero(codes == c)
        rows = rows[stream(seed, SPLIT_KEY, c).permutation(len(rows))]
        k = int(round(fraction * len(rows)))
        val.append(rows[:k])
        train.append(rows[k:])
    cat = lambda parts: np.sort(np.concatenate(parts)) if parts else np.zeros(0, np.int64)  # noqa: E731
    return cat(train), cat(val)


def binary_only(docs):
    """Drop Neutral documents; returns (kept, dropped_count)."""
    kept = [d for d in docs if d.label is not Sentiment.Neutral]
    return kept, len(docs) - len(kept)


@dataclass
class Featurized:
    config: FeatureConfig
    vocab: object
    train: object
    evals: dict


def featurize(config, train_tokens, eval_tokens):
    """Vocabulary from the training tokens only; every split vectorized against it."""
    vocab = build_vocabulary(train_tokens, config)
    return Featurized(config, vocab, vectorize_corpus(train_tokens, vocab, config.scheme),
                      {k: vectorize_corpus(toks, vocab, config.scheme)
                       for k, toks in eval_tokens.items()})


def cell_seed(master, config_index, model_index):
    return child_seed(master, GRID_KEY, config_index, model_index)


def run_cell(name, X_train, y_train, evals, seed, params=None, ternary=False, tag=""):
    """Train one grid model and score it on every evaluation split.

    Returns ``(model_or_None, {split: EvaluationReport}, error_or_None)``;
    exceptions are caught so one bad cell never stops the grid.
    """
    classes = TERNARY if ternary else BINARY
    try:
        model = train_model(name, X_train, y_train, seed=seed, params=params,
                            multiclass=ternary)
        reports = {}
        for split, (X, y) in evals.items():
            if len(y):
                reports[split] = evaluate(y, model.predict(X), tag, classes)
        return model, reports, None
    except Exception as err:  # noqa: BLE001 - recorded per cell
        msg = f"{type(err).__name__}: {err}"
        return None, {}, msg if str(err) else traceback.format_exc(limit=1).strip()


def grid_row(tag, name, reports, error):
    row = {"config": tag, "model": name, "error": error or ""}
    for split in ("val", "sar"):
        r = reports.get(split)
        row[f"{split}_accuracy"] = "" if r is None else f"{r.accuracy:.6f}"
        row[f"{split}_positive_f"] = "" if r is None else f"{r.positive_f:.6f}"
        row[f"{split}_macro_f"] = "" if r is None else f"{r.macro_f:.6f}"
    return row

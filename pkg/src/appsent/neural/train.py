"""Mini-batch SGD training loop with per-epoch history."""
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from appsent.neural.embeddings import batches
from appsent.neural.models import (Arch, Shapes, backward, cross_entropy, forward,
                                   init_params, predict_codes)
from appsent.rng import stream
from appsent.sentiment import Sentiment


class TrainingDiverged(FloatingPointError):
    def __init__(self, epoch, value):
        super().__init__(f"non-finite training loss {value} in epoch {epoch}")
        self.epoch = epoch


@dataclass
class NeuralConfig:
    arch: Arch = Arch.LSTM
    max_len: int = 200
    embed_dim: int = 100
    hidden_units: int = 100
    cnn_filters: int = 64
    cnn_width: int = 3
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float | None = None
    seed: int = 0
    freeze_embeddings: bool = False
    shard_size: int = 32
    workers: int = 1

    def __post_init__(self):
        self.arch = Arch(self.arch)
        if self.learning_rate is None:
            self.learning_rate = 0.05 if self.arch is Arch.CNN else 0.1
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        for name in ("max_len", "embed_dim", "hidden_units", "cnn_filters", "cnn_width",
                     "batch_size", "shard_size", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")

    def shapes(self, vocab_rows):
        return Shapes(vocab_rows, self.embed_dim, self.hidden_units, self.cnn_filters,
                      self.cnn_width)

    def to_dict(self):
        d = asdict(self)
        d["arch"] = self.arch.value
        return d


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float | None = None
    val_accuracy: float | None = None


@dataclass
class TrainingHistory:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "train_acc", "val_loss", "val_acc"])
        for r in self.records:
            w.writerow([r.epoch, repr(r.train_loss), repr(r.train_accuracy),
                        "" if r.val_loss is None else repr(r.val_loss),
                        "" if r.val_accuracy is None else repr(r.val_accuracy)])
        return buf.getvalue()


def evaluate_batch(arch, params, data, batch_size=256):
    """Mean cross-entropy and accuracy over ``data`` in fixed order."""
    total_loss = 0.0
    correct = 0
    preds = []
    for rows in batches(len(data), batch_size):
        part = data.subset(rows)
        probs, _ = forward(arch, params, part)
        total_loss += cross_entropy(probs, part.labels) * len(rows)
        p = probs.argmax(axis=1)
        correct += int((p == part.labels).sum())
        preds.append(p)
    n = max(len(data), 1)
    return total_loss / n, correct / n, (np.concatenate(preds) if preds else np.zeros(0, int))


def batch_gradients(arch, params, batch, shard_size, freeze_embeddings, pool=None):
    """Mean gradient of a batch, summed shard by shard in a fixed order.

    Shards may run on worker threads; the reduction order never changes, so the
    result is bit-identical with or without a pool.
    """
    n = len(batch)
    shards = [np.arange(s, min(s + shard_size, n)) for s in range(0, n, shard_size)]

    def one(rows):
        part = batch.subset(rows)
        probs, cache = forward(arch, params, part)
        g = backward(arch, params, cache, part.labels, freeze_embeddings)
        return g, cross_entropy(probs, part.labels) * len(rows)

    results = list(pool.map(one, shards)) if pool is not None else [one(r) for r in shards]
    total = {k: np.zeros_like(v) for k, v in results[0][0].items()}
    loss_sum = 0.0
    for (g, l), rows in zip(results, shards):
        w = len(rows) / n
        for k in total:
            total[k] += w * g[k]
        loss_sum += l
    return total, loss_sum / n


def train(train_data, val_data, config, embeddings=None, vocab_rows=None):
    """Train ``config.arch``; returns ``(params, TrainingHistory)``.

    ``embeddings`` (rows x dim) seeds the embedding layer, typically from GloVe.
    """
    arch = config.arch
    if embeddings is not None:
        vocab_rows = embeddings.shape[0]
        if embeddings.shape[1] != config.embed_dim:
            raise ValueError(f"embedding width {embeddings.shape[1]} != embed_dim "
                             f"{config.embed_dim}")
    elif vocab_rows is None:
        vocab_rows = int(train_data.token_ids.max(initial=0)) + 1
    params = init_params(arch, config.shapes(vocab_rows), stream(config.seed, 0),
                         embeddings)
    history = TrainingHistory()
    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for epoch in range(config.epochs):
            rng = stream(config.seed, 1, epoch)
            for rows in batches(len(train_data), config.batch_size, rng):
                grads, batch_loss = batch_gradients(arch, params, train_data.subset(rows),
                                                    config.shard_size,
                                                    config.freeze_embeddings, pool)
                if not math.isfinite(batch_loss):
                    raise TrainingDiverged(epoch, batch_loss)
                for k, g in grads.items():
                    params[k] -= config.learning_rate * g
            tl, ta, _ = evaluate_batch(arch, params, train_data)
            if not math.isfinite(tl):
                raise TrainingDiverged(epoch, tl)
            rec = EpochRecord(epoch + 1, tl, ta)
            if val_data is not None and len(val_data):
                rec.val_loss, rec.val_accuracy, _ = evaluate_batch(arch, params, val_data)
            history.records.append(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return params, history


class NeuralModel:
    """Trained network plus what is needed to encode new text."""

    kind = "neural"

    def __init__(self, arch, params, max_len):
        self.arch = Arch(arch)
        self.params = params
        self.max_len = int(max_len)

    def predict(self, data):
        return [Sentiment(int(p)) for p in predict_codes(self.arch, self.params, data)]

    def to_state(self):
        return {"arch": self.arch.value, "max_len": self.max_len,
                "params": {k: {"shape": list(v.shape), "data": v.ravel().tolist()}
                           for k, v in self.params.items()}}

    @classmethod
    def from_state(cls, s):
        params = {k: np.array(v["data"], dtype=np.float64).reshape(v["shape"])
                  for k, v in s["params"].items()}
        return cls(s["arch"], params, s["max_len"])

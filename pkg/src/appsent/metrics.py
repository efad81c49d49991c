"""Confusion matrices, accuracy and F-measure."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from appsent.sentiment import Sentiment

BINARY = (Sentiment.Positive, Sentiment.Negative)
TERNARY = (Sentiment.Positive, Sentiment.Negative, Sentiment.Neutral)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes."""

    classes: tuple
    counts: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())

    def __getitem__(self, pair):
        actual, predicted = pair
        return int(self.counts[self.classes.index(actual), self.classes.index(predicted)])


def confusion(actual, predicted, classes=None):
    actual = [Sentiment.parse(a) for a in actual]
    predicted = [Sentiment.parse(p) for p in predicted]
    if len(actual) != len(predicted):
        raise ValueError(f"length mismatch: {len(actual)} actual vs {len(predicted)} predicted")
    if not actual:
        raise ValueError("confusion matrix needs at least one pair")
    if classes is None:
        seen = set(actual) | set(predicted)
        classes = TERNARY if Sentiment.Neutral in seen else BINARY
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, p in zip(actual, predicted):
        counts[pos[a], pos[p]] += 1
    return ConfusionMatrix(classes, counts)


def accuracy(cm):
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def binary_accuracy(tp, tn, fp, fn):
    return (tp + tn) / (tp + tn + fp + fn)


def f_measure(precision, recall):
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _ratio(num, den):
    return float(num) / float(den) if den else 0.0


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f: float


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    per_class: dict
    macro_f: float
    positive_f: float
    config_tag: str = ""
    confusion: ConfusionMatrix | None = field(default=None, compare=False)

    CSV_FIELDS = ("config_tag", "accuracy", "positive_f", "macro_f") + tuple(
        f"{m}_{c.name}" for c in TERNARY for m in ("precision", "recall", "f"))

    def row(self):
        out = {"config_tag": self.config_tag, "accuracy": _fmt(self.accuracy),
               "positive_f": _fmt(self.positive_f), "macro_f": _fmt(self.macro_f)}
        for c in TERNARY:
            s = self.per_class.get(c)
            for m in ("precision", "recall", "f"):
                out[f"{m}_{c.name}"] = "" if s is None else _fmt(getattr(s, m))
        return out


def _fmt(x):
    return f"{x:.6f}"


def report_from_confusion(cm, config_tag=""):
    per_class = {}
    for i, c in enumerate(cm.classes):
        tp = cm.counts[i, i]
        precision = _ratio(tp, cm.counts[:, i].sum())
        recall = _ratio(tp, cm.counts[i, :].sum())
        per_class[c] = ClassScores(precision, recall, f_measure(precision, recall))
    fs = [s.f for s in per_class.values()]
    return EvaluationReport(
        accuracy=accuracy(cm),
        per_class=per_class,
        macro_f=sum(fs) / len(fs),
        positive_f=per_class[Sentiment.Positive].f,
        config_tag=config_tag,
        confusion=cm,
    )


def evaluate(actual, predicted, config_tag="", classes=None):
    return report_from_confusion(confusion(actual, predicted, classes), config_tag)


def reports_to_csv(reports):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=EvaluationReport.CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()

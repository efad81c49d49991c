"""Plain-text model files.

Layout::

    appsent-model 1
    kind: <kind>
    config: <feature config tag>
    vocab_sha256: <digest of the exported vocabulary>
    ---
    <JSON body>

JSON writes floats with ``repr``, so every parameter survives a round trip
exactly.
"""
import json

from appsent.classifiers.base import ConstantModel
from appsent.classifiers.ensemble import BaggedModel, OneVsRestModel
from appsent.classifiers.forest import RandomForestModel
from appsent.classifiers.knn import KnnModel
from appsent.classifiers.linear import LinearModel
from appsent.classifiers.nb import NaiveBayesModel
from appsent.neural.train import NeuralModel

MAGIC = "appsent-model"
VERSION = 1

_KINDS = {
    "nb": NaiveBayesModel,
    "linear": LinearModel,
    "knn": KnnModel,
    "rf": RandomForestModel,
    "bagged": BaggedModel,
    "ovr": OneVsRestModel,
    "constant": ConstantModel,
    "neural": NeuralModel,
}


class ModelFileError(Exception):
    pass


def _kind_of(model):
    return "linear" if isinstance(model, LinearModel) else model.kind


def model_state(model):
    return {"kind": _kind_of(model), "state": model.to_state()}


def model_from_state(blob):
    return _KINDS[blob["kind"]].from_state(blob["state"])


def dumps(model, config="", vocab_digest="", extra=None):
    header = [f"{MAGIC} {VERSION}", f"kind: {_kind_of(model)}", f"config: {config}",
              f"vocab_sha256: {vocab_digest}"]
    for k, v in (extra or {}).items():
        header.append(f"{k}: {v}")
    body = json.dumps(model_state(model), sort_keys=True, separators=(",", ":"))
    return "\n".join(header) + "\n---\n" + body + "\n"


def parse_header(text):
    head, sep, body = text.partition("\n---\n")
    lines = head.splitlines()
    if not sep or not lines or lines[0] != f"{MAGIC} {VERSION}":
        raise ModelFileError("not an appsent model file (bad magic or version)")
    meta = {}
    for ln in lines[1:]:
        k, _, v = ln.partition(": ")
        meta[k.strip()] = v.strip()
    return meta, body


def loads(text, expected_vocab_digest=None):
    meta, body = parse_header(text)
    if expected_vocab_digest is not None and meta.get("vocab_sha256") != expected_vocab_digest:
        raise ModelFileError("model was trained against a different vocabulary "
                             f"({meta.get('vocab_sha256')} != {expected_vocab_digest})")
    return model_from_state(json.loads(body)), meta


def save_model(path, model, **kw):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model, **kw))


def load_model(path, expected_vocab_digest=None):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), expected_vocab_digest)

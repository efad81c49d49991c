"""Command-line driver: ingest, grid, nn, eda, score, report.

Every command writes under ``--out/<command>/`` together with a
``manifest.json``. The manifest digest covers the command, the effective
configuration, the seed, the tool version and the digests of every input;
each CSV output starts with a ``# manifest: <digest>`` line and JSON outputs
carry a ``manifest`` key. Timestamps live in the manifest but not in the
digest, and ``SOURCE_DATE_EPOCH`` pins them for reproducible builds.

Exit codes: 0 success, 1 usage, 2 input error, 3 runtime failure.
"""
import argparse
import copy
import csv
import datetime as dt
import hashlib
import io
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from appsent import __version__, eda
from appsent.classifiers import DEFAULT_PARAMS, MODEL_NAMES
from appsent.classifiers.persist import ModelFileError, dumps, loads
from appsent.corpus import (CorpusError, LabeledDocument, Source, clean_corpus,
                            documents_from_reviews, documents_from_sar, format_apps_csv,
                            parse_apps_csv, parse_reviews_csv, parse_sar_csv)
from appsent.experiment import (GRID_FIELDS, NN_KEY, binary_only, cell_seed, featurize,
                                grid_row, run_cell, stratified_split)
from appsent.features import FeatureConfig, Scheme, Vocabulary, all_configs, build_vocabulary
from appsent.lexicon import load_lexicon, score_document
from appsent.metrics import BINARY, evaluate, reports_to_csv
from appsent.neural import (Arch, GloveError, NeuralConfig, NeuralModel, TrainingDiverged,
                            build_embedding_matrix, encode_sequences, load_glove, train)
from appsent.rng import child_seed
from appsent.sentiment import Sentiment
from appsent.textprep import PipelineConfig, preprocess, read_stopwords, read_substitutions

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2, 3

DEFAULT_CONFIG = {
    "seed": 0,
    "jobs": 1,
    "out": "appsent-out",
    "lexicon": None,
    "preprocess": {"remove_stopwords": True, "apply_stemming": True, "stopwords": None,
                   "substitutions": None},
    "grid": {"configs": [c.tag for c in all_configs()], "models": list(MODEL_NAMES),
             "validation_fraction": 0.2, "ternary": False, "min_document_frequency": None,
             "params": copy.deepcopy(DEFAULT_PARAMS)},
    "nn": {"archs": [a.value for a in Arch], "max_len": 200, "embed_dim": 100,
           "hidden_units": 100, "cnn_filters": 64, "cnn_width": 3, "epochs": 10,
           "batch_size": 32, "learning_rate": None, "freeze_embeddings": False,
           "shard_size": 32, "remove_stopwords": False, "validation_fraction": 0.2},
    "eda": {"top_k": 50},
}


class InputError(Exception):
    pass


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- configuration --------------------------------------------------------

def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path=None, overrides=None):
    """Defaults, then the JSON file, then command-line flags."""
    cfg = DEFAULT_CONFIG
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as err:
            raise InputError(f"cannot read config {path}: {err}") from None
        except json.JSONDecodeError as err:
            raise InputError(f"config {path} is not valid JSON: {err}") from None
        if not isinstance(user, dict):
            raise InputError(f"config {path} must hold a JSON object")
        unknown = sorted(set(user) - set(DEFAULT_CONFIG))
        if unknown:
            raise InputError(f"config {path}: unknown keys {unknown}")
        cfg = _merge(cfg, user)
    return _merge(cfg, {k: v for k, v in (overrides or {}).items() if v is not None})


def pipeline_from(section):
    stop = (read_stopwords(section["stopwords"]) if section.get("stopwords")
            else PipelineConfig().stopword_list)
    subs = read_substitutions(section["substitutions"]) if section.get("substitutions") else {}
    return PipelineConfig(remove_stopwords=section.get("remove_stopwords", True),
                          apply_stemming=section.get("apply_stemming", True),
                          stopword_list=stop, substitutions=subs)


def pipeline_tag(p):
    return f"stopwords={int(p.remove_stopwords)},stem={int(p.apply_stemming)}"


# --- output handling ------------------------------------------------------

def sha256_bytes(data):
    return hashlib.sha256(data).hexdigest()


def sha256_file(path):
    with open(path, "rb") as fh:
        return sha256_bytes(fh.read())


def atomic_write(path, text):
    """Write to a temporary sibling, then rename over ``path``."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=os.path.dirname(path) or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = (dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch
         else dt.datetime.now(dt.timezone.utc))
    return t.replace(microsecond=0).isoformat()


class Run:
    """Collects outputs for one command and writes them with the manifest."""

    def __init__(self, command, cfg, argv, out_dir):
        self.command = command
        self.cfg = cfg
        self.argv = list(argv)
        self.dir = os.path.join(out_dir, command)
        self.inputs = {}
        self.hashes = {}
        self.outputs = {}
        self.started = _timestamp()

    def add_input(self, path, data=None):
        self.inputs[os.path.basename(path)] = (sha256_bytes(data) if data is not None
                                               else sha256_file(path))

    @property
    def digest(self):
        snapshot = {k: v for k, v in self.cfg.items() if k not in ("out", "jobs")}
        body = {"command": self.command, "config": snapshot, "seed": self.cfg["seed"],
                "version": __version__, "inputs": self.inputs, "hashes": self.hashes}
        return sha256_bytes(json.dumps(body, sort_keys=True).encode("utf-8"))

    # outputs are rendered at commit time so they all carry the final digest
    def csv(self, name, text):
        self.outputs[name] = lambda d: f"# manifest: {d}\n" + text

    def json(self, name, obj):
        self.outputs[name] = lambda d: json.dumps({"manifest": d, **obj}, indent=2,
                                                  sort_keys=True) + "\n"

    def render(self, name, fn):
        self.outputs[name] = fn

    def commit(self):
        digest = self.digest
        rendered = {n: fn(digest) for n, fn in sorted(self.outputs.items())}
        for name, text in rendered.items():
            atomic_write(os.path.join(self.dir, name), text)
        manifest = {
            "tool": "appsent", "version": __version__, "command": self.command,
            "argv": self.argv, "config": self.cfg, "seed": self.cfg["seed"],
            "inputs": self.inputs, "hashes": self.hashes, "digest": digest,
            "outputs": {n: sha256_bytes(t.encode("utf-8")) for n, t in rendered.items()},
            "started": self.started, "finished": _timestamp(),
        }
        atomic_write(os.path.join(self.dir, "manifest.json"),
                     json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return digest


def strip_manifest_line(text):
    return text.split("\n", 1)[1] if text.startswith("# manifest:") else text


def _read_input(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None


def _lexicon(cfg):
    try:
        return load_lexicon(cfg["lexicon"])
    except OSError as err:
        raise InputError(f"cannot read lexicon: {err}") from None


# --- corpus store ---------------------------------------------------------

CORPUS_FIELDS = ("source", "label", "text")


def corpus_to_csv(docs):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CORPUS_FIELDS)
    for d in docs:
        w.writerow([d.source.name, d.label.name, d.text])
    return buf.getvalue()


def corpus_from_csv(text):
    reader = csv.reader(io.StringIO(strip_manifest_line(text), newline=""))
    header = next(reader, None)
    if header is None or tuple(header) != CORPUS_FIELDS:
        raise InputError("corpus store has an unexpected header")
    return [LabeledDocument(t, Sentiment[lab], Source[src]) for src, lab, t in reader]


def _ingest_dir(cfg):
    return os.path.join(cfg["out"], "ingest")


def _load_corpus(cfg, run):
    path = os.path.join(_ingest_dir(cfg), "corpus.csv")
    if not os.path.exists(path):
        raise InputError(f"{path} not found; run 'appsent ingest' first")
    data = _read_input(path)
    run.add_input(path, data)
    return corpus_from_csv(data.decode("utf-8"))


# --- ingest ---------------------------------------------------------------

def cmd_ingest(args, cfg, run):
    if not (args.apps or args.reviews or args.sar):
        raise UsageError("ingest needs at least one of --apps, --reviews, --sar")
    lexicon = _lexicon(cfg)
    run.hashes["lexicon_sha256"] = lexicon.digest
    # read everything before writing anything
    raw = {k: _read_input(p) for k, p in (("apps", args.apps), ("reviews", args.reviews),
                                          ("sar", args.sar)) if p}
    for k, p in (("apps", args.apps), ("reviews", args.reviews), ("sar", args.sar)):
        if p:
            run.add_input(p, raw[k])
    reports = {}
    docs = []
    try:
        if "apps" in raw:
            apps, rep = parse_apps_csv(raw["apps"])
            reports["apps"] = rep
            run.csv("apps.csv", format_apps_csv(apps))
        if "reviews" in raw:
            reviews, rep = parse_reviews_csv(raw["reviews"])
            reports["reviews"] = rep
            docs += documents_from_reviews(reviews, lexicon)
        if "sar" in raw:
            sar, rep = parse_sar_csv(raw["sar"])
            reports["sar"] = rep
            docs += documents_from_sar(sar)
    except CorpusError as err:
        name = next(k for k in ("apps", "reviews", "sar") if k not in reports)
        raise InputError(f"{getattr(args, name)}: {err}") from None
    summary = {k: {**r.to_dict(), "fields": r.fields,
                   "diagnostics": [list(d) for d in r.diagnostics[:100]]}
               for k, r in reports.items()}
    if docs:
        kept, clean_report = clean_corpus(docs, with_report=True)
        run.csv("corpus.csv", corpus_to_csv(kept))
        labels = {}
        for d in kept:
            key = f"{d.source.name}/{d.label.name}"
            labels[key] = labels.get(key, 0) + 1
        summary["cleaning"] = {**clean_report.to_dict(), "kept": len(kept),
                               "labels": dict(sorted(labels.items()))}
    run.json("report.json", summary)
    for k, r in reports.items():
        print(f"{k}: read {r.rows_read}, dropped {r.rows_dropped}", file=sys.stderr)


# --- grid -----------------------------------------------------------------

def _split_docs(docs, cfg, section):
    train_docs = [d for d in docs if d.source is Source.GoogleTrain]
    sar_docs = [d for d in docs if d.source is Source.SarTest]
    notes = {}
    if not section.get("ternary", False):
        train_docs, notes["neutral_dropped_train"] = binary_only(train_docs)
        sar_docs, notes["neutral_dropped_sar"] = binary_only(sar_docs)
    if not train_docs:
        raise InputError("corpus store holds no training documents")
    tr, va = stratified_split([d.label for d in train_docs], section["validation_fraction"],
                              cfg["seed"])
    notes.update(train=len(tr), validation=len(va), sar=len(sar_docs))
    return ([train_docs[i] for i in tr], [train_docs[i] for i in va], sar_docs, notes)


def _model_renderer(model, tag, vocab_digest, pipeline):
    return lambda d: dumps(model, config=tag, vocab_digest=vocab_digest,
                           extra={"pipeline": pipeline_tag(pipeline), "manifest": d})


def _model_file_name(name):
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_")


def cmd_grid(args, cfg, run):
    section = cfg["grid"]
    if args.configs:
        section["configs"] = [t.strip() for t in args.configs.split(",") if t.strip()]
    if args.models:
        section["models"] = [m.strip() for m in args.models.split(",") if m.strip()]
    if not section["configs"] or not section["models"]:
        raise UsageError("grid needs at least one feature config and one model")
    try:
        configs = [FeatureConfig.from_tag(t, section["min_document_frequency"])
                   for t in section["configs"]]
    except (KeyError, ValueError) as err:
        raise UsageError(f"bad feature config: {err}") from None
    bad = [m for m in section["models"] if m not in MODEL_NAMES]
    if bad:
        raise UsageError(f"unknown models {bad}; choose from {list(MODEL_NAMES)}")
    docs = _load_corpus(cfg, run)
    pipeline = pipeline_from(cfg["preprocess"])
    train_docs, val_docs, sar_docs, notes = _split_docs(docs, cfg, section)
    tok = lambda ds: [preprocess(d.text, pipeline) for d in ds]  # noqa: E731
    train_tokens, val_tokens, sar_tokens = tok(train_docs), tok(val_docs), tok(sar_docs)
    y = {"train": [d.label for d in train_docs], "val": [d.label for d in val_docs],
         "sar": [d.label for d in sar_docs]}
    rows = []
    jobs = max(1, int(cfg["jobs"]))
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for ci, fc in enumerate(configs):
            feats = featurize(fc, train_tokens, {"val": val_tokens, "sar": sar_tokens})
            run.hashes[f"vocab_sha256[{fc.tag}]"] = feats.vocab.digest
            if args.save_models:
                run.csv(f"vocab/{_model_file_name(fc.tag)}.vocab", feats.vocab.export())
            evals = {k: (feats.evals[k], y[k]) for k in ("val", "sar")}
            cells = []
            for mi, name in enumerate(section["models"]):
                cargs = (name, feats.train, y["train"], evals,
                         cell_seed(cfg["seed"], ci, mi), section["params"],
                         section["ternary"], fc.tag)
                cells.append(pool.submit(run_cell, *cargs) if pool else run_cell(*cargs))
            for name, cell in zip(section["models"], cells):
                model, reports, error = cell.result() if pool else cell
                rows.append(grid_row(fc.tag, name, reports, error))
                if error:
                    print(f"grid: {fc.tag} / {name} failed: {error}", file=sys.stderr)
                if args.save_models and model is not None:
                    run.render(
                        f"models/{_model_file_name(fc.tag)}__{_model_file_name(name)}.model",
                        _model_renderer(model, fc.tag, feats.vocab.digest, pipeline))
    finally:
        if pool:
            pool.shutdown()
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=GRID_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    run.csv("results.csv", buf.getvalue())
    run.json("split.json", notes)


# --- neural ---------------------------------------------------------------

def cmd_nn(args, cfg, run):
    section = cfg["nn"]
    if args.arch:
        section["archs"] = [a.strip().upper() for a in args.arch.split(",") if a.strip()]
    if args.epochs is not None:
        section["epochs"] = args.epochs
    try:
        archs = [Arch(a) for a in section["archs"]]
    except ValueError as err:
        raise UsageError(str(err)) from None
    docs = _load_corpus(cfg, run)
    pipeline = pipeline_from({**cfg["preprocess"], "apply_stemming": False,
                              "remove_stopwords": section["remove_stopwords"]})
    train_docs, val_docs, sar_docs, notes = _split_docs(
        docs, cfg, {"ternary": False, "validation_fraction": section["validation_fraction"]})
    tok = lambda ds: [preprocess(d.text, pipeline) for d in ds]  # noqa: E731
    train_tokens = tok(train_docs)
    vocab = build_vocabulary(train_tokens, FeatureConfig(1, Scheme.TP, 1))
    run.hashes["vocab_sha256"] = vocab.digest
    embed_dim = section["embed_dim"]
    embeddings = None
    if args.glove:
        data = _read_input(args.glove)
        run.add_input(args.glove, data)
        try:
            table = load_glove(data)
        except (GloveError, UnicodeDecodeError) as err:
            raise InputError(f"{args.glove}: {err}") from None
        embed_dim = table.dimension
        embeddings = build_embedding_matrix(vocab, table, child_seed(cfg["seed"], NN_KEY, 0))
        notes["glove_coverage"] = sum(t in table for t in vocab.terms)
    notes.update(vocabulary=len(vocab), embed_dim=embed_dim)
    max_len = section["max_len"]
    sets = {"train": encode_sequences(train_tokens, vocab, max_len,
                                      [d.label for d in train_docs]),
            "val": encode_sequences(tok(val_docs), vocab, max_len,
                                    [d.label for d in val_docs]),
            "sar": encode_sequences(tok(sar_docs), vocab, max_len,
                                    [d.label for d in sar_docs])}
    for i, arch in enumerate(archs):
        nc = NeuralConfig(arch=arch, max_len=max_len, embed_dim=embed_dim,
                          hidden_units=section["hidden_units"],
                          cnn_filters=section["cnn_filters"], cnn_width=section["cnn_width"],
                          epochs=section["epochs"], batch_size=section["batch_size"],
                          learning_rate=section["learning_rate"],
                          seed=child_seed(cfg["seed"], NN_KEY, 1, i),
                          freeze_embeddings=section["freeze_embeddings"],
                          shard_size=section["shard_size"], workers=max(1, int(cfg["jobs"])))
        params, history = train(sets["train"], sets["val"], nc, embeddings,
                                vocab_rows=len(vocab) + 1)
        model = NeuralModel(arch, params, max_len)
        run.csv(f"{arch.value}_history.csv", history.to_csv())
        reports = []
        for split in ("val", "sar"):
            if len(sets[split]):
                actual = [Sentiment(int(v)) for v in sets[split].labels]
                reports.append(evaluate(actual, model.predict(sets[split]),
                                        f"{arch.value}/{split}", BINARY))
        run.csv(f"{arch.value}_report.csv", reports_to_csv(reports))
        if args.save_models:
            run.render(f"{arch.value}.model",
                       _model_renderer(model, "Unigram+TP", vocab.digest, pipeline))
        last = history.records[-1]
        print(f"nn: {arch.value} train_acc {last.train_accuracy:.4f} "
              f"val_acc {last.val_accuracy}", file=sys.stderr)
    if args.save_models:
        run.csv("vocab.vocab", vocab.export())
    run.json("split.json", notes)


# --- eda ------------------------------------------------------------------

def cmd_eda(args, cfg, run):
    d = _ingest_dir(cfg)
    apps_path = os.path.join(d, "apps.csv")
    apps = []
    if os.path.exists(apps_path):
        data = _read_input(apps_path)
        run.add_input(apps_path, data)
        apps, _ = parse_apps_csv(strip_manifest_line(data.decode("utf-8")).encode("utf-8"))
    docs = []
    if os.path.exists(os.path.join(d, "corpus.csv")):
        docs = _load_corpus(cfg, run)
    if not apps and not docs:
        raise InputError(f"no ingest outputs under {d}; run 'appsent ingest' first")
    lexicon = _lexicon(cfg)
    run.hashes["lexicon_sha256"] = lexicon.digest
    docs_source = ",".join(sorted({s.name for s in (x.source for x in docs)})) or "none"
    bundle = eda.rq_bundle(apps, docs, lexicon, apps_source="GoogleApps" if apps else "none",
                           docs_source=docs_source, top_k=cfg["eda"]["top_k"])
    summary = {}
    for rq, entry in bundle.items():
        if not apps and rq in ("rq1", "rq2", "rq4", "rq5", "rq8"):
            entry = {"source": "none", "status": "skipped", "summary": {"reason": "no apps"}}
        item = {k: v for k, v in entry.items() if k != "csv"}
        if entry["status"] == "ok":
            run.csv(f"{rq}.csv", entry["csv"])
            item["file"] = f"{rq}.csv"
        summary[rq] = item
    run.json("summary.json", {"rq": summary})


# --- score ----------------------------------------------------------------

def _score_inputs(args):
    lines = list(args.text or [])
    if args.file:
        data = _read_input(args.file).decode("utf-8")
        lines += [ln for ln in data.splitlines() if ln.strip()]
    return lines


def _parse_pipeline_tag(tag):
    fields = dict(kv.split("=") for kv in tag.split(",") if "=" in kv)
    return PipelineConfig(remove_stopwords=fields.get("stopwords", "1") == "1",
                          apply_stemming=fields.get("stem", "1") == "1")


def cmd_score(args, cfg, out):
    texts = _score_inputs(args)
    if bool(args.model) != bool(args.vocab):
        raise UsageError("--model and --vocab go together")
    if not args.model:
        lexicon = _lexicon(cfg)
        for t in texts:
            s = score_document(t, lexicon)
            out.write(f"{s.orientation.name}\t{s.polarity:.4f}\t{s.subjectivity:.4f}\n")
        return
    try:
        vocab = Vocabulary.from_export(_read_input(args.vocab).decode("utf-8"))
        model, meta = loads(_read_input(args.model).decode("utf-8"), vocab.digest)
    except ValueError as err:
        raise InputError(f"{args.vocab}: {err}") from None
    pipeline = _parse_pipeline_tag(meta.get("pipeline", ""))
    tokens = [preprocess(t, pipeline) for t in texts]
    if not tokens:
        return
    if isinstance(model, NeuralModel):
        labels = model.predict(encode_sequences(tokens, vocab, model.max_len))
    else:
        from appsent.features import vectorize_corpus
        fc = FeatureConfig.from_tag(meta["config"])
        labels = model.predict(vectorize_corpus(tokens, vocab, fc.scheme))
    for lab in labels:
        out.write(f"{lab.name}\n")


# --- report ---------------------------------------------------------------

def _pivot(rows, metric, configs, models):
    cells = {(r["config"], r["model"]): r[metric] for r in rows}
    return [["config", *models]] + [[c, *(cells.get((c, m), "") for m in models)]
                                    for c in configs]


def cmd_report(args, cfg, run):
    path = args.grid or os.path.join(cfg["out"], "grid", "results.csv")
    data = _read_input(path)
    run.add_input(path, data)
    rows = list(csv.DictReader(io.StringIO(strip_manifest_line(data.decode("utf-8")))))
    if not rows or set(GRID_FIELDS) - set(rows[0]):
        raise InputError(f"{path} is not a grid results file")
    configs = list(dict.fromkeys(r["config"] for r in rows))
    models = list(dict.fromkeys(r["model"] for r in rows))
    for table, metric in (("table6", "accuracy"), ("table7", "macro_f")):
        for split in ("val", "sar"):
            if any(r[f"{split}_{metric}"] for r in rows):
                pivot = _pivot(rows, f"{split}_{metric}", configs, models)
                buf = io.StringIO()
                csv.writer(buf, lineterminator="\n").writerows(pivot)
                run.csv(f"{table}_{split}.csv", buf.getvalue())
    nn_dir = os.path.join(cfg["out"], "nn")
    nn_rows = []
    for arch in Arch:
        p = os.path.join(nn_dir, f"{arch.value}_report.csv")
        if os.path.exists(p):
            blob = _read_input(p)
            run.add_input(p, blob)
            for r in csv.DictReader(io.StringIO(strip_manifest_line(blob.decode("utf-8")))):
                nn_rows.append([r["config_tag"], r["accuracy"], r["macro_f"]])
    if nn_rows:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["run", "accuracy", "macro_f"])
        w.writerows(nn_rows)
        run.csv("table8.csv", buf.getvalue())


# --- entry point ----------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    p = _Parser(prog="appsent", parents=[common],
                description="App-review sentiment experiments.")
    p.add_argument("--version", action="version", version=f"appsent {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="parse and clean the input CSVs")
    s.add_argument("--apps")
    s.add_argument("--reviews")
    s.add_argument("--sar", help="survey-format test reviews")

    s = sub.add_parser("grid", parents=[common], help="feature config x model grid")
    s.add_argument("--configs", help="comma-separated tags such as Unigram+TF-IDF")
    s.add_argument("--models", help="comma-separated model names")
    s.add_argument("--save-models", action="store_true")

    s = sub.add_parser("nn", parents=[common], help="train RNN / LSTM / CNN")
    s.add_argument("--glove", help="GloVe text vectors")
    s.add_argument("--arch", help="comma-separated subset of RNN,LSTM,CNN")
    s.add_argument("--epochs", type=int)
    s.add_argument("--save-models", action="store_true")

    s = sub.add_parser("eda", parents=[common], help="research-question statistics")

    s = sub.add_parser("score", parents=[common], help="label text with a lexicon or model")
    s.add_argument("--text", action="append", help="text to score (repeatable)")
    s.add_argument("--file", help="one text per line")
    s.add_argument("--model")
    s.add_argument("--vocab")

    s = sub.add_parser("report", parents=[common], help="pivot grid results into tables")
    s.add_argument("--grid", help="grid results CSV (default: <out>/grid/results.csv)")
    return p


COMMANDS = {"ingest": cmd_ingest, "grid": cmd_grid, "nn": cmd_nn, "eda": cmd_eda,
            "report": cmd_report}


def main(argv=None, stdout=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("appsent: a command is required "
                             "(ingest, grid, nn, eda, score, report)")
        cfg = load_config(getattr(args, "config", None),
                          {k: getattr(args, k, None) for k in ("seed", "out", "jobs")})
        if args.command == "score":
            buf = io.StringIO()
            cmd_score(args, cfg, buf)
            stdout.write(buf.getvalue())
            return EXIT_OK
        run = Run(args.command, cfg, argv, cfg["out"])
        COMMANDS[args.command](args, cfg, run)
        run.commit()
        return EXIT_OK
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except (InputError, CorpusError, GloveError, ModelFileError) as err:
        print(f"appsent: input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except TrainingDiverged as err:
        print(f"appsent: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as err:  # noqa: BLE001
        print(f"appsent: runtime failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

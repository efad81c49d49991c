"""Parsing, labeling and cleaning of the three CSV inputs.

* apps metadata (``googleplaystore.csv``: 13 columns, one row per listing)
* user reviews (``googleplaystore_user_reviews.csv``: review text plus the
  provided sentiment, polarity and subjectivity)
* the student survey (SAR: department, app, review, rating, type, category)

Every parser returns ``(records, ParseReport)``. Bad rows are dropped and
counted, never raised; only structural problems (no header, wrong column
count) raise :class:`CorpusError`.
"""
import csv
import datetime as dt
import enum
import io
import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass, field

from appsent.sentiment import Sentiment
from appsent.textprep import normalize

NULL_SENTINELS = frozenset({"", "nan", "NaN", "NAN"})


class CorpusError(Exception):
    """Fatal input problem: the file cannot be parsed at all."""


class AppType(enum.Enum):
    Free = "Free"
    Paid = "Paid"


class Source(enum.Enum):
    GoogleTrain = "GoogleTrain"
    SarTest = "SarTest"


@dataclass(frozen=True)
class AppRecord:
    name: str
    category: str
    rating: float | None
    reviews_count: int
    size_bytes: int | None
    installs_lower_bound: int
    app_type: AppType
    price_usd: float
    content_rating: str
    genres: tuple
    last_updated: dt.date
    current_version: str
    android_version: str


@dataclass(frozen=True)
class ReviewRecord:
    app_name: str
    review_text: str
    provided_sentiment: Sentiment | None = None
    provided_polarity: float | None = None
    provided_subjectivity: float | None = None


@dataclass(frozen=True)
class SarRecord:
    department: str
    app_name: str
    review_text: str
    rating: int
    app_type: AppType
    category: str


@dataclass(frozen=True)
class LabeledDocument:
    text: str
    label: Sentiment | None
    source: Source


@dataclass
class ParseReport:
    rows_read: int = 0
    rows_dropped: int = 0
    reasons: Counter = field(default_factory=Counter)
    diagnostics: list = field(default_factory=list)
    fields: int = 0

    def note(self, line, reason, detail="", dropped=True):
        self.reasons[reason] += 1
        self.diagnostics.append((line, reason, detail))
        if dropped:
            self.rows_dropped += 1

    @property
    def rows_parsed(self):
        return self.rows_read - self.rows_dropped

    def to_dict(self):
        return {"rows_read": self.rows_read, "rows_dropped": self.rows_dropped,
                "reasons": dict(sorted(self.reasons.items()))}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class RowError(ValueError):
    def __init__(self, reason, detail=""):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail


def _open_text(source):
    """Accept a path, raw bytes, or a binary/text file object."""
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8-sig"), newline="")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return io.StringIO(fh.read().decode("utf-8-sig"), newline="")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data, newline="")


def _header_key(name):
    return re.sub(r"[^a-z]+", "_", name.strip().lower()).strip("_")


def _read_rows(source, required):
    """Yield ``(line_number, row_dict_or_None, raw_row)`` after validating the header."""
    reader = csv.reader(_open_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusError("missing header row") from None
    keys = [_header_key(h) for h in header]
    missing = [r for r in required if r not in keys]
    if missing:
        raise CorpusError(f"missing header columns: {', '.join(missing)}")
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != len(keys):
            yield line, None, row
        else:
            yield line, dict(zip(keys, row)), row


def _is_null(cell):
    return cell is None or cell.strip() in NULL_SENTINELS


# --- apps ---------------------------------------------------------------

APP_COLUMNS = ("App", "Category", "Rating", "Reviews", "Size", "Installs", "Type",
               "Price", "Content Rating", "Genres", "Last Updated", "Current Ver",
               "Android Ver")
_APP_KEYS = tuple(_header_key(c) for c in APP_COLUMNS)
VARIES = "Varies with device"
_SIZE = re.compile(r"^(\d+(?:\.\d+)?)([Mk]?)$")
_SIZE_UNITS = {"M": 2 ** 20, "k": 2 ** 10, "": 1}


def parse_size(cell):
    cell = cell.strip()
    if cell == VARIES:
        return None
    m = _SIZE.match(cell)
    if not m:
        raise RowError("bad_size", cell)
    return int(round(float(m.group(1)) * _SIZE_UNITS[m.group(2)]))


def parse_installs(cell):
    cell = cell.strip()
    m = re.fullmatch(r"(\d{1,3}(?:,\d{3})*|\d+)\+?", cell)
    if not m:
        raise RowError("bad_installs", cell)
    return int(m.group(1).replace(",", ""))


def parse_price(cell):
    cell = cell.strip()
    m = re.fullmatch(r"\$?(\d+(?:\.\d+)?)", cell)
    if not m:
        raise RowError("bad_price", cell)
    return float(m.group(1))


def parse_date(cell):
    cell = cell.strip()
    for fmt in ("%B %d, %Y", "%Y-%m-%d"):
        try:
            return dt.datetime.strptime(cell, fmt).date()
        except ValueError:
            pass
    raise RowError("bad_date", cell)


def _parse_int(cell, reason):
    cell = cell.strip()
    if not re.fullmatch(r"\d+", cell):
        raise RowError(reason, cell)
    return int(cell)


def _parse_app(row):
    rating = None
    if not _is_null(row["rating"]):
        try:
            rating = float(row["rating"])
        except ValueError:
            raise RowError("bad_rating", row["rating"]) from None
        if not 1.0 <= rating <= 5.0:
            raise RowError("rating_out_of_range", row["rating"])
    price = parse_price(row["price"])
    type_cell = row["type"].strip()
    if _is_null(type_cell):
        # one public row has no type; the price decides it
        app_type = AppType.Free if price == 0 else AppType.Paid
    elif type_cell in ("Free", "Paid"):
        app_type = AppType(type_cell)
    else:
        raise RowError("bad_type", type_cell)
    if (app_type is AppType.Free) != (price == 0):
        raise RowError("type_price_mismatch", f"{type_cell} {row['price']}")
    text = lambda k: "" if _is_null(row[k]) else row[k].strip()  # noqa: E731
    return AppRecord(
        name=row["app"].strip(),
        category=row["category"].strip(),
        rating=rating,
        reviews_count=_parse_int(row["reviews"], "bad_reviews"),
        size_bytes=parse_size(row["size"]),
        installs_lower_bound=parse_installs(row["installs"]),
        app_type=app_type,
        price_usd=price,
        content_rating=text("content_rating"),
        genres=tuple(g for g in row["genres"].strip().split(";") if g),
        last_updated=parse_date(row["last_updated"]),
        current_version=text("current_ver"),
        android_version=text("android_ver"),
    )


def parse_apps_csv(source):
    report = ParseReport(fields=len(APP_COLUMNS))
    records = []
    for line, row, raw in _read_rows(source, _APP_KEYS):
        report.rows_read += 1
        if row is None:
            report.note(line, "field_count", f"{len(raw)} fields")
            continue
        try:
            records.append(_parse_app(row))
        except RowError as err:
            report.note(line, err.reason, err.detail)
    return records, report


def _format_number(x):
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def format_apps_csv(records):
    """Serialize records in the source layout; ``parse_apps_csv`` reads it back exactly."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(APP_COLUMNS)
    for r in records:
        w.writerow([
            r.name, r.category,
            "NaN" if r.rating is None else repr(r.rating),
            str(r.reviews_count),
            VARIES if r.size_bytes is None else str(r.size_bytes),
            f"{r.installs_lower_bound:,}+",
            r.app_type.value,
            "0" if r.price_usd == 0 else "$" + _format_number(r.price_usd),
            r.content_rating,
            ";".join(r.genres),
            r.last_updated.strftime("%B %d, %Y"),
            r.current_version or "NaN",
            r.android_version or "NaN",
        ])
    return buf.getvalue()


# --- reviews ------------------------------------------------------------

_REVIEW_KEYS = ("app", "translated_review", "sentiment", "sentiment_polarity",
                "sentiment_subjectivity")


def _optional_float(cell, lo, hi):
    if _is_null(cell):
        return None
    v = float(cell)
    if not (lo <= v <= hi) or math.isnan(v):
        raise ValueError(cell)
    return v


def parse_reviews_csv(source):
    report = ParseReport(fields=len(_REVIEW_KEYS))
    records = []
    for line, row, raw in _read_rows(source, _REVIEW_KEYS):
        report.rows_read += 1
        if row is None:
            report.note(line, "field_count", f"{len(raw)} fields")
            continue
        text = row["translated_review"]
        if _is_null(text):
            report.note(line, "empty_review")
            continue
        try:
            sentiment = None if _is_null(row["sentiment"]) else Sentiment.parse(row["sentiment"])
            polarity = _optional_float(row["sentiment_polarity"], -1.0, 1.0)
            subjectivity = _optional_float(row["sentiment_subjectivity"], 0.0, 1.0)
            present = [sentiment is not None, polarity is not None, subjectivity is not None]
            if any(present) and not all(present):
                raise ValueError("partial optionals")
        except (KeyError, ValueError) as err:
            report.note(line, "inconsistent_optionals", str(err), dropped=False)
            sentiment = polarity = subjectivity = None
        records.append(ReviewRecord(row["app"].strip(), text.strip(), sentiment,
                                    polarity, subjectivity))
    return records, report


# --- student survey -----------------------------------------------------

SAR_COLUMNS = ("department", "app", "review", "rating", "type", "category")


def parse_sar_csv(source):
    reader = csv.reader(_open_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusError("missing header row") from None
    if len(header) != len(SAR_COLUMNS):
        raise CorpusError(f"survey file must have {len(SAR_COLUMNS)} columns, "
                          f"header has {len(header)}")
    report = ParseReport(fields=len(SAR_COLUMNS))
    records = []
    for row in reader:
        if not row:
            continue
        report.rows_read += 1
        line = reader.line_num
        if len(row) != len(SAR_COLUMNS):
            report.note(line, "field_count", f"{len(row)} fields")
            continue
        department, app, review, rating, app_type, category = (c.strip() for c in row)
        if not re.fullmatch(r"[1-5]", rating):
            report.note(line, "rating_out_of_range", rating)
            continue
        if app_type not in ("Free", "Paid"):
            report.note(line, "bad_type", app_type)
            continue
        if _is_null(review):
            report.note(line, "empty_review")
            continue
        records.append(SarRecord(department, app, review, int(rating),
                                 AppType(app_type), category))
    return records, report


# --- labeling and cleaning ----------------------------------------------

def label_from_rating(rating):
    """Survey ratings below 3 are Negative, 3 and above Positive."""
    if rating not in (1, 2, 3, 4, 5):
        raise ValueError(f"rating must be in 1..5, got {rating!r}")
    return Sentiment.Negative if rating < 3 else Sentiment.Positive


def documents_from_reviews(reviews, lexicon=None):
    """Label with the provided sentiment, falling back to lexicon orientation."""
    from appsent import lexicon as lx

    docs = []
    for r in reviews:
        label = r.provided_sentiment
        if label is None and lexicon is not None:
            label = lx.score_document(r.review_text, lexicon).orientation
        docs.append(LabeledDocument(r.review_text, label, Source.GoogleTrain))
    return docs


def documents_from_sar(records):
    return [LabeledDocument(r.review_text, label_from_rating(r.rating), Source.SarTest)
            for r in records]


def clean_corpus(docs, *, with_report=False):
    """Drop unlabeled docs, docs empty after normalization, and exact duplicates."""
    report = ParseReport()
    seen = set()
    out = []
    for i, d in enumerate(docs):
        report.rows_read += 1
        if d.label is None:
            report.note(i, "missing_label")
        elif not normalize(d.text):
            report.note(i, "empty_text")
        elif (d.text, d.label) in seen:
            report.note(i, "duplicate")
        else:
            seen.add((d.text, d.label))
            out.append(d)
    return (out, report) if with_report else out

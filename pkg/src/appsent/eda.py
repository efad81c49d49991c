"""Exploratory statistics over the apps table and labelled reviews.

Every function returns plain data; ``rq_bundle`` groups them by research
question (rq1 .. rq8) and tags each with the dataset it was computed from.
"""
import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from appsent.corpus import AppType
from appsent.lexicon import score_document
from appsent.sentiment import Sentiment
from appsent.textprep import PipelineConfig, preprocess

MB = 2 ** 20
SIZE_BIN_MB = 10
RATING_BIN = 0.5
CORRELATION_VARIABLES = ("price", "installs", "size", "reviews_count", "rating")

# Word counts keep surface forms so the top words stay readable.
WORD_PIPELINE = PipelineConfig(remove_stopwords=True, apply_stemming=False)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


@dataclass
class CategoryRow:
    count: int = 0
    rated: int = 0
    rating_sum: float = 0.0
    rating_min: float | None = None
    rating_max: float | None = None
    installs_sum: int = 0

    @property
    def mean_rating(self):
        if not self.rated:
            return None
        # division can round one ulp past the extremes when all ratings are equal
        return min(max(self.rating_sum / self.rated, self.rating_min), self.rating_max)


@dataclass
class CategoryStats:
    rows: dict = field(default_factory=dict)
    total: int = 0
    rated: int = 0
    mean_rating: float | None = None
    distinct_categories: int = 0
    distinct_genres: int = 0
    distinct_apps: int = 0

    def to_csv(self):
        return _csv(["category", "count", "rated", "mean_rating", "installs_sum"],
                    [[c, r.count, r.rated, _num(r.mean_rating), r.installs_sum]
                     for c, r in sorted(self.rows.items())])


def summarize_categories(apps):
    """Per-category counts, mean rating over rated apps and install sums."""
    stats = CategoryStats()
    ratings = {}
    names, genres = set(), set()
    for a in apps:
        row = stats.rows.setdefault(a.category, CategoryRow())
        row.count += 1
        row.installs_sum += a.installs_lower_bound
        if a.rating is not None:
            row.rated += 1
            ratings.setdefault(a.category, []).append(a.rating)
            row.rating_min = a.rating if row.rating_min is None else min(row.rating_min, a.rating)
            row.rating_max = a.rating if row.rating_max is None else max(row.rating_max, a.rating)
        names.add(a.name)
        genres.add(";".join(a.genres))
    for c, vals in ratings.items():
        stats.rows[c].rating_sum = math.fsum(vals)
    all_ratings = [r for vals in ratings.values() for r in vals]
    stats.total = sum(r.count for r in stats.rows.values())
    stats.rated = len(all_ratings)
    stats.mean_rating = math.fsum(all_ratings) / len(all_ratings) if all_ratings else None
    stats.distinct_categories = len(stats.rows)
    stats.distinct_genres = len(genres)
    stats.distinct_apps = len(names)
    return stats


def type_split(apps):
    """Exact (free, paid) fractions."""
    counts = Counter(a.app_type for a in apps)
    n = sum(counts.values())
    if n == 0:
        raise ValueError("type_split needs at least one app")
    free = Fraction(counts[AppType.Free], n)
    return free, 1 - free


def pearson(x, y):
    """Pearson r over pairs where both values are present; None when undefined."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    pairs = [(float(a), float(b)) for a, b in zip(x, y) if a is not None and b is not None]
    if len(pairs) < 2:
        return None
    xs, ys = zip(*pairs)
    mx = math.fsum(xs) / len(xs)
    my = math.fsum(ys) / len(ys)
    dx = [a - mx for a in xs]
    dy = [b - my for b in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass
class CorrelationMatrix:
    variables: tuple
    values: list
    size_excluded: int = 0

    def to_csv(self):
        return _csv(["variable", *self.variables],
                    [[v, *(_num(x) for x in row)] for v, row in zip(self.variables, self.values)])


def _app_variable(a, name):
    return {"price": a.price_usd, "installs": a.installs_lower_bound, "size": a.size_bytes,
            "reviews_count": a.reviews_count, "rating": a.rating}[name]


def correlation_matrix(apps):
    """Pairwise Pearson matrix; a pair is dropped when either value is absent."""
    cols = {v: [_app_variable(a, v) for a in apps] for v in CORRELATION_VARIABLES}
    k = len(CORRELATION_VARIABLES)
    values = [[None] * k for _ in range(k)]
    for i, vi in enumerate(CORRELATION_VARIABLES):
        for j in range(i, k):
            r = pearson(cols[vi], cols[CORRELATION_VARIABLES[j]])
            if i == j and r is not None:
                r = 1.0
            values[i][j] = values[j][i] = r
    return CorrelationMatrix(CORRELATION_VARIABLES, values,
                             sum(1 for s in cols["size"] if s is None))


def rating_bin(rating):
    """Lower edge of the 0.5-wide bin; 5.0 shares the top bin with 4.5."""
    return min(math.floor(rating / RATING_BIN) * RATING_BIN, 5.0 - RATING_BIN)


def size_bin(size_bytes):
    return int(size_bytes // (SIZE_BIN_MB * MB)) * SIZE_BIN_MB


def size_rating_table(apps):
    """Counts per (size bin in MB, rating bin); apps lacking either are excluded."""
    counts = Counter()
    excluded = 0
    for a in apps:
        if a.size_bytes is None or a.rating is None:
            excluded += 1
            continue
        counts[size_bin(a.size_bytes), rating_bin(a.rating)] += 1
    rows = [[s, s + SIZE_BIN_MB, r, r + RATING_BIN, n] for (s, r), n in sorted(counts.items())]
    return _csv(["size_mb_lo", "size_mb_hi", "rating_lo", "rating_hi", "count"], rows), excluded


def content_rating_table(apps):
    """Count and mean rating per (content rating, app type)."""
    groups = {}
    for a in apps:
        groups.setdefault((a.content_rating, a.app_type.value), []).append(a.rating)
    rows = []
    for (cr, t), ratings in sorted(groups.items()):
        rated = [r for r in ratings if r is not None]
        mean = math.fsum(rated) / len(rated) if rated else None
        rows.append([cr, t, len(ratings), len(rated), _num(mean)])
    return _csv(["content_rating", "type", "count", "rated", "mean_rating"], rows)


def word_frequencies(docs, cls, top_k=None, config=WORD_PIPELINE):
    """Token counts over the documents labelled ``cls``; ties break lexicographically."""
    cls = Sentiment.parse(cls)
    counts = Counter()
    for d in docs:
        if d.label is cls:
            counts.update(preprocess(d.text, config))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        ranked = ranked[:top_k]
    return dict(ranked)


def scatter_dump(docs, lexicon):
    """One (polarity, subjectivity) row per document."""
    out = []
    for d in docs:
        s = score_document(d.text, lexicon)
        out.append((s.polarity, s.subjectivity))
    return out


def scatter_csv(rows):
    return _csv(["polarity", "subjectivity"], [[_num(p), _num(s)] for p, s in rows])


def _fraction_str(f):
    return f"{f.numerator}/{f.denominator}"


def rq_bundle(apps, docs=None, lexicon=None, apps_source="google_apps",
              docs_source="google_reviews", top_k=50):
    """Statistics keyed rq1 .. rq8. Each entry holds ``source``, ``status``,
    a ``summary`` dict and, when computed, ``csv`` text."""
    out = {}
    cats = summarize_categories(apps)
    out["rq1"] = {"source": apps_source, "status": "ok", "csv": cats.to_csv(), "summary": {
        "apps": cats.total, "rated": cats.rated, "mean_rating": cats.mean_rating,
        "distinct_categories": cats.distinct_categories,
        "distinct_genres": cats.distinct_genres, "distinct_apps": cats.distinct_apps}}
    if apps:
        free, paid = type_split(apps)
        by_type = {}
        for a in apps:
            by_type.setdefault(a.app_type.value, []).append(a)
        rows = []
        for t, group in sorted(by_type.items()):
            rated = [a.rating for a in group if a.rating is not None]
            rows.append([t, len(group), len(rated),
                         _num(math.fsum(rated) / len(rated) if rated else None)])
        out["rq2"] = {"source": apps_source, "status": "ok",
                      "csv": _csv(["type", "count", "rated", "mean_rating"], rows),
                      "summary": {"free_fraction": float(free), "paid_fraction": float(paid),
                                  "free_exact": _fraction_str(free),
                                  "paid_exact": _fraction_str(paid)}}
    else:
        out["rq2"] = {"source": apps_source, "status": "skipped",
                      "summary": {"reason": "no apps"}}
    table, excluded = size_rating_table(apps)
    out["rq4"] = {"source": apps_source, "status": "ok", "csv": table,
                  "summary": {"excluded": excluded, "size_bin_mb": SIZE_BIN_MB,
                              "rating_bin": RATING_BIN}}
    out["rq5"] = {"source": apps_source, "status": "ok", "csv": content_rating_table(apps),
                  "summary": {}}
    corr = correlation_matrix(apps)
    out["rq8"] = {"source": apps_source, "status": "ok", "csv": corr.to_csv(),
                  "summary": {"variables": list(corr.variables), "values": corr.values,
                              "size_excluded": corr.size_excluded}}
    if docs:
        if lexicon is not None:
            rows = scatter_dump(docs, lexicon)
            out["rq3"] = {"source": docs_source, "status": "ok", "csv": scatter_csv(rows),
                          "summary": {"documents": len(rows)}}
        else:
            out["rq3"] = {"source": docs_source, "status": "skipped",
                          "summary": {"reason": "no lexicon"}}
        for rq, cls in (("rq6", Sentiment.Positive), ("rq7", Sentiment.Negative)):
            freq = word_frequencies(docs, cls, top_k)
            out[rq] = {"source": docs_source, "status": "ok",
                       "csv": _csv(["token", "count"], list(freq.items())),
                       "summary": {"class": cls.name, "top": list(freq)[:10]}}
    else:
        for rq in ("rq3", "rq6", "rq7"):
            out[rq] = {"source": docs_source, "status": "skipped",
                       "summary": {"reason": "no reviews"}}
    return {k: out[k] for k in sorted(out)}

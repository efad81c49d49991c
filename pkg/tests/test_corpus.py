import datetime as dt
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from appsent.corpus import (AppRecord, AppType, CorpusError, LabeledDocument, Source,
                            clean_corpus, documents_from_reviews, documents_from_sar,
                            format_apps_csv, label_from_rating, parse_apps_csv, parse_installs,
                            parse_price, parse_reviews_csv, parse_sar_csv, parse_size)
from appsent.lexicon import load_lexicon
from appsent.sentiment import Sentiment
from conftest import INVARIANT_CASES

HEADER = ("App,Category,Rating,Reviews,Size,Installs,Type,Price,Content Rating,Genres,"
          "Last Updated,Current Ver,Android Ver\n")


def test_size_installs_price_rules():
    assert parse_size("19M") == 19922944
    assert parse_size("201k") == 201 * 1024
    assert parse_size("Varies with device") is None
    assert parse_size("8.5M") == round(8.5 * 2 ** 20)
    assert parse_installs("10,000+") == 10000
    assert parse_installs("0") == 0
    assert parse_price("$4.99") == 4.99
    assert parse_price("0") == 0.0


def test_parse_apps_quoted_cells_and_drops():
    raw = (HEADER
           + '"Photo Editor, Pro",ART_AND_DESIGN,4.1,159,19M,"10,000+",Free,0,Everyone,'
             'Art & Design;Pretend Play,"January 7, 2018",1.0.0,4.0.3 and up\n'
           + 'Broken,1.9,19,3.0M,1000+,Free,0,Everyone,,"February 11, 2018",1.0.19,'
             '4.0 and up\n'
           + 'Unrated,TOOLS,NaN,0,Varies with device,"1,000+",Paid,$2.99,Teen,Tools,'
             '"June 1, 2018",Varies with device,NaN\n'
           + 'Big,TOOLS,4.0,12,1M,1+,Free,0,Everyone,Tools,2018-06-01,1,NaN\n').encode()
    apps, report = parse_apps_csv(raw)
    assert report.rows_read == 4 and report.rows_dropped == 1 and len(apps) == 3
    assert report.rows_read == report.rows_parsed + report.rows_dropped
    first = apps[0]
    assert first.name == "Photo Editor, Pro" and first.size_bytes == 19922944
    assert first.installs_lower_bound == 10000 and first.genres == ("Art & Design",
                                                                     "Pretend Play")
    assert first.last_updated == dt.date(2018, 1, 7)
    assert apps[1].rating is None and apps[1].size_bytes is None
    assert apps[1].app_type is AppType.Paid and apps[1].price_usd == 2.99
    assert apps[2].last_updated == dt.date(2018, 6, 1)
    assert json.loads(report.to_json())["reasons"] == {"field_count": 1}


def test_rating_out_of_range_dropped():
    raw = HEADER + 'A,GAME,19,1,1M,1+,Free,0,Everyone,Action,"May 1, 2018",1,4.0\n'
    apps, report = parse_apps_csv(raw.encode())
    assert apps == [] and report.reasons["rating_out_of_range"] == 1


def test_missing_type_inferred_from_price():
    raw = HEADER + 'A,GAME,4,1,1M,1+,NaN,0,Everyone,Action,"May 1, 2018",1,4.0\n'
    apps, _ = parse_apps_csv(raw.encode())
    assert apps[0].app_type is AppType.Free


def test_missing_header_is_fatal():
    with pytest.raises(CorpusError):
        parse_apps_csv(b"")
    with pytest.raises(CorpusError):
        parse_apps_csv(b"App,Category\nx,y\n")
    with pytest.raises(CorpusError):
        parse_reviews_csv(b"")


def test_parse_reviews_rules():
    raw = ("App,Translated_Review,Sentiment,Sentiment_Polarity,Sentiment_Subjectivity\n"
           "A,Best app ever,Positive,1.0,0.3\n"
           "A,nan,nan,nan,nan\n"
           "A,,Positive,0.5,0.5\n"
           "B,Half filled,Positive,,0.5\n"
           "C,Bad polarity,Negative,-3,0.5\n").encode()
    reviews, report = parse_reviews_csv(raw)
    assert report.rows_read == 5 and report.rows_dropped == 2
    assert report.reasons["empty_review"] == 2
    assert (reviews[0].provided_sentiment, reviews[0].provided_polarity,
            reviews[0].provided_subjectivity) == (Sentiment.Positive, 1.0, 0.3)
    for r in reviews[1:]:
        assert (r.provided_sentiment, r.provided_polarity, r.provided_subjectivity) == (
            None, None, None)
    assert report.reasons["inconsistent_optionals"] == 2


def test_parse_sar_rules():
    raw = ("Department,App,Review,Rating,Type,Category\n"
           "Mathematics,Unacademy,It’s helpful to learn at home...,5,Free,Education\n"
           "Geography,Maps,meh,0,Free,Travel\n").encode()
    records, report = parse_sar_csv(raw)
    assert len(records) == 1 and report.rows_dropped == 1
    r = records[0]
    assert (r.department, r.app_name, r.rating, r.app_type, r.category) == (
        "Mathematics", "Unacademy", 5, AppType.Free, "Education")
    with pytest.raises(CorpusError):
        parse_sar_csv(b"Department,App,Review,Rating,Type\n")


@pytest.mark.parametrize("rating, label", [
    (1, Sentiment.Negative), (2, Sentiment.Negative), (3, Sentiment.Positive),
    (4, Sentiment.Positive), (5, Sentiment.Positive)])
def test_label_from_rating(rating, label):
    assert label_from_rating(rating) is label


def test_label_from_rating_guards_range():
    with pytest.raises(ValueError):
        label_from_rating(0)


def test_documents_from_reviews_lexicon_fallback():
    from appsent.corpus import ReviewRecord
    lex = load_lexicon()
    docs = documents_from_reviews([ReviewRecord("A", "great app"),
                                   ReviewRecord("B", "x", Sentiment.Negative, -0.1, 0.2)], lex)
    assert [d.label for d in docs] == [Sentiment.Positive, Sentiment.Negative]
    assert all(d.source is Source.GoogleTrain for d in docs)


def test_sar_documents_never_neutral():
    from appsent.corpus import SarRecord
    docs = documents_from_sar([SarRecord("d", "a", "t", r, AppType.Free, "c")
                               for r in range(1, 6)])
    assert Sentiment.Neutral not in {d.label for d in docs}


def _doc(text, label=Sentiment.Positive):
    return LabeledDocument(text, label, Source.GoogleTrain)


def test_clean_corpus_examples():
    assert clean_corpus([]) == []
    docs = [_doc("nice app"), _doc("nice app"), _doc("123 !!"), _doc("x", None),
            _doc("nice app", Sentiment.Negative)]
    out, report = clean_corpus(docs, with_report=True)
    assert out == [docs[0], docs[4]]
    assert report.to_dict() == {"rows_read": 5, "rows_dropped": 3, "reasons": {
        "duplicate": 1, "empty_text": 1, "missing_label": 1}}


doc_strategy = st.builds(
    LabeledDocument,
    st.sampled_from(["good", "bad app", "", "  ", "12", "ok!", "good", "Good"]),
    st.sampled_from([Sentiment.Positive, Sentiment.Negative, Sentiment.Neutral, None]),
    st.just(Source.GoogleTrain))


@settings(max_examples=INVARIANT_CASES)
@given(st.lists(doc_strategy, max_size=12))
def test_clean_corpus_idempotent(docs):
    once = clean_corpus(docs)
    assert clean_corpus(once) == once


names = st.text(alphabet=st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")),
                min_size=1, max_size=12).map(str.strip).filter(
    lambda s: s and s not in ("nan", "NaN", "NAN"))
app_strategy = st.builds(
    lambda name, cat, rating, reviews, size, installs, paid, price, cr, genres, date: AppRecord(
        name, cat, rating, reviews, size, installs,
        AppType.Paid if paid else AppType.Free, price if paid else 0.0, cr, genres, date,
        "1.0", "4.0 and up"),
    names, st.sampled_from(["GAME", "TOOLS"]),
    st.one_of(st.none(), st.floats(1.0, 5.0)),
    st.integers(0, 10 ** 8), st.one_of(st.none(), st.integers(0, 10 ** 9)),
    st.integers(0, 10 ** 9), st.booleans(),
    st.floats(0.01, 400.0).map(lambda x: round(x, 2)), st.sampled_from(["Everyone", "Teen"]),
    st.lists(st.sampled_from(["Action", "Casual", "Art & Design"]), min_size=1,
             max_size=2).map(tuple),
    st.dates(dt.date(2010, 1, 1), dt.date(2020, 12, 31)))


@settings(max_examples=300)
@given(st.lists(app_strategy, max_size=6))
def test_apps_roundtrip(apps):
    parsed, report = parse_apps_csv(format_apps_csv(apps).encode("utf-8"))
    assert report.rows_dropped == 0
    assert parsed == apps

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from appsent.metrics import (BINARY, accuracy, binary_accuracy, confusion, evaluate, f_measure,
                             reports_to_csv)
from appsent.sentiment import Sentiment
from conftest import INVARIANT_CASES

P, N, U = Sentiment.Positive, Sentiment.Negative, Sentiment.Neutral


def test_confusion_examples():
    cm = confusion([P, N], [P, N])
    assert cm.counts.tolist() == [[1, 0], [0, 1]]
    cm = confusion([P, P, N], [P, N, N])
    assert cm.counts.tolist() == [[1, 1], [0, 1]]
    assert cm[P, N] == 1
    assert confusion([P, N, U], [U, N, P]).counts.shape == (3, 3)
    with pytest.raises(ValueError):
        confusion([P], [P, N])
    with pytest.raises(ValueError):
        confusion([], [])


def test_accuracy_examples():
    assert binary_accuracy(tp=3, tn=4, fp=2, fn=1) == pytest.approx(0.7, abs=1e-12)
    assert accuracy(confusion([P, N, N], [P, N, N])) == 1.0
    assert accuracy(confusion([P, N], [N, P])) == 0.0


def test_f_measure_examples():
    assert abs(f_measure(0.8, 0.5) - 0.615385) < 1e-6
    assert f_measure(0.8, 0.5) == pytest.approx(0.8 / 1.3, abs=1e-12)
    assert f_measure(1, 1) == 1
    assert f_measure(0, 0) == 0


def test_evaluate_examples():
    r = evaluate([P, N], [P, N])
    assert r.accuracy == 1 and r.macro_f == 1
    r = evaluate([P, P, N], [P, N, N], "tag")
    assert r.accuracy == pytest.approx(2 / 3, abs=1e-12)
    s = r.per_class[P]
    assert (s.precision, s.recall) == (1.0, 0.5)
    assert s.f == pytest.approx(2 / 3, abs=1e-12)
    r = evaluate([P, P], [P, P], classes=BINARY)
    assert r.per_class[P].f == 1 and r.per_class[N].f == 0 and r.macro_f == 0.5


def test_report_csv_row():
    text = reports_to_csv([evaluate([P, P, N], [P, N, N], "Unigram+TP")])
    header, row = text.strip().splitlines()
    assert header.startswith("config_tag,accuracy,positive_f,macro_f")
    assert row.startswith("Unigram+TP,0.666667,0.666667,0.666667")


pairs = st.lists(st.tuples(st.sampled_from([P, N, U]), st.sampled_from([P, N, U])),
                 min_size=1, max_size=30)


def _fields(r):
    return (r.accuracy, r.macro_f, r.positive_f, r.confusion.counts.tolist(),
            {c: (s.precision, s.recall, s.f) for c, s in r.per_class.items()})


@settings(max_examples=INVARIANT_CASES)
@given(pairs, st.randoms(use_true_random=False))
def test_permutation_invariance(data, rnd):
    shuffled = list(data)
    rnd.shuffle(shuffled)
    a = evaluate([x for x, _ in data], [y for _, y in data])
    b = evaluate([x for x, _ in shuffled], [y for _, y in shuffled])
    assert _fields(a) == _fields(b)
    assert 0 <= a.accuracy <= 1 and all(0 <= s.f <= 1 for s in a.per_class.values())
    assert a.accuracy == pytest.approx(np.trace(a.confusion.counts) / len(data), abs=1e-15)
    assert a.macro_f == pytest.approx(np.mean([s.f for s in a.per_class.values()]))


@settings(max_examples=300)
@given(st.lists(st.tuples(st.sampled_from([P, N]), st.sampled_from([P, N])), min_size=1,
                max_size=30))
def test_binary_eq_matches_trace(data):
    cm = confusion([x for x, _ in data], [y for _, y in data], BINARY)
    tp, fn, fp, tn = cm[P, P], cm[P, N], cm[N, P], cm[N, N]
    assert binary_accuracy(tp, tn, fp, fn) == pytest.approx(accuracy(cm), abs=1e-15)

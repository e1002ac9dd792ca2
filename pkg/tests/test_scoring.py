import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statsad.scoring import ConfusionCounts, collar_mask, count, metrics
from statsad.types import DecisionStream


def _d(bits, shift=0.01):
    return DecisionStream(np.array(bits, dtype=bool), shift)


def test_identical_streams():
    c = count(_d([1, 0, 1, 1]), _d([1, 0, 1, 1]))
    assert c.fp == 0 and c.fn == 0


def test_all_speech_against_half():
    c = count(_d([1] * 20), _d([1] * 10 + [0] * 10))
    assert (c.tp, c.fp, c.tn, c.fn) == (10, 10, 0, 0)


def test_collar_one_frame_removes_two():
    ref = _d([1] * 10 + [0] * 10)
    keep = collar_mask(ref, 0.01)
    assert np.flatnonzero(~keep).tolist() == [9, 10]
    assert count(_d([1] * 20), ref, 0.01).total == 18


def test_dcf_fixture():
    m = metrics(ConfusionCounts(tp=3, fp=1, tn=5, fn=1))
    assert m.dcf == pytest.approx(0.75 * 0.25 + 0.25 / 6, abs=1e-15)
    assert m.dcf == pytest.approx(0.2291667, abs=1e-7)
    assert m.precision == pytest.approx(0.75)
    assert m.recall == pytest.approx(0.75)
    assert m.f1 == pytest.approx(0.75)


def test_perfect():
    m = metrics(ConfusionCounts(tp=7, fp=0, tn=3, fn=0))
    assert (m.precision, m.recall, m.f1, m.dcf) == (1.0, 1.0, 1.0, 0.0)


def test_zero_denominators():
    m = metrics(ConfusionCounts(tp=0, fp=0, tn=10, fn=0))
    assert (m.precision, m.recall, m.f1, m.dcf) == (0.0, 0.0, 0.0, 0.0)
    m = metrics(ConfusionCounts(tp=0, fp=0, tn=0, fn=4))
    assert (m.precision, m.recall, m.f1, m.dcf) == (0.0, 0.0, 0.0, 0.75)
    m = metrics(ConfusionCounts())
    assert m.dcf == 0.0


def test_mismatch_errors():
    with pytest.raises(ValueError):
        count(_d([1, 0]), _d([1]))
    with pytest.raises(ValueError):
        count(_d([1], 0.01), _d([1], 0.02))
    with pytest.raises(ValueError):
        count(_d([1]), _d([1]), -0.1)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=200), st.sampled_from([0.0, 0.01, 0.02, 0.05]))
@settings(max_examples=200)
def test_counts_cover_scored_frames(pairs, collar):
    hyp, ref = _d([p[0] for p in pairs]), _d([p[1] for p in pairs])
    c = count(hyp, ref, collar)
    assert c.total == int(collar_mask(ref, collar).sum())
    m = metrics(c)
    if m.precision + m.recall > 0:
        assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))
    assert 0.0 <= m.dcf <= 1.0


def test_report_formats():
    m = metrics(ConfusionCounts(tp=3, fp=1, tn=5, fn=1))
    assert "dcf=22.9167\n" in m.key_values()
    assert m.table().splitlines()[0].split() == ["F1", "P", "R", "DCF"]

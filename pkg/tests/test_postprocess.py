import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statsad.postprocess import (
    ScoreStream,
    SegmentationParams,
    majority_vote,
    median_smooth,
    parse_postprocess,
    rank_normalize,
    segment_aggregate,
    segment_aggregate_frames,
)
from statsad.types import DecisionStream

from oracles import segment_membership


def _d(bits):
    return DecisionStream(np.array(bits, dtype=bool), 0.01)


def _sliding_majority(bits, window):
    half = window // 2
    out = []
    for t in range(len(bits)):
        win = bits[max(0, t - half) : t + half + 1]
        ones = sum(win)
        out.append(bits[t] if 2 * ones == len(win) else 2 * ones > len(win))
    return out


@given(st.lists(st.booleans(), min_size=1, max_size=60))
def test_median_window_one_identity(bits):
    assert median_smooth(_d(bits), 1) == _d(bits)


def test_median_removes_isolated_flip():
    bits = [0] * 10
    bits[4] = 1
    assert not median_smooth(_d(bits), 3).decisions.any()


def test_median_alternating():
    bits = [i % 2 == 1 for i in range(21)]
    got = median_smooth(_d(bits), 3).decisions.tolist()
    assert got == _sliding_majority(bits, 3)
    # interior frames follow 2-of-3: each is outvoted by its two neighbours
    assert got[1:-1] == [not b for b in bits[1:-1]]


@given(st.lists(st.booleans(), min_size=1, max_size=80), st.integers(0, 10))
@settings(max_examples=200)
def test_median_matches_oracle(bits, half):
    assert median_smooth(_d(bits), 2 * half + 1).decisions.tolist() == _sliding_majority(bits, 2 * half + 1)


def test_median_even_window_rejected():
    with pytest.raises(ValueError):
        median_smooth(_d([1, 0]), 4)


def test_segment_covering_everything():
    d = segment_aggregate_frames(np.full(5, 0.9), 10, 10, 0.5)
    assert d.all()


def test_segment_one_active():
    scores = np.zeros(12)
    scores[6] = 1.0
    d = segment_aggregate_frames(scores, 5, 2, 0.5)
    assert np.flatnonzero(d).tolist() == [2, 3, 4, 5, 6]


def test_segment_alpha_above_max():
    scores = np.random.default_rng(0).uniform(size=40)
    assert not segment_aggregate_frames(scores, 5, 2, 1.0).any()


@given(st.integers(1, 60), st.integers(1, 12), st.integers(1, 12), st.floats(0, 1), st.integers(0, 2**32 - 1))
@settings(max_examples=300, deadline=None)
def test_segment_union_and_alpha_monotone(n, length, shift, alpha, seed):
    shift = min(shift, length)
    scores = np.random.default_rng(seed).uniform(size=n)
    got = segment_aggregate_frames(scores, length, shift, alpha)
    np.testing.assert_array_equal(got, segment_membership(n, length, shift, scores, alpha))
    higher = segment_aggregate_frames(scores, length, shift, min(1.0, alpha + 0.2))
    assert np.all(higher <= got)


def test_segment_seconds_wrapper():
    scores = ScoreStream(np.r_[np.zeros(6), 1.0, np.zeros(5)], 0.01)
    d = segment_aggregate(scores, SegmentationParams(0.05, 0.02, 0.5))
    assert np.flatnonzero(d.decisions).tolist() == [2, 3, 4, 5, 6]


def test_segment_bad_params():
    with pytest.raises(ValueError):
        SegmentationParams(0.05, 0.1, 0.5)
    with pytest.raises(ValueError):
        segment_aggregate_frames(np.ones(4), 2, 3, 0.5)
    with pytest.raises(ValueError):
        ScoreStream(np.array([0.1, np.nan]), 0.01)


def test_majority_vote_cases():
    assert majority_vote([_d([1, 0, 1])]) == _d([1, 0, 1])
    assert majority_vote([_d([1]), _d([1]), _d([0])]).decisions.tolist() == [True]
    assert majority_vote([_d([1]), _d([0])]).decisions.tolist() == [True]
    assert majority_vote([_d([1]), _d([0])], tie="nonspeech").decisions.tolist() == [False]


def test_majority_vote_mismatch():
    with pytest.raises(ValueError):
        majority_vote([_d([1, 0]), _d([1])])
    with pytest.raises(ValueError):
        majority_vote([])


def test_rank_normalize():
    s = rank_normalize([3.0, -1.0, 10.0, 3.0], 0.01)
    np.testing.assert_allclose(s.scores, [2.5 / 4, 1 / 4, 1.0, 2.5 / 4])


def test_parse_postprocess():
    assert parse_postprocess("none") is None
    assert parse_postprocess("median:5") == 5
    assert parse_postprocess("segment:0.05,0.01,0.5") == SegmentationParams(0.05, 0.01, 0.5)
    for bad in ("median:4", "median:x", "segment:1,2", "blur"):
        with pytest.raises(ValueError):
            parse_postprocess(bad)

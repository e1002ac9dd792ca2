import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from statsad.adaptive_threshold import DegeneratePartitionError, initial_decision, partition_for_training
from statsad.csbe import CsbeTrack, finalize_track
from statsad.noise_floor import FloorTrack


def _track(values, floor, average):
    values = np.asarray(values, dtype=float)
    return CsbeTrack(values, np.log(np.maximum(values, 1e-12)), FloorTrack(np.asarray(floor, dtype=float), 1), average, 0.01)


def test_constant_track_all_nonspeech():
    track = finalize_track(np.full(40, 3.0), 10, 0.85, 0.01)
    assert not initial_decision(track, 2.0).decisions.any()


def test_hand_inequality():
    d = initial_decision(_track([5.0, 4.0, 3.9], [1, 1, 1], 1.0), 2.0).decisions
    np.testing.assert_array_equal(d, [True, False, False])


def test_huge_factor_all_nonspeech():
    track = _track(np.geomspace(1, 1e9, 30), np.ones(30), 1.0)
    assert not initial_decision(track, 1e12).decisions.any()


_values = arrays(np.float64, st.integers(5, 80), elements=st.floats(1e-6, 1e6))


@given(_values, st.integers(1, 20), st.floats(0.5, 4.0), st.integers(0, 79), st.floats(1.0, 100.0))
@settings(max_examples=200, deadline=None)
def test_raising_a_value_never_unflags_it(values, window, factor, index, bump):
    track = finalize_track(values, window, 0.0, 0.01)
    before = initial_decision(track, factor).decisions
    i = index % values.size
    raised = track.values.copy()
    raised[i] *= bump
    # floor and A-CSBE held fixed: the decision is a per-frame comparison
    after = initial_decision(_track(raised, track.floor.values, track.average_floor), factor).decisions
    assert after[i] >= before[i]


@given(_values, st.integers(1, 20), st.floats(1e-3, 1e3))
@settings(max_examples=200, deadline=None)
def test_scale_invariance(values, window, c):
    a = finalize_track(values, window, 0.85, 0.01)
    b = finalize_track(values * c, window, 0.85, 0.01)
    assert b.average_floor == pytest.approx(c * a.average_floor, rel=1e-9)
    da, db = initial_decision(a).decisions, initial_decision(b).decisions
    # only frames within rounding distance of the threshold may differ
    margin = np.abs(values - 2.0 * (a.floor.values + a.average_floor)) > 1e-9 * values
    np.testing.assert_array_equal(da[margin], db[margin])


def test_bimodal_partitions():
    values = np.ones(200)
    values[50:80] = 100.0
    values[130:150] = 100.0
    track = _track(values, np.ones(200), 1.0)
    noise, speech = partition_for_training(track)
    assert noise.size == 150 and np.all(noise == 0.0)
    assert speech.size == 50 and np.allclose(speech, np.log(100.0))


def test_empty_speech_partition():
    track = _track(np.full(20, 1.5), np.ones(20), 1.0)
    with pytest.raises(DegeneratePartitionError):
        partition_for_training(track)


def test_empty_noise_partition():
    track = _track(np.full(20, 50.0), np.ones(20), 1.0)
    with pytest.raises(DegeneratePartitionError):
        partition_for_training(track)


def test_threshold_values_excluded():
    values = [2.0, 6.0, 1.0, 7.0, 4.0]
    noise, speech = partition_for_training(_track(values, np.ones(5), 1.0), 2.0, 6.0)
    np.testing.assert_allclose(noise, [0.0])
    np.testing.assert_allclose(speech, [np.log(7.0)])


@given(_values, st.floats(0.1, 3.0), st.floats(1.0, 5.0))
@settings(max_examples=200, deadline=None)
def test_partitions_disjoint_and_omit_only_margin(values, m_n, gap):
    m_s = m_n + gap
    avg = float(np.median(values))
    track = _track(values, np.full(values.size, avg), avg)
    try:
        noise, speech = partition_for_training(track, m_n, m_s)
    except DegeneratePartitionError:
        return
    band = np.sum((values >= m_n * avg) & (values <= m_s * avg))
    assert noise.size + speech.size + band == values.size
    assert noise.size == 0 or speech.size == 0 or noise.max() < speech.min()


def test_bad_margins():
    with pytest.raises(ValueError):
        partition_for_training(_track(np.ones(4), np.ones(4), 1.0), 3.0, 2.0)

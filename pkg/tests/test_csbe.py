import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from statsad.config import PipelineConfig
from statsad.csbe import (
    LOG_EPS,
    accumulate_csbe,
    analysis_power,
    band_count,
    band_membership,
    compute_csbe,
    finalize_track,
    smooth_energies,
    smoothing_frames,
    subband_energies,
)
from statsad.noise_floor import recursive_smooth
from statsad.spectral import PowerSpectrogram
from statsad.types import AudioClip

from conftest import tone


def _psd(frames, sr=8000, fft=512):
    return PowerSpectrogram(np.asarray(frames, dtype=float), 0.01, 0.05, fft, sr)


def test_four_bands_at_8khz():
    assert band_count(8000, 1000.0) == 4
    assert subband_energies(_psd(np.ones((3, 257)))).shape == (3, 4)


def test_band_edges():
    member = band_membership(_psd(np.ones((1, 257))), 1000.0)
    freqs = np.arange(257) * 8000 / 512
    for f, row in zip(freqs, member):
        assert row.sum() == 1
        assert np.argmax(row) == min(int(f // 1000), 3)
    # 64 bins per band, the Nyquist bin joins the last band
    np.testing.assert_array_equal(member.sum(axis=0), [64, 64, 64, 65])


def test_single_bin_at_500hz():
    frames = np.zeros((2, 257))
    frames[:, 32] = 7.0
    e = subband_energies(_psd(frames))
    np.testing.assert_array_equal(e, [[7, 0, 0, 0], [7, 0, 0, 0]])


@given(arrays(np.float64, (6, 257), elements=st.floats(0, 1e6)), st.sampled_from([250.0, 500.0, 1000.0, 1500.0]))
@settings(max_examples=100, deadline=None)
def test_bands_partition_bins(frames, width):
    e = subband_energies(_psd(frames), width)
    np.testing.assert_allclose(e.sum(axis=1), frames.sum(axis=1), rtol=1e-12, atol=1e-6)


def test_bad_band_width():
    with pytest.raises(ValueError):
        subband_energies(_psd(np.ones((1, 257))), 0.0)


def test_smoothing_frames_odd():
    assert smoothing_frames(0.48, 0.01) == 49
    assert smoothing_frames(0.03, 0.01) == 3


def test_smooth_constant():
    np.testing.assert_allclose(smooth_energies(np.full((30, 2), 3.0), 49), 3.0)


def test_impulse_self_weight_with_edge_shrink():
    n = 5
    diag = [smooth_energies(np.eye(n)[:, [t]], 3)[t, 0] for t in range(n)]
    np.testing.assert_allclose(diag, [1 / 2, 1 / 3, 1 / 3, 1 / 3, 1 / 2])
    np.testing.assert_allclose(smooth_energies(np.eye(n)[:, [2]], 3)[:, 0], [0, 1 / 3, 1 / 3, 1 / 3, 0])


@given(arrays(np.float64, st.tuples(st.integers(1, 60), st.integers(1, 4)), elements=st.floats(-1e3, 1e3)), st.integers(0, 30))
@settings(max_examples=200, deadline=None)
def test_smooth_matches_brute_force(e, half):
    w = 2 * half + 1
    n = e.shape[0]
    expected = np.array([e[max(0, t - half) : min(n, t + half + 1)].mean(axis=0) for t in range(n)])
    np.testing.assert_allclose(smooth_energies(e, w), expected, rtol=1e-9, atol=1e-8)


@given(arrays(np.float64, st.tuples(st.integers(2, 80), st.just(3)), elements=st.floats(0, 1e3)), st.integers(1, 15))
@settings(max_examples=200, deadline=None)
def test_smoothing_contracts_variance(e, half):
    s = smooth_energies(e, 2 * half + 1)
    assert np.all(s.var(axis=0) <= e.var(axis=0) * (1 + 1e-9) + 1e-9)


def test_accumulate_hand_values():
    e = 2.5
    assert accumulate_csbe(np.array([[e, 0, 0, 0]]))[0] == e
    assert accumulate_csbe(np.array([[e, e, 0, 0]]))[0] == pytest.approx(1.5 * e)
    assert accumulate_csbe(np.zeros((4, 4))).tolist() == [0, 0, 0, 0]


@given(arrays(np.float64, (5, 4), elements=st.floats(0, 1e3)), arrays(np.float64, (5, 4), elements=st.floats(0, 1e3)), st.floats(0, 10))
@settings(max_examples=100, deadline=None)
def test_accumulate_linear(a, b, k):
    np.testing.assert_allclose(accumulate_csbe(a + k * b), accumulate_csbe(a) + k * accumulate_csbe(b), rtol=1e-9, atol=1e-9)


def test_finalize_constant():
    track = finalize_track(np.full(50, 4.0), 10, 0.85, 0.01)
    np.testing.assert_allclose(track.floor.values, 4.0)
    assert track.average_floor == pytest.approx(4.0)


def test_finalize_average_floor_hand():
    # beta 0, window 2: floor = [3, 1, 1, 2, 2]; mean 9 / 5
    track = finalize_track([3.0, 1.0, 4.0, 2.0, 5.0], 2, 0.0, 0.01)
    np.testing.assert_array_equal(track.floor.values, [3, 1, 1, 2, 2])
    assert track.average_floor == pytest.approx(1.8)


def test_finalize_ignores_short_spikes():
    values = np.full(100, 2.0)
    values[[20, 21, 60]] = 500.0
    track = finalize_track(values, 5, 0.0, 0.01)
    np.testing.assert_array_equal(track.floor.values, 2.0)


def test_log_values_floored():
    track = finalize_track([0.0, 1.0, np.e], 3, 0.0, 0.01)
    np.testing.assert_allclose(track.log_values, [np.log(LOG_EPS), 0.0, 1.0])


@given(arrays(np.float64, st.integers(1, 100), elements=st.floats(0, 1e6)), st.integers(1, 50), st.sampled_from([0.0, 0.85]))
@settings(max_examples=100, deadline=None)
def test_track_invariants(values, window, beta):
    track = finalize_track(values, window, beta, 0.01)
    assert np.all(track.values >= 0)
    assert np.all(track.floor.values <= recursive_smooth(values, beta) * (1 + 1e-12) + 1e-300)
    assert track.average_floor == pytest.approx(track.floor.values.mean())


def test_silent_clip_zero_csbe():
    track = compute_csbe(AudioClip(np.zeros(8000), 8000))
    assert np.all(track.values == 0)


def test_frame_grid_one_per_shift():
    cfg = PipelineConfig()
    for n in (8000, 8001, 8079, 12345):
        psd = analysis_power(AudioClip(np.ones(n), 8000), cfg)
        assert psd.n_frames == -(-n // 80)


def test_analysis_frame_is_centered():
    # a click at sample s shows up loudest in the frame whose center is nearest s
    x = np.zeros(8000)
    x[4040] = 1.0
    p = analysis_power(AudioClip(x, 8000)).frames.sum(axis=1)
    assert np.argmax(p) == 50


def test_low_tone_outweighs_high_tone():
    low = compute_csbe(AudioClip(tone(500, 2.0), 8000)).values
    high = compute_csbe(AudioClip(tone(3500, 2.0), 8000)).values
    assert np.median(low) == pytest.approx(4 * np.median(high), rel=0.02)

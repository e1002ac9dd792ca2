"""One-dimensional GMMs fitted by EM and the two-chain minimum-duration HMM.

The HMM has ``n`` noise states followed by ``n`` speech states arranged in a
loop ``0 -> 1 -> ... -> 2n-1 -> 0``.  Each state either stays (``p_stay``)
or advances to the next one, so any run of one class lasts at least ``n``
frames.  All states of a class share that class's GMM as emission density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from statsad.types import DecisionStream

VARIANCE_FLOOR = 1e-6
STATES_PER_CLASS = 5
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class Gmm:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    # average log-likelihood before each M-step, for diagnostics
    trace: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.asarray(self.means, dtype=np.float64)
        v = np.asarray(self.variances, dtype=np.float64)
        if not (w.shape == m.shape == v.shape) or w.ndim != 1 or w.size == 0:
            raise ValueError("weights, means and variances must be equal-length vectors")
        if abs(w.sum() - 1.0) > 1e-9 or np.any(w < 0):
            raise ValueError("weights must lie on the simplex")
        if np.any(v <= 0):
            raise ValueError("variances must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)

    @property
    def n_components(self) -> int:
        return self.weights.size


def _component_logpdf(x: np.ndarray, means, variances) -> np.ndarray:
    d = x[:, None] - means[None, :]
    return -0.5 * (_LOG_2PI + np.log(variances)[None, :] + d * d / variances[None, :])


def gmm_logpdf(g: Gmm, x):
    """``log sum_k w_k N(x; mu_k, var_k)`` via log-sum-exp; scalar in, scalar out."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    with np.errstate(divide="ignore"):
        log_w = np.log(g.weights)
    out = logsumexp(_component_logpdf(arr, g.means, g.variances) + log_w[None, :], axis=1)
    return float(out[0]) if np.ndim(x) == 0 else out


def gmm_fit_em(
    samples,
    n_components: int = 2,
    max_iter: int = 100,
    tol: float = 1e-6,
    variance_floor: float = VARIANCE_FLOOR,
) -> Gmm:
    """Fit a 1-D GMM by expectation-maximization.

    Initialization is deterministic: means at the ``(k + 1/2) / K`` sample
    quantiles, every variance equal to the global variance, uniform weights.
    Iteration stops once the relative change of the average log-likelihood
    drops to ``tol`` or after ``max_iter`` M-steps.

    Raises:
        ValueError: fewer than ``2 * n_components`` samples.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    k = int(n_components)
    if k < 1:
        raise ValueError("n_components must be >= 1")
    if x.size < 2 * k:
        raise ValueError(f"need at least {2 * k} samples for {k} components, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")

    means = np.quantile(x, (np.arange(k) + 0.5) / k)
    variances = np.full(k, max(float(x.var()), variance_floor))
    weights = np.full(k, 1.0 / k)
    trace: list[float] = []

    for _ in range(max_iter):
        with np.errstate(divide="ignore"):
            joint = _component_logpdf(x, means, variances) + np.log(weights)[None, :]
        norm = logsumexp(joint, axis=1)
        avg_ll = float(norm.mean())
        if trace and abs(avg_ll - trace[-1]) <= tol * abs(trace[-1]):
            trace.append(avg_ll)
            break
        trace.append(avg_ll)

        resp = np.exp(joint - norm[:, None])
        nk = resp.sum(axis=0)
        live = nk > 0
        weights = nk / nk.sum()
        new_means = means.copy()
        new_means[live] = (resp[:, live] * x[:, None]).sum(axis=0) / nk[live]
        d = x[:, None] - new_means[None, :]
        new_vars = variances.copy()
        new_vars[live] = (resp[:, live] * d[:, live] ** 2).sum(axis=0) / nk[live]
        means = new_means
        variances = np.maximum(new_vars, variance_floor)

    return Gmm(weights / weights.sum(), means, variances, tuple(trace))


@dataclass(frozen=True, eq=False)
class SadHmm:
    transition: np.ndarray
    speech_state: np.ndarray  # bool per state
    emissions: dict[str, Gmm]
    initial: np.ndarray

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def log_emissions(self, observations) -> np.ndarray:
        """T x N per-state emission log-densities."""
        obs = np.asarray(observations, dtype=np.float64)
        per_class = np.stack(
            [np.atleast_1d(gmm_logpdf(self.emissions["noise"], obs)), np.atleast_1d(gmm_logpdf(self.emissions["speech"], obs))],
            axis=1,
        )
        return per_class[:, self.speech_state.astype(int)]

    def dump(self) -> str:
        """Human-readable key=value dump of both GMMs and the HMM matrices."""
        lines = []
        for name in ("noise", "speech"):
            g = self.emissions[name]
            lines.append(f"{name}.weights = {' '.join(repr(v) for v in g.weights.tolist())}")
            lines.append(f"{name}.means = {' '.join(repr(v) for v in g.means.tolist())}")
            lines.append(f"{name}.variances = {' '.join(repr(v) for v in g.variances.tolist())}")
        lines.append(f"hmm.initial = {' '.join(repr(v) for v in self.initial.tolist())}")
        lines.append(f"hmm.speech_states = {' '.join(str(i) for i in np.flatnonzero(self.speech_state))}")
        for i, row in enumerate(self.transition.tolist()):
            lines.append(f"hmm.transition.{i} = {' '.join(repr(v) for v in row)}")
        return "\n".join(lines) + "\n"


def sad_transition_matrix(p_stay: float = 0.9, states_per_class: int = STATES_PER_CLASS) -> np.ndarray:
    if not 0 < p_stay <= 1:
        raise ValueError("p_stay must lie in (0, 1]")
    n = 2 * states_per_class
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = p_stay
    a[idx, (idx + 1) % n] += 1.0 - p_stay
    return a


def build_sad_hmm(
    noise_gmm: Gmm, speech_gmm: Gmm, p_stay: float = 0.9, states_per_class: int = STATES_PER_CLASS
) -> SadHmm:
    n = 2 * states_per_class
    initial = np.zeros(n)
    initial[0] = initial[states_per_class] = 0.5
    speech_state = np.arange(n) >= states_per_class
    return SadHmm(sad_transition_matrix(p_stay, states_per_class), speech_state, {"noise": noise_gmm, "speech": speech_gmm}, initial)


def viterbi_path(log_initial: np.ndarray, log_transition: np.ndarray, log_emissions: np.ndarray) -> np.ndarray:
    """Most probable state sequence; ties go to the lower state index."""
    em = np.asarray(log_emissions, dtype=np.float64)
    n_frames, n_states = em.shape
    if n_frames == 0:
        raise ValueError("cannot decode an empty sequence")
    back = np.empty((n_frames, n_states), dtype=np.intp)
    delta = log_initial + em[0]
    cols = np.arange(n_states)
    for t in range(1, n_frames):
        scores = delta[:, None] + log_transition
        best = np.argmax(scores, axis=0)
        back[t] = best
        delta = scores[best, cols] + em[t]
    path = np.empty(n_frames, dtype=np.intp)
    path[-1] = int(np.argmax(delta))
    for t in range(n_frames - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


def viterbi(hmm: SadHmm, observations, frame_shift: float = 0.01) -> DecisionStream:
    """Decode log-CSBE observations into per-frame speech decisions."""
    obs = np.asarray(observations, dtype=np.float64)
    if obs.size == 0:
        raise ValueError("cannot decode an empty sequence")
    with np.errstate(divide="ignore"):
        log_a = np.log(hmm.transition)
        log_pi = np.log(hmm.initial)
    path = viterbi_path(log_pi, log_a, hmm.log_emissions(obs))
    return DecisionStream(hmm.speech_state[path], frame_shift)

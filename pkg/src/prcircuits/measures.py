"""Test functions: Meyer-Wallach Q, reference Q values, Porter-Thomas distance, rate fits."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy import stats

from .errors import NoDecayWindow, NotNormalized, TooFewSamples

PT_WIDTH = 0.1
PT_RANGE = 12.0
PT_BINS = int(round(PT_RANGE / PT_WIDTH))  # regular bins; one overflow bin follows
PT_MIN_SAMPLES = 1000


def meyer_wallach_q(psi, atol: float = 1e-10):
    """Q = 2 - (2/n) sum_j Tr(rho_j^2).

    ``psi`` may carry leading batch axes; the last axis holds ``2**n``
    amplitudes with qubit 0 as the most significant bit.
    """
    psi = np.asarray(psi, dtype=complex)
    dim = psi.shape[-1]
    n = int(round(np.log2(dim)))
    if 2**n != dim or n < 1:
        raise ValueError("state length must be a power of two")
    norms = np.linalg.norm(psi, axis=-1)
    if np.any(np.abs(norms - 1) > atol):
        raise NotNormalized(f"max | |psi| - 1 | = {np.max(np.abs(norms - 1)):.3g}")
    batch = psi.shape[:-1]
    t = psi.reshape((-1,) + (2,) * n)
    purity = np.zeros(t.shape[0])
    for j in range(n):
        m = np.moveaxis(t, j + 1, 1).reshape(t.shape[0], 2, -1)
        rho = np.einsum("bik,bjk->bij", m, m.conj())
        purity += np.sum(np.abs(rho) ** 2, axis=(1, 2))
    q = np.clip(2.0 - 2.0 * purity / n, 0.0, 1.0)
    return float(q[0]) if not batch else q.reshape(batch)


def q_haar(n: int, exact: bool = False):
    """Haar average of Q, (2**n - 2) / (2**n + 1)."""
    if n < 2:
        raise ValueError("need n >= 2")
    val = Fraction(2**n - 2, 2**n + 1)
    return val if exact else float(val)


def q_cc(n: int, exact: bool = False):
    """Asymptotic Q of the deterministic closed chain from a computational state."""
    if n < 2:
        raise ValueError("need n >= 2")
    odd = range(1, n + 1, 2)
    num = 3 * sum(comb(n, k) for k in odd)
    den = sum(3**k * comb(n, k) for k in odd)
    val = 1 - Fraction(num, den)
    return val if exact else float(val)


# -- Porter-Thomas -------------------------------------------------------------


def pt_reference() -> np.ndarray:
    """Exact exponential mass of each bin, overflow last."""
    edges = np.arange(PT_BINS + 1) / 10.0
    q = np.exp(-edges[:-1]) - np.exp(-edges[1:])
    return np.append(q, np.exp(-PT_RANGE))


@dataclass
class PTHistogram:
    """Counts of ``y = dim * |amplitude|**2`` in bins of 0.1 on [0, 12) plus overflow."""

    counts: np.ndarray

    @classmethod
    def from_probabilities(cls, probs, dim: int | None = None) -> "PTHistogram":
        probs = np.asarray(probs, dtype=float)
        if dim is None:
            dim = probs.shape[-1]
        y = dim * probs.ravel()
        idx = np.minimum(np.floor(y * 10.0).astype(np.int64), PT_BINS)
        return cls(np.bincount(idx, minlength=PT_BINS + 1).astype(np.int64))

    @classmethod
    def empty(cls) -> "PTHistogram":
        return cls(np.zeros(PT_BINS + 1, dtype=np.int64))

    def merge(self, other: "PTHistogram") -> "PTHistogram":
        return PTHistogram(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.total

    def distance(self) -> float:
        if self.total < PT_MIN_SAMPLES:
            raise TooFewSamples(f"{self.total} pooled values, need {PT_MIN_SAMPLES}")
        return float(np.linalg.norm(self.masses - pt_reference()))


def pt_distance(probs, dim: int | None = None) -> float:
    """l2 distance between the binned ``dim * probs`` and Porter-Thomas.

    ``probs`` are basis-state probabilities ``|<k|psi>|**2`` pooled over any
    number of states; ``dim`` defaults to the length of the last axis.
    """
    return PTHistogram.from_probabilities(probs, dim).distance()


# -- rates ---------------------------------------------------------------------


@dataclass
class RateFit:
    rate: float
    stderr: float
    ci: tuple[float, float]
    window: tuple[int, int]
    intercept: float
    floor: float


def _noise_floor(ell, y, tail: int) -> float:
    """Median tail level when the tail has stopped decaying, else 0."""
    t_ell, t_y = ell[-tail:], y[-tail:]
    fit = stats.linregress(t_ell, np.log(t_y))
    if fit.slope + 3 * fit.stderr >= 0:
        return 10.0 * float(np.median(t_y))
    return 0.0


def sampling_floor(stderr, k: float = 3.0) -> float:
    """Noise floor ``k`` times the median standard error over the later half of a run."""
    se = np.asarray(stderr, dtype=float)
    return k * float(np.median(se[len(se) // 2 :]))


def fit_rate(ell, dist, floor: float | None = None, min_points: int = 5, confidence: float = 0.95) -> RateFit:
    """Exponential decay rate of a distance series from a tail window.

    Points at or below the noise floor are dropped (the floor is estimated
    from a flat tail when not supplied); the window is the later half of
    the remaining decaying run, and the slope of ``log(dist)`` over it
    gives the rate.
    """
    ell = np.asarray(ell, dtype=float)
    y = np.asarray(dist, dtype=float)
    ok = np.isfinite(y) & (y > 0)
    ell, y = ell[ok], y[ok]
    if len(y) < min_points:
        raise NoDecayWindow("not enough positive points")
    if floor is None:
        floor = _noise_floor(ell, y, max(min_points, len(y) // 4))
    above = np.flatnonzero(y > floor)
    if above.size == 0:
        raise NoDecayWindow("series never rises above the noise floor")
    # first floor crossing ends the window
    stop = above[0]
    while stop + 1 < len(y) and y[stop + 1] > floor:
        stop += 1
    run = np.arange(above[0], stop + 1)
    if run.size < min_points:
        raise NoDecayWindow(f"only {run.size} points above the floor")
    window = run[max(0, run.size // 2 - 1) :] if run.size >= 2 * min_points else run
    if window.size < min_points:
        window = run[-min_points:]
    fit = stats.linregress(ell[window], np.log(y[window]))
    if not fit.slope < 0:
        raise NoDecayWindow("no decay in the selected window")
    tq = stats.t.ppf(0.5 + confidence / 2, max(window.size - 2, 1))
    rate = -float(fit.slope)
    se = float(fit.stderr)
    return RateFit(rate, se, (rate - tq * se, rate + tq * se), (int(ell[window[0]]), int(ell[window[-1]])), float(fit.intercept), float(floor))

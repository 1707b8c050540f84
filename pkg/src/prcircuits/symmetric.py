"""Permutation-symmetric chains for the all-to-all (AA) and star topologies.

AA states are ``(k_z, k_xi)`` letter counts; star states add the letter of
the central qubit, ``(central, k_z, k_xi)`` over the ``n - 1`` outer qubits.
Both chains grow only quadratically in ``n`` and are exact lumpings of the
``3**n`` reduced chain.

Within one iteration the CZ layer is handled in closed form: a non-xi qubit
coupled to ``k`` xi qubits through independently active edges flips
``0 <-> z`` when an odd number of those edges fire, which happens with
probability ``t(k) = (1 - (1 - 2p)**k) / 2``; distinct qubits use distinct
edges, so the flips are independent.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln
from scipy.stats import binom

from .errors import FitIllConditioned
from .markov import ChainMatrix, SparseFactor, rbar, spectrum

DENSE_DIM = 1500


def toggle_probability(k_xi, p: float):
    """Probability that an odd number of ``k_xi`` independent Bernoulli(p) edges fire."""
    return (1.0 - (1.0 - 2.0 * p) ** np.asarray(k_xi, dtype=float)) / 2.0


@lru_cache(maxsize=None)
def aa_states(n: int) -> tuple[tuple[int, int], ...]:
    """All (k_z, k_xi) with k_z + k_xi <= n; the identity (0, 0) comes first."""
    return tuple((kz, kx) for kz in range(n + 1) for kx in range(n + 1 - kz))


@lru_cache(maxsize=None)
def star_states(n: int) -> tuple[tuple[int, int, int], ...]:
    return tuple((cl,) + s for cl in range(3) for s in aa_states(n - 1))


def _log_sizes(n):
    """log of the number of full Pauli strings in each AA class."""
    out = []
    for kz, kx in aa_states(n):
        k0 = n - kz - kx
        out.append(gammaln(n + 1) - gammaln(kz + 1) - gammaln(kx + 1) - gammaln(k0 + 1) + kx * np.log(2))
    return np.array(out)


def _pmf(k, q):
    return np.exp(binom.logpmf(np.arange(k + 1), k, q))


def _local_matrix(n: int, c: float) -> sp.csr_matrix:
    """Every letter moves independently under rbar(c); weight is conserved."""
    index = {s: i for i, s in enumerate(aa_states(n))}
    rows, cols, vals = [], [], []
    for (kz, kx), src in index.items():
        # a: z -> xi among kz; b: xi -> z among kx; k_xi' = kx + a - b
        conv = np.convolve(_pmf(kz, 1 - c), _pmf(kx, (1 - c) / 2)[::-1])
        for shift, prob in enumerate(conv):
            if prob == 0.0:
                continue
            delta = shift - kx
            rows.append(index[(kz - delta, kx + delta)])
            cols.append(src)
            vals.append(prob)
    d = len(index)
    return sp.csr_matrix((vals, (rows, cols)), shape=(d, d))


def _toggle_counts(kz, m, t):
    """Distribution of k_z' when each of m non-xi letters (kz of them z) flips w.p. t."""
    return np.convolve(_pmf(kz, t)[::-1], _pmf(m - kz, t))  # index = kz' after shift by kz


def _cz_matrix(n: int, p: float) -> sp.csr_matrix:
    index = {s: i for i, s in enumerate(aa_states(n))}
    rows, cols, vals = [], [], []
    for (kz, kx), src in index.items():
        t = float(toggle_probability(kx, p))
        dist = _toggle_counts(kz, n - kx, t)
        for kz_new, prob in enumerate(dist):
            if prob == 0.0:
                continue
            rows.append(index[(kz_new, kx)])
            cols.append(src)
            vals.append(prob)
    d = len(index)
    return sp.csr_matrix((vals, (rows, cols)), shape=(d, d))


def aa_symmetric_matrix(n: int, c: float, p: float) -> ChainMatrix:
    if n < 2:
        raise ValueError("need n >= 2")
    log_sizes = _log_sizes(n)
    sizes = np.exp(log_sizes - log_sizes.max())
    factors = [SparseFactor(_local_matrix(n, c)), SparseFactor(_cz_matrix(n, p))]
    return ChainMatrix(len(sizes), factors, sizes, "aa", n, 0, list(aa_states(n)))


def star_symmetric_matrix(n: int, c_central: float, c_outer: float, p: float) -> ChainMatrix:
    """Star chain over (central letter, outer k_z, outer k_xi)."""
    if n < 2:
        raise ValueError("need n >= 2")
    m = n - 1
    outer = aa_states(m)
    S = len(outer)
    local = sp.kron(sp.csr_matrix(rbar(c_central)), _local_matrix(m, c_outer)).tocsr()

    index = {s: i for i, s in enumerate(star_states(n))}
    rows, cols, vals = [], [], []
    for (cl, kz, kx), src in index.items():
        if cl == 2:
            # central xi: every non-xi outer letter flips w.p. p
            for kz_new, prob in enumerate(_toggle_counts(kz, m - kx, p)):
                if prob:
                    rows.append(index[(cl, kz_new, kx)])
                    cols.append(src)
                    vals.append(prob)
        else:
            t = float(toggle_probability(kx, p))
            for cl_new, prob in ((cl, 1 - t), (1 - cl, t)):
                if prob:
                    rows.append(index[(cl_new, kz, kx)])
                    cols.append(src)
                    vals.append(prob)
    d = 3 * S
    cz = sp.csr_matrix((vals, (rows, cols)), shape=(d, d))

    log_outer = _log_sizes(m)
    log_sizes = np.concatenate([log_outer, log_outer, log_outer + np.log(2)])
    sizes = np.exp(log_sizes - log_sizes.max())
    return ChainMatrix(d, [SparseFactor(local), SparseFactor(cz)], sizes, "star", n, 0, list(star_states(n)))


def star_partition(n: int) -> np.ndarray:
    """Label each reduced string by its star symmetric state."""
    from . import pauli

    index = {s: i for i, s in enumerate(star_states(n))}
    d = pauli.digits(n)
    outer = d[:, 1:]
    kz = (outer == pauli.Z).sum(axis=1)
    kx = (outer == pauli.XI).sum(axis=1)
    return np.array([index[(int(a), int(b), int(x))] for a, b, x in zip(d[:, 0], kz, kx)])


def symmetric_gap(M: ChainMatrix) -> float:
    if M.dim <= DENSE_DIM:
        return spectrum(M).gap
    return spectrum(M, k=6).gap


# -- scaling -----------------------------------------------------------------


P_POLICIES = ("fixed", "one-gate", "n-gates")


def policy_p(policy: str, n: int, p: float | None = None) -> float:
    if policy == "fixed":
        return float(p)
    if policy == "one-gate":
        return 2.0 / (n * (n - 1))
    if policy == "n-gates":
        return min(1.0, 2.0 / (n - 1))
    raise ValueError(f"unknown p policy {policy!r}")


@dataclass
class ScalingFit:
    model: str
    params: dict
    residual: float
    domain: tuple


def fit_inverse(ns, gaps) -> ScalingFit:
    """Delta = a / (n - b), fitted as the straight line 1/Delta = n/a - b/a."""
    ns = np.asarray(ns, dtype=float)
    inv = 1.0 / np.asarray(gaps, dtype=float)
    A = np.column_stack([ns, np.ones_like(ns)])
    if np.linalg.cond(A) > 1e12:
        raise FitIllConditioned("degenerate n range")
    (slope, icpt), res, *_ = np.linalg.lstsq(A, inv, rcond=None)
    a = 1.0 / slope
    b = -icpt * a
    resid = float(np.linalg.norm(a / (ns - b) - gaps))
    return ScalingFit("a/(n-b)", {"a": a, "b": b}, resid, (ns.min(), ns.max()))


def fit_exponential_in_n(ns, gaps, p: float) -> ScalingFit:
    """Delta = 1 - 2**-(alpha p n + beta) via a line through log2(1 - Delta)."""
    ns = np.asarray(ns, dtype=float)
    y = -np.log2(1.0 - np.asarray(gaps, dtype=float))
    A = np.column_stack([p * ns, np.ones_like(ns)])
    if np.linalg.cond(A) > 1e12:
        raise FitIllConditioned("degenerate n range")
    (alpha, beta), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ np.array([alpha, beta])
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss if ss > 0 else 1.0
    return ScalingFit(
        "1-2^-(alpha p n+beta)",
        {"alpha": alpha, "beta": beta, "kappa": alpha * p, "gamma": beta, "r2": r2},
        float(np.linalg.norm(y - pred)),
        (ns.min(), ns.max()),
    )


def fit_saturating(ns, gaps, c: float) -> ScalingFit:
    """Delta = (1 - c) - exp(-a n), fitted through log((1 - c) - Delta)."""
    ns = np.asarray(ns, dtype=float)
    d = (1.0 - c) - np.asarray(gaps, dtype=float)
    ok = d > 1e-12
    if ok.sum() < 2:
        raise FitIllConditioned("gap already at 1 - c for the whole range")
    slope, icpt = np.polyfit(ns[ok], np.log(d[ok]), 1)
    pred = (1.0 - c) - np.exp(icpt + slope * ns)
    return ScalingFit(
        "(1-c)-exp(-a n)", {"a": -slope, "offset": icpt}, float(np.linalg.norm(pred - gaps)), (ns.min(), ns.max())
    )


def scaling_study(topology: str, c: float, p_policy: str, n_range, p: float | None = None):
    """Gap versus n and the matching scaling fit.

    Returns ``(ns, gaps, fit)``; the fit is ``None`` when no model applies.
    """
    ns = np.array(list(n_range))
    gaps = []
    for n in ns:
        pn = policy_p(p_policy, int(n), p)
        if topology == "aa":
            M = aa_symmetric_matrix(int(n), c, pn)
        elif topology == "star":
            M = star_symmetric_matrix(int(n), c, c, pn)
        else:
            raise ValueError("symmetric chains exist for 'aa' and 'star' only")
        gaps.append(symmetric_gap(M))
    gaps = np.array(gaps)
    fit = None
    if p_policy == "one-gate":
        fit = fit_inverse(ns, gaps)
    elif p_policy == "fixed" and c == 0 and p <= 0.5:
        fit = fit_exponential_in_n(ns, gaps, p)
    elif p_policy == "fixed" and c > 0:
        fit = fit_saturating(ns, gaps, c)
    return ns, gaps, fit

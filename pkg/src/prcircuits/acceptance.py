"""Acceptance criteria shared by ``prcircuits verify`` and the test suite.

Each criterion returns a :class:`CriterionResult` holding the computed
value, target, tolerance and a pass flag.  Criteria marked Monte Carlo are
skipped by ``verify --fast``.
"""
from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import bruteforce, cluster, markov, measures, pauli, statevec, symmetric, twirl
from .schedule import GATES, TOPOLOGIES, make_schedule

WORKERS_ENV = "PRCIRCUITS_WORKERS"


def env_workers(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


@dataclass
class CriterionResult:
    number: int
    claim: str
    computed: str
    target: str
    tolerance: str
    passed: bool
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"[{tag}] criterion {self.number:>2}: {self.claim} | computed {self.computed} | "
            f"target {self.target} | tol {self.tolerance} | {self.seconds:.1f}s"
        )


@dataclass
class Criterion:
    number: int
    claim: str
    func: Callable
    monte_carlo: bool = False


def _close(a, b, tol):
    return abs(a - b) <= tol


def _within_grid(a, b, tol):
    # grid points are multiples of 0.01; rounding removes float noise in |a - b|
    return round(abs(a - b), 9) <= tol


# -- 1 ---------------------------------------------------------------------------


def _rbar_exact(c: Fraction):
    return [[1, 0, 0], [0, c, (1 - c) / 2], [0, 1 - c, (1 + c) / 2]]


def _stochastic_defect(M: markov.ChainMatrix) -> float:
    """max |column sum - 1|, most negative entry, and identity-column error."""
    cols = M.rmatvec(np.ones(M.dim))
    e0 = np.zeros(M.dim)
    e0[M.identity] = 1.0
    ident = np.max(np.abs(M.matvec(e0) - e0))
    neg = 0.0
    if M.dim <= 3**6:
        neg = max(0.0, -float(M.dense().min()))
    return max(float(np.max(np.abs(cols - 1))), neg, float(ident))


def criterion_1() -> CriterionResult:
    worst_r = 0.0
    for c in (Fraction(0), Fraction(1, 3), Fraction(1)):
        exact = np.array(_rbar_exact(c), dtype=float)
        worst_r = max(worst_r, float(np.max(np.abs(markov.rbar(float(c)) - exact))))
    worst = 0.0
    count = 0
    for n in (3, 4, 6):
        for topo in TOPOLOGIES:
            for gate in GATES:
                if gate == "XY" and (topo not in ("open", "closed") or (topo == "closed" and n % 2)):
                    continue
                for c, p in ((0.0, 1.0), (1 / 3, 0.75), (0.18, 0.5)):
                    worst = max(worst, _stochastic_defect(markov.chain(topo, n, c, p, gate)))
                    count += 1
    for n in (4, 10, 40):
        for c, p in ((0.0, 1.0), (1 / 3, 0.75)):
            worst = max(worst, _stochastic_defect(symmetric.aa_symmetric_matrix(n, c, p)))
            worst = max(worst, _stochastic_defect(symmetric.star_symmetric_matrix(n, c, c, p)))
            count += 2
    ok = worst_r <= 1e-15 and worst <= 1e-12
    return CriterionResult(
        1,
        "rbar matches its closed form at c in {0,1/3,1}; chains column-stochastic",
        f"rbar err {worst_r:.1e}; worst column defect {worst:.1e} over {count} chains",
        "exact rbar; defect 0",
        "1e-15 / 1e-12",
        ok,
    )


# -- 2, 3 ------------------------------------------------------------------------


def criterion_2() -> CriterionResult:
    worst = 0.0
    rows = []
    cases = [("open", None), ("star", None), ("aa", "even"), ("closed", "p<1")]
    for n in range(4, 9):
        for topo, cond in cases:
            if cond == "even" and n % 2:
                continue  # odd-n AA conserves weight parity
            p = 0.9 if cond == "p<1" else 1.0
            for c in (0.0, 1 / 3):
                M = markov.chain(topo, n, c, p)
                v = markov.stationary(M, markov.computational_moments(n))
                err = abs(pauli.q_from_moments(v) - measures.q_haar(n))
                worst = max(worst, err)
        rows.append(n)
    q8 = markov.stationary(markov.chain("open", 8, 0.0), markov.computational_moments(8))
    q8 = pauli.q_from_moments(q8)
    return CriterionResult(
        2,
        "stationary Q of ergodic CZ chains equals (2^n-2)/(2^n+1), n=4..8",
        f"max error {worst:.1e}; n=8 value {q8:.6f}",
        "(2^n-2)/(2^n+1); 0.988327 at n=8",
        "1e-10",
        worst <= 1e-10,
    )


def criterion_3() -> CriterionResult:
    n = 8
    sched = make_schedule("closed", n, 0.0, 1.0)
    rep = markov.parity_analysis(sched, markov.computational_moments(n))
    M = markov.step_matrix(sched)
    q_power = pauli.q_from_moments(markov.stationary(M, markov.computational_moments(n)))
    ok = rep.conserved and _close(rep.q_asymptotic, 0.988235, 1e-6) and _close(q_power, 0.988235, 1e-6)
    return CriterionResult(
        3,
        "closed chain n=8, p=1: asymptotic Q and weight-parity conservation",
        f"Q={rep.q_asymptotic:.7f} (power iteration {q_power:.7f}); conserved={rep.conserved}",
        "0.988235; conserved",
        "1e-6",
        ok,
    )


# -- 4, 5, 6 ---------------------------------------------------------------------


def _multiset_error(found, expected):
    """Largest distance after matching sorted multisets (same length)."""
    f = np.sort_complex(np.round(np.asarray(found, dtype=complex), 12))
    e = np.sort_complex(np.asarray(expected, dtype=complex))
    if len(f) != len(e):
        return np.inf
    return float(np.max(np.abs(f - e)))


def _drop_identity_unit(ev):
    """Remove the eigenvalue 1 carried by the invariant identity string."""
    ev = np.asarray(ev, dtype=complex)
    k = int(np.argmin(np.abs(ev - 1)))
    return np.delete(ev, k)


def star_expected_spectrum(n: int) -> np.ndarray:
    """Eigenvalue multiset stated for the homogeneous Haar star (p = 3/4)."""
    d = 3**n - 1
    vals = [1.0] + [2 / 3] * (2**n - 2) + [(1 + 2.0 ** -(n - 1)) / 3, (1 - 2.0 ** -(n - 1)) / 3]
    return np.array(vals + [0.0] * (d - len(vals)))


def criterion_4(ns=range(4, 9)) -> CriterionResult:
    worst = 0.0
    gaps = []
    mult = []
    for n in ns:
        rep = markov.spectrum(markov.chain("star", n, 1 / 3, 0.75))
        ev = _drop_identity_unit(rep.eigenvalues)
        worst = max(worst, _multiset_error(ev, star_expected_spectrum(n)))
        gaps.append(rep.gap)
        mult.append(int(np.sum(np.abs(ev - 2 / 3) < 1e-8)))
    gap_ok = all(_close(g, 1 / 3, 1e-8) for g in gaps)
    res = CriterionResult(
        4,
        "star c=1/3 p=3/4: eigenvalue multiset {1, 2/3 x(2^n-2), (1/3)(1+-2^-(n-1)), 0...}; gap 1/3",
        f"multiset err {worst:.2g}; multiplicity of 2/3 = {mult}; gaps within {max(abs(g - 1/3) for g in gaps):.1e} of 1/3",
        f"multiplicity {[2**n - 2 for n in ns]}; gap 1/3",
        "1e-8",
        worst <= 1e-8 and gap_ok,
    )
    res.notes.append("found multiplicity 2^(n-1)-2; see decisions ledger")
    return res


def criterion_5() -> CriterionResult:
    gaps = {n: symmetric.symmetric_gap(symmetric.star_symmetric_matrix(n, 0.0, 1 / 3, 0.75)) for n in range(4, 13)}
    worst = max(abs(g - 0.5) for g in gaps.values())
    rep = twirl.improved_twirl_gap(6)
    ok = worst <= 1e-9 and _close(rep.effective_gap, 7 / 8, 1e-9)
    return CriterionResult(
        5,
        "star c_central=0, c_outer=1/3, p=3/4: gap 1/2 for n=4..12; twirl effective gap 7/8",
        f"max |gap-1/2| = {worst:.1e}; effective gap {rep.effective_gap:.12f}",
        "1/2; 7/8",
        "1e-9",
        ok,
    )


def aa_half_expected(ev, n, tol=1e-8):
    """Check the AA (c=0, p=1/2) structure; returns (ok, description)."""
    ev = _drop_identity_unit(ev)
    allowed = np.array([1.0, -(2.0**-n), 2.0 ** (-n / 2), -(2.0 ** (-n / 2)), 0.0])
    dist = np.min(np.abs(ev[:, None] - allowed[None, :]), axis=1)
    counts = [int(np.sum(np.abs(ev - a) < tol)) for a in allowed]
    ok = dist.max() <= tol and counts[0] == 1 and counts[1] == 1 and counts[2] >= 2 and counts[3] >= 2
    return ok, f"n={n}: counts(1, -2^-n, +2^-n/2, -2^-n/2, 0)={counts}, max dev {dist.max():.1e}"


def criterion_6() -> CriterionResult:
    ok = True
    desc = []
    for n in (4, 6, 8):
        M = markov.chain("aa", n, 0.0, 0.5)
        good, d = aa_half_expected(markov.spectrum(M).eigenvalues, n)
        ok &= good
        desc.append(d)
    eff = markov.effective_decay_rate(markov.chain("aa", 8, 0.0, 0.5), markov.computational_moments(8))
    ok &= _close(eff.modulus, 2.0**-8, 1e-12) and _close(eff.gap, 0.99609375, 1e-12)
    res = CriterionResult(
        6,
        "AA c=0 p=1/2: spectrum {1, -2^-n, +-2^-n/2, 0...}; computational effective eigenvalue 2^-n",
        "; ".join(desc) + f"; lambda_eff={eff.lambda_eff.real:.9g}, effective gap {eff.gap:.8f}",
        "|lambda_eff| = 2^-8, gap 0.99609375",
        "1e-8 / 1e-12",
        ok,
    )
    res.notes.append("lambda_eff is -2^-n; the gap uses its modulus")
    return res


# -- 7 ---------------------------------------------------------------------------


def criterion_7() -> CriterionResult:
    ns, gaps, fit = symmetric.scaling_study("aa", 0.0, "one-gate", range(8, 51))
    a, b = fit.params["a"], fit.params["b"]
    ok1 = abs(a / 1.34 - 1) <= 0.10 and abs(b - 1.55) <= 0.3

    big = [100, 125, 150]
    g_n = [symmetric.symmetric_gap(symmetric.aa_symmetric_matrix(n, 0.0, symmetric.policy_p("n-gates", n))) for n in big]
    ok2 = all(_close(g, 0.705, 0.01) for g in g_n)

    desc3 = []
    ok3 = True
    for p in (0.2, 0.4, 0.5):
        ns3, g3, fit3 = symmetric.scaling_study("aa", 0.0, "fixed", range(10, 41, 2), p=p)
        alpha, r2 = fit3.params["alpha"], fit3.params["r2"]
        slope = -alpha * p
        good = abs(alpha - 1) <= 0.25 and r2 >= 0.99
        ok3 &= good
        desc3.append(f"p={p}: slope {slope:.3f} (alpha {alpha:.3f}, R2 {r2:.4f})")
    return CriterionResult(
        7,
        "AA scaling: a/(n-b) for one gate per step; 0.705 for n gates; log2(1-gap) slope ~ -p",
        f"a={a:.3f}, b={b:.3f}; gaps {['%.4f' % g for g in g_n]} at n={big}; " + "; ".join(desc3),
        "a=1.34, b=1.55; 0.705; slope -p",
        "a 10%, b 0.3; 0.01; |alpha-1|<=0.25 with R2>=0.99",
        ok1 and ok2 and ok3,
    )


# -- 8, 9, 10 --------------------------------------------------------------------

C_GRID = np.round(np.arange(0.0, 1.0 + 1e-9, 0.01), 2)

ARGMAX_TARGETS = [
    ("open", "CZ", 0.0, 0.0),
    ("aa", "CZ", 1 / 3, 0.05),
    ("closed", "CZ", 0.18, 0.05),
    ("star", "CZ", 0.18, 0.05),
    ("closed", "XY", 1 / 3, 0.07),
    ("open", "XY", 0.5, 0.07),
]


def criterion_8(workers: int | None = None, effective: bool = True) -> CriterionResult:
    workers = env_workers() if workers is None else workers
    ok = True
    parts = []
    notes = []
    v0 = markov.computational_moments(8)
    for topo, gate, target, tol in ARGMAX_TARGETS:
        res = markov.sweep(topo, gate, 8, C_GRID, [1.0], workers=workers)
        c_best = res.argmax[0]
        good = _within_grid(c_best, target, tol)
        ok &= good
        parts.append(f"{topo}-{gate} {c_best:.2f}")
        if effective:
            # diagnostic only: decay eigenvalue seen by computational starts (c < 1)
            eff = [markov.effective_decay_rate(markov.chain(topo, 8, c, 1.0, gate), v0).gap for c in C_GRID[:-1]]
            notes.append(f"{topo}-{gate}: computational-start effective-gap argmax {C_GRID[int(np.argmax(eff))]:.2f}")
    res = CriterionResult(
        8,
        "optimal c (grid 0.01, n=8, p=1, spectral gap) per topology and gate",
        ", ".join(parts),
        "open-CZ 0, aa-CZ 1/3, closed-CZ 0.18, star-CZ 0.18, closed-XY 1/3, open-XY 1/2",
        "0 / 0.05 / 0.05 / 0.05 / 0.07 / 0.07",
        ok,
    )
    res.notes.extend(notes)
    return res


def _grid_opt(topo, c_grid, p_grid, workers):
    res = markov.sweep(topo, "CZ", 8, c_grid, p_grid, workers=workers)
    c, p, g, _ = res.argmax
    return (c, p), g


def criterion_9(workers: int | None = None) -> CriterionResult:
    workers = env_workers() if workers is None else workers
    (c1, p1), g1 = _grid_opt(
        "closed", np.round(np.arange(0.0, 0.15 + 1e-9, 0.01), 2), np.round(np.arange(0.6, 1.0 + 1e-9, 0.01), 2), workers
    )
    (c2, p2), g2 = _grid_opt(
        "star", np.round(np.arange(0.0, 0.3 + 1e-9, 0.02), 2), np.round(np.arange(0.4, 1.0 + 1e-9, 0.01), 2), workers
    )
    ok = _within_grid(p1, 0.89, 0.02) and _within_grid(c1, 0.044, 0.02) and c2 == 0.0 and _within_grid(p2, 0.7, 0.05)
    return CriterionResult(
        9,
        "probabilistic optima at n=8: closed chain (p, c); star (c=0, p)",
        f"closed (p={p1:.2f}, c={c1:.2f}, gap {g1:.4f}); star (c={c2:.2f}, p={p2:.2f}, gap {g2:.4f})",
        "closed (0.89, 0.044); star (0, 0.7)",
        "closed 0.02/0.02; star p 0.05",
        ok,
    )


def aa_computational_symmetric(n: int) -> np.ndarray:
    """Computational-basis moment vector on the AA symmetric states."""
    from math import comb

    v = np.zeros(len(symmetric.aa_states(n)))
    for i, (kz, kx) in enumerate(symmetric.aa_states(n)):
        if kx == 0:
            v[i] = comb(n, kz) * 2.0**-n
    return v


def criterion_10(n: int = 60) -> CriterionResult:
    out = {}
    eff = {}
    for c in (0.0, 1 / 3):
        M = symmetric.aa_symmetric_matrix(n, c, 1.0)
        out[c] = symmetric.symmetric_gap(M)
        eff[c] = markov.effective_decay_rate(M, aa_computational_symmetric(n)).gap
    ok = _close(out[0.0], 0.3596, 0.003) and _close(out[1 / 3], 0.4444, 0.003)
    res = CriterionResult(
        10,
        f"AA p=1 gap saturation (symmetric chain, n={n})",
        f"spectral gap c=0: {out[0.0]:.4f}, c=1/3: {out[1/3]:.4f}",
        "0.3596, 0.4444",
        "0.003",
        ok,
    )
    res.notes.append(f"computational-start effective gap c=0: {eff[0.0]:.4f}, c=1/3: {eff[1/3]:.4f}")
    return res


# -- 11, 12, 13 (Monte Carlo) ------------------------------------------------------


def criterion_11(samples: int = 500, seed: int = 11, workers: int | None = None) -> CriterionResult:
    workers = env_workers() if workers is None else workers
    n, L = 8, 30
    sched = make_schedule("open", n, 0.0)
    st = statevec.run_ensemble(
        sched, statevec.LocalGateDistribution("HZ"), "independent", "computational", L, samples, seed, workers
    )
    qt = markov.q_trajectory(markov.step_matrix(sched), markov.computational_moments(n), L)
    z = np.abs(st.mean_q - qt) / np.where(st.q_stderr > 0, st.q_stderr, np.inf)
    exact_gap = np.abs(st.mean_q - qt)[st.q_stderr == 0].max(initial=0.0)
    cut = slice(1, n // 2 + 1)
    markov_cut = float(np.max(np.abs(qt[cut] - 1)))
    sim_cut = float(np.min(st.min_q[cut]))
    ok = z.max() <= 3 and exact_gap <= 1e-9 and markov_cut <= 1e-10 and sim_cut >= 1 - 1e-9
    return CriterionResult(
        11,
        "Monte Carlo vs Markov: open chain CZ+HZ, n=8, S=500",
        f"max |z| over l<=30 = {z.max():.2f}; Markov cutoff dev {markov_cut:.1e}; min sampled Q at l=1..4 = {sim_cut:.12f}",
        "|z|<=3; E[Q]=1 and Q>=1-1e-9 for l=1..4",
        "3 SE / 1e-10 / 1e-9",
        ok,
    )


def psi_a_root(n: int = 8) -> float:
    target = measures.q_haar(n)
    f = lambda a: measures.meyer_wallach_q(statevec.prepare_initial("psi", n, a)) - target  # noqa: E731
    return float(brentq(f, 1e-4, 0.5, xtol=1e-12))


def _settles_below(d, thr):
    """First index from which ``d`` stays below ``thr``, or None."""
    above = np.flatnonzero(np.asarray(d) >= thr)
    if above.size == 0:
        return 0
    return None if above[-1] + 1 >= len(d) else int(above[-1] + 1)


def criterion_12(samples: int = 500, seed: int = 12, workers: int | None = None) -> CriterionResult:
    workers = env_workers() if workers is None else workers
    n, L = 8, 60
    root = psi_a_root(n)
    sched = make_schedule("open", n, 1 / 3)
    dist = statevec.LocalGateDistribution("HaarSU2")
    fits = {}
    dists = {}
    for a in (0.0, 0.1, 1.0):
        st = statevec.run_ensemble(sched, dist, "independent", statevec.InitialState("psi", a), L, samples, seed, workers)
        dists[a] = st.q_distance
        fits[a] = measures.fit_rate(st.iterations, st.q_distance, floor=measures.sampling_floor(st.q_stderr))
    same = all(
        abs(fits[x].rate - fits[y].rate) <= 1.96 * np.hypot(fits[x].stderr, fits[y].stderr)
        for x, y in ((0.0, 0.1), (0.0, 1.0), (0.1, 1.0))
    )
    leads = []
    for thr in (3e-2, 1e-2, 3e-3):
        hit = {a: _settles_below(d, thr) for a, d in dists.items()}
        if hit[0.0] is None or hit[1.0] is None:
            leads.append(None)
        else:
            leads.append(hit[1.0] - hit[0.0])
    lead_ok = all(x is not None and 4 <= x <= 5 for x in leads)
    ok = _close(root, 0.02337, 0.001) and same and lead_ok
    rates = ", ".join(f"a={a}: {f.rate:.3f}+-{f.stderr:.3f}" for a, f in fits.items())
    return CriterionResult(
        12,
        "psi(a): calibration root; equal decay rates; a=0 leads a=1 by 4-5 iterations",
        f"root a={root:.5f}; rates {rates}; lead at thresholds (3e-2, 1e-2, 3e-3) = {leads}",
        "a=0.02337; equal rates; lead 4-5",
        "0.001; 95% CI; integer iterations",
        ok,
    )


def criterion_13(samples: int = 100, seed: int = 13, workers: int | None = None, step: int = 10) -> CriterionResult:
    workers = env_workers() if workers is None else workers
    n = 8
    haar = statevec.LocalGateDistribution("HaarSU2")
    hz = statevec.LocalGateDistribution("HZ")
    # Fig. 1: fixed number of time steps; an XY period holds two steps
    cz_hz = statevec.run_ensemble(make_schedule("open", n, 0.0), hz, "independent", "all-computational", step, samples, seed, workers)
    cz_haar = statevec.run_ensemble(make_schedule("open", n, 1 / 3), haar, "independent", "all-computational", step, samples, seed, workers)
    xy_haar = statevec.run_ensemble(
        make_schedule("open", n, 1 / 3, gate="XY"), haar, "independent", "all-computational", step // 2, samples, seed, workers
    )
    pt = (cz_hz.pt_distance[step], xy_haar.pt_distance[step // 2], cz_haar.pt_distance[step])
    qd = (cz_hz.q_distance[step], xy_haar.q_distance[step // 2], cz_haar.q_distance[step])
    fig1 = pt[0] < pt[1] < pt[2] and qd[0] < qd[1] < qd[2]

    # collective vs independent rotations, open chain CZ + Haar
    L = 40
    sched = make_schedule("open", n, 1 / 3)
    ind = statevec.run_ensemble(sched, haar, "independent", "computational", L, 500, seed + 1, workers)
    col = statevec.run_ensemble(sched, haar, "collective", "computational", L, 500, seed + 1, workers)
    r_ind = measures.fit_rate(ind.iterations, np.abs(ind.mean_q - ind.mean_q[-5:].mean()), floor=measures.sampling_floor(ind.q_stderr))
    r_col = measures.fit_rate(col.iterations, np.abs(col.mean_q - col.mean_q[-5:].mean()), floor=measures.sampling_floor(col.q_stderr))
    q_change = abs(r_col.rate / r_ind.rate - 1)
    mid = 10
    pt_ratio = col.pt_distance[mid] / ind.pt_distance[mid]
    sec5 = q_change < 0.15 and pt_ratio >= 2.0
    return CriterionResult(
        13,
        "orderings: CZ+HZ < XY+Haar < CZ+Haar at fixed steps; collective rotations slow PT only",
        f"PT at {step} steps {tuple(round(float(x), 4) for x in pt)}, Q-dist {tuple(float('%.2g' % x) for x in qd)}; "
        f"collective/independent PT ratio at l={mid}: {pt_ratio:.2f}, Q-rate change {100 * q_change:.1f}%",
        "strict ordering; PT ratio >= 2 and Q-rate change < 15%",
        "ordering / 15%",
        fig1 and sec5,
    )


# -- 14, 15 ----------------------------------------------------------------------


def criterion_14() -> CriterionResult:
    ranking = cluster.compare_scenarios([(0.98, 0.547), (0.705, 0.547 / 2)], n=1, p_fusion=0.5)
    costs = {s.p: s.attempts for s in ranking}
    arith = _close(costs[0.98], 1.96, 1e-12) and _close(costs[0.705], 2.82, 1e-12) and ranking[0].p == 0.98
    topo = cluster.map_cluster_topology("lattice2D", 8)
    same = np.array_equal(markov.step_matrix(topo.schedule).dense(), markov.chain("open", 8, 0.0).dense())
    return CriterionResult(
        14,
        "fusion-cost comparison and lattice2D <-> open chain equivalence",
        f"costs {costs[0.98]:.2f}Cn vs {costs[0.705]:.2f}Cn, cheaper p={ranking[0].p}; bit-identical matrix={same}",
        "1.96Cn vs 2.82Cn; identical",
        "1e-12 / exact",
        arith and same,
    )


def _lump_checks():
    worst = 0.0
    ok = True
    for n in (4, 6, 8):
        for c, p in ((0.0, 1.0), (1 / 3, 0.75), (0.18, 0.5)):
            M = markov.chain("aa", n, c, p)
            r = markov.lumpability_check(M, markov.permutation_partition(n))
            S = symmetric.aa_symmetric_matrix(n, c, p).dense()
            ok &= r.lumpable
            worst = max(worst, float(np.max(np.abs(r.reduced - S))) if r.lumpable else np.inf)
            M = markov.chain("star", n, c, p)
            r = markov.lumpability_check(M, symmetric.star_partition(n))
            S = symmetric.star_symmetric_matrix(n, c, c, p).dense()
            ok &= r.lumpable
            worst = max(worst, float(np.max(np.abs(r.reduced - S))) if r.lumpable else np.inf)
    return ok and worst <= 1e-12, worst


def _oracle_checks():
    worst = 0.0
    for n in (2, 3):
        for topo in TOPOLOGIES:
            for gate in GATES:
                if gate == "XY" and (topo not in ("open", "closed") or (topo == "closed" and n % 2)):
                    continue
                if topo == "closed" and n < 3:
                    continue
                for c, p in ((0.0, 1.0), (1 / 3, 0.75), (0.6, 0.3)):
                    sched = make_schedule(topo, n, c, p, gate)
                    ref = bruteforce.reduced_reference(sched)
                    worst = max(worst, float(np.max(np.abs(ref - markov.step_matrix(sched).dense()))))
    return worst <= 1e-12, worst


def _cross_moment_checks(samples=2000, seed=15):
    ok = True
    worst_z = 0.0
    for n in (2, 3, 4):
        for dist in (statevec.LocalGateDistribution("HZ"), statevec.LocalGateDistribution("HaarSU2")):
            st = statevec.run_ensemble(
                make_schedule("open", n, dist.c), dist, "independent", "computational", 3, samples, seed, record_pauli=(1, 2, 3)
            )
            for ell in (1, 2, 3):
                r = statevec.cross_moment_check(st, ell)
                ok &= r.consistent
                worst_z = max(worst_z, r.max_abs / r.stderr if r.stderr > 0 else 0.0)
    return ok, worst_z


def _digest(stats) -> str:
    h = hashlib.sha256()
    for arr in (stats.mean_q, stats.q_stderr, stats.pt_distance, stats.sample_q, stats.min_q):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def _seed_checks():
    sched = make_schedule("open", 5, 0.0, 0.8)
    dist = statevec.LocalGateDistribution("HaarSU2")
    a = statevec.run_ensemble(sched, dist, "independent", "computational", 8, 150, 7)
    b = statevec.run_ensemble(sched, dist, "independent", "computational", 8, 150, 7, workers=2)
    c = statevec.run_ensemble(sched, dist, "independent", "computational", 8, 150, 8)
    return _digest(a) == _digest(b) and _digest(a) != _digest(c)


def criterion_15() -> CriterionResult:
    lump_ok, lump_err = _lump_checks()
    oracle_ok, oracle_err = _oracle_checks()
    cross_ok, z = _cross_moment_checks()
    seed_ok = _seed_checks()
    return CriterionResult(
        15,
        "property suites: lumpability, brute-force oracle, vanishing cross moments, seed reproducibility",
        f"lump err {lump_err:.1e}; oracle err {oracle_err:.1e}; largest cross moment at {z:.2f} SE; reproducible={seed_ok}",
        "lumpable; equal; <= 4 SE; byte-identical",
        "1e-12 / 1e-12 / 4 SE / exact",
        lump_ok and oracle_ok and cross_ok and seed_ok,
    )


CRITERIA = [
    Criterion(1, "rbar and stochasticity", criterion_1),
    Criterion(2, "Haar stationary Q", criterion_2),
    Criterion(3, "closed-chain parity", criterion_3),
    Criterion(4, "star spectrum", criterion_4),
    Criterion(5, "improved twirl", criterion_5),
    Criterion(6, "AA p=1/2 spectrum", criterion_6),
    Criterion(7, "AA scaling fits", criterion_7),
    Criterion(8, "optimal local gates", criterion_8),
    Criterion(9, "probabilistic optima", criterion_9),
    Criterion(10, "AA saturation", criterion_10),
    Criterion(11, "Monte Carlo vs Markov", criterion_11, monte_carlo=True),
    Criterion(12, "initial-state dependence", criterion_12, monte_carlo=True),
    Criterion(13, "orderings", criterion_13, monte_carlo=True),
    Criterion(14, "cluster cost arithmetic", criterion_14),
    Criterion(15, "property suites", criterion_15),
]


def run_criterion(number: int) -> CriterionResult:
    crit = next(c for c in CRITERIA if c.number == number)
    t0 = time.perf_counter()
    res = crit.func()
    res.seconds = time.perf_counter() - t0
    return res


def run_all(fast: bool = False, only=None, echo=print) -> list[CriterionResult]:
    out = []
    for crit in CRITERIA:
        if only and crit.number not in only:
            continue
        if fast and crit.monte_carlo:
            echo(f"[SKIP] criterion {crit.number:>2}: {crit.claim} (Monte Carlo; --fast)")
            continue
        res = run_criterion(crit.number)
        echo(res.line())
        for note in res.notes:
            echo(f"       note: {note}")
        out.append(res)
    return out

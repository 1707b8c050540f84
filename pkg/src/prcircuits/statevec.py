"""Monte Carlo state-vector simulation of PR circuits.

Amplitude arrays follow the numpy-kron convention: qubit 0 is the most
significant bit.  Every sample owns an independent random stream spawned
from the run seed, so results do not depend on batching or worker count.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pauli
from .errors import DimensionLimit, OutOfRange
from .measures import PTHistogram, meyer_wallach_q, q_haar
from .schedule import CircuitSchedule

MAX_QUBITS = 14
CHUNK = 64  # samples per batch; fixed so that results are batch independent

H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
POLICIES = ("independent", "collective", "odd-even")


# -- local gates ---------------------------------------------------------------


@dataclass(frozen=True)
class LocalGateDistribution:
    """One of ``HaarSU2``, ``HZ`` or ``ZXZ`` (with x-rotation angle ``theta``)."""

    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("HaarSU2", "HZ", "ZXZ"):
            raise ValueError(f"unknown local gate distribution {self.kind!r}")
        if self.kind == "ZXZ" and self.theta is None:
            raise ValueError("ZXZ needs theta")

    @classmethod
    def for_c(cls, c: float) -> "LocalGateDistribution":
        """ZXZ family member with local gate parameter ``c``."""
        if not 0.0 <= c <= 1.0:
            raise OutOfRange("c must lie in [0, 1]")
        return cls("ZXZ", float(np.arccos(np.sqrt(c))))

    @property
    def c(self) -> float:
        if self.kind == "HaarSU2":
            return 1.0 / 3.0
        if self.kind == "HZ":
            return 0.0
        return float(np.cos(self.theta) ** 2)


def _rz(phi):
    """diag(exp(-i phi/2), exp(i phi/2)) for an array of angles -> (..., 2, 2)."""
    out = np.zeros(np.shape(phi) + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * phi)
    out[..., 1, 1] = np.exp(0.5j * phi)
    return out


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def sample_local_batch(dist: LocalGateDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent draws, shape (size, 2, 2)."""
    if dist.kind == "HaarSU2":
        q = rng.standard_normal((size, 4))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        a = q[:, 0] + 1j * q[:, 1]
        b = q[:, 2] + 1j * q[:, 3]
        return np.stack([np.stack([a, b], -1), np.stack([-b.conj(), a.conj()], -1)], -2)
    if dist.kind == "HZ":
        return _rz(rng.uniform(0, 2 * np.pi, size)) @ H_GATE
    phi = rng.uniform(0, 2 * np.pi, (2, size))
    return _rz(phi[1]) @ _rx(dist.theta) @ _rz(phi[0])


def sample_local(dist: LocalGateDistribution, rng: np.random.Generator) -> np.ndarray:
    return sample_local_batch(dist, rng, 1)[0]


def estimate_c(dist: LocalGateDistribution, samples: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Mean of ``R_zz**2`` over sampled gates and its standard error.

    ``R_zz = Tr(Z U Z U^dag) / 2 = |U_00|**2 - |U_10|**2``.
    """
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    U = sample_local_batch(dist, np.random.default_rng(seed), samples)
    rzz = np.abs(U[:, 0, 0]) ** 2 - np.abs(U[:, 1, 0]) ** 2
    x = rzz**2
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(samples))


# -- initial states ------------------------------------------------------------


@dataclass(frozen=True)
class InitialState:
    """``computational`` (basis index), ``psi`` (parameter a), ``ghz`` or ``cluster-chain``."""

    kind: str
    a: float | None = None
    index: int = 0


def prepare_initial(kind: str, n: int, a: float | None = None, index: int = 0) -> np.ndarray:
    dim = 2**n
    if kind == "computational":
        if not 0 <= index < dim:
            raise OutOfRange("basis index out of range")
        psi = np.zeros(dim, dtype=complex)
        psi[index] = 1.0
        return psi
    if kind == "psi":
        if a is None or not 0.0 <= a <= 1.0:
            raise OutOfRange("psi(a) needs a in [0, 1]")
        psi = np.full(dim, a, dtype=complex)
        psi[0] = psi[-1] = 1.0
        return psi / np.linalg.norm(psi)
    if kind == "ghz":
        return prepare_initial("psi", n, 0.0)
    if kind == "cluster-chain":
        bits = (np.arange(dim)[:, None] >> np.arange(n - 1, -1, -1)) & 1
        phase = np.sum(bits[:, :-1] & bits[:, 1:], axis=1)
        return (-1.0) ** phase / np.sqrt(dim) + 0j
    raise ValueError(f"unknown initial state {kind!r}")


def initial_set(spec, n: int) -> np.ndarray:
    """Stack of initial amplitude vectors.

    ``spec`` is an :class:`InitialState`, the string ``"all-computational"``,
    a single amplitude vector or a 2-d array of them.
    """
    if isinstance(spec, InitialState):
        return prepare_initial(spec.kind, n, spec.a, spec.index)[None]
    if isinstance(spec, str):
        if spec == "all-computational":
            return np.eye(2**n, dtype=complex)
        return prepare_initial(spec, n)[None]
    arr = np.atleast_2d(np.asarray(spec, dtype=complex))
    if arr.shape[1] != 2**n:
        raise ValueError("initial states do not match n")
    return arr


# -- circuit draws -------------------------------------------------------------


@dataclass
class CircuitDraw:
    """Gates of one sample: ``local[t, q]`` (2x2) and ``active[t][e]`` per step."""

    local: np.ndarray
    active: list


def _step_count(schedule: CircuitSchedule, iterations: int) -> int:
    return iterations * len(schedule.period)


def draw_circuit(schedule, dist, policy: str, rng, iterations: int) -> CircuitDraw:
    """Gate choices for ``iterations`` periods of ``schedule``.

    ``dist`` is one distribution or one per qubit.  ``policy`` chooses how
    many independent single-qubit gates are drawn per step: one per qubit,
    one shared by all qubits, or one for even and one for odd qubits.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown rotation policy {policy!r}")
    n = schedule.n
    dists = list(dist) if isinstance(dist, (list, tuple)) else [dist] * n
    T = _step_count(schedule, iterations)
    local = np.empty((T, n, 2, 2), dtype=complex)
    active = []
    for t in range(T):
        if policy == "independent":
            for q in range(n):
                local[t, q] = sample_local_batch(dists[q], rng, 1)[0]
        elif policy == "collective":
            local[t, :] = sample_local_batch(dists[0], rng, 1)[0]
        else:
            pair = [sample_local_batch(dists[k], rng, 1)[0] for k in (0, 1)]
            for q in range(n):
                local[t, q] = pair[q % 2]
        layer = schedule.period[t % len(schedule.period)][1]
        if layer.p >= 1.0:
            active.append(np.ones(len(layer.edges), dtype=bool))
        else:
            active.append(rng.random(len(layer.edges)) < layer.p)
    return CircuitDraw(local, active)


def _apply_local(psi, gates, n):
    """psi: (B, 2**n); gates: (B, n, 2, 2)."""
    B = psi.shape[0]
    for q in range(n):
        v = psi.reshape(B, 2**q, 2, 2 ** (n - q - 1))
        psi = np.einsum("bij,bajc->baic", gates[:, q], v).reshape(B, -1)
    return psi


def _edge_bits(n, edges):
    idx = np.arange(2**n)
    bit = lambda q: (idx >> (n - 1 - q)) & 1  # noqa: E731
    return np.array([bit(a) & bit(b) for a, b in edges], dtype=np.int64).reshape(len(edges), 2**n)


def _apply_two_qubit(psi, layer, act, n, edge_bits):
    """act: (B, E) booleans."""
    if layer.gate == "CZ":
        if not len(layer.edges):
            return psi
        parity = (act.astype(np.int64) @ edge_bits) & 1
        return psi * (1 - 2 * parity)
    B = psi.shape[0]
    for e, (a, b) in enumerate(layer.edges):
        rows = np.flatnonzero(act[:, e])
        if rows.size == 0:
            continue
        v = np.moveaxis(psi[rows].reshape((rows.size,) + (2,) * n), (a + 1, b + 1), (1, 2))
        shape = v.shape
        v = (pauli.XY @ v.reshape(rows.size, 4, -1)).reshape(shape)
        psi[rows] = np.moveaxis(v, (1, 2), (a + 1, b + 1)).reshape(rows.size, -1)
    return psi


def _pauli_coefficients(psi, n):
    """c_nu = Tr(rho P_nu) / 2**n for each state, full strings in (I, Z, X, Y) order per qubit."""
    out = np.empty((psi.shape[0], 4**n))
    for k, s in enumerate(psi):
        out[k] = pauli.pauli_expectations(s).ravel() / 2**n
    return out


# -- ensembles -----------------------------------------------------------------


@dataclass
class EnsembleStats:
    """Per-iteration aggregates over samples and initial states.

    ``sample_q[s, l]`` is the mean Q of sample ``s`` over its initial
    states; ``q_stderr`` is the standard error of ``mean_q`` across samples.
    ``coefficients`` maps an iteration to the (members, 4**n) array of Pauli
    coefficients when requested.
    """

    n: int
    iterations: np.ndarray
    mean_q: np.ndarray
    q_stderr: np.ndarray
    min_q: np.ndarray
    q_distance: np.ndarray
    pt_distance: np.ndarray
    sample_q: np.ndarray
    samples: int
    n_initial: int
    seed: int
    q_ref: float
    coefficients: dict = field(default_factory=dict, repr=False)


def _run_chunk(args):
    schedule, dist, policy, psi0, iterations, seeds, record_pauli = args
    n = schedule.n
    S = len(seeds)
    K = psi0.shape[0]
    draws = [draw_circuit(schedule, dist, policy, np.random.default_rng(s), iterations) for s in seeds]
    local = np.stack([d.local for d in draws])  # (S, T, n, 2, 2)
    steps = len(schedule.period)
    edge_bits = [_edge_bits(n, layer.edges) for _, layer in schedule.period]

    psi = np.tile(psi0, (S, 1))  # row s*K + k
    q = np.empty((S, K, iterations + 1))
    hist = []
    coeffs = {}

    def record(ell, psi):
        q[:, :, ell] = meyer_wallach_q(psi).reshape(S, K)
        hist.append(PTHistogram.from_probabilities(np.abs(psi) ** 2, 2**n).counts)
        if ell in record_pauli:
            coeffs[ell] = _pauli_coefficients(psi, n)

    record(0, psi)
    for ell in range(1, iterations + 1):
        for j in range(steps):
            t = (ell - 1) * steps + j
            gates = np.repeat(local[:, t], K, axis=0)
            psi = _apply_local(psi, gates, n)
            act = np.repeat(np.stack([d.active[t] for d in draws]), K, axis=0)
            psi = _apply_two_qubit(psi, schedule.period[j][1], act, n, edge_bits[j])
        record(ell, psi)
    return q, np.stack(hist), coeffs


def run_ensemble(
    schedule: CircuitSchedule,
    dist,
    policy: str = "independent",
    initial="computational",
    iterations: int = 30,
    samples: int = 100,
    seed: int = 0,
    workers: int = 1,
    record_pauli=(),
    q_ref: float | None = None,
) -> EnsembleStats:
    """Simulate ``samples`` random circuits on every initial state.

    Each iteration applies every step of the schedule period: local gates
    on all qubits, then the two-qubit layer with independent per-edge
    activation.  Q and pooled ``|amplitude|**2`` statistics are recorded
    after every iteration (and for the initial states at iteration 0).
    """
    n = schedule.n
    if n > MAX_QUBITS:
        raise DimensionLimit(f"n = {n} exceeds the amplitude-array limit {MAX_QUBITS}")
    if samples < 1:
        raise ValueError("need at least one sample")
    psi0 = initial_set(initial, n)
    K = psi0.shape[0]
    seeds = np.random.SeedSequence(seed).spawn(samples)
    chunk = max(1, min(CHUNK, 8192 // K))
    jobs = [
        (schedule, dist, policy, psi0, iterations, seeds[i : i + chunk], tuple(record_pauli))
        for i in range(0, samples, chunk)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    q = np.concatenate([r[0] for r in results])  # (S, K, L+1)
    counts = sum(r[1] for r in results)
    coefficients = {ell: np.concatenate([r[2][ell] for r in results]) for ell in record_pauli}

    sample_q = q.mean(axis=1)
    mean_q = sample_q.mean(axis=0)
    stderr = sample_q.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.full_like(mean_q, np.nan)
    q_ref = q_haar(n) if q_ref is None else q_ref
    pt = np.array([PTHistogram(c).distance() if c.sum() >= 1000 else np.nan for c in counts])
    return EnsembleStats(
        n=n,
        iterations=np.arange(iterations + 1),
        mean_q=mean_q,
        q_stderr=stderr,
        min_q=q.min(axis=(0, 1)),
        q_distance=np.abs(mean_q - q_ref),
        pt_distance=pt,
        sample_q=sample_q,
        samples=samples,
        n_initial=K,
        seed=seed,
        q_ref=q_ref,
        coefficients=coefficients,
    )


# -- cross moments ---------------------------------------------------------------


@dataclass
class CrossMomentReport:
    max_abs: float
    stderr: float
    pair: tuple[str, str]
    max_z: float
    consistent: bool


def _full_labels(n):
    return ["".join(s) for s in itertools.product("IZXY", repeat=n)]


def cross_moment_check(stats: EnsembleStats, ell: int, sigma: float = 4.0) -> CrossMomentReport:
    """Largest off-diagonal ``E(c_nu c_mu)`` estimate at iteration ``ell``.

    Consistency means the largest estimate lies within ``sigma`` standard
    errors of zero.  Pairs whose products are identically zero carry no
    information and are skipped.
    """
    if ell not in stats.coefficients:
        raise KeyError(f"iteration {ell} was not recorded")
    c = stats.coefficients[ell]
    m = c.shape[0]
    est = c.T @ c / m
    sq = (c**2).T @ (c**2) / m
    se = np.sqrt(np.maximum(sq - est**2, 0.0) / max(m - 1, 1))
    iu = np.triu_indices(c.shape[1], 1)
    est_u, se_u = est[iu], se[iu]
    live = (np.abs(est_u) > 1e-15) | (se_u > 1e-15)
    if not live.any():
        return CrossMomentReport(0.0, 0.0, ("", ""), 0.0, True)
    k = np.flatnonzero(live)[np.argmax(np.abs(est_u[live]))]
    labels = _full_labels(stats.n)
    z_all = np.abs(est_u[live]) / np.where(se_u[live] > 0, se_u[live], np.inf)
    z = abs(est_u[k]) / se_u[k] if se_u[k] > 0 else (0.0 if abs(est_u[k]) < 1e-15 else np.inf)
    return CrossMomentReport(
        float(abs(est_u[k])),
        float(se_u[k]),
        (labels[iu[0][k]], labels[iu[1][k]]),
        float(np.max(z_all)),
        bool(z <= sigma),
    )

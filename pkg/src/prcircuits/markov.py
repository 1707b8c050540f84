"""Second-moment Markov chains of PR circuits.

Chains act on column vectors, ``v_{l+1} = M v_l`` with ``M[target, source]``.
A :class:`ChainMatrix` is stored as an ordered list of sparse-structured
factors (Kronecker local layers, permutation mixtures for two-qubit gates,
or plain scipy sparse matrices) and only densified on request.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from . import pauli
from .errors import (
    ConvergenceFailure,
    DimensionLimit,
    NotClassClosed,
    OscillationDetected,
    OutOfRange,
)
from .schedule import CircuitSchedule, LocalGateSpec, TwoQubitLayer, make_schedule

DENSE_QUBIT_LIMIT = 10
DENSE_EIG_LIMIT = 3**8
UNIT_TOL = 1e-9
NEAR_UNIT_TOL = 1e-6


def rbar(c: float) -> np.ndarray:
    """Single-qubit transition matrix on (0, z, xi) for local gate parameter c."""
    if not 0.0 <= c <= 1.0:
        raise OutOfRange(f"c = {c} outside [0, 1]")
    return np.array(
        [[1.0, 0.0, 0.0], [0.0, c, (1 - c) / 2], [0.0, 1 - c, (1 + c) / 2]]
    )


# -- factors -----------------------------------------------------------------


class KronFactor:
    """Tensor product of per-qubit 3x3 matrices, qubit 0 least significant."""

    def __init__(self, mats):
        self.mats = [np.asarray(m, dtype=float) for m in mats]
        self.n = len(self.mats)
        self.dim = 3**self.n

    def apply(self, x, transpose=False):
        n = self.n
        rest = x.shape[1:]
        t = x.reshape((3,) * n + rest)
        for j, m in enumerate(self.mats):
            if np.array_equal(m, np.eye(3)):
                continue
            ax = n - 1 - j
            t = np.moveaxis(np.tensordot(m.T if transpose else m, t, axes=(1, ax)), 0, ax)
        return t.reshape(x.shape)


class PermMixFactor:
    """``p * P + (1 - p) * I`` for a permutation ``P`` given as source -> target."""

    def __init__(self, perm, p=1.0):
        self.perm = np.asarray(perm, dtype=np.intp)
        self.p = float(p)
        self.dim = len(self.perm)

    def apply(self, x, transpose=False):
        if transpose:
            moved = x[self.perm]
        else:
            moved = np.empty_like(x)
            moved[self.perm] = x
        if self.p == 1.0:
            return moved
        return self.p * moved + (1 - self.p) * x


class SparseFactor:
    def __init__(self, matrix):
        self.matrix = matrix.tocsr()
        self.matrix_t = matrix.T.tocsr()
        self.dim = matrix.shape[0]

    def apply(self, x, transpose=False):
        return (self.matrix_t if transpose else self.matrix) @ x


@dataclass
class ChainMatrix:
    """Column-stochastic chain ``M = F_k ... F_2 F_1`` over ``dim`` states.

    ``sizes`` counts the full Pauli strings lumped into each state; the
    uniform distribution over non-identity full strings is stationary for
    every chain built here, which gives the deflation vector for spectra.
    """

    dim: int
    factors: list
    sizes: np.ndarray = field(repr=False)
    statespace: str = "reduced"
    n: int | None = None
    identity: int = 0
    labels: list | None = field(default=None, repr=False)

    def matvec(self, x):
        y = np.asarray(x, dtype=float)
        for f in self.factors:
            y = f.apply(y)
        return y

    def rmatvec(self, x):
        y = np.asarray(x, dtype=float)
        for f in reversed(self.factors):
            y = f.apply(y, transpose=True)
        return y

    def __matmul__(self, x):
        return self.matvec(x)

    def then(self, other: "ChainMatrix") -> "ChainMatrix":
        """Chain that applies ``self`` first and ``other`` second."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return ChainMatrix(
            self.dim, self.factors + other.factors, self.sizes, self.statespace, self.n, self.identity, self.labels
        )

    def dense(self) -> np.ndarray:
        return self.matvec(np.eye(self.dim))

    def stationary_guess(self) -> np.ndarray:
        """Uniform-over-full-strings distribution restricted to non-identity states."""
        w = np.array(self.sizes, dtype=float)
        w[self.identity] = 0.0
        return w / w.sum()


def _reduced_chain(n, factors):
    return ChainMatrix(3**n, factors, pauli.class_sizes(n), "reduced", n, 0)


def local_layer(spec: LocalGateSpec, dense_limit: int = DENSE_QUBIT_LIMIT) -> ChainMatrix:
    if spec.n > dense_limit:
        raise DimensionLimit(f"n = {spec.n} exceeds the dense limit {dense_limit}")
    return _reduced_chain(spec.n, [KronFactor([rbar(c) for c in spec.c_per_qubit])])


def edge_permutation(n: int, edge, gate: str = "CZ") -> np.ndarray:
    """Source -> target index map of one deterministic gate on reduced strings."""
    table = pauli.reduced_gate_table(gate)
    if table is None:
        raise NotClassClosed(f"{gate} does not respect the x/y merge")
    new_a = np.zeros(9, dtype=np.intp)
    new_b = np.zeros(9, dtype=np.intp)
    for (a, b), (a2, b2) in table.items():
        new_a[3 * a + b] = a2
        new_b[3 * a + b] = b2
    i, j = edge
    d = pauli.digits(n)
    a = d[:, i].astype(np.intp)
    b = d[:, j].astype(np.intp)
    code = 3 * a + b
    return np.arange(3**n) + (new_a[code] - a) * 3**i + (new_b[code] - b) * 3**j


def two_qubit_layer(layer: TwoQubitLayer, n: int) -> ChainMatrix:
    """Average over independent Bernoulli(p) activation of every edge."""
    if layer.p == 0.0 or not layer.edges:
        return _reduced_chain(n, [])
    perms = [edge_permutation(n, e, layer.gate) for e in layer.edges]
    if layer.p == 1.0:
        total = np.arange(3**n)
        for perm in perms:
            total = perm[total]
        return _reduced_chain(n, [PermMixFactor(total)])
    return _reduced_chain(n, [PermMixFactor(perm, layer.p) for perm in perms])


def step_matrix(schedule: CircuitSchedule) -> ChainMatrix:
    """One period: each step is the local layer followed by its two-qubit layer."""
    factors = []
    for local, layer in schedule.period:
        factors += local_layer(local).factors
        factors += two_qubit_layer(layer, schedule.n).factors
    return _reduced_chain(schedule.n, factors)


def chain(topology: str, n: int, c, p: float = 1.0, gate: str = "CZ") -> ChainMatrix:
    return step_matrix(make_schedule(topology, n, c, p, gate))


def computational_moments(n: int) -> pauli.MomentVector:
    """Moment vector shared by every computational basis state."""
    v = np.where((pauli.digits(n) == pauli.XI).any(axis=1), 0.0, 2.0**-n)
    return pauli.MomentVector(n, v)


# -- spectra -----------------------------------------------------------------


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    lambda1: complex
    complete: bool
    method: str
    near_unit: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def modulus(self) -> float:
        return float(abs(self.lambda1))

    @property
    def gap(self) -> float:
        return 1.0 - self.modulus

    @property
    def rate(self) -> float:
        return math.inf if self.modulus == 0 else -math.log(self.modulus)

    @property
    def unit_count(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues - 1) < UNIT_TOL))


def _subdominant(eigenvalues):
    ev = np.asarray(eigenvalues, dtype=complex)
    rest = ev[np.abs(ev - 1) >= UNIT_TOL]
    lam = rest[np.argmax(np.abs(rest))] if rest.size else 0j
    near = ev[(np.abs(ev - 1) >= UNIT_TOL) & (np.abs(ev - 1) < NEAR_UNIT_TOL)]
    return complex(lam), near


def _range_basis(D, rng):
    """Orthonormal basis of range(D) when D is clearly rank deficient, else None."""
    d = D.shape[0]
    k = min(64, d // 2)
    while 0 < k <= 0.7 * d:
        Y = D @ rng.standard_normal((d, k))
        U, s, _ = np.linalg.svd(Y, full_matrices=False)
        r = int(np.sum(s > 1e-10 * s[0]))
        if r < k:
            return U[:, :r]
        k *= 2
    return None


def dense_eigenvalues(D: np.ndarray) -> np.ndarray:
    """All eigenvalues, compressing to range(D) first when D is low rank.

    range(D) is D-invariant, so the compression keeps every non-zero
    eigenvalue with its algebraic multiplicity; the rest are zero.
    """
    d = D.shape[0]
    Q = _range_basis(D, np.random.default_rng(0)) if d >= 64 else None
    if Q is None:
        return np.linalg.eigvals(D)
    ev = np.linalg.eigvals(Q.T @ D @ Q)
    return np.concatenate([ev, np.zeros(d - len(ev), dtype=complex)])


def deflated_operator(M: ChainMatrix) -> spla.LinearOperator:
    """M on non-identity states with the uniform stationary mode sent to 0."""
    pi = M.stationary_guess()
    ident = M.identity

    def mv(x):
        x = np.array(x, dtype=float).ravel()
        x[ident] = 0.0
        y = M.matvec(x)
        y -= pi * x.sum()
        y[ident] = 0.0
        return y

    return spla.LinearOperator((M.dim, M.dim), matvec=mv, dtype=float)


def iterative_eigenvalues(M: ChainMatrix, k: int = 6, tol: float = 1e-10):
    """Largest-modulus eigenvalues of the deflated chain (unit mode removed)."""
    op = deflated_operator(M)
    k = min(k, M.dim - 3)
    v0 = np.random.default_rng(12345).random(M.dim)
    for ncv in (max(2 * k + 1, 40), 120):
        ncv = min(ncv, M.dim - 1)
        try:
            vals, vecs = spla.eigs(op, k=k, which="LM", tol=tol * 1e-3, ncv=ncv, v0=v0, maxiter=20000)
        except spla.ArpackNoConvergence:
            continue
        resid = [
            np.linalg.norm(op.matvec(vecs[:, i].real) - (vals[i] * vecs[:, i]).real)
            + np.linalg.norm(op.matvec(vecs[:, i].imag) - (vals[i] * vecs[:, i]).imag)
            for i in range(len(vals))
        ]
        if max(resid) < tol * 100:
            return vals
    raise ConvergenceFailure("ARPACK did not reach the requested residual")


def spectrum(M: ChainMatrix, k: int | None = None, dense_limit: int = DENSE_EIG_LIMIT) -> SpectrumReport:
    """Eigenvalues with subdominant modulus, gap and rate.

    ``k=None`` requests the full spectrum (dense) when ``dim <= dense_limit``;
    otherwise the ``k`` (default 6) largest-modulus eigenvalues of the
    deflated operator are found iteratively.
    """
    if k is None and M.dim <= dense_limit:
        ev = dense_eigenvalues(M.dense())
        lam, near = _subdominant(ev)
        return SpectrumReport(ev, lam, True, "dense", near)
    ev = iterative_eigenvalues(M, k or 6)
    lam, near = _subdominant(ev)
    return SpectrumReport(np.asarray(ev), lam, False, "arnoldi", near)


def gap(M: ChainMatrix) -> float:
    """Spectral gap via the cheapest adequate eigen-solver."""
    if M.dim <= 800:
        return spectrum(M).gap
    return spectrum(M, k=6).gap


# -- effective decay ---------------------------------------------------------


@dataclass
class EffectiveRate:
    lambda_eff: complex
    method: str
    krylov_dim: int = 0

    @property
    def modulus(self) -> float:
        return float(abs(self.lambda_eff))

    @property
    def gap(self) -> float:
        return 1.0 - self.modulus

    @property
    def rate(self) -> float:
        return math.inf if self.modulus == 0 else -math.log(self.modulus)


def _arnoldi(matvec, v0, m_max, tol):
    beta = np.linalg.norm(v0)
    Q = np.zeros((m_max + 1, v0.size))
    H = np.zeros((m_max + 1, m_max))
    Q[0] = v0 / beta
    for j in range(m_max):
        w = matvec(Q[j])
        for _ in range(2):
            h = Q[: j + 1] @ w
            w -= h @ Q[: j + 1]
            H[: j + 1, j] += h
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] < tol:
            return H[: j + 1, : j + 1], beta, True, 0.0
        Q[j + 1] = w / H[j + 1, j]
    return H[:m_max, :m_max], beta, False, H[m_max, m_max - 1]


def _decay_fit(M, v0, steps=400):
    w = np.asarray(v0, dtype=float)
    norms = []
    for _ in range(steps):
        w2 = M.matvec(w)
        norms.append(np.linalg.norm(w2 - w, np.inf))
        w = w2
        if norms[-1] < 1e-280:
            break
    norms = np.array(norms)
    ok = np.nonzero(norms > 1e-13 * max(norms[0], 1e-300))[0]
    if ok.size < 2:
        return 0.0
    hi = ok[-1]
    lo = max(ok[0], hi - 20)
    if hi == lo:
        return 0.0
    return float((norms[hi] / norms[lo]) ** (1.0 / (hi - lo)))


def _cluster_component(H, z, centre, tol):
    """Norm of the spectral projection of ``z`` onto eigenvalues of ``H`` near ``centre``.

    Uses an ordered Schur form and one Sylvester solve, which stays
    well conditioned when the cluster itself is (nearly) defective.
    """
    T, Q, k = sla.schur(H.astype(complex), output="complex", sort=lambda x: abs(x - centre) < tol)
    y = Q.conj().T @ z
    if k == len(y):
        return float(np.linalg.norm(y))
    X = sla.solve_sylvester(T[:k, :k], -T[k:, k:], -T[:k, k:])
    return float(np.linalg.norm(y[:k] - X @ y[k:]))


def effective_decay_rate(
    M: ChainMatrix, v0, component_tol: float = 1e-9, m_max: int = 200, cluster_tol: float = 1e-5
) -> EffectiveRate:
    """Slowest non-stationary eigenvalue actually present in ``v0``.

    The Krylov space of ``v0`` is exactly the span of the eigenvectors it
    touches, so Arnoldi either breaks down on that invariant subspace or
    its largest Ritz value is accepted once its residual is small.  Ritz
    values closer than ``cluster_tol`` are grouped and the component of
    ``v0`` is measured per group, because large symmetric chains carry
    nearly defective pairs.  An unconverged leading group falls back to
    fitting the decay of ``||M^{t+1} v0 - M^t v0||``.
    """
    v0 = np.asarray(v0, dtype=float)
    H, beta, exact, h_last = _arnoldi(M.matvec, v0, min(m_max, M.dim), 1e-12 * max(np.linalg.norm(v0), 1e-300))
    method = "krylov-exact" if exact else "krylov"
    theta, Y = np.linalg.eig(H)
    z = np.zeros(len(theta), dtype=complex)
    z[0] = beta
    done = np.zeros(len(theta), dtype=bool)
    for i in np.argsort(-np.abs(theta)):
        if done[i]:
            continue
        members = np.abs(theta - theta[i]) < cluster_tol
        done |= members
        centre = complex(theta[members].mean())
        if abs(centre - 1) < UNIT_TOL or abs(centre) < 1e-12:
            continue
        if _cluster_component(H, z, centre, cluster_tol) <= component_tol:
            continue
        if exact or np.max(np.abs(h_last * Y[-1, members])) < 1e-8:
            return EffectiveRate(centre, method, len(theta))
        break
    else:
        return EffectiveRate(0j, method, len(theta))
    return EffectiveRate(complex(_decay_fit(M, v0)), "decay-fit", len(theta))


# -- stationary behaviour ----------------------------------------------------


def stationary(M: ChainMatrix, v0, tol: float = 1e-13, max_iter: int = 200_000):
    """Power-iterate ``v0`` to its limit.

    Stops once the geometric tail estimate of the remaining change drops
    below ``tol`` (this also implies ``||dv||_inf < tol``).
    """
    v = np.asarray(v0, dtype=float).copy()
    prev = None
    for _ in range(max_iter):
        w = M.matvec(v)
        step = np.max(np.abs(w - v))
        v = w
        if step == 0.0:
            break
        ratio = min(step / prev, 0.999999) if prev else 0.999999
        prev = step
        if step < tol and step * ratio / (1 - ratio) < tol:
            break
    else:
        for period in range(2, 13):
            w = v
            for _ in range(period):
                w = M.matvec(w)
            if np.max(np.abs(w - v)) < 1e-10:
                raise OscillationDetected(period)
        raise ConvergenceFailure("power iteration did not converge")
    if M.n is not None and M.statespace == "reduced":
        return pauli.MomentVector(M.n, v)
    return v


def q_trajectory(M: ChainMatrix, v0, L: int) -> np.ndarray:
    n = M.n if M.n is not None else v0.n
    v = np.asarray(v0, dtype=float)
    out = [pauli.q_from_moments(v, n)]
    for _ in range(L):
        v = M.matvec(v)
        out.append(pauli.q_from_moments(v, n))
    return np.array(out)


def _limit_projector(M: ChainMatrix):
    """Map ``v`` to its limit under ``M``, assuming every parity sector that
    ``M`` keeps invariant relaxes to its uniform-over-full-strings state."""
    parity = pauli.weight_parity(M.n)
    even = (parity == 0).astype(float)
    conserved = (M.matvec(even) * (1.0 - even)).sum() < 1e-12
    pi = M.stationary_guess()
    if conserved:
        return lambda u: sector_stationary(M.n, u, M.sizes)

    def limit(u):
        out = (u.sum() - u[M.identity]) * pi
        out[M.identity] = u[M.identity]
        return out

    return limit


def q_deviation(M: ChainMatrix, v0, L: int) -> np.ndarray:
    """``E[Q](l) - Q_inf`` for ``l = 0..L`` without cancellation.

    Only the decaying part ``v - v_inf`` is propagated, with the invariant
    part projected out after every step, so the tail stays accurate far
    below the rounding level of ``E[Q]`` itself.  Needs a reduced chain.
    """
    if M.statespace != "reduced" or M.n is None:
        raise ValueError("q_deviation needs a reduced 3**n chain")
    n = M.n
    limit = _limit_projector(M)
    u = np.asarray(v0, dtype=float)
    u = u - limit(u)
    single = np.array([a * 3**j for j in range(n) for a in (pauli.Z, pauli.XI)])
    out = []
    for _ in range(L + 1):
        out.append(-(2.0**n) / n * u[single].sum())
        u = M.matvec(u)
        u = u - limit(u)
    return np.array(out)


@dataclass
class ParityReport:
    conserved: bool
    identity_weight: float
    even_weight: float
    odd_weight: float
    q_asymptotic: float
    q_ergodic: float


def sector_stationary(n: int, v0, sizes=None) -> np.ndarray:
    """Limit when each weight-parity sector relaxes to its own uniform state."""
    v0 = np.asarray(v0, dtype=float)
    sizes = pauli.class_sizes(n) if sizes is None else sizes
    parity = pauli.weight_parity(n)
    out = np.zeros_like(v0)
    out[0] = v0[0]
    for s in (0, 1):
        mask = parity == s
        mask[0] = False
        w = sizes * mask
        out += v0[mask].sum() * w / w.sum()
    return out


def parity_analysis(schedule_or_matrix, v0=None) -> ParityReport:
    """Check whether the chain keeps the weight parity of Pauli strings fixed.

    Because entries are non-negative, ``M`` maps the even sector into itself
    exactly when ``M @ 1_even`` has no mass on odd states (and likewise for
    odd), so one product per sector decides conservation.
    """
    M = schedule_or_matrix
    if isinstance(M, CircuitSchedule):
        M = step_matrix(M)
    n = M.n
    v0 = computational_moments(n) if v0 is None else v0
    v0 = np.asarray(v0, dtype=float)
    parity = pauli.weight_parity(n)
    even = (parity == 0).astype(float)
    odd = 1.0 - even
    leak = (M.matvec(even) * odd).sum() + (M.matvec(odd) * even).sum()
    conserved = bool(leak < 1e-12)

    nonid = np.ones(M.dim, bool)
    nonid[0] = False
    ergodic = v0[0] * np.eye(1, M.dim, 0).ravel() + (1 - v0[0]) * M.stationary_guess()
    q_erg = pauli.q_from_moments(ergodic, n)
    q_asym = pauli.q_from_moments(sector_stationary(n, v0), n) if conserved else q_erg
    return ParityReport(
        conserved,
        float(v0[0]),
        float(v0[(parity == 0) & nonid].sum()),
        float(v0[parity == 1].sum()),
        q_asym,
        q_erg,
    )


@dataclass
class LumpResult:
    lumpable: bool
    reduced: np.ndarray | None = None
    witness: tuple | None = None


def lumpability_check(M: ChainMatrix, partition, tol: float = 1e-12) -> LumpResult:
    """Strong lumpability of ``M`` under ``partition`` (state -> class label).

    ``partition`` labels must be 0..K-1.  The reduced chain is
    ``M'[U, V] = sum_{t in U} M[t, s]`` for any ``s`` in ``V``.
    """
    labels = np.asarray(partition, dtype=np.intp)
    K = labels.max() + 1
    S = np.zeros((M.dim, K))
    S[np.arange(M.dim), labels] = 1.0
    A = M.rmatvec(S).T  # A[U, s] = sum_{t in U} M[t, s]
    reduced = np.zeros((K, K))
    for V in range(K):
        members = np.flatnonzero(labels == V)
        block = A[:, members]
        dev = np.abs(block - block[:, :1])
        if dev.max() > tol:
            U, m = np.unravel_index(np.argmax(dev), dev.shape)
            return LumpResult(False, None, (int(members[0]), int(members[m]), int(U)))
        reduced[:, V] = block[:, 0]
    return LumpResult(True, reduced)


def permutation_partition(n: int) -> np.ndarray:
    """Label reduced strings by (k_z, k_xi), matching the symmetric AA ordering."""
    from .symmetric import aa_states

    index = {s: i for i, s in enumerate(aa_states(n))}
    d = pauli.digits(n)
    kz = (d == pauli.Z).sum(axis=1)
    kx = (d == pauli.XI).sum(axis=1)
    return np.array([index[(a, b)] for a, b in zip(kz, kx)])


# -- sweeps ------------------------------------------------------------------


@dataclass
class SweepResult:
    rows: list
    argmax: tuple

    def gaps(self) -> np.ndarray:
        return np.array([r[2] for r in self.rows])


def _sweep_point(args):
    topology, gate, n, c, p = args
    M = chain(topology, n, c, p, gate)
    s = spectrum(M) if M.dim <= 800 else spectrum(M, k=6)
    return (c, p, s.gap, s.rate)


def sweep(topology, gate, n, c_grid, p_grid, workers: int = 1) -> SweepResult:
    """Gap and rate on a (c, p) grid; results are ordered by grid index."""
    tasks = [(topology, gate, n, float(c), float(p)) for p in p_grid for c in c_grid]
    if not tasks:
        raise ValueError("empty grid")
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    best = max(rows, key=lambda r: r[2])
    return SweepResult(rows, best)

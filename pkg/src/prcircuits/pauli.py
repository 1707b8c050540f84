"""Pauli-string algebra on the reduced alphabet {0, z, xi}.

A reduced Pauli string assigns one of three letters to every qubit: ``0``
(identity), ``z`` (Pauli Z) or ``xi`` (the merged X/Y class).  Strings are
indexed in base 3 with qubit 0 as the least significant digit, which is the
canonical state order for every chain matrix in the package.

State vectors use the opposite, numpy-kron convention: qubit 0 is the most
significant bit of the amplitude index (axis 0 of ``psi.reshape([2] * n)``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotClifford, NotNormalized, NotUnitary

ZERO, Z, XI = 0, 1, 2
LETTERS = "0zx"

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": PX, "Y": PY, "Z": PZ}
# full Pauli letter -> reduced class
CLASS_OF = {"I": ZERO, "Z": Z, "X": XI, "Y": XI}

ZERO_TOL = 1e-10

CZ = np.diag([1, 1, 1, -1]).astype(complex)
XY = np.array(
    [[1, 0, 0, 0], [0, 0, -1j, 0], [0, -1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)  # exp[-i pi/4 (XX + YY)]


def encode(letters) -> int:
    """Base-3 index of a reduced string, qubit 0 least significant."""
    index = 0
    for j, a in enumerate(letters):
        index += int(a) * 3**j
    return index


def decode(index: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        index, r = divmod(index, 3)
        out.append(r)
    return tuple(out)


def weight(letters) -> int:
    return sum(1 for a in letters if a != ZERO)


def label(letters) -> str:
    return "".join(LETTERS[a] for a in letters)


@lru_cache(maxsize=None)
def digits(n: int) -> np.ndarray:
    """(3**n, n) array of letters; row i is ``decode(i, n)``."""
    idx = np.arange(3**n)
    out = np.empty((3**n, n), dtype=np.int8)
    for j in range(n):
        out[:, j] = (idx // 3**j) % 3
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def class_sizes(n: int) -> np.ndarray:
    """Number of full Pauli strings merged into each reduced string (2**#xi)."""
    return 2.0 ** (digits(n) == XI).sum(axis=1)


def weight_parity(n: int) -> np.ndarray:
    return (digits(n) != ZERO).sum(axis=1) % 2


@dataclass(frozen=True)
class PauliPermutation:
    """Action of a Clifford gate on Pauli strings by conjugation.

    ``mapping`` sends a full string such as ``("X", "I")`` to its image and
    phase.  ``reduced_mapping`` is the induced permutation on reduced letter
    tuples, or ``None`` when the x/y merge is not respected by the gate.
    """

    arity: int
    mapping: dict = field(repr=False)
    reduced_mapping: dict | None = field(default=None, repr=False)

    @property
    def class_closed(self) -> bool:
        return self.reduced_mapping is not None


def _pauli_string_matrix(labels) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for a in labels:
        out = np.kron(out, PAULIS[a])
    return out


def conjugation_table(gate_unitary) -> PauliPermutation:
    """Decompose ``U P U^dagger`` for every Pauli string ``P`` on k <= 2 qubits."""
    U = np.asarray(gate_unitary, dtype=complex)
    dim = U.shape[0]
    k = int(round(np.log2(dim)))
    if U.shape != (dim, dim) or 2**k != dim or k not in (1, 2):
        raise ValueError("expected a 2x2 or 4x4 matrix")
    if not np.allclose(U @ U.conj().T, np.eye(dim), atol=ZERO_TOL, rtol=0):
        raise NotUnitary("gate is not unitary within 1e-10")

    strings = list(itertools.product("IXYZ", repeat=k))
    basis = {s: _pauli_string_matrix(s) for s in strings}
    mapping = {}
    for s in strings:
        image = U @ basis[s] @ U.conj().T
        coeffs = {t: np.trace(basis[t] @ image) / dim for t in strings}
        nonzero = [t for t, v in coeffs.items() if abs(v) > ZERO_TOL]
        if len(nonzero) != 1:
            raise NotClifford(f"image of {''.join(s)} has {len(nonzero)} Pauli terms")
        t = nonzero[0]
        mapping[s] = (t, complex(np.round(coeffs[t], 12)))

    reduced = {}
    closed = True
    for s, (t, _) in mapping.items():
        src = tuple(CLASS_OF[a] for a in s)
        dst = tuple(CLASS_OF[a] for a in t)
        if reduced.setdefault(src, dst) != dst:
            closed = False
            break
    return PauliPermutation(k, mapping, reduced if closed else None)


def cz_class_action(pair):
    """Closed form of CZ on a pair of reduced letters."""
    a, b = pair
    if a == XI and b != XI:
        return (a, Z - b)
    if b == XI and a != XI:
        return (Z - a, b)
    return (a, b)


@lru_cache(maxsize=None)
def reduced_gate_table(gate: str) -> dict:
    """Reduced-letter permutation for a named two-qubit gate ("CZ" or "XY")."""
    if gate == "CZ":
        return {p: cz_class_action(p) for p in itertools.product(range(3), repeat=2)}
    if gate == "XY":
        table = conjugation_table(XY)
        return dict(table.reduced_mapping)
    raise ValueError(f"unknown gate {gate!r}")


@dataclass(frozen=True)
class MomentVector:
    """Second moments ``2**n E(c_nu**2)`` summed over each reduced class."""

    n: int
    entries: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __len__(self):
        return len(self.entries)

    def entry(self, letters) -> float:
        return float(self.entries[encode(letters)])


def _check_state(psi) -> tuple[np.ndarray, int]:
    psi = np.asarray(psi, dtype=complex).ravel()
    n = int(round(np.log2(psi.size)))
    if 2**n != psi.size or n < 1:
        raise ValueError("state length must be a power of two")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise NotNormalized(f"|psi| = {np.linalg.norm(psi):.3g}")
    return psi, n


# W[k, a*2 + b] = sigma_k[b, a], so sum_ab rho_ab W[k, ab] = Tr(rho sigma_k)
_W = np.stack([PAULIS[s].T.ravel() for s in "IZXY"])
# squared expectations over (I, Z, X, Y) -> classes (0, z, xi)
_MERGE = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]], dtype=float)


def pauli_expectations(psi) -> np.ndarray:
    """Tensor of ``<P>`` over full strings, one (I, Z, X, Y) axis per qubit."""
    psi, n = _check_state(psi)
    t = psi.reshape([2] * n)
    rho = np.multiply.outer(t, t.conj())
    order = [ax for j in range(n) for ax in (j, n + j)]
    rho = rho.transpose(order).reshape([4] * n)
    for j in range(n):
        rho = np.moveaxis(np.tensordot(_W, rho, axes=(1, j)), 0, j)
    return rho.real


def moments_from_state(psi) -> MomentVector:
    psi, n = _check_state(psi)
    sq = pauli_expectations(psi) ** 2 / 2**n
    for j in range(n):
        sq = np.moveaxis(np.tensordot(_MERGE, sq, axes=(1, j)), 0, j)
    # axis j is qubit j; reversing makes qubit 0 the fastest-varying digit
    return MomentVector(n, sq.transpose(list(range(n))[::-1]).ravel().copy())


def q_from_moments(v, n: int | None = None) -> float:
    """Expected Meyer-Wallach Q from a second-moment vector."""
    if n is None:
        n = v.n
    v = np.asarray(v)
    total = sum(v[a * 3**j] for j in range(n) for a in (Z, XI))
    return float(1 - 2**n / n * total)

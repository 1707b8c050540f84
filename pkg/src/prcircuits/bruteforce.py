"""Brute-force references that bypass the reduced-chain machinery.

The full chain acts on all 4**n Pauli strings.  Local second moments are
integrated numerically from an explicit gate family (z-rotation, x-rotation
by theta, z-rotation) and two-qubit gates act through full conjugation
tables, so nothing here uses ``rbar`` or the reduced letter tables.
"""
import itertools

import numpy as np

from .pauli import CZ, XY, PAULIS, conjugation_table

FULL = "IXYZ"


def _rz(phi):
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def so3(U):
    """R[a, b] with U sigma_a U^dag = sum_b R[a, b] sigma_b over (X, Y, Z)."""
    P = [PAULIS[a] for a in "XYZ"]
    return np.array([[np.trace(U @ P[a] @ U.conj().T @ P[b]).real / 2 for b in range(3)] for a in range(3)])


def local_full(c, grid=16):
    """4x4 column-stochastic second-moment matrix over (I, X, Y, Z).

    Averages x_ab**2 over Z(phi2) X(theta) Z(phi1) with cos(theta)**2 = c on
    a uniform phi grid, which integrates these trigonometric polynomials
    exactly.
    """
    theta = np.arccos(np.sqrt(c))
    acc = np.zeros((3, 3))
    phis = 2 * np.pi * np.arange(grid) / grid
    for p1 in phis:
        for p2 in phis:
            R = so3(_rz(p2) @ _rx(theta) @ _rz(p1))
            acc += R**2
    acc /= grid**2
    out = np.zeros((4, 4))
    out[0, 0] = 1
    # column = source letter, row = target letter
    out[1:, 1:] = acc.T
    return out


def full_index(letters):
    return sum(FULL.index(a) * 4**j for j, a in enumerate(letters))


def full_chain(n, c_per_qubit, steps):
    """Dense 4**n chain for a period given as [(gate, edges, p), ...] steps."""
    L = np.ones((1, 1))
    for c in reversed(c_per_qubit):
        L = np.kron(L, local_full(c))
    strings = list(itertools.product(FULL, repeat=n))
    M = np.eye(4**n)
    for gate, edges, p in steps:
        table = conjugation_table({"CZ": CZ, "XY": XY}[gate]).mapping
        T = np.eye(4**n)
        for i, j in edges:
            G = np.zeros((4**n, 4**n))
            for s in strings:
                t, _ = table[(s[i], s[j])]
                s2 = list(s)
                s2[i], s2[j] = t
                G[full_index(s2), full_index(s)] = 1
            T = (p * G + (1 - p) * np.eye(4**n)) @ T
        M = T @ L @ M
    return M


def lump_to_reduced(M, n):
    """Reduced chain from the full chain by summing targets over x/y classes."""
    cls = {"I": 0, "Z": 1, "X": 2, "Y": 2}
    strings = list(itertools.product(FULL, repeat=n))
    red = np.zeros((3**n, 3**n))
    rep = {}
    for s in strings:
        r = sum(cls[a] * 3**j for j, a in enumerate(s))
        rep.setdefault(r, full_index(s))
    for s in strings:
        r = sum(cls[a] * 3**j for j, a in enumerate(s))
        for src_red, src_full in rep.items():
            red[r, src_red] += M[full_index(s), src_full]
    return red


def reduced_reference(schedule):
    """Reduced 3**n chain of a schedule computed through the full 4**n chain."""
    steps = [(layer.gate, layer.edges, layer.p) for _, layer in schedule.period]
    c = schedule.period[0][0].c_per_qubit
    if any(local.c_per_qubit != c for local, _ in schedule.period):
        raise ValueError("reference chain assumes the same local gates in every step")
    return lump_to_reduced(full_chain(schedule.n, list(c), steps), schedule.n)

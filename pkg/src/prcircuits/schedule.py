"""Circuit schedules: local-gate parameters and two-qubit layers per iteration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonCommutingLayer, OutOfRange

TOPOLOGIES = ("open", "closed", "star", "aa")
GATES = ("CZ", "XY")


@dataclass(frozen=True)
class LocalGateSpec:
    c_per_qubit: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in self.c_per_qubit)
        if any(not 0.0 <= x <= 1.0 for x in c):
            raise OutOfRange("local gate parameters must lie in [0, 1]")
        object.__setattr__(self, "c_per_qubit", c)

    @classmethod
    def homogeneous(cls, n: int, c: float) -> "LocalGateSpec":
        return cls((c,) * n)

    @property
    def n(self) -> int:
        return len(self.c_per_qubit)


@dataclass(frozen=True)
class TwoQubitLayer:
    gate: str
    edges: tuple[tuple[int, int], ...]
    p: float = 1.0

    def __post_init__(self):
        if self.gate not in GATES:
            raise ValueError(f"unknown gate {self.gate!r}")
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRange("gate probability must lie in [0, 1]")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        if any(a == b for a, b in edges):
            raise ValueError("self-loop edge")
        object.__setattr__(self, "edges", edges)
        if self.gate == "XY":
            used = [q for e in edges for q in e]
            if len(used) != len(set(used)):
                raise NonCommutingLayer("XY edges in one layer must be disjoint")


@dataclass(frozen=True)
class CircuitSchedule:
    """One period ("iteration") of a PR circuit: a list of (local, two-qubit) steps."""

    n: int
    period: tuple[tuple[LocalGateSpec, TwoQubitLayer], ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("schedule period is empty")
        for local, layer in self.period:
            if local.n != self.n:
                raise ValueError("local spec size does not match n")
            for e in layer.edges:
                if max(e) >= self.n or min(e) < 0:
                    raise ValueError(f"edge {e} out of range for n={self.n}")


def topology_edges(topology: str, n: int) -> list[tuple[int, int]]:
    if topology == "open":
        return [(j, j + 1) for j in range(n - 1)]
    if topology == "closed":
        if n < 3:
            raise ValueError("closed chain needs n >= 3")
        return [(j, j + 1) for j in range(n - 1)] + [(n - 1, 0)]
    if topology == "star":
        return [(0, j) for j in range(1, n)]
    if topology == "aa":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise ValueError(f"unknown topology {topology!r}")


def xy_edge_sets(topology: str, n: int):
    """Split chain couplings into two disjoint halves (odd and even bonds)."""
    if topology not in ("open", "closed"):
        raise ValueError("XY scheduling is defined for chain topologies")
    if topology == "closed" and n % 2:
        raise NonCommutingLayer("closed-chain XY scheduling needs even n")
    edges = topology_edges(topology, n)
    return [e for k, e in enumerate(edges) if k % 2 == 0], [
        e for k, e in enumerate(edges) if k % 2 == 1
    ]


def make_schedule(topology: str, n: int, c, p: float = 1.0, gate: str = "CZ") -> CircuitSchedule:
    """Standard schedule; ``c`` is a scalar or a per-qubit sequence.

    CZ circuits apply every coupling each iteration.  XY circuits alternate
    the two halves of the chain, so one period holds two steps.
    """
    local = LocalGateSpec(tuple(np.broadcast_to(np.asarray(c, dtype=float), (n,))))
    if gate == "CZ":
        layer = TwoQubitLayer("CZ", tuple(topology_edges(topology, n)), p)
        return CircuitSchedule(n, ((local, layer),))
    first, second = xy_edge_sets(topology, n)
    return CircuitSchedule(
        n,
        ((local, TwoQubitLayer("XY", tuple(first), p)), (local, TwoQubitLayer("XY", tuple(second), p))),
    )

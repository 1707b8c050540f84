"""Cluster-state PR circuits through their circuit-model equivalents, and fusion costs."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRange, UnsupportedKind
from .schedule import CircuitSchedule, make_schedule

# measuring each lattice column implements an HZ gate (c = 0) followed by the
# built-in CZ couplings of that column
CLUSTER_KINDS = {
    "lattice2D": "open",
    "cylinder": "closed",
    "star_central_first": "star",
    "star_central_last": "star",
    "all_to_all": "aa",
}


@dataclass(frozen=True)
class ClusterTopology:
    kind: str
    n: int
    schedule: CircuitSchedule
    note: str = ""


def map_cluster_topology(kind: str, n: int) -> ClusterTopology:
    """Circuit schedule (HZ locals, deterministic CZ) equivalent to a cluster layout.

    Both star measurement orders map to the same circuit star; the order of
    measuring the central qubit has no circuit-level counterpart here.
    """
    if kind not in CLUSTER_KINDS:
        raise UnsupportedKind(f"unknown cluster topology {kind!r}")
    note = "measurement order not represented" if kind.startswith("star") else ""
    return ClusterTopology(kind, n, make_schedule(CLUSTER_KINDS[kind], n, 0.0, 1.0, "CZ"), note)


def lattice_footprint(n: int, iterations: int) -> tuple[int, int]:
    """(rows, columns) of a sparse lattice running ``iterations`` Haar-local iterations."""
    return n, 3 * iterations + 1


def fusion_cost(C: float, n: int, p: float, p_fusion: float) -> float:
    """Expected fusion attempts to link ``n`` chains for ``C`` iterations at gate probability ``p``."""
    if not 0.0 < p <= 1.0 or not 0.0 < p_fusion <= 1.0:
        raise OutOfRange("probabilities must lie in (0, 1]")
    if C < 0 or n < 0:
        raise OutOfRange("C and n must be nonnegative")
    return C * p * n / p_fusion


@dataclass(frozen=True)
class ScenarioCost:
    p: float
    rate: float
    iterations: float
    attempts: float


def compare_scenarios(scenarios, n: int = 1, p_fusion: float = 0.5, C_ref: float = 1.0) -> list[ScenarioCost]:
    """Rank ``(p, rate)`` scenarios by attempts needed for equal convergence.

    Iterations scale as ``1 / rate``; the fastest scenario runs ``C_ref``
    iterations.  Ties are broken by smaller ``p``.
    """
    scenarios = [(float(p), float(g)) for p, g in scenarios]
    if not scenarios:
        return []
    g_ref = max(g for _, g in scenarios)
    out = []
    for p, g in scenarios:
        if g <= 0:
            raise OutOfRange("rates must be positive")
        C = C_ref * g_ref / g
        out.append(ScenarioCost(p, g, C, fusion_cost(C, n, p, p_fusion)))
    return sorted(out, key=lambda s: (s.attempts, s.p))

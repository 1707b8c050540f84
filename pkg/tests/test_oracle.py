"""Chain matrices against the brute-force 4**n Pauli-string oracle."""
import numpy as np
import pytest

from prcircuits import bruteforce, markov
from prcircuits.schedule import make_schedule

CASES = [
    (topo, gate, n)
    for n in (2, 3)
    for topo in ("open", "closed", "star", "aa")
    for gate in ("CZ", "XY")
    if not (gate == "XY" and (topo in ("star", "aa") or (topo == "closed" and n % 2)))
    and not (topo == "closed" and n < 3)
]


@pytest.mark.parametrize("c", [0.0, 1 / 3, 0.62])
def test_single_qubit_local_lumps_to_rbar(c):
    M = bruteforce.local_full(c)
    np.testing.assert_allclose(bruteforce.lump_to_reduced(M, 1), markov.rbar(c), atol=1e-12)


@pytest.mark.parametrize("topology,gate,n", CASES)
@pytest.mark.parametrize("c,p", [(0.0, 1.0), (1 / 3, 0.75), (0.24, 0.3)])
def test_reduced_chain_matches_oracle(topology, gate, n, c, p):
    sched = make_schedule(topology, n, c, p, gate)
    ref = bruteforce.reduced_reference(sched)
    np.testing.assert_allclose(markov.step_matrix(sched).dense(), ref, atol=1e-12)


def test_heterogeneous_locals_match_oracle():
    sched = make_schedule("star", 3, [0.0, 1 / 3, 0.8], 0.6)
    np.testing.assert_allclose(markov.step_matrix(sched).dense(), bruteforce.reduced_reference(sched), atol=1e-12)

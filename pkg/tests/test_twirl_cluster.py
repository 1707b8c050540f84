import numpy as np
import pytest

from prcircuits import cluster, markov, twirl
from prcircuits.errors import OutOfRange, UnsupportedKind


def test_compose_gap():
    assert twirl.compose_gap(0.5) == 0.875
    assert twirl.compose_gap(0.5, 1) == 0.5


@pytest.mark.parametrize("n", [4, 7, 12])
def test_improved_twirl_beats_clifford_twirl(n):
    rep = twirl.improved_twirl_gap(n)
    assert abs(rep.gap - 0.5) < 1e-9
    assert rep.effective_gap > rep.reference_gap


def test_cluster_mapping():
    for kind, topo in cluster.CLUSTER_KINDS.items():
        m = cluster.map_cluster_topology(kind, 5)
        assert m.schedule.period[0][0].c_per_qubit == (0.0,) * 5
        ref = markov.chain(topo, 5, 0.0).dense()
        assert np.array_equal(markov.step_matrix(m.schedule).dense(), ref)
    with pytest.raises(UnsupportedKind):
        cluster.map_cluster_topology("hexagonal", 4)


def test_fusion_cost_and_footprint():
    assert cluster.fusion_cost(2, 8, 0.5, 0.5) == 16
    assert cluster.lattice_footprint(8, 10) == (8, 31)
    with pytest.raises(OutOfRange):
        cluster.fusion_cost(1, 1, 0.0, 0.5)


def test_compare_scenarios_ranking():
    ranked = cluster.compare_scenarios([(0.705, 0.2735), (0.98, 0.547)])
    assert [s.p for s in ranked] == [0.98, 0.705]
    assert ranked[1].iterations == 2.0
    assert cluster.compare_scenarios([]) == []

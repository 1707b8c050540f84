import numpy as np
import pytest

from prcircuits import markov, measures, pauli, statevec
from prcircuits.errors import DimensionLimit, OutOfRange
from prcircuits.schedule import make_schedule

HAAR = statevec.LocalGateDistribution("HaarSU2")
HZ = statevec.LocalGateDistribution("HZ")


@pytest.mark.parametrize(
    "dist,c", [(HAAR, 1 / 3), (HZ, 0.0), (statevec.LocalGateDistribution.for_c(0.6), 0.6)]
)
def test_local_gate_parameter(dist, c):
    est, se = statevec.estimate_c(dist, samples=20_000, seed=3)
    assert abs(est - c) <= max(4 * se, 1e-12)
    assert abs(dist.c - c) < 1e-12


def test_sampled_gates_are_unitary(rng):
    for dist in (HAAR, HZ, statevec.LocalGateDistribution("ZXZ", 0.4)):
        U = statevec.sample_local_batch(dist, rng, 50)
        np.testing.assert_allclose(U @ np.conj(np.swapaxes(U, 1, 2)), np.broadcast_to(np.eye(2), U.shape), atol=1e-12)
    with pytest.raises(ValueError):
        statevec.LocalGateDistribution("ZXZ")
    with pytest.raises(OutOfRange):
        statevec.LocalGateDistribution.for_c(1.5)


def test_initial_states():
    n = 5
    for kind, a in (("psi", 0.3), ("ghz", None), ("cluster-chain", None)):
        psi = statevec.prepare_initial(kind, n, a)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert abs(measures.meyer_wallach_q(statevec.prepare_initial("ghz", n)) - 1) < 1e-12
    assert abs(measures.meyer_wallach_q(statevec.prepare_initial("cluster-chain", n)) - 1) < 1e-12
    assert measures.meyer_wallach_q(statevec.prepare_initial("psi", n, 1.0)) < 1e-12
    assert statevec.initial_set("all-computational", 3).shape == (8, 8)
    with pytest.raises(OutOfRange):
        statevec.prepare_initial("psi", n, 2.0)


def test_draw_policies(rng):
    sched = make_schedule("open", 4, 1 / 3)
    col = statevec.draw_circuit(sched, HAAR, "collective", rng, 3)
    assert np.allclose(col.local[:, 0], col.local[:, 3])
    oe = statevec.draw_circuit(sched, HAAR, "odd-even", rng, 3)
    assert np.allclose(oe.local[:, 0], oe.local[:, 2]) and not np.allclose(oe.local[:, 0], oe.local[:, 1])
    ind = statevec.draw_circuit(sched, HAAR, "independent", rng, 3)
    assert not np.allclose(ind.local[:, 0], ind.local[:, 1])


def _digest(st):
    return [a.tobytes() for a in (st.mean_q, st.q_stderr, st.pt_distance, st.sample_q)]


def test_ensemble_seed_reproducibility():
    sched = make_schedule("closed", 4, 1 / 3, 0.7)
    a = statevec.run_ensemble(sched, HAAR, "independent", "computational", 5, 130, seed=4)
    b = statevec.run_ensemble(sched, HAAR, "independent", "computational", 5, 130, seed=4, workers=2)
    c = statevec.run_ensemble(sched, HAAR, "independent", "computational", 5, 130, seed=5)
    assert _digest(a) == _digest(b)
    assert _digest(a) != _digest(c)


@pytest.mark.parametrize("topology,gate", [("open", "CZ"), ("star", "CZ"), ("closed", "XY")])
def test_ensemble_matches_markov(topology, gate):
    n, L = 4, 8
    sched = make_schedule(topology, n, 1 / 3, 0.8, gate)
    st = statevec.run_ensemble(sched, HAAR, "independent", "computational", L, 600, seed=9)
    q = markov.q_trajectory(markov.step_matrix(sched), markov.computational_moments(n), L)
    se = np.where(st.q_stderr > 0, st.q_stderr, 1e-12)
    assert np.all(np.abs(st.mean_q - q) <= 4 * se + 1e-12)


def test_cross_moments_vanish():
    st = statevec.run_ensemble(
        make_schedule("open", 3, 0.0), HZ, "independent", "computational", 2, 2000, seed=2, record_pauli=(0, 2)
    )
    assert statevec.cross_moment_check(st, 2).consistent
    # before any gate the computational state has correlated Z strings
    assert not statevec.cross_moment_check(st, 0).consistent


def test_dimension_limit():
    with pytest.raises(DimensionLimit):
        statevec.run_ensemble(make_schedule("open", 16, 0.0), HZ, iterations=1, samples=1)


def test_zxz_examples():
    rng = np.random.default_rng(0)
    U = statevec.sample_local(statevec.LocalGateDistribution("ZXZ", 0.0), rng)
    assert abs(U[0, 1]) < 1e-15 and abs(U[1, 0]) < 1e-15
    assert abs(statevec.estimate_c(statevec.LocalGateDistribution("ZXZ", np.pi / 2), 10_000)[0]) < 1e-12
    assert abs(statevec.estimate_c(statevec.LocalGateDistribution("ZXZ", np.pi / 4), 10_000)[0] - 0.5) < 1e-12


def test_psi_examples():
    assert abs(measures.meyer_wallach_q(statevec.prepare_initial("psi", 3, 0.0)) - 1) < 1e-12
    plus = statevec.prepare_initial("psi", 3, 1.0)
    np.testing.assert_allclose(plus, np.full(8, 1 / np.sqrt(8)))


def test_zero_iterations_reports_initial_state():
    st = statevec.run_ensemble(make_schedule("open", 4, 0.0), HZ, "independent", "computational", 0, 5, seed=1)
    assert st.mean_q.shape == (1,) and st.mean_q[0] == 0.0


def test_cross_moment_at_start_is_known_constant():
    st = statevec.run_ensemble(
        make_schedule("open", 2, 0.0), HZ, "independent", "computational", 0, 10, seed=1, record_pauli=(0,)
    )
    assert abs(statevec.cross_moment_check(st, 0).max_abs - 2.0**-4) < 1e-15


def test_norm_preserved_n10():
    # meyer_wallach_q rejects any state whose norm drifts by more than 1e-10
    st = statevec.run_ensemble(make_schedule("closed", 10, 1 / 3, 0.8), HAAR, "independent", "computational", 100, 2, seed=5)
    assert np.all(np.isfinite(st.mean_q))


def test_collective_open_chain_is_reversal_symmetric(rng):
    sched = make_schedule("open", 6, 1 / 3)
    edges = set(sched.period[0][1].edges)
    assert {(5 - b, 5 - a) for a, b in edges} == edges
    draw = statevec.draw_circuit(sched, HAAR, "collective", rng, 4)
    np.testing.assert_array_equal(draw.local, draw.local[:, ::-1])


@pytest.mark.parametrize(
    "topology,local,n",
    [("open", "HZ", 6), ("closed", "HaarSU2", 6), ("star", "HaarSU2", 5), ("aa", "HZ", 5)],
)
def test_simulated_rate_matches_markov(topology, local, n):
    dist = statevec.LocalGateDistribution(local)
    sched = make_schedule(topology, n, dist.c)
    M = markov.step_matrix(sched)
    v0 = markov.computational_moments(n)
    st = statevec.run_ensemble(sched, dist, "independent", "computational", 30, 500, seed=7)
    q_inf = pauli.q_from_moments(markov.stationary(M, v0))
    fit = measures.fit_rate(st.iterations, np.abs(st.mean_q - q_inf))
    # compare against the exact decay over the same iterations
    dev = np.abs(markov.q_deviation(M, v0, 30))
    ell = np.arange(fit.window[0], fit.window[1] + 1)
    exact = -np.polyfit(ell, np.log(dev[ell]), 1)[0]
    assert abs(fit.rate / exact - 1) < 0.10

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prcircuits import measures
from prcircuits.errors import NoDecayWindow, NotNormalized, TooFewSamples

from conftest import random_state


def test_meyer_wallach_reference_states():
    n = 4
    prod = np.zeros(2**n, complex)
    prod[5] = 1
    ghz = np.zeros(2**n, complex)
    ghz[[0, -1]] = 1 / np.sqrt(2)
    assert measures.meyer_wallach_q(prod) == 0.0
    assert abs(measures.meyer_wallach_q(ghz) - 1) < 1e-12
    bell_product = np.kron([1, 0, 0, 1], [1, 0, 0, 1]) / 2
    assert abs(measures.meyer_wallach_q(bell_product) - 1) < 1e-12


def test_meyer_wallach_batch_and_errors(rng):
    states = np.stack([random_state(rng, 3) for _ in range(6)]).reshape(2, 3, 8)
    q = measures.meyer_wallach_q(states)
    assert q.shape == (2, 3)
    assert np.isclose(q[1, 2], measures.meyer_wallach_q(states[1, 2]))
    with pytest.raises(NotNormalized):
        measures.meyer_wallach_q(np.ones(4))
    with pytest.raises(ValueError):
        measures.meyer_wallach_q(np.ones(3) / np.sqrt(3))


def test_q_reference_values():
    assert measures.q_haar(8, exact=True) == Fraction(254, 257)
    assert abs(measures.q_haar(8) - 0.988327) < 1e-6
    assert abs(measures.q_cc(8) - 0.988235) < 1e-6
    assert measures.q_cc(4, exact=True) == Fraction(4, 5)


def test_haar_average_q(rng):
    n, S = 4, 4000
    z = rng.normal(size=(S, 2**n)) + 1j * rng.normal(size=(S, 2**n))
    q = measures.meyer_wallach_q(z / np.linalg.norm(z, axis=1, keepdims=True))
    assert abs(q.mean() - measures.q_haar(n)) < 4 * q.std() / np.sqrt(S)


def test_pt_reference_and_distance(rng):
    ref = measures.pt_reference()
    assert abs(ref.sum() - 1) < 1e-15 and len(ref) == measures.PT_BINS + 1
    z = rng.normal(size=(200, 64)) + 1j * rng.normal(size=(200, 64))
    probs = np.abs(z / np.linalg.norm(z, axis=1, keepdims=True)) ** 2
    d_haar = measures.pt_distance(probs)
    basis = np.tile(np.eye(64)[0], (200, 1))
    assert d_haar < 0.05 < measures.pt_distance(basis)
    with pytest.raises(TooFewSamples):
        measures.pt_distance(probs[:10])


def test_pt_histogram_merge():
    a = measures.PTHistogram.from_probabilities(np.full((10, 100), 0.01))
    b = measures.PTHistogram.from_probabilities(np.full((10, 100), 0.01))
    m = a.merge(b)
    assert m.total == 2000 and m.counts[10] == 2000


@given(st.floats(0.05, 2.0), st.floats(-3, 3))
def test_fit_rate_exact_exponential(rate, shift):
    ell = np.arange(40)
    fit = measures.fit_rate(ell, np.exp(shift - rate * ell), floor=0.0)
    assert abs(fit.rate - rate) < 1e-9 * max(1, rate)
    assert fit.ci[0] <= fit.rate <= fit.ci[1]


def test_fit_rate_with_noise_floor(rng):
    ell = np.arange(60)
    y = np.exp(-0.4 * ell) + 1e-4 * (1 + 0.2 * rng.random(60))
    fit = measures.fit_rate(ell, y)
    assert fit.floor > 0 and fit.window[1] < 25
    assert abs(fit.rate - 0.4) < 0.05


def test_fit_rate_flat_series():
    with pytest.raises(NoDecayWindow):
        measures.fit_rate(np.arange(30), np.full(30, 0.01))


def test_q_haar_small_n_and_closed_chain_ordering():
    assert measures.q_haar(2, exact=True) == Fraction(2, 5)
    for n in range(4, 13, 2):
        assert measures.q_cc(n) < measures.q_haar(n)


def test_meyer_wallach_matches_moments_many_states(rng):
    from prcircuits import pauli

    z = rng.normal(size=(1000, 8)) + 1j * rng.normal(size=(1000, 8))
    states = z / np.linalg.norm(z, axis=1, keepdims=True)
    q = measures.meyer_wallach_q(states)
    q_mom = [pauli.q_from_moments(pauli.moments_from_state(s)) for s in states]
    np.testing.assert_allclose(q, q_mom, atol=1e-10)


def test_pt_distance_delta_and_exponential_samples(rng):
    dim = 64
    uniform = np.full((20, dim), 1 / dim)
    ref = measures.pt_reference()
    expected = np.sqrt((1 - ref[10]) ** 2 + np.sum(np.delete(ref, 10) ** 2))
    assert abs(measures.pt_distance(uniform) - expected) < 1e-12
    y = rng.exponential(size=10**6)
    assert measures.pt_distance(y / dim, dim) < 5e-3


@given(st.integers(0, 2**32 - 1))
def test_pt_distance_bounds_and_permutation(seed):
    r = np.random.default_rng(seed)
    probs = r.dirichlet(np.full(32, r.uniform(0.05, 5)), size=40)
    d = measures.pt_distance(probs)
    assert 0 <= d <= np.sqrt(2)
    assert d == measures.pt_distance(r.permutation(probs.ravel()), 32)


def test_fit_rate_on_markov_trajectory():
    from prcircuits import markov

    M = markov.chain("open", 8, 0.0)
    v0 = markov.computational_moments(8)
    dev = markov.q_deviation(M, v0, 120)
    fit = measures.fit_rate(np.arange(121), np.abs(dev))
    assert abs(fit.rate / markov.effective_decay_rate(M, v0).rate - 1) < 0.02

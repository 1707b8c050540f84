from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prcircuits import markov, symmetric
from prcircuits.errors import FitIllConditioned


@pytest.mark.parametrize("n", [3, 5])
@pytest.mark.parametrize("c,p", [(0.0, 1.0), (1 / 3, 0.75), (0.7, 0.2)])
def test_aa_symmetric_is_exact_lumping(n, c, p):
    r = markov.lumpability_check(markov.chain("aa", n, c, p), markov.permutation_partition(n))
    assert r.lumpable
    np.testing.assert_allclose(r.reduced, symmetric.aa_symmetric_matrix(n, c, p).dense(), atol=1e-13)


@pytest.mark.parametrize("n", [3, 5])
def test_star_symmetric_is_exact_lumping(n):
    r = markov.lumpability_check(markov.chain("star", n, 0.2, 0.6), symmetric.star_partition(n))
    assert r.lumpable
    np.testing.assert_allclose(r.reduced, symmetric.star_symmetric_matrix(n, 0.2, 0.2, 0.6).dense(), atol=1e-13)


@given(st.integers(0, 12), st.floats(0, 1))
def test_toggle_probability(k, p):
    t = symmetric.toggle_probability(k, p)
    brute = sum(comb(k, j) * p**j * (1 - p) ** (k - j) for j in range(1, k + 1, 2))
    assert abs(t - brute) < 1e-12


def test_star_heterogeneous_gap_large_n():
    assert abs(symmetric.symmetric_gap(symmetric.star_symmetric_matrix(30, 0.0, 1 / 3, 0.75)) - 0.5) < 1e-9


def test_policy_p():
    assert symmetric.policy_p("one-gate", 5) == 0.1
    assert symmetric.policy_p("n-gates", 5) == 0.5
    assert symmetric.policy_p("n-gates", 2) == 1.0
    assert symmetric.policy_p("fixed", 9, 0.3) == 0.3
    with pytest.raises(ValueError):
        symmetric.policy_p("sometimes", 4)


def test_fit_inverse_recovers_parameters():
    ns = np.arange(8, 40)
    fit = symmetric.fit_inverse(ns, 1.3 / (ns - 1.7))
    assert abs(fit.params["a"] - 1.3) < 1e-10 and abs(fit.params["b"] - 1.7) < 1e-9


def test_fit_exponential_recovers_parameters():
    ns = np.arange(6, 30, 2)
    fit = symmetric.fit_exponential_in_n(ns, 1 - 2.0 ** -(0.9 * 0.4 * ns + 0.3), 0.4)
    assert abs(fit.params["alpha"] - 0.9) < 1e-10 and fit.params["r2"] > 0.999999


def test_fit_saturating_and_degenerate_inputs():
    ns = np.arange(4, 30, 2)
    fit = symmetric.fit_saturating(ns, 0.9 - np.exp(-0.2 * ns), 0.1)
    assert abs(fit.params["a"] - 0.2) < 1e-10
    with pytest.raises(FitIllConditioned):
        symmetric.fit_saturating(ns, np.full(len(ns), 0.9), 0.1)
    with pytest.raises(FitIllConditioned):
        symmetric.fit_inverse([10, 10], [0.1, 0.1])


def test_scaling_study_shapes():
    ns, gaps, fit = symmetric.scaling_study("aa", 0.1, "fixed", range(4, 20, 3), p=0.35)
    assert len(ns) == len(gaps) and fit.model.startswith("(1-c)")
    assert np.all(np.diff(gaps) > 0) and gaps[-1] < 0.9
    with pytest.raises(ValueError):
        symmetric.scaling_study("open", 0.1, "fixed", range(4, 6), p=0.3)

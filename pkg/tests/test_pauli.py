import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prcircuits import markov, measures, pauli
from prcircuits.errors import NotClifford, NotNormalized, NotUnitary

from conftest import random_state


@given(st.lists(st.integers(0, 2), min_size=1, max_size=9))
def test_encode_decode_roundtrip(letters):
    idx = pauli.encode(letters)
    assert pauli.decode(idx, len(letters)) == tuple(letters)
    assert tuple(pauli.digits(len(letters))[idx]) == tuple(letters)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_class_sizes_cover_all_strings(n):
    assert pauli.class_sizes(n).sum() == 4**n


def test_cz_conjugation_images():
    table = pauli.conjugation_table(pauli.CZ)
    assert table.mapping[("X", "I")][0] == ("X", "Z")
    assert table.mapping[("Z", "Z")][0] == ("Z", "Z")
    assert table.mapping[("Y", "Y")][0] == ("X", "X")
    assert table.class_closed
    assert {k: v for k, v in table.reduced_mapping.items()} == pauli.reduced_gate_table("CZ")


def test_xy_is_class_closed_permutation():
    table = pauli.reduced_gate_table("XY")
    assert sorted(table.values()) == sorted(itertools.product(range(3), repeat=2))
    assert table[(pauli.Z, pauli.ZERO)] == (pauli.ZERO, pauli.Z)


def test_hadamard_breaks_xy_merge():
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert not pauli.conjugation_table(H).class_closed


def test_non_clifford_and_non_unitary_rejected():
    with pytest.raises(NotClifford):
        pauli.conjugation_table(np.diag([1, 1, 1, 1j]))
    with pytest.raises(NotUnitary):
        pauli.conjugation_table(np.diag([1, 1, 1, 2.0]))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_computational_moments(n):
    psi = np.zeros(2**n, complex)
    psi[3 % 2**n] = 1
    np.testing.assert_allclose(pauli.moments_from_state(psi).entries, markov.computational_moments(n).entries)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_moments_reproduce_meyer_wallach(rng, n):
    for _ in range(5):
        psi = random_state(rng, n)
        v = pauli.moments_from_state(psi)
        assert np.isclose(v.entries.sum(), 1.0)
        assert np.isclose(pauli.q_from_moments(v), measures.meyer_wallach_q(psi), atol=1e-12)


def test_pauli_expectations_single_qubit():
    psi = np.array([1, 1j]) / np.sqrt(2)  # +y eigenstate
    np.testing.assert_allclose(pauli.pauli_expectations(psi), [1, 0, 0, 1], atol=1e-14)
    with pytest.raises(NotNormalized):
        pauli.pauli_expectations(np.array([1.0, 1.0]))

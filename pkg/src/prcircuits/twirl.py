"""Approximate Clifford twirl built as a star-topology PR chain."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .markov import spectrum
from .symmetric import star_symmetric_matrix

# gap of the three-step twirl of the original construction (literature constant)
CLIFFORD_TWIRL_GAP = 5.0 / 6.0
APPLICATIONS = 3


@dataclass
class TwirlReport:
    n: int
    gap: float
    applications: int
    effective_gap: float
    eigenvalues: np.ndarray
    reference_gap: float = CLIFFORD_TWIRL_GAP


def compose_gap(gap: float, applications: int = APPLICATIONS) -> float:
    """Gap of ``applications`` consecutive uses of a chain with gap ``gap``."""
    return 1.0 - (1.0 - gap) ** applications


def improved_twirl_gap(n: int, c_central: float = 0.0, c_outer: float = 1.0 / 3.0, p: float = 0.75) -> TwirlReport:
    """Star chain with an HZ-type central qubit and Haar outer qubits.

    The returned gap is per application; three applications use as many
    two-qubit gates as one round of the three-step twirl.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rep = spectrum(star_symmetric_matrix(n, c_central, c_outer, p))
    return TwirlReport(n, rep.gap, APPLICATIONS, compose_gap(rep.gap), rep.eigenvalues)

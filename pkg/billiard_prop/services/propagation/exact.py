# billiard_prop/services/propagation/exact.py

"""Exact phase evolution of eigenstate superpositions."""

import cmath

from billiard_prop.models.eigenstates import Superposition


def evolve_superposition(s: Superposition, t: float) -> Superposition:
    """Multiply each coefficient by ``exp(-i E_N t / hbar)``."""
    hbar = s.spec.hbar
    return Superposition(
        tuple((c * cmath.exp(-1j * state.energy * t / hbar), state) for c, state in s.terms)
    )


def fidelity(a: Superposition, b: Superposition) -> float:
    """``|<a|b>|`` for normalised superpositions."""
    return abs(a.inner(b))

import cmath
import math

import numpy as np
import pytest

from billiard_prop.models.eigenstates import EigenState, QuantumNumbers, Superposition
from billiard_prop.models.geometry import BoxSpec, ShapeKind
from billiard_prop.models.grid import GridState
from billiard_prop.services.propagation.grid_propagator import (
    _unique_coordinates,
    aliasing_estimate,
    propagate_grid,
)
from billiard_prop.services.theta.jacobi_theta import ThetaParams
from billiard_prop.utils.exceptions import GeometryError, QuadratureError

SPEC = BoxSpec(m1=1.0, m2=1.5, d=1.0, a=1.2, b=0.8)
EPSILON = 1e-2


def damped_phase(state: EigenState, t: float) -> complex:
    damping = math.exp(-math.pi * EPSILON * (state.qn.N1**2 + state.qn.N2**2))
    return cmath.exp(-1j * state.energy * t / SPEC.hbar) * damping


@pytest.mark.parametrize("shape", list(ShapeKind))
def test_eigenstate_picks_up_its_phase(shape):
    qn = QuantumNumbers(1, 2)
    state = EigenState(shape, qn, SPEC)
    s = Superposition.from_pairs([1.0], [state])
    initial = GridState.from_superposition(s, 65, 65)
    t = 0.3
    params = ThetaParams(epsilon=EPSILON)
    result = propagate_grid(initial, t, SPEC, params, alias_tol=1e-10)
    expected = damped_phase(state, t) * initial.values
    assert np.max(np.abs(result.values - expected)) < 1e-6
    assert result.t == t


def test_superposition_follows_exact_evolution():
    states = [
        EigenState(ShapeKind.SQUARE, QuantumNumbers(n1, n2), SPEC)
        for n1, n2 in [(1, 1), (2, 1), (3, 2)]
    ]
    coefficients = [0.6, 0.3j, -0.5]
    s = Superposition.from_pairs(coefficients, states)
    initial = GridState.from_superposition(s, 65, 65)
    t = 0.21
    result = propagate_grid(initial, t, SPEC, ThetaParams(epsilon=EPSILON))
    expected = sum(
        c * damped_phase(st, t) * GridState.from_superposition(
            Superposition.from_pairs([1.0], [st]), 65, 65
        ).values
        for c, st in zip(coefficients, states, strict=True)
    )
    assert np.max(np.abs(result.values - expected)) < 1e-6


def test_normalize_restores_unit_norm():
    state = EigenState(ShapeKind.TWO_PARTICLE_BOX, QuantumNumbers(2, 3), SPEC)
    s = Superposition.from_pairs([1.0], [state])
    initial = GridState.from_superposition(s, 33, 33)
    damped = propagate_grid(initial, 0.1, SPEC, ThetaParams(epsilon=EPSILON))
    assert damped.norm() < initial.norm()
    rescaled = propagate_grid(
        initial, 0.1, SPEC, ThetaParams(epsilon=EPSILON), normalize=True
    )
    assert rescaled.norm() == pytest.approx(1.0, abs=1e-12)


def test_coarse_lattice_is_rejected():
    state = EigenState(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC)
    s = Superposition.from_pairs([1.0], [state])
    initial = GridState.from_superposition(s, 9, 9)
    params = ThetaParams(epsilon=1e-4)
    assert aliasing_estimate(initial, 1e-4) > 1e-3
    with pytest.raises(QuadratureError):
        propagate_grid(initial, 0.1, SPEC, params, alias_tol=1e-3)


def test_invalid_times_are_rejected():
    state = EigenState(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC)
    s = Superposition.from_pairs([1.0], [state])
    initial = GridState.from_superposition(s, 9, 9)
    with pytest.raises(ValueError):
        propagate_grid(initial, -0.1, SPEC)
    with pytest.raises(ValueError):
        propagate_grid(initial.with_values(initial.values, 0.5), 0.1, SPEC)


def test_grid_state_zeroes_exterior_nodes():
    state = EigenState(ShapeKind.TRIANGLE, QuantumNumbers(1, 2), SPEC)
    grid = GridState.from_function(state.domain, 17, 17, lambda u, v: 1.0 + 0 * u)
    exterior = ~grid.interior_mask()
    assert exterior.any()
    assert np.all(grid.values[exterior] == 0)
    assert grid.norm() == pytest.approx(1.0)
    with pytest.raises(GeometryError):
        GridState(state.domain, 2, 17, np.zeros((2, 17)))


def test_norm_loss_shrinks_with_damping():
    spec = BoxSpec(m1=1.0, m2=2.0, d=1.0)
    states = [
        EigenState(ShapeKind.TWO_PARTICLE_BOX, QuantumNumbers(n1, n2), spec)
        for n1, n2 in [(1, 1), (2, 1)]
    ]
    s = Superposition.from_pairs([0.8, 0.6j], states)
    initial = GridState.from_superposition(s, 129, 129)
    norms = [
        propagate_grid(initial, 0.3, spec, ThetaParams(epsilon=eps), alias_tol=1e-8).norm()
        for eps in (1e-2, 1e-3, 1e-4)
    ]
    assert norms[0] < norms[1] < norms[2] < initial.norm()
    assert initial.norm() - norms[2] < 2e-3


def test_rotated_coordinates_are_merged_relative_to_box_size():
    scale = 1e-13
    nodes = np.array([0.0, 1e-14, 2e-14, 2e-14 * (1 + 1e-15)])
    values, (index,) = _unique_coordinates(scale, nodes)
    assert values.size == 3
    assert list(index) == [0, 1, 2, 2]
    assert np.allclose(values[index], nodes, rtol=1e-12, atol=0.0)

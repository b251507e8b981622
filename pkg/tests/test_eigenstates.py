import math

import numpy as np
import pytest

from billiard_prop.models.eigenstates import (
    EigenState,
    QuantumNumbers,
    Superposition,
    boundary_residual,
    certify_triangle_energy,
    com_boundary_residual,
    energy,
    eval_com_eigen,
    hamiltonian_residual,
    normalization_constant,
    overlap,
    revival_time,
    two_mode_state,
)
from billiard_prop.models.geometry import BoxSpec, ShapeKind, to_com
from billiard_prop.services.propagation.exact import evolve_superposition, fidelity
from billiard_prop.utils.exceptions import EigenstateError
from billiard_prop.utils.quadrature import integrate_polygon

SPEC = BoxSpec(m1=1.0, m2=1.0, d=1.0)
PLANAR = [ShapeKind.SQUARE, ShapeKind.RHOMBUS, ShapeKind.TRIANGLE, ShapeKind.RECTANGLE]


def quantum_numbers(shape, n_max=3):
    pairs = [(n1, n2) for n1 in range(1, n_max + 1) for n2 in range(1, n_max + 1)]
    if shape == ShapeKind.TRIANGLE:
        pairs = [p for p in pairs if p[0] != p[1]]
    return [QuantumNumbers(*p) for p in pairs]


def test_normalization_constants_match_closed_form():
    box = BoxSpec(m1=1.0, m2=2.0, d=1.5)
    square = BoxSpec(m1=1.0, m2=1.0, d=2.0)
    assert normalization_constant(ShapeKind.TWO_PARTICLE_BOX, box) == pytest.approx(
        2.0 / 1.5, rel=1e-10
    )
    assert normalization_constant(ShapeKind.SQUARE, square) == pytest.approx(
        0.5, rel=1e-10
    )
    rect = BoxSpec(m1=1.0, m2=1.0, d=1.0, a=2.0, b=0.5)
    assert normalization_constant(ShapeKind.RECTANGLE, rect) == pytest.approx(
        1.0, rel=1e-10
    )


def test_quantum_numbers_must_be_positive():
    with pytest.raises(EigenstateError):
        QuantumNumbers(0, 1)


def test_triangle_rejects_equal_indices():
    with pytest.raises(EigenstateError):
        EigenState(ShapeKind.TRIANGLE, QuantumNumbers(2, 2), SPEC)


def test_energies():
    assert energy(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC) == pytest.approx(
        math.pi**2
    )
    box = BoxSpec(m1=2.0, m2=1.0, d=1.0)
    expected = math.pi**2 / 2 * (1 / 2.0 + 4 / 1.0)
    assert energy(ShapeKind.TWO_PARTICLE_BOX, QuantumNumbers(1, 2), box) == pytest.approx(
        expected
    )
    triangle = energy(ShapeKind.TRIANGLE, QuantumNumbers(1, 2), SPEC)
    assert triangle == pytest.approx(math.pi**2 * 5 / 2)


@pytest.mark.parametrize("shape", [*PLANAR, ShapeKind.TWO_PARTICLE_BOX])
def test_boundary_vanishing(shape):
    spec = BoxSpec(m1=1.0, m2=2.0, d=1.0, a=1.5, b=0.7)
    for qn in quantum_numbers(shape):
        state = EigenState(shape, qn, spec)
        assert boundary_residual(state, 100) < 1e-12


def test_com_boundary_vanishing():
    spec = BoxSpec(m1=3.0, m2=1.0, d=1.0)
    for qn in quantum_numbers(ShapeKind.TWO_PARTICLE_BOX):
        assert com_boundary_residual(qn, spec, 100) < 1e-12


def test_boundary_residual_needs_samples():
    state = EigenState(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC)
    with pytest.raises(EigenstateError):
        boundary_residual(state, 5)


@pytest.mark.parametrize("masses", [(1.0, 1.0), (2.0, 1.0), (1.0, 5.0)])
def test_com_form_matches_particle_form(masses):
    spec = BoxSpec(m1=masses[0], m2=masses[1], d=1.0)
    rng = np.random.default_rng(7)
    x1, x2 = rng.uniform(0.0, 1.0, size=(2, 1000))
    xc, x = to_com(x1, x2, spec)
    for qn in quantum_numbers(ShapeKind.TWO_PARTICLE_BOX):
        state = EigenState(ShapeKind.TWO_PARTICLE_BOX, qn, spec)
        diff = eval_com_eigen(qn, spec, xc, x) - state.evaluate(x1, x2)
        assert np.max(np.abs(diff)) < 1e-12


@pytest.mark.parametrize("shape", [*PLANAR, ShapeKind.TWO_PARTICLE_BOX])
def test_quadrature_orthonormality(shape):
    spec = BoxSpec(m1=1.0, m2=2.0, d=1.0, a=1.5, b=0.7)
    states = [
        EigenState(shape, qn, spec)
        for qn in quantum_numbers(shape, n_max=4)
        if shape != ShapeKind.TRIANGLE or qn.N1 < qn.N2
    ]
    vertices = states[0].domain.vertices
    for i, a in enumerate(states):
        for b in states[i:]:
            result = integrate_polygon(lambda u, v, a=a, b=b: a.raw(u, v) * b.raw(u, v), vertices)
            expected = 1.0 if a is b else 0.0
            assert abs(result.value - expected) < 1e-8


def test_two_particle_exchange_symmetry():
    spec = BoxSpec(m1=1.0, m2=1.0, d=1.0)
    rng = np.random.default_rng(13)
    x1, x2 = rng.uniform(0.0, 1.0, size=(2, 500))
    for qn in quantum_numbers(ShapeKind.TWO_PARTICLE_BOX):
        state = EigenState(ShapeKind.TWO_PARTICLE_BOX, qn, spec)
        exchanged = EigenState(ShapeKind.TWO_PARTICLE_BOX, qn.swapped(), spec)
        assert np.max(np.abs(state.evaluate(x1, x2) - exchanged.evaluate(x2, x1))) < 1e-14


def test_unit_rectangle_coincides_with_square():
    spec = BoxSpec(m1=1.3, m2=1.0, d=0.8, a=1.0, b=1.0)
    rng = np.random.default_rng(17)
    u, v = rng.uniform(-0.8, 0.8, size=(2, 500))
    for qn in quantum_numbers(ShapeKind.SQUARE):
        square = EigenState(ShapeKind.SQUARE, qn, spec)
        rect = EigenState(ShapeKind.RECTANGLE, qn, spec)
        assert np.max(np.abs(square.evaluate(u, v) - rect.evaluate(u, v))) < 1e-12
        assert rect.energy == pytest.approx(square.energy, rel=1e-14)
        assert hamiltonian_residual(rect, 1e-3 * spec.d) == pytest.approx(
            hamiltonian_residual(square, 1e-3 * spec.d), rel=1e-10
        )


@pytest.mark.parametrize("shape", PLANAR)
def test_stencil_residual_is_second_order(shape):
    qn = QuantumNumbers(1, 2)
    state = EigenState(shape, qn, SPEC)
    coarse = hamiltonian_residual(state, 2e-3)
    fine = hamiltonian_residual(state, 1e-3)
    assert coarse / fine == pytest.approx(4.0, abs=0.5)


def test_stencil_step_is_bounded():
    state = EigenState(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC)
    with pytest.raises(EigenstateError):
        hamiltonian_residual(state, 0.1)


def test_triangle_energy_certification_prefers_half_factor():
    cert = certify_triangle_energy(SPEC)
    assert cert.factor == 1
    assert cert.residual_single < 1e-4
    assert cert.residual_double > 0.4


def test_exterior_points_evaluate_to_zero():
    state = EigenState(ShapeKind.TRIANGLE, QuantumNumbers(1, 2), SPEC)
    values = state.evaluate(np.array([-0.3, 0.3]), np.array([0.1, 0.1]))
    assert values[0] == 0.0
    assert values[1] != 0.0


def test_triangle_swapped_state_is_negated():
    a = EigenState(ShapeKind.TRIANGLE, QuantumNumbers(1, 2), SPEC)
    b = EigenState(ShapeKind.TRIANGLE, QuantumNumbers(2, 1), SPEC)
    assert overlap(a, b) == -1.0
    assert b.evaluate(0.3, 0.1) == pytest.approx(-a.evaluate(0.3, 0.1))


def test_superposition_normalisation():
    qns = quantum_numbers(ShapeKind.SQUARE, 2)
    states = [EigenState(ShapeKind.SQUARE, qn, SPEC) for qn in qns]
    s = Superposition.from_pairs([1.0, 2.0j, -1.0, 0.5], states)
    assert s.norm_squared() == pytest.approx(1 + 4 + 1 + 0.25)
    assert s.normalized().norm_squared() == pytest.approx(1.0)


def test_two_mode_state_is_normalised():
    s = two_mode_state(BoxSpec(m1=2.0, m2=1.0, d=1.0))
    assert s.norm_squared() == pytest.approx(1.0)


@pytest.mark.parametrize("shape", [ShapeKind.SQUARE, ShapeKind.RHOMBUS])
def test_revival(shape):
    spec = BoxSpec(m1=1.3, m2=1.0, d=0.8)
    states = [EigenState(shape, qn, spec) for qn in quantum_numbers(shape)]
    rng = np.random.default_rng(3)
    coefficients = rng.normal(size=len(states)) + 1j * rng.normal(size=len(states))
    initial = Superposition.from_pairs(coefficients, states).normalized()
    t_rev = revival_time(shape, spec)
    assert t_rev == pytest.approx(4 * 1.3 * 0.8**2 / math.pi)
    assert fidelity(initial, evolve_superposition(initial, t_rev)) > 1 - 1e-12
    assert fidelity(initial, evolve_superposition(initial, 0.5 * t_rev)) < 1 - 1e-3


def test_revival_needs_commensurate_masses():
    with pytest.raises(EigenstateError):
        revival_time(ShapeKind.TWO_PARTICLE_BOX, BoxSpec(m1=2.0, m2=1.0, d=1.0))

import math

import numpy as np
import pytest

from billiard_prop.models.eigenstates import (
    EigenState,
    QuantumNumbers,
    Superposition,
    two_mode_state,
)
from billiard_prop.models.geometry import BoxSpec, ShapeKind
from billiard_prop.models.grid import GridState
from billiard_prop.services.observables.covariance import (
    FreeInitialState,
    compare_closed_form,
    covariance_closed_form_example,
    covariance_direct,
    covariance_expanded,
    covariance_free,
    covariance_free_coefficients,
    exact_cosine_coefficients,
    two_mode_covariance_exact,
    two_mode_energy_gap,
)
from billiard_prop.services.observables.moments import MomentSet, com_moments, moments
from billiard_prop.utils.exceptions import ObservableError

BOX = ShapeKind.TWO_PARTICLE_BOX
SPEC = BoxSpec(m1=2.0, m2=1.0, d=1.0)


def box_state(spec, pairs, coefficients):
    states = [EigenState(BOX, QuantumNumbers(*p), spec) for p in pairs]
    return Superposition.from_pairs(coefficients, states).normalized()


def period(spec):
    return 2 * math.pi * spec.hbar / abs(two_mode_energy_gap(spec))


def test_direct_and_expanded_covariance_agree_on_two_mode_state():
    state = two_mode_state(SPEC)
    for t in (0.0, 0.05, 0.13):
        direct = covariance_direct(state, t)
        assert direct == pytest.approx(covariance_expanded(state, t), abs=1e-8)


def test_direct_and_expanded_covariance_agree_on_random_superpositions():
    rng = np.random.default_rng(21)
    for _ in range(5):
        m1, m2 = rng.uniform(0.5, 3.0, size=2)
        spec = BoxSpec(m1=float(m1), m2=float(m2), d=float(rng.uniform(0.5, 2.0)))
        pairs = [tuple(rng.integers(1, 4, size=2)) for _ in range(2)]
        if pairs[0] == pairs[1]:
            pairs[1] = (pairs[1][0], pairs[1][1] % 3 + 1)
        coefficients = rng.normal(size=2) + 1j * rng.normal(size=2)
        state = box_state(spec, pairs, coefficients)
        t = float(rng.uniform(0.0, 1.0))
        assert covariance_direct(state, t) == pytest.approx(
            covariance_expanded(state, t), abs=1e-8 * spec.d**2
        )


def test_exchange_symmetric_equal_mass_state_has_no_covariance():
    spec = BoxSpec(m1=1.0, m2=1.0, d=1.0)
    state = box_state(spec, [(1, 2), (2, 1)], [1.0, 1.0])
    assert abs(covariance_direct(state, 0.2)) < 1e-10


def test_two_mode_covariance_matches_exact_form_and_is_periodic():
    state = two_mode_state(SPEC)
    tau = period(SPEC)
    for t in np.linspace(0.0, tau, 5):
        cov = covariance_direct(state, float(t))
        assert cov == pytest.approx(two_mode_covariance_exact(SPEC, float(t)), abs=1e-8)
        assert cov == pytest.approx(covariance_direct(state, float(t) + tau), abs=1e-8)


def test_printed_closed_form_comparison_report():
    times = np.linspace(0.0, period(SPEC), 20)
    comparison = compare_closed_form(SPEC, times)
    assert len(comparison.samples) == 20
    assert comparison.max_self_consistency < 1e-8
    assert not comparison.agrees(1e-6)
    for fitted, exact in zip(comparison.fitted, comparison.exact, strict=True):
        assert fitted == pytest.approx(exact, abs=1e-8)
    first = comparison.samples[0]
    assert first.cov_printed == pytest.approx(covariance_closed_form_example(SPEC, 0.0))
    assert first.abs_diff == pytest.approx(abs(first.cov - first.cov_printed))


def test_exact_coefficients_scale_with_mass_asymmetry():
    c0, c1, c2 = exact_cosine_coefficients(BoxSpec(m1=3.0, m2=1.0, d=2.0))
    assert c0 == pytest.approx(0.5 * 4 * (1 / 12 - 5 / (16 * math.pi**2)))
    assert c1 == pytest.approx(-0.5 * 4 * 256 / (81 * math.pi**4))
    assert c2 == 0.0


def test_covariance_needs_two_particle_box():
    square = EigenState(ShapeKind.SQUARE, QuantumNumbers(1, 1), SPEC)
    with pytest.raises(ObservableError):
        covariance_direct(Superposition.from_pairs([1.0], [square]), 0.0)


def test_grid_moments_match_quadrature():
    state = box_state(SPEC, [(1, 1), (2, 3)], [1.0, 0.5j])
    grid = GridState.from_superposition(state, 129, 129)
    lattice = moments(grid)
    exact = moments(state, 0.0)
    assert lattice.var_x1 == pytest.approx(exact.var_x1, abs=1e-5)
    assert lattice.cov_x1x2 == pytest.approx(exact.cov_x1x2, abs=1e-5)
    assert com_moments(grid).covariance == pytest.approx(
        covariance_direct(state, 0.0), abs=1e-5
    )


def test_impenetrable_moments_stay_on_the_upper_half():
    state = box_state(SPEC, [(1, 2), (2, 1)], [1.0, -1.0])
    half = com_moments(state, 0.1, impenetrable=True)
    assert half.e_x > 0
    assert half.var_x >= 0


def test_moment_set_rejects_negative_variance():
    with pytest.raises(ObservableError):
        MomentSet(e_x1=1.0, e_x2=0.0, e_x1sq=0.5, e_x2sq=1.0, e_x1x2=0.0)


def test_free_covariance_is_quadratic_in_time():
    init = FreeInitialState(
        spec=SPEC,
        centers=(0.3, -0.2),
        widths=(0.3, 0.2),
        momenta=(1.0, -0.5),
        chirps=(0.4, -0.7),
    )
    times = np.array([0.0, 1.0, 2.0])
    fit = np.polyfit(times, [covariance_free(init, t) for t in times], 2)
    predicted = np.polyval(fit, 5.0)
    assert predicted == pytest.approx(covariance_free(init, 5.0), rel=1e-12)


def test_free_covariance_without_chirp_has_no_linear_term():
    init = FreeInitialState(spec=SPEC, centers=(0.0, 0.0), widths=(0.3, 0.2))
    _, c1, c2 = covariance_free_coefficients(init)
    assert c1 == 0.0
    assert c2 != 0.0


def test_free_covariance_at_zero_matches_big_box_quadrature():
    init = FreeInitialState(
        spec=SPEC, centers=(0.4, -0.1), widths=(0.3, 0.2), chirps=(0.5, 0.0)
    )
    x1 = np.linspace(0.4 - 3.0, 0.4 + 3.0, 601)
    x2 = np.linspace(-0.1 - 2.0, -0.1 + 2.0, 401)
    g1, g2 = np.meshgrid(x1, x2, indexing="ij")
    rho = np.abs(init.wavefunction(g1, g2)) ** 2
    h = (x1[1] - x1[0]) * (x2[1] - x2[0])
    xc = SPEC.frac1 * g1 + SPEC.frac2 * g2
    x = g1 - g2
    total = rho.sum() * h
    mean_xc = (xc * rho).sum() * h / total
    mean_x = (x * rho).sum() * h / total
    cov = ((xc - mean_xc) * (x - mean_x) * rho).sum() * h / total
    assert total == pytest.approx(1.0, abs=1e-10)
    assert cov == pytest.approx(covariance_free(init, 0.0), abs=1e-6)
    assert covariance_free(init, 0.0) == pytest.approx(
        SPEC.frac1 * 0.3**2 - SPEC.frac2 * 0.2**2
    )


def test_ground_state_marginals_match_closed_form():
    spec = BoxSpec(m1=2.0, m2=1.0, d=1.7)
    state = box_state(spec, [(1, 1)], [1.0])
    result = moments(state, 0.0)
    ground_var = spec.d**2 * (1 / 12 - 1 / (2 * math.pi**2))
    assert result.e_x1 == pytest.approx(spec.d / 2, abs=1e-8)
    assert result.e_x2 == pytest.approx(spec.d / 2, abs=1e-8)
    assert result.var_x1 == pytest.approx(ground_var, abs=1e-8)
    assert result.var_x2 == pytest.approx(ground_var, abs=1e-8)


@pytest.mark.parametrize("pair", [(1, 1), (1, 3), (2, 5)])
def test_product_state_has_no_correlation(pair):
    result = moments(box_state(SPEC, [pair], [1.0]), 0.3)
    assert result.e_x1x2 == pytest.approx(result.e_x1 * result.e_x2, abs=1e-8)
    assert abs(result.cov_x1x2) < 1e-8


def test_com_covariance_respects_cauchy_schwarz():
    rng = np.random.default_rng(5)
    pairs = [(1, 1), (1, 2), (2, 1), (2, 3)]
    for t in (0.0, 0.07, 0.4):
        coefficients = rng.normal(size=4) + 1j * rng.normal(size=4)
        result = com_moments(box_state(SPEC, pairs, coefficients), t)
        assert result.var_Xc > 0
        assert result.var_x > 0
        assert abs(result.covariance) <= math.sqrt(result.var_Xc * result.var_x) + 1e-12

import math

import numpy as np
import pytest

from billiard_prop.models.geometry import (
    BoxSpec,
    Point2,
    ShapeDomain,
    ShapeKind,
    polygon_edges,
    reflect_x1,
)
from billiard_prop.services.propagation.greens import (
    GreensEval,
    greens_spectral_oracle,
    greens_theta,
    required_n_cut,
    spectral_tail_bound,
)
from billiard_prop.services.scenarios.greens_runner import sample_interior_points
from billiard_prop.services.theta.jacobi_theta import ThetaParams
from billiard_prop.utils.exceptions import GeometryError, ThetaError

SPEC = BoxSpec(m1=1.0, m2=2.5, d=1.0, a=1.7, b=0.6)
ALL_SHAPES = list(ShapeKind)


@pytest.mark.parametrize("shape", ALL_SHAPES)
def test_theta_form_matches_damped_spectral_sum(shape):
    rng = np.random.default_rng(11)
    domain = ShapeDomain(shape, SPEC)
    targets = sample_interior_points(domain, 100, rng)
    sources = sample_interior_points(domain, 100, rng)
    times = rng.uniform(0.0, 2.0, size=100)
    params = ThetaParams(epsilon=1e-3)
    n_cut = required_n_cut(shape, SPEC, 1e-3, 1e-10)
    assert spectral_tail_bound(shape, SPEC, n_cut, 1e-3) < 1e-10
    for target, source, t in zip(targets, sources, times, strict=True):
        result = GreensEval(shape, source, target, float(t), SPEC, params).evaluate(n_cut)
        assert abs(result.theta - result.oracle) <= 1e-8 * max(abs(result.oracle), 1.0)
        assert result.tail_bound < 1e-10


@pytest.mark.parametrize("shape", ALL_SHAPES)
def test_kernel_is_symmetric_in_its_points(shape):
    rng = np.random.default_rng(5)
    p, p_prime = sample_interior_points(ShapeDomain(shape, SPEC), 2, rng)
    forward = greens_theta(shape, p, p_prime, 0.37, SPEC)
    backward = greens_theta(shape, p_prime, p, 0.37, SPEC)
    assert forward == pytest.approx(backward, rel=1e-12, abs=1e-14)


def test_triangle_kernel_is_odd_under_reflection():
    p = Point2(0.3, 0.2)
    p_prime = Point2(0.5, -0.4)
    params = ThetaParams(epsilon=1e-2)
    g = greens_theta(ShapeKind.TRIANGLE, p, p_prime, 0.37, SPEC, params)
    mirrored_target = greens_theta(
        ShapeKind.TRIANGLE, reflect_x1(p), p_prime, 0.37, SPEC, params
    )
    mirrored_source = greens_theta(
        ShapeKind.TRIANGLE, p, reflect_x1(p_prime), 0.37, SPEC, params
    )
    assert abs(g) > 1e-3
    assert mirrored_target == pytest.approx(-g, rel=1e-12, abs=1e-14)
    assert mirrored_source == pytest.approx(-g, rel=1e-12, abs=1e-14)


def test_exterior_points_are_rejected_by_greens_eval():
    outside = Point2(-0.2, 0.1)
    inside = Point2(0.3, 0.1)
    with pytest.raises(GeometryError):
        GreensEval(ShapeKind.TRIANGLE, outside, inside, 0.5, SPEC)
    with pytest.raises(GeometryError):
        GreensEval(ShapeKind.TRIANGLE, inside, outside, 0.5, SPEC)


@pytest.mark.parametrize("shape", ALL_SHAPES)
def test_kernel_vanishes_on_the_boundary(shape):
    domain = ShapeDomain(shape, SPEC)
    rng = np.random.default_rng(23)
    interior = sample_interior_points(domain, 3, rng)
    params = ThetaParams(epsilon=1e-2)
    s = np.linspace(0.05, 0.95, 4)
    for a, b in polygon_edges(domain.vertices):
        for frac in s:
            edge = Point2(a.u + frac * (b.u - a.u), a.v + frac * (b.v - a.v))
            for p in interior:
                assert abs(greens_theta(shape, edge, p, 0.41, SPEC, params)) < 1e-10
                assert abs(greens_theta(shape, p, edge, 0.41, SPEC, params)) < 1e-10


@pytest.mark.parametrize("shape", ALL_SHAPES)
def test_spectral_oracle_is_hermitian(shape):
    rng = np.random.default_rng(29)
    p, p_prime = sample_interior_points(ShapeDomain(shape, SPEC), 2, rng)
    forward = greens_spectral_oracle(shape, p, p_prime, 0.6, SPEC, 30, 1e-3)
    backward = greens_spectral_oracle(shape, p_prime, p, -0.6, SPEC, 30, 1e-3)
    assert forward == pytest.approx(backward.conjugate(), rel=1e-12, abs=1e-14)


def test_single_term_oracle_at_zero_time():
    spec = BoxSpec(m1=1.0, m2=1.0, d=1.0)
    p = Point2(0.3, -0.6)
    p_prime = Point2(0.7, 0.2)
    amp = 1.0 / spec.d
    expected = amp**2 * (
        math.sin(math.pi * p.u) * math.sin(math.pi * p.v)
        * math.sin(math.pi * p_prime.u) * math.sin(math.pi * p_prime.v)
    )
    value = greens_spectral_oracle(ShapeKind.SQUARE, p, p_prime, 0.0, spec, 1, 0.0)
    assert value == pytest.approx(expected, rel=1e-10)


def test_doubling_the_cut_off_stays_within_tail_bound():
    rng = np.random.default_rng(31)
    p, p_prime = sample_interior_points(ShapeDomain(ShapeKind.SQUARE, SPEC), 2, rng)
    n_cut = 20
    coarse = greens_spectral_oracle(ShapeKind.SQUARE, p, p_prime, 0.3, SPEC, n_cut, 1e-2)
    fine = greens_spectral_oracle(ShapeKind.SQUARE, p, p_prime, 0.3, SPEC, 2 * n_cut, 1e-2)
    assert abs(fine - coarse) <= spectral_tail_bound(ShapeKind.SQUARE, SPEC, n_cut, 1e-2)



def test_undamped_kernel_needs_opt_in():
    params = ThetaParams(epsilon=0.0)
    with pytest.raises(ThetaError):
        greens_theta(
            ShapeKind.SQUARE, Point2(0.1, 0.2), Point2(-0.3, 0.4), 0.5, SPEC, params
        )


def test_required_n_cut_grows_as_damping_shrinks():
    coarse = required_n_cut(ShapeKind.SQUARE, SPEC, 1e-2, 1e-10)
    fine = required_n_cut(ShapeKind.SQUARE, SPEC, 1e-3, 1e-10)
    assert fine > coarse
    with pytest.raises(ValueError):
        required_n_cut(ShapeKind.SQUARE, SPEC, 0.0, 1e-10)

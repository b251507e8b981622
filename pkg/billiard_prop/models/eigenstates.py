# billiard_prop/models/eigenstates.py

"""Closed-form eigenstates of the planar billiards and of the two-particle box."""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from billiard_prop.models.geometry import (
    SQRT2,
    BoxSpec,
    Containment,
    Point2,
    ShapeDomain,
    ShapeKind,
    bounding_box,
    classify_points,
    com_domain,
    polygon_edges,
    signed_distance,
)
from billiard_prop.utils.exceptions import EigenstateError, QuadratureError
from billiard_prop.utils.quadrature import QuadratureConfig, integrate_polygon

logger = logging.getLogger(__name__)

# Certified by certify_triangle_energy: the antisymmetrised rhombus states keep
# the rhombus eigenvalue.
TRIANGLE_ENERGY_FACTOR = 1

NORMALIZATION_MATCH_TOL = 1e-8
RESIDUAL_GRID = 21


@dataclass(frozen=True)
class QuantumNumbers:
    N1: int
    N2: int

    def __post_init__(self):
        if self.N1 < 1 or self.N2 < 1:
            raise EigenstateError(
                f"quantum numbers must be >= 1, got ({self.N1}, {self.N2})"
            )

    def swapped(self) -> "QuantumNumbers":
        return QuantumNumbers(self.N2, self.N1)


def _check_qn(shape: ShapeKind, qn: QuantumNumbers) -> None:
    if shape == ShapeKind.TRIANGLE and qn.N1 == qn.N2:
        raise EigenstateError(
            f"triangle state with N1 = N2 = {qn.N1} vanishes identically"
        )


def _mass(shape: ShapeKind, spec: BoxSpec) -> float:
    return spec.m1


def mode_coordinates(shape: ShapeKind, spec: BoxSpec, u, v):
    """
    Map domain coordinates to the two sine arguments of the shape.

    Returns
    -------
    tuple
        ``(s1, s2, L1, L2)`` such that the modes are ``sin(pi N s_i / L_i)``.
    """
    d = spec.d
    if shape == ShapeKind.RHOMBUS or shape == ShapeKind.TRIANGLE:
        length = SQRT2 * d
        return u + v, u - v, length, length
    if shape == ShapeKind.RECTANGLE:
        return u, v, d * math.sqrt(spec.a), d * math.sqrt(spec.b)
    return u, v, d, d


def _raw(shape: ShapeKind, qn: QuantumNumbers, spec: BoxSpec, u, v):
    """Unnormalised eigenfunction, evaluated without any domain mask."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    s1, s2, l1, l2 = mode_coordinates(shape, spec, u, v)
    a1 = np.sin(math.pi * qn.N1 * s1 / l1)
    b2 = np.sin(math.pi * qn.N2 * s2 / l2)
    if shape == ShapeKind.TRIANGLE:
        a2 = np.sin(math.pi * qn.N2 * s1 / l1)
        b1 = np.sin(math.pi * qn.N1 * s2 / l2)
        return a1 * b2 - a2 * b1
    return a1 * b2


def analytic_normalization(shape: ShapeKind, spec: BoxSpec) -> float:
    """Closed-form amplitude the quadrature result is checked against."""
    d = spec.d
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        return 2.0 / d
    if shape == ShapeKind.RECTANGLE:
        return 1.0 / (d * (spec.a * spec.b) ** 0.25)
    return 1.0 / d


def _default_qn(shape: ShapeKind) -> QuantumNumbers:
    return QuantumNumbers(1, 2) if shape == ShapeKind.TRIANGLE else QuantumNumbers(1, 1)


@lru_cache(maxsize=256)
def normalization_constant(
    shape: ShapeKind,
    spec: BoxSpec,
    qn: QuantumNumbers | None = None,
    quad: QuadratureConfig | None = None,
) -> float:
    """
    Amplitude ``1/sqrt(integral |psi_raw|^2)`` from polygon quadrature.

    Parameters
    ----------
    shape : ShapeKind
        Billiard shape or the two-particle box.
    spec : BoxSpec
        Physical setup.
    qn : QuantumNumbers | None
        State used for the integral; the amplitude does not depend on it.
    quad : QuadratureConfig | None
        Quadrature order and tolerance.

    Raises
    ------
    QuadratureError
        If the quadrature does not converge or disagrees with the closed form.
    """
    qn = qn or _default_qn(shape)
    _check_qn(shape, qn)
    domain = ShapeDomain(shape, spec)
    result = integrate_polygon(
        lambda u, v: _raw(shape, qn, spec, u, v) ** 2, domain.vertices, quad
    )
    amplitude = 1.0 / math.sqrt(result.value)
    expected = analytic_normalization(shape, spec)
    deviation = abs(amplitude - expected) / expected
    if deviation > NORMALIZATION_MATCH_TOL:
        raise QuadratureError(
            f"{shape} normalization {amplitude:.17g} deviates from {expected:.17g}",
            deviation,
        )
    logger.debug(f"{shape} normalization {amplitude:.17g} (estimate {result.error_estimate:.2e})")
    return amplitude


def energy(shape: ShapeKind, qn: QuantumNumbers, spec: BoxSpec) -> float:
    """Eigenvalue with hbar restored; the triangle uses the certified factor."""
    _check_qn(shape, qn)
    scale = spec.hbar**2 * math.pi**2 / (2.0 * spec.d**2)
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        return scale * (qn.N1**2 / spec.m1 + qn.N2**2 / spec.m2)
    m = _mass(shape, spec)
    if shape == ShapeKind.RECTANGLE:
        return scale * (qn.N1**2 / spec.a + qn.N2**2 / spec.b) / m
    base = scale * (qn.N1**2 + qn.N2**2) / m
    if shape == ShapeKind.TRIANGLE:
        return TRIANGLE_ENERGY_FACTOR * base
    return base


@dataclass(frozen=True)
class EigenState:
    shape: ShapeKind
    qn: QuantumNumbers
    spec: BoxSpec
    norm: float = field(init=False)

    def __post_init__(self):
        _check_qn(self.shape, self.qn)
        object.__setattr__(self, "norm", normalization_constant(self.shape, self.spec))

    @property
    def domain(self) -> ShapeDomain:
        return ShapeDomain(self.shape, self.spec)

    @property
    def energy(self) -> float:
        return energy(self.shape, self.qn, self.spec)

    def raw(self, u, v):
        """Normalised closed form, without zeroing outside the domain."""
        return self.norm * _raw(self.shape, self.qn, self.spec, u, v)

    def evaluate(self, u, v):
        """Vectorised values; exterior points give 0."""
        values = self.raw(u, v)
        outside = classify_points(self.domain, u, v) == Containment.EXTERIOR
        return np.where(outside, 0.0, values)


def eval_eigenfunction(state: EigenState, p: Point2) -> float:
    return float(state.evaluate(p.u, p.v))


def eval_com_eigen(qn: QuantumNumbers, spec: BoxSpec, xc, x):
    """
    Two-particle box eigenfunction written in (Xc, x).

    ``A sin(pi N1/d (Xc + m2/M x)) sin(pi N2/d (Xc - m1/M x))`` with
    ``A = 2/d`` from quadrature.
    """
    amp = normalization_constant(ShapeKind.TWO_PARTICLE_BOX, spec)
    k = math.pi / spec.d
    xc = np.asarray(xc, dtype=float)
    x = np.asarray(x, dtype=float)
    return amp * np.sin(k * qn.N1 * (xc + spec.frac2 * x)) * np.sin(
        k * qn.N2 * (xc - spec.frac1 * x)
    )


def _edge_samples(vertices, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    s = np.linspace(0.0, 1.0, n_samples)
    us, vs = [], []
    for p, q in polygon_edges(vertices):
        us.append(p.u + s * (q.u - p.u))
        vs.append(p.v + s * (q.v - p.v))
    return np.concatenate(us), np.concatenate(vs)


def boundary_residual(state: EigenState, n_samples: int = 100) -> float:
    """Max ``|psi|`` over ``n_samples`` points on every boundary edge."""
    if n_samples < 10:
        raise EigenstateError(f"n_samples must be >= 10, got {n_samples}")
    u, v = _edge_samples(state.domain.vertices, n_samples)
    return float(np.max(np.abs(state.raw(u, v))))


def com_boundary_residual(qn: QuantumNumbers, spec: BoxSpec, n_samples: int = 100) -> float:
    """Max ``|psi(Xc, x)|`` on the four lines bounding the confinement quadrilateral."""
    if n_samples < 10:
        raise EigenstateError(f"n_samples must be >= 10, got {n_samples}")
    xc, x = _edge_samples(com_domain(spec).vertices, n_samples)
    return float(np.max(np.abs(eval_com_eigen(qn, spec, xc, x))))


def _stencil_coefficients(shape: ShapeKind, spec: BoxSpec) -> tuple[float, float]:
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        return -(spec.hbar**2) / (2 * spec.m1), -(spec.hbar**2) / (2 * spec.m2)
    c = -(spec.hbar**2) / (2 * _mass(shape, spec))
    return c, c


def _residual_points(state: EigenState, h: float) -> tuple[np.ndarray, np.ndarray]:
    vertices = state.domain.vertices
    umin, umax, vmin, vmax = bounding_box(vertices)
    us = np.linspace(umin, umax, RESIDUAL_GRID)
    vs = np.linspace(vmin, vmax, RESIDUAL_GRID)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    keep = signed_distance(vertices, uu, vv) > 2.0 * h
    return uu[keep], vv[keep]


def hamiltonian_residual(state: EigenState, h: float, energy_value: float | None = None) -> float:
    """
    Relative residual ``||H_h psi - E psi|| / ||E psi||`` of the 5-point stencil.

    Parameters
    ----------
    state : EigenState
        State under test.
    h : float
        Stencil step, below ``d / 100``.
    energy_value : float | None
        Candidate eigenvalue; defaults to ``state.energy``.
    """
    if not 0 < h < state.spec.d / 100:
        raise EigenstateError(f"stencil step h must lie in (0, d/100), got {h}")
    e = state.energy if energy_value is None else energy_value
    u, v = _residual_points(state, h)
    if u.size == 0:
        raise EigenstateError("no interior sample points keep the stencil inside the domain")
    c1, c2 = _stencil_coefficients(state.shape, state.spec)
    f = state.raw(u, v)
    d2u = (state.raw(u + h, v) - 2 * f + state.raw(u - h, v)) / h**2
    d2v = (state.raw(u, v + h) - 2 * f + state.raw(u, v - h)) / h**2
    h_psi = c1 * d2u + c2 * d2v
    return float(np.linalg.norm(h_psi - e * f) / np.linalg.norm(e * f))


@dataclass(frozen=True)
class TriangleCertification:
    factor: int
    residual_single: float
    residual_double: float


def certify_triangle_energy(
    spec: BoxSpec, qn: QuantumNumbers | None = None, h: float | None = None
) -> TriangleCertification:
    """
    Decide between ``pi^2 (N1^2+N2^2)/(2 m d^2)`` and twice that value.

    The candidate with the smaller finite-difference residual wins.
    """
    qn = qn or QuantumNumbers(1, 2)
    h = h or 1e-3 * spec.d
    state = EigenState(ShapeKind.TRIANGLE, qn, spec)
    base = state.energy / TRIANGLE_ENERGY_FACTOR
    single = hamiltonian_residual(state, h, base)
    double = hamiltonian_residual(state, h, 2.0 * base)
    factor = 1 if single <= double else 2
    logger.info(
        f"Triangle energy factor {factor} certified "
        f"(residual x1: {single:.3e}, x2: {double:.3e})"
    )
    return TriangleCertification(factor, single, double)


def overlap(a: EigenState, b: EigenState) -> float:
    """Inner product of two basis states of the same shape."""
    if a.shape != b.shape or a.spec != b.spec:
        raise EigenstateError("overlap needs states of the same shape and spec")
    if a.qn == b.qn:
        return 1.0
    if a.shape == ShapeKind.TRIANGLE and a.qn == b.qn.swapped():
        return -1.0
    return 0.0


@dataclass(frozen=True)
class Superposition:
    terms: tuple[tuple[complex, EigenState], ...]

    def __post_init__(self):
        if not self.terms:
            raise EigenstateError("a superposition needs at least one term")
        first = self.terms[0][1]
        for _, state in self.terms[1:]:
            if state.shape != first.shape or state.spec != first.spec:
                raise EigenstateError("all superposition terms must share shape and spec")

    @classmethod
    def from_pairs(cls, coefficients, states) -> "Superposition":
        return cls(tuple((complex(c), s) for c, s in zip(coefficients, states, strict=True)))

    @property
    def shape(self) -> ShapeKind:
        return self.terms[0][1].shape

    @property
    def spec(self) -> BoxSpec:
        return self.terms[0][1].spec

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def states(self) -> list[EigenState]:
        return [s for _, s in self.terms]

    def inner(self, other: "Superposition") -> complex:
        """``<self|other>``"""
        total = 0j
        for ca, sa in self.terms:
            for cb, sb in other.terms:
                total += ca.conjugate() * cb * overlap(sa, sb)
        return total

    def norm_squared(self) -> float:
        return float(self.inner(self).real)

    def normalized(self) -> "Superposition":
        norm2 = self.norm_squared()
        if norm2 <= 0:
            raise EigenstateError("superposition has zero norm")
        scale = 1.0 / math.sqrt(norm2)
        return Superposition(tuple((c * scale, s) for c, s in self.terms))

    def evaluate(self, u, v):
        values = sum(c * s.evaluate(u, v) for c, s in self.terms)
        return np.asarray(values, dtype=complex)

    def evaluate_com(self, xc, x):
        """Values in (Xc, x); only defined for the two-particle box."""
        if self.shape != ShapeKind.TWO_PARTICLE_BOX:
            raise EigenstateError(f"COM evaluation needs the two-particle box, got {self.shape}")
        values = sum(c * eval_com_eigen(s.qn, s.spec, xc, x) for c, s in self.terms)
        return np.asarray(values, dtype=complex)


def two_mode_state(spec: BoxSpec) -> Superposition:
    """Equal-weight (1,1) + (2,2) two-particle state, ``(psi_11 + psi_22)/sqrt(2)``."""
    states = [
        EigenState(ShapeKind.TWO_PARTICLE_BOX, QuantumNumbers(n, n), spec) for n in (1, 2)
    ]
    return Superposition.from_pairs([1 / SQRT2, 1 / SQRT2], states)


def revival_time(shape: ShapeKind, spec: BoxSpec) -> float:
    """
    Time after which every eigenphase is a multiple of 2 pi.

    Raises
    ------
    EigenstateError
        For rectangles with a != b and two-particle boxes with m1 != m2.
    """
    if shape == ShapeKind.RECTANGLE:
        if spec.a != spec.b:
            raise EigenstateError("rectangle revival needs a = b")
        return 4 * spec.m1 * spec.a * spec.d**2 / (math.pi * spec.hbar)
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        if spec.m1 != spec.m2:
            raise EigenstateError("two-particle revival needs m1 = m2")
        return 4 * spec.m1 * spec.d**2 / (math.pi * spec.hbar)
    factor = TRIANGLE_ENERGY_FACTOR if shape == ShapeKind.TRIANGLE else 1
    return 4 * _mass(shape, spec) * spec.d**2 / (math.pi * spec.hbar * factor)


def mode_table(shape: ShapeKind, spec: BoxSpec, u, v, n_cut: int) -> np.ndarray:
    """
    Normalised eigenfunction values for every ``(N1, N2)`` in ``[1, n_cut]^2``.

    Returns
    -------
    numpy.ndarray
        Shape ``(n_points, n_cut, n_cut)``; for the triangle only entries with
        ``N1 < N2`` are meaningful (the diagonal is zero, the lower triangle is
        the negated upper one).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    s1, s2, l1, l2 = mode_coordinates(shape, spec, u, v)
    n = np.arange(1, n_cut + 1)
    a = np.sin(math.pi * np.outer(s1, n) / l1)
    b = np.sin(math.pi * np.outer(s2, n) / l2)
    table = a[:, :, None] * b[:, None, :]
    if shape == ShapeKind.TRIANGLE:
        table = table - np.swapaxes(table, 1, 2)
    return normalization_constant(shape, spec) * table


def energy_table(shape: ShapeKind, spec: BoxSpec, n_cut: int) -> np.ndarray:
    """Eigenvalues on the same ``(N1, N2)`` grid as :func:`mode_table`."""
    n2 = np.arange(1, n_cut + 1, dtype=float) ** 2
    scale = spec.hbar**2 * math.pi**2 / (2.0 * spec.d**2)
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        return scale * (n2[:, None] / spec.m1 + n2[None, :] / spec.m2)
    m = _mass(shape, spec)
    if shape == ShapeKind.RECTANGLE:
        return scale * (n2[:, None] / spec.a + n2[None, :] / spec.b) / m
    base = scale * (n2[:, None] + n2[None, :]) / m
    return TRIANGLE_ENERGY_FACTOR * base if shape == ShapeKind.TRIANGLE else base

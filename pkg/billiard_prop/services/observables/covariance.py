# billiard_prop/services/observables/covariance.py

"""Covariance of the center-of-mass and relative coordinates."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from billiard_prop.models.eigenstates import QuantumNumbers, energy, two_mode_state
from billiard_prop.models.geometry import BoxSpec, ShapeKind
from billiard_prop.services.observables.moments import (
    State,
    com_moments,
    moments,
    require_two_particle,
    state_spec,
)
from billiard_prop.utils.exceptions import ObservableError
from billiard_prop.utils.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)


def covariance_direct(
    state: State,
    t: float | None = None,
    quad: QuadratureConfig | None = None,
    impenetrable: bool = False,
) -> float:
    """``E(Xc x) - E(Xc) E(x)`` from moments over the COM polygon."""
    return com_moments(state, t, quad, impenetrable).covariance


def covariance_expanded(
    state: State, t: float | None = None, quad: QuadratureConfig | None = None
) -> float:
    """
    Covariance from particle-coordinate moments.

    ``(m1/M) Var(x1) - (m2/M) Var(x2) + ((m2 - m1)/M) Cov(x1, x2)``
    """
    require_two_particle(state)
    spec = state_spec(state)
    m = moments(state, t, quad)
    return spec.frac1 * m.var_x1 - spec.frac2 * m.var_x2 + (spec.frac2 - spec.frac1) * m.cov_x1x2


@dataclass(frozen=True)
class FreeInitialState:
    """
    Product of two Gaussian packets, normalised by construction.

    ``psi_i(x) ~ exp(-(x - c_i)^2 / (4 s_i^2) + i p_i (x - c_i)/hbar + i b_i (x - c_i)^2)``
    with centre ``c_i``, width ``s_i``, mean momentum ``p_i`` and chirp ``b_i``.
    """

    spec: BoxSpec
    centers: tuple[float, float]
    widths: tuple[float, float]
    momenta: tuple[float, float] = (0.0, 0.0)
    chirps: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("centers", "widths", "momenta", "chirps"):
            value = getattr(self, name)
            if len(value) != 2 or not all(math.isfinite(v) for v in value):
                raise ObservableError(f"{name} needs two finite values, got {value}")
            object.__setattr__(self, name, tuple(float(v) for v in value))
        if min(self.widths) <= 0:
            raise ObservableError(f"widths must be > 0, got {self.widths}")

    def phase_space_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Means and symmetrised covariance matrix of ``(x1, x2, p1, p2)``.

        Returns
        -------
        tuple
            ``(mean, sigma)`` with shapes ``(4,)`` and ``(4, 4)``.
        """
        hbar = self.spec.hbar
        mean = np.array([*self.centers, *self.momenta])
        sigma = np.zeros((4, 4))
        for i in range(2):
            s2 = self.widths[i] ** 2
            beta = self.chirps[i]
            sigma[i, i] = s2
            sigma[2 + i, 2 + i] = hbar**2 / (4 * s2) + 4 * hbar**2 * beta**2 * s2
            sigma[i, 2 + i] = sigma[2 + i, i] = 2 * hbar * beta * s2
        return mean, sigma

    def wavefunction(self, x1, x2):
        hbar = self.spec.hbar
        out = np.ones(np.broadcast(np.asarray(x1), np.asarray(x2)).shape, dtype=complex)
        for x, c, s, p, b in zip(
            (x1, x2), self.centers, self.widths, self.momenta, self.chirps, strict=True
        ):
            dx = np.asarray(x, dtype=float) - c
            out = out * (2 * math.pi * s * s) ** -0.25 * np.exp(
                -dx * dx / (4 * s * s) + 1j * p * dx / hbar + 1j * b * dx * dx
            )
        return out


def _free_projections(spec: BoxSpec) -> tuple[np.ndarray, ...]:
    """
    Coefficients of ``Xc(t)`` and ``x(t)`` on ``(x1, x2, p1, p2)``.

    Free motion gives ``Xc + P t / M`` and ``x + p t / mu`` with
    ``P = p1 + p2`` and ``p = (m2 p1 - m1 p2) / M``.
    """
    mu = spec.reduced_mass
    a0 = np.array([spec.frac1, spec.frac2, 0.0, 0.0])
    a1 = np.array([0.0, 0.0, 1.0 / spec.total_mass, 1.0 / spec.total_mass])
    b0 = np.array([1.0, -1.0, 0.0, 0.0])
    b1 = np.array([0.0, 0.0, spec.frac2 / mu, -spec.frac1 / mu])
    return a0, a1, b0, b1


def covariance_free_coefficients(init: FreeInitialState) -> tuple[float, float, float]:
    """``(c0, c1, c2)`` with ``Cov(t) = c0 + c1 t + c2 t^2``."""
    _, sigma = init.phase_space_moments()
    a0, a1, b0, b1 = _free_projections(init.spec)
    c0 = float(a0 @ sigma @ b0)
    c1 = float(a0 @ sigma @ b1 + a1 @ sigma @ b0)
    c2 = float(a1 @ sigma @ b1)
    return c0, c1, c2


def covariance_free(init: FreeInitialState, t: float) -> float:
    c0, c1, c2 = covariance_free_coefficients(init)
    return c0 + c1 * t + c2 * t * t


def two_mode_energy_gap(spec: BoxSpec) -> float:
    """``E_11 - E_22 = -3 hbar^2 pi^2 / (2 d^2 mu)`` of the two-particle box."""
    box = ShapeKind.TWO_PARTICLE_BOX
    return energy(box, QuantumNumbers(1, 1), spec) - energy(box, QuantumNumbers(2, 2), spec)


def _mass_asymmetry(spec: BoxSpec) -> float:
    return (spec.m1 - spec.m2) / spec.total_mass


def exact_cosine_coefficients(spec: BoxSpec) -> tuple[float, float, float]:
    """Coefficients of ``1, cos, cos^2`` of the exact two-mode covariance."""
    scale = _mass_asymmetry(spec) * spec.d**2
    pi2 = math.pi**2
    return (
        scale * (1 / 12 - 5 / (16 * pi2)),
        -scale * 256 / (81 * pi2 * pi2),
        0.0,
    )


def printed_cosine_coefficients(spec: BoxSpec) -> tuple[float, float, float]:
    """Coefficients of ``1, cos, cos^2`` in the printed two-mode closed form."""
    pi2 = math.pi**2
    scale = -_mass_asymmetry(spec) * spec.d**2 / (165888 * pi2 * pi2)
    return (
        scale * (8640 * pi2 - 4608 * pi2 * pi2 + 50625),
        scale * (668288 - 61440 * pi2),
        scale * 102400,
    )


def _cosine(spec: BoxSpec, t: float) -> float:
    return math.cos(two_mode_energy_gap(spec) * t / spec.hbar)


def two_mode_covariance_exact(spec: BoxSpec, t: float) -> float:
    """
    Covariance of ``(psi_11 + psi_22)/sqrt(2)``.

    ``((m1 - m2)/M) d^2 [1/12 - 5/(16 pi^2) - 256/(81 pi^4) cos(dE t / hbar)]``
    """
    c0, c1, _ = exact_cosine_coefficients(spec)
    return c0 + c1 * _cosine(spec, t)


def covariance_closed_form_example(spec: BoxSpec, t: float) -> float:
    """The printed two-mode closed form, evaluated as written."""
    c0, c1, c2 = printed_cosine_coefficients(spec)
    c = _cosine(spec, t)
    return c0 + c1 * c + c2 * c * c


@dataclass(frozen=True)
class ClosedFormSample:
    t: float
    cov: float
    cov_refined: float
    cov_exact: float
    cov_printed: float

    @property
    def abs_diff(self) -> float:
        return abs(self.cov - self.cov_printed)

    @property
    def self_consistency(self) -> float:
        return abs(self.cov - self.cov_refined)

    @property
    def relative_diff(self) -> float:
        scale = max(abs(self.cov), abs(self.cov_printed))
        return self.abs_diff / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class ClosedFormComparison:
    samples: list[ClosedFormSample]
    fitted: tuple[float, float, float]
    printed: tuple[float, float, float]
    exact: tuple[float, float, float]

    @property
    def max_self_consistency(self) -> float:
        return max(s.self_consistency for s in self.samples)

    @property
    def max_relative_diff(self) -> float:
        return max(s.relative_diff for s in self.samples)

    def agrees(self, rel_tol: float = 1e-6) -> bool:
        return self.max_relative_diff <= rel_tol


def fit_cosine_coefficients(
    spec: BoxSpec, times: Sequence[float], covs: Sequence[float]
) -> tuple[float, float, float]:
    """Least-squares fit of ``c0 + c1 cos + c2 cos^2`` to a covariance trace."""
    c = np.array([_cosine(spec, t) for t in times])
    design = np.column_stack([np.ones_like(c), c, c * c])
    coef, *_ = np.linalg.lstsq(design, np.asarray(covs, dtype=float), rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])


def compare_closed_form(
    spec: BoxSpec, times: Sequence[float], quad: QuadratureConfig | None = None
) -> ClosedFormComparison:
    """
    Quadrature covariance of the two-mode state against the printed closed form.

    Each sample is computed at ``quad`` and at twice its order so the
    quadrature result can be checked for self-consistency.
    """
    quad = quad or QuadratureConfig()
    state = two_mode_state(spec)
    samples = []
    for t in times:
        samples.append(
            ClosedFormSample(
                t=float(t),
                cov=covariance_direct(state, t, quad),
                cov_refined=covariance_direct(state, t, quad.doubled()),
                cov_exact=two_mode_covariance_exact(spec, t),
                cov_printed=covariance_closed_form_example(spec, t),
            )
        )
    comparison = ClosedFormComparison(
        samples=samples,
        fitted=fit_cosine_coefficients(spec, times, [s.cov for s in samples]),
        printed=printed_cosine_coefficients(spec),
        exact=exact_cosine_coefficients(spec),
    )
    logger.info(
        f"Two-mode closed form: max relative deviation {comparison.max_relative_diff:.3e}, "
        f"quadrature self-consistency {comparison.max_self_consistency:.3e}"
    )
    return comparison

# billiard_prop/services/observables/moments.py

"""Position moments of two-particle states, in particle and in COM coordinates."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from billiard_prop.models.eigenstates import Superposition
from billiard_prop.models.geometry import ShapeDomain, ShapeKind, com_domain, to_com
from billiard_prop.models.grid import GridState
from billiard_prop.services.propagation.exact import evolve_superposition
from billiard_prop.utils.exceptions import ObservableError
from billiard_prop.utils.quadrature import QuadratureConfig, integrate_polygon

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-12

State = Superposition | GridState


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of ``|Psi(x1, x2)|^2``."""

    e_x1: float
    e_x2: float
    e_x1sq: float
    e_x2sq: float
    e_x1x2: float

    def __post_init__(self):
        scale = max(1.0, abs(self.e_x1sq), abs(self.e_x2sq))
        if self.var_x1 < -CONSISTENCY_TOL * scale or self.var_x2 < -CONSISTENCY_TOL * scale:
            raise ObservableError(f"negative variance in {self}")
        bound = math.sqrt(max(self.var_x1, 0.0) * max(self.var_x2, 0.0))
        if abs(self.e_x1x2) > bound + abs(self.e_x1 * self.e_x2) + CONSISTENCY_TOL * scale:
            raise ObservableError(f"inconsistent mixed moment in {self}")

    @property
    def var_x1(self) -> float:
        return self.e_x1sq - self.e_x1**2

    @property
    def var_x2(self) -> float:
        return self.e_x2sq - self.e_x2**2

    @property
    def cov_x1x2(self) -> float:
        return self.e_x1x2 - self.e_x1 * self.e_x2


@dataclass(frozen=True)
class ComMoments:
    """
    Moments of the density in the (Xc, x) plane. ``quad_error`` is the
    largest relative quadrature error estimate, 0 for lattice states.
    """

    e_Xc: float
    e_x: float
    e_Xcx: float
    e_Xc2: float
    e_x2: float
    quad_error: float = 0.0

    @property
    def var_Xc(self) -> float:
        return self.e_Xc2 - self.e_Xc**2

    @property
    def var_x(self) -> float:
        return self.e_x2 - self.e_x**2

    @property
    def covariance(self) -> float:
        return self.e_Xcx - self.e_Xc * self.e_x


def state_spec(state: State):
    return state.spec if isinstance(state, Superposition) else state.domain.spec


def require_two_particle(state: State) -> None:
    shape = state.shape if isinstance(state, Superposition) else state.domain.kind
    if shape != ShapeKind.TWO_PARTICLE_BOX:
        raise ObservableError(f"COM observables need the two-particle box, got {shape}")


def _polygon_moments(
    density, vertices, quad: QuadratureConfig | None
) -> tuple[np.ndarray, float]:
    """
    ``[int rho, int u rho, int v rho, int u^2 rho, int v^2 rho, int u v rho]``
    and the largest quadrature error estimate among them.
    """
    weights = (
        lambda u, v: 1.0,
        lambda u, v: u,
        lambda u, v: v,
        lambda u, v: u * u,
        lambda u, v: v * v,
        lambda u, v: u * v,
    )
    results = [
        integrate_polygon(lambda u, v, w=w: w(u, v) * density(u, v), vertices, quad)
        for w in weights
    ]
    return np.array([r.value for r in results]), max(r.error_estimate for r in results)


def _lattice_moments(state: GridState, u: np.ndarray, v: np.ndarray, weights: np.ndarray):
    rho = weights * np.abs(state.values) ** 2
    return np.array(
        [
            np.sum(rho),
            np.sum(u * rho),
            np.sum(v * rho),
            np.sum(u * u * rho),
            np.sum(v * v * rho),
            np.sum(u * v * rho),
        ]
    )


def _grid_at(state: GridState, t: float | None) -> GridState:
    if t is not None and t != state.t:
        raise ObservableError(f"grid state is at t={state.t}, moments requested at t={t}")
    return state


def moments(state: State, t: float | None = None, quad: QuadratureConfig | None = None) -> MomentSet:
    """
    Moments of ``x1`` and ``x2`` over the particle-coordinate domain.

    Superpositions are evolved to ``t`` and integrated by Gauss-Legendre
    quadrature; grid states use their own time and the lattice trapezoid rule.
    Raw moments are divided by the total probability.

    Raises
    ------
    QuadratureError
        If a quadrature misses its tolerance.
    """
    if isinstance(state, Superposition):
        evolved = evolve_superposition(state, t or 0.0)
        domain = ShapeDomain(state.shape, state.spec)
        raw, _ = _polygon_moments(
            lambda u, v: np.abs(evolved.evaluate(u, v)) ** 2, domain.vertices, quad
        )
    else:
        grid = _grid_at(state, t)
        uu, vv = grid.mesh()
        raw = _lattice_moments(grid, uu, vv, grid.weights())
    _, e1, e2, e11, e22, e12 = raw / raw[0]
    logger.debug(f"moments: total probability {raw[0]:.15f}")
    return MomentSet(e_x1=e1, e_x2=e2, e_x1sq=e11, e_x2sq=e22, e_x1x2=e12)


def com_moments(
    state: State,
    t: float | None = None,
    quad: QuadratureConfig | None = None,
    impenetrable: bool = False,
) -> ComMoments:
    """
    Moments of ``Xc`` and ``x`` over the confinement polygon.

    With ``impenetrable=True`` only the ``x >= 0`` triangle is kept and the
    moments are conditional on it.
    """
    require_two_particle(state)
    if isinstance(state, Superposition):
        evolved = evolve_superposition(state, t or 0.0)
        polygon = com_domain(state.spec, impenetrable)
        raw, quad_error = _polygon_moments(
            lambda xc, x: np.abs(evolved.evaluate_com(xc, x)) ** 2, polygon.vertices, quad
        )
    else:
        grid = _grid_at(state, t)
        uu, vv = grid.mesh()
        xc, x = to_com(uu, vv, grid.domain.spec)
        # unit Jacobian: lattice weights carry over to (Xc, x)
        weights = grid.weights()
        if impenetrable:
            tol = grid.domain.spec.boundary_tol
            weights = np.where(x > tol, weights, np.where(np.abs(x) <= tol, 0.5 * weights, 0.0))
        raw = _lattice_moments(grid, xc, x, weights)
        quad_error = 0.0
    if raw[0] <= 0:
        raise ObservableError("state has no probability on the requested COM domain")
    _, e_xc, e_x, e_xc2, e_x2, e_xcx = raw / raw[0]
    quad_error = quad_error / raw[0]
    return ComMoments(
        e_Xc=e_xc, e_x=e_x, e_Xcx=e_xcx, e_Xc2=e_xc2, e_x2=e_x2, quad_error=quad_error
    )

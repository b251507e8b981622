# billiard_prop/services/propagation/grid_propagator.py

"""Propagate lattice wavefunctions through the theta_3 kernels."""

import logging
import math

import numpy as np

from billiard_prop.models.eigenstates import mode_coordinates
from billiard_prop.models.geometry import BoxSpec, ShapeKind
from billiard_prop.models.grid import GridState
from billiard_prop.services.propagation.greens import (
    axis_nomes,
    kernel_prefactor,
    wall_matrix,
)
from billiard_prop.services.theta.jacobi_theta import ThetaParams
from billiard_prop.utils.constants import SUBSTEP_INDENT
from billiard_prop.utils.exceptions import QuadratureError

logger = logging.getLogger(__name__)

SEPARABLE_SHAPES = (ShapeKind.SQUARE, ShapeKind.RECTANGLE, ShapeKind.TWO_PARTICLE_BOX)
BLOCK_SIZE = 256
COORD_DECIMALS = 12


def aliasing_estimate(state: GridState, epsilon: float) -> float:
    """
    Damping of the lowest kernel mode the lattice trapezoid rule aliases.

    The sine modes of a product shape alias once their frequency reaches the
    lattice period, ``N ~ 2 L / h``; the checkerboard lattice seen by the
    rotated shapes aliases first at ``N1 = N2 ~ L / h``.
    """
    if epsilon <= 0:
        return math.inf
    shape = state.domain.kind
    spec = state.domain.spec
    h1, h2 = state.spacing
    _, _, l1, l2 = mode_coordinates(shape, spec, 0.0, 0.0)
    if shape in SEPARABLE_SHAPES:
        n_alias = min(2 * l1 / h1, 2 * l2 / h2) - 1
        exponent = n_alias**2
    else:
        n_alias = l1 / max(h1, h2)
        exponent = 2 * n_alias**2
    return math.exp(-math.pi * epsilon * exponent)


def _separable(state: GridState, t: float, spec: BoxSpec, params: ThetaParams):
    shape = state.domain.kind
    a1, a2 = state.axes
    _, _, l1, l2 = mode_coordinates(shape, spec, 0.0, 0.0)
    q1, q2 = axis_nomes(shape, spec, t, params.epsilon)
    w1 = wall_matrix(a1, a1, l1, q1, params)
    w2 = wall_matrix(a2, a2, l2, q2, params)
    weighted = state.weights() * state.values
    return kernel_prefactor(shape, spec) * (w1 @ weighted @ w2.T)


def _unique_coordinates(
    scale: float, *arrays: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Distinct coordinates, compared at ``COORD_DECIMALS`` digits relative to ``scale``."""
    stacked = np.concatenate(arrays)
    keys = np.round(stacked / scale, COORD_DECIMALS)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    values = stacked[first]
    splits = np.cumsum([a.size for a in arrays])[:-1]
    return values, np.split(inverse, splits)


def _rotated(state: GridState, t: float, spec: BoxSpec, params: ThetaParams):
    shape = state.domain.kind
    uu, vv = state.mesh()
    mask = state.interior_mask()
    s1, s2, length, _ = mode_coordinates(shape, spec, uu[mask], vv[mask])
    coords, (i1, i2) = _unique_coordinates(length, s1, s2)
    q, _ = axis_nomes(shape, spec, t, params.epsilon)
    wall = wall_matrix(coords, coords, length, q, params)
    source = (state.weights() * state.values)[mask]

    out = np.zeros(source.shape, dtype=complex)
    triangle = shape == ShapeKind.TRIANGLE
    for start in range(0, source.size, BLOCK_SIZE):
        block = slice(start, start + BLOCK_SIZE)
        kernel = wall[i1[block][:, None], i1[None, :]] * wall[i2[block][:, None], i2[None, :]]
        if triangle:
            kernel -= wall[i1[block][:, None], i2[None, :]] * wall[i2[block][:, None], i1[None, :]]
        out[block] = kernel @ source
    values = np.zeros(state.values.shape, dtype=complex)
    values[mask] = kernel_prefactor(shape, spec) * out
    return values


def propagate_grid(
    initial: GridState,
    t: float,
    spec: BoxSpec,
    params: ThetaParams | None = None,
    normalize: bool = False,
    alias_tol: float | None = None,
) -> GridState:
    """
    ``Psi(p, t) = integral G(p, p', t) Psi(p', 0) dp'`` by the lattice trapezoid rule.

    Parameters
    ----------
    initial : GridState
        State at ``t = 0``.
    t : float
        Target time, ``>= 0``.
    spec : BoxSpec
        Physical setup, must match the grid's domain.
    params : ThetaParams | None
        Theta truncation and damping.
    normalize : bool
        Rescale the result to unit lattice norm; off by default so the damping
        loss stays visible.
    alias_tol : float | None
        Upper limit for :func:`aliasing_estimate`; ``None`` only logs it.

    Raises
    ------
    QuadratureError
        If the lattice is too coarse for the requested damping.
    """
    params = params or ThetaParams()
    if initial.t != 0:
        raise ValueError(f"initial grid state must be at t = 0, got t = {initial.t}")
    if t < 0:
        raise ValueError(f"propagation time must be >= 0, got {t}")
    if initial.domain.spec != spec:
        raise ValueError("grid domain and spec disagree")

    estimate = aliasing_estimate(initial, params.epsilon)
    if alias_tol is not None and estimate > alias_tol:
        raise QuadratureError(
            f"lattice {initial.nx}x{initial.ny} aliases kernel modes at eps={params.epsilon:g}",
            estimate,
        )
    logger.debug(f"{SUBSTEP_INDENT}aliasing estimate {estimate:.3e} at t={t:g}")

    if initial.domain.kind in SEPARABLE_SHAPES:
        values = _separable(initial, t, spec, params)
    else:
        values = _rotated(initial, t, spec, params)
    result = initial.with_values(values, t)
    if normalize:
        result = result.normalized()
    logger.info(f"{SUBSTEP_INDENT}Propagated {initial.domain.kind} grid to t={t:g}, norm={result.norm():.12f}")
    return result

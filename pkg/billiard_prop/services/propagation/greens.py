# billiard_prop/services/propagation/greens.py

"""
Green's functions of the billiards in theta_3 form and as spectral sums.

Every kernel is built from the wall factor

    W(s, s') = theta3(kappa (s - s')) - theta3(kappa (s + s'))
             = 4 sum_{n>=1} q^(n^2) sin(2 n kappa s) sin(2 n kappa s'),

with ``kappa = pi / (2 L)`` for modes ``sin(pi N s / L)``.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from billiard_prop.models.eigenstates import (
    TRIANGLE_ENERGY_FACTOR,
    energy_table,
    mode_coordinates,
    mode_table,
    normalization_constant,
)
from billiard_prop.models.geometry import (
    BoxSpec,
    Containment,
    Point2,
    ShapeDomain,
    ShapeKind,
    contains,
)
from billiard_prop.services.theta.jacobi_theta import (
    Nome,
    ThetaParams,
    nome_from_time,
    theta3,
)
from billiard_prop.utils.exceptions import GeometryError

logger = logging.getLogger(__name__)

N_CUT_LIMIT = 100_000


def axis_nomes(
    shape: ShapeKind, spec: BoxSpec, t: float, epsilon: float
) -> tuple[Nome, Nome]:
    """Nome per sine axis of the shape, each carrying its own mass."""
    d = spec.d
    if shape == ShapeKind.TWO_PARTICLE_BOX:
        return (
            nome_from_time(t, spec.m1, d, spec, 1, epsilon),
            nome_from_time(t, spec.m2, d, spec, 1, epsilon),
        )
    if shape == ShapeKind.RECTANGLE:
        return (
            nome_from_time(t, spec.m1 * spec.a, d, spec, 1, epsilon),
            nome_from_time(t, spec.m1 * spec.b, d, spec, 1, epsilon),
        )
    factor = TRIANGLE_ENERGY_FACTOR if shape == ShapeKind.TRIANGLE else 1
    q = nome_from_time(t, spec.m1, d, spec, factor, epsilon)
    return q, q


def kernel_prefactor(shape: ShapeKind, spec: BoxSpec) -> float:
    """``amplitude^2 / 16`` for the N >= 1 basis."""
    return normalization_constant(shape, spec) ** 2 / 16.0


def wall_matrix(
    s, s_prime, length: float, nome: Nome, params: ThetaParams
) -> np.ndarray:
    """
    Wall factor on the outer product of ``s`` and ``s_prime``.

    Returns
    -------
    numpy.ndarray
        Complex array of shape ``(len(s), len(s_prime))``.
    """
    kappa = math.pi / (2.0 * length)
    s = np.atleast_1d(np.asarray(s, dtype=float))[:, None]
    sp = np.atleast_1d(np.asarray(s_prime, dtype=float))[None, :]
    minus = theta3(kappa * (s - sp), nome, params)
    plus = theta3(kappa * (s + sp), nome, params)
    logger.debug(
        f"wall matrix {s.shape[0]}x{sp.shape[1]}: n_terms={max(minus.n_terms, plus.n_terms)}"
    )
    return np.asarray(minus.value) - np.asarray(plus.value)


def greens_theta(
    shape: ShapeKind,
    p: Point2,
    p_prime: Point2,
    t: float,
    spec: BoxSpec,
    params: ThetaParams | None = None,
) -> complex:
    """
    Theta_3 form of ``G(p, p', t)``.

    Product shapes use ``(A^2/16) W1 W2``; the triangle is the rhombus kernel
    minus its image under ``x1' -> -x1'``, which swaps the rotated coordinates.
    Points are not checked against the domain: outside it the analytic
    continuation is returned, so the triangle kernel changes sign under
    ``x1 -> -x1`` in either argument.

    Raises
    ------
    ThetaError
        If ``epsilon = 0`` without ``allow_undamped``.
    NonConvergentError
        Propagated from theta3 for undamped evaluation.
    """
    params = params or ThetaParams()
    q1, q2 = axis_nomes(shape, spec, t, params.epsilon)
    s1, s2, l1, l2 = mode_coordinates(shape, spec, p.u, p.v)
    r1, r2, _, _ = mode_coordinates(shape, spec, p_prime.u, p_prime.v)
    direct = wall_matrix(s1, r1, l1, q1, params)[0, 0] * wall_matrix(
        s2, r2, l2, q2, params
    )[0, 0]
    if shape == ShapeKind.TRIANGLE:
        image = wall_matrix(s1, r2, l1, q1, params)[0, 0] * wall_matrix(
            s2, r1, l2, q2, params
        )[0, 0]
        direct = direct - image
    return complex(kernel_prefactor(shape, spec) * direct)


def _mode_mask(shape: ShapeKind, n_cut: int) -> np.ndarray:
    if shape == ShapeKind.TRIANGLE:
        return np.triu(np.ones((n_cut, n_cut), dtype=bool), k=1)
    return np.ones((n_cut, n_cut), dtype=bool)


def spectral_weights(
    shape: ShapeKind, spec: BoxSpec, t: float, n_cut: int, epsilon: float
) -> np.ndarray:
    """``exp(-i E t / hbar) exp(-pi eps f (N1^2 + N2^2))`` on the retained modes."""
    n2 = np.arange(1, n_cut + 1, dtype=float) ** 2
    factor = TRIANGLE_ENERGY_FACTOR if shape == ShapeKind.TRIANGLE else 1
    damping = np.exp(-math.pi * epsilon * factor * (n2[:, None] + n2[None, :]))
    phase = np.exp(-1j * energy_table(shape, spec, n_cut) * t / spec.hbar)
    return np.where(_mode_mask(shape, n_cut), damping * phase, 0.0)


def greens_spectral_oracle(
    shape: ShapeKind,
    p: Point2,
    p_prime: Point2,
    t: float,
    spec: BoxSpec,
    n_cut: int,
    epsilon: float,
) -> complex:
    """
    Truncated eigenfunction sum ``sum psi_N(p) psi_N(p') exp(-i E_N t/hbar)``.

    Each term carries the damping the theta side gets from ``epsilon``.
    """
    if n_cut < 1:
        raise ValueError(f"n_cut must be >= 1, got {n_cut}")
    table = mode_table(shape, spec, p.u, p.v, n_cut)[0]
    table_prime = mode_table(shape, spec, p_prime.u, p_prime.v, n_cut)[0]
    weights = spectral_weights(shape, spec, t, n_cut, epsilon)
    return complex(np.sum(table * table_prime * weights))


def _max_mode_product(shape: ShapeKind, spec: BoxSpec) -> float:
    bound = normalization_constant(shape, spec) ** 2
    return 4.0 * bound if shape == ShapeKind.TRIANGLE else bound


def spectral_tail_bound(
    shape: ShapeKind, spec: BoxSpec, n_cut: int, epsilon: float
) -> float:
    """
    Bound on the modes dropped by truncating at ``n_cut``.

    Uses ``|psi_N(p) psi_N(p')| <= C`` and Gaussian-integral majorants of
    ``sum exp(-pi eps N^2)`` over the full and the truncated index ranges.
    """
    if epsilon <= 0:
        return math.inf
    a = math.pi * epsilon
    half_gauss = 0.5 * math.sqrt(math.pi / a)
    full = half_gauss
    tail = half_gauss * math.erfc(n_cut * math.sqrt(a))
    return 2.0 * _max_mode_product(shape, spec) * full * tail


def required_n_cut(
    shape: ShapeKind, spec: BoxSpec, epsilon: float, target: float
) -> int:
    """Smallest ``n_cut`` whose :func:`spectral_tail_bound` is below ``target``."""
    if epsilon <= 0:
        raise ValueError("an undamped spectral sum has no finite cut-off")
    n_cut = 1
    while spectral_tail_bound(shape, spec, n_cut, epsilon) >= target:
        n_cut += 1
        if n_cut > N_CUT_LIMIT:
            raise ValueError(f"no n_cut below {N_CUT_LIMIT} reaches tail bound {target:g}")
    return n_cut


@dataclass(frozen=True)
class GreensComparison:
    theta: complex
    oracle: complex
    residual: float
    n_cut: int
    tail_bound: float


@dataclass(frozen=True)
class GreensEval:
    """
    One kernel evaluation ``G(target, source, t)``.

    Both points must lie in the closed domain of ``shape``.
    """

    shape: ShapeKind
    source: Point2
    target: Point2
    t: float
    spec: BoxSpec
    params: ThetaParams = field(default_factory=ThetaParams)

    def __post_init__(self):
        domain = ShapeDomain(self.shape, self.spec)
        for name in ("source", "target"):
            point = getattr(self, name)
            if contains(domain, point) == Containment.EXTERIOR:
                raise GeometryError(
                    f"{name} {point.as_tuple()} lies outside the {self.shape} domain"
                )

    def theta(self) -> complex:
        return greens_theta(
            self.shape, self.target, self.source, self.t, self.spec, self.params
        )

    def oracle(self, n_cut: int) -> complex:
        return greens_spectral_oracle(
            self.shape,
            self.target,
            self.source,
            self.t,
            self.spec,
            n_cut,
            self.params.epsilon,
        )

    def evaluate(
        self, n_cut: int | None = None, target_tail: float = 1e-10
    ) -> GreensComparison:
        """Theta form against the equally damped oracle, with relative residual."""
        eps = self.params.epsilon
        n_cut = n_cut or required_n_cut(self.shape, self.spec, eps, target_tail)
        theta_value = self.theta()
        oracle_value = self.oracle(n_cut)
        diff = abs(theta_value - oracle_value)
        residual = diff / abs(oracle_value) if oracle_value != 0 else diff
        return GreensComparison(
            theta=theta_value,
            oracle=oracle_value,
            residual=residual,
            n_cut=n_cut,
            tail_bound=spectral_tail_bound(self.shape, self.spec, n_cut, eps),
        )

# billiard_prop/services/theta/jacobi_theta.py

"""
Jacobi theta_3 with truncation control.

``theta3(zeta, q) = 1 + 2 sum_{n>=1} cos(2 n zeta) q^(n^2)``; the nome carries
time through ``q = exp(i pi tau)`` and is damped by ``tau -> tau + i eps``.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from billiard_prop.utils.compat import StrEnum

import numpy as np

from billiard_prop.models.geometry import BoxSpec
from billiard_prop.utils.constants import DEFAULT_EPSILON, DEFAULT_THETA_N_MAX, DEFAULT_THETA_TOL
from billiard_prop.utils.exceptions import NonConvergentError, ThetaError, ThetaOverflowError

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-15
LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class ThetaParams:
    """
    Parameters
    ----------
    n_max : int
        Largest index summed.
    tol : float
        Summation stops once the term majorant drops below this.
    epsilon : float
        Nome damping added to the imaginary part of tau.
    allow_undamped : bool
        Permit ``|q| = 1``; evaluation then fails loudly if it does not converge.
    """

    n_max: int = DEFAULT_THETA_N_MAX
    tol: float = DEFAULT_THETA_TOL
    epsilon: float = DEFAULT_EPSILON
    allow_undamped: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise ThetaError(f"n_max must be >= 1, got {self.n_max}")
        if not self.tol > 0:
            raise ThetaError(f"tol must be > 0, got {self.tol}")
        if not self.epsilon >= 0:
            raise ThetaError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class Nome:
    q: complex

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        if abs(self.q) > 1 + UNIT_CIRCLE_TOL:
            raise ThetaError(f"|q| = {abs(self.q):.17g} exceeds 1")

    @property
    def modulus(self) -> float:
        return min(abs(self.q), 1.0)

    @property
    def on_unit_circle(self) -> bool:
        return abs(abs(self.q) - 1.0) <= UNIT_CIRCLE_TOL


class StopReason(StrEnum):
    TOLERANCE = "tol"
    N_MAX = "n_max"


@dataclass(frozen=True)
class ThetaResult:
    value: complex | np.ndarray
    n_terms: int
    stopped_by: StopReason
    tail_bound: float


def theta3_tail_bound(q: Nome | complex, n: int) -> float:
    """
    Geometric majorant ``2|q|^((n+1)^2) / (1 - |q|^(2n+3))`` of the dropped tail.

    Exact as a bound for real arguments; for complex arguments with bounded
    imaginary part it has to be scaled by ``cosh(2 (n+1) |Im zeta|)``.
    """
    q = q if isinstance(q, Nome) else Nome(q)
    r = abs(q.q)
    if r >= 1:
        raise ThetaError("tail bound needs |q| < 1")
    if r == 0:
        return 0.0
    return 2.0 * r ** ((n + 1) ** 2) / (1.0 - r ** (2 * n + 3))


def _complex_tail_bound(r: float, n: int, y: float) -> float:
    if r == 0:
        return 0.0
    ratio = r ** (2 * n + 3) * math.exp(2 * y)
    if ratio >= 1:
        return math.inf
    head = 2.0 * r ** ((n + 1) ** 2) * math.cosh(2 * (n + 1) * y)
    return head / (1.0 - ratio)


def _log_majorant(n: int, log_r: float, y: float) -> float:
    # log(2 |q|^(n^2) cosh(2 n y)) without overflowing cosh
    x = 2 * n * y
    return n * n * log_r + x + math.log1p(math.exp(-2 * x))


def theta3(zeta, q: Nome | complex, params: ThetaParams | None = None) -> ThetaResult:
    """
    Evaluate theta_3 for scalar or array ``zeta``.

    Parameters
    ----------
    zeta : complex or array_like
        Argument(s); the real part is reduced modulo pi first.
    q : Nome | complex
        Nome with ``|q| <= 1``.
    params : ThetaParams | None
        Truncation control.

    Returns
    -------
    ThetaResult
        Value (scalar for scalar input), number of terms summed, which criterion
        stopped the summation and the tail bound at that point.

    Raises
    ------
    ThetaError
        If ``|q| = 1`` without ``allow_undamped``.
    NonConvergentError
        If undamped terms are still above ``tol`` at ``n_max``.
    ThetaOverflowError
        If ``Im zeta`` makes the terms grow faster than ``|q|^(n^2)`` decays.
    """
    params = params or ThetaParams()
    q = q if isinstance(q, Nome) else Nome(q)
    if q.on_unit_circle and not params.allow_undamped:
        raise ThetaError("|q| = 1 requires allow_undamped=True")

    z = np.asarray(zeta, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    # np.round is symmetric in sign, which keeps theta3(-z) == theta3(z) exact
    r = z - math.pi * np.round(z.real / math.pi)
    y = float(np.max(np.abs(r.imag))) if r.size else 0.0

    total = np.ones_like(r)
    if q.q == 0:
        value = complex(total[0]) if scalar else total
        return ThetaResult(value, 0, StopReason.TOLERANCE, 0.0)

    modulus = q.modulus
    log_q = complex(math.log(modulus), math.atan2(q.q.imag, q.q.real))
    log_tol = math.log(params.tol)
    comp = np.zeros_like(r)
    prev_major = math.inf
    growing = False
    stopped_by = StopReason.N_MAX
    n_terms = 0
    for n in range(1, params.n_max + 1):
        log_major = _log_majorant(n, log_q.real, y)
        if not math.isfinite(log_major) or log_major > LOG_OVERFLOW:
            raise ThetaOverflowError(
                f"theta3 majorant overflows at n={n} (max |Im zeta| = {y:.3e})"
            )
        phase = n * n * log_q
        term = np.exp(phase + 2j * n * r) + np.exp(phase - 2j * n * r)
        # Kahan summation
        adj = term - comp
        new_total = total + adj
        comp = (new_total - total) - adj
        total = new_total
        n_terms = n
        if log_major < log_tol:
            stopped_by = StopReason.TOLERANCE
            break
        growing = log_major > prev_major
        prev_major = log_major

    if stopped_by == StopReason.N_MAX:
        if q.on_unit_circle:
            raise NonConvergentError(
                f"undamped theta3 terms still above tol={params.tol:g} at n_max={params.n_max}"
            )
        if growing:
            raise ThetaOverflowError(
                f"theta3 majorant still growing at n_max={params.n_max} "
                f"(max |Im zeta| = {y:.3e})"
            )

    tail = _complex_tail_bound(modulus, n_terms, y) if not q.on_unit_circle else math.inf
    logger.debug(
        f"theta3: n_terms={n_terms} stopped_by={stopped_by} tail_bound={tail:.3e} |q|={modulus:.6f}"
    )
    value = complex(total[0]) if scalar else total
    return ThetaResult(value, n_terms, stopped_by, tail)


def nome_from_time(
    t: float,
    mass: float,
    d: float,
    spec: BoxSpec,
    factor: int = 1,
    epsilon: float = DEFAULT_EPSILON,
) -> Nome:
    """
    ``tau = -pi hbar t / (2 mass d^2) + i eps`` and ``q = exp(i pi factor tau)``.

    ``|q| = exp(-pi factor eps)``; ``factor = 2`` doubles the phase.
    """
    if factor not in (1, 2):
        raise ThetaError(f"nome factor must be 1 or 2, got {factor}")
    if epsilon < 0:
        raise ThetaError(f"epsilon must be >= 0, got {epsilon}")
    tau = complex(-math.pi * spec.hbar * t / (2.0 * mass * d * d), epsilon)
    return Nome(np.exp(1j * math.pi * factor * tau))


def richardson_epsilon(f: Callable[[float], object], epsilons: Sequence[float]):
    """
    Extrapolate ``f(eps)`` to ``eps = 0``.

    Fits the polynomial of degree ``len(epsilons) - 1`` through the samples and
    evaluates it at zero (Lagrange form).
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 2:
        raise ThetaError("Richardson extrapolation needs at least two damping values")
    if len(set(eps)) != len(eps) or min(eps) <= 0:
        raise ThetaError(f"damping values must be distinct and > 0, got {eps}")
    result = None
    for i, ei in enumerate(eps):
        weight = 1.0
        for j, ej in enumerate(eps):
            if j != i:
                weight *= ej / (ej - ei)
        contribution = weight * np.asarray(f(ei))
        result = contribution if result is None else result + contribution
        logger.debug(f"Richardson sample eps={ei:g} weight={weight:.6g}")
    return result

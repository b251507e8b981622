# billiard_prop/models/errata.py

"""Ledger of printed formulas that the implementation deliberately deviates from."""

import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Erratum:
    key: str
    location: str
    printed: str
    implemented: str


STATIC_ERRATA: tuple[Erratum, ...] = (
    Erratum(
        "triangle-energy",
        "triangle billiard energy",
        "E = pi^2 (N1^2 + N2^2) / (m d^2)",
        "E = pi^2 (N1^2 + N2^2) / (2 m d^2), certified by the finite-difference residual",
    ),
    Erratum(
        "theta-kernel-prefactor",
        "square/rhombus/rectangle Green's functions",
        "A^2/4 with the sum over N in Z",
        "A^2/16 over the physically distinct N >= 1 basis (each state counted once)",
    ),
    Erratum(
        "rhombus-zeta",
        "rhombus Green's function arguments zeta_1..zeta_4",
        "mixed sums such as x1 - x2 - x1' - x2'",
        "pi/(2 sqrt(2) d) times u -/+ u' and v -/+ v' with u = x1 + x2, v = x1 - x2",
    ),
    Erratum(
        "rectangle-xi",
        "rectangle Green's function xi_3, xi_4",
        "pi/(2 sqrt(a) d) (y2 -/+ y2')",
        "pi/(2 sqrt(b) d) (y2 -/+ y2')",
    ),
    Erratum(
        "propagation-prefactor",
        "wave function at time t from the propagator",
        "Psi(t) = i hbar Integral Psi(0) G",
        "Psi(t) = Integral Psi(0) G",
    ),
    Erratum(
        "green-time-dependent-phi",
        "spectral definition of the Green's function",
        "Phi_N(x1, x2, t) inside the sum next to exp(-i E t)",
        "time-independent eigenfunctions Phi_N(x1, x2)",
    ),
    Erratum(
        "covariance-cross-term",
        "covariance in particle coordinates",
        "(m1/M) Var(x1) - (m2/M) Var(x2); zero for equal masses",
        "adds ((m2 - m1)/M) Cov(x1, x2); equal masses need Var(x1) = Var(x2) as well",
    ),
    Erratum(
        "two-mode-weights",
        "two-mode example state",
        "A1 = A2 = 2/d on the normalised (1,1) and (2,2) states",
        "(Psi_11 + Psi_22)/sqrt(2); the printed weights give norm^2 = 2",
    ),
    Erratum(
        "propagation-initial-state",
        "initial state of the two-particle propagation example",
        "1/(sqrt(2) d) (sin sin + sin sin)",
        "sqrt(2)/d (sin sin + sin sin) on [0, d]^2",
    ),
    Erratum(
        "two-particle-propagator",
        "two-particle theta propagator",
        "(1/4d^2)(theta3(Xc) - theta3(x1))(theta3(x) - theta3(x2))",
        "(1/4d^2) W(x1, x1'; q1) W(x2, x2'; q2) with difference/sum arguments",
    ),
)


class ErrataLedger:
    """
    Collects the static deviations plus those observed while running.

    Runtime entries come from numerical certifications (for example the
    triangle energy factor) and from comparisons against printed closed forms.
    """

    def __init__(self, include_static: bool = True):
        self.entries: list[Erratum] = list(STATIC_ERRATA) if include_static else []

    def record(self, key: str, location: str, printed: str, implemented: str) -> Erratum:
        entry = Erratum(key, location, printed, implemented)
        logger.warning(f"Deviation from printed formula [{key}] {location}: {implemented}")
        self.entries.append(entry)
        return entry

    def rows(self) -> list[tuple[str, str, str, str]]:
        return [(e.key, e.location, e.printed, e.implemented) for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

# billiard_prop/cli/config.py

"""
Run configuration: one YAML document holding a flat mapping of dotted keys.

Example::

    spec.m1: 2.0
    spec.m2: 1.0
    state.shape: two-particle-box
    state.quantum_numbers: [[1, 1], [2, 2]]
    time.t_end: 0.5
    time.n_steps: 20
"""

import logging
import math
from dataclasses import dataclass, field
from billiard_prop.utils.compat import StrEnum
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from billiard_prop.models.eigenstates import EigenState, QuantumNumbers, Superposition
from billiard_prop.models.geometry import BoxSpec, ShapeKind
from billiard_prop.services.observables.covariance import FreeInitialState
from billiard_prop.services.theta.jacobi_theta import ThetaParams
from billiard_prop.utils.constants import (
    DEFAULT_EPSILON,
    DEFAULT_GRID_POINTS,
    DEFAULT_QUAD_ORDER,
    DEFAULT_QUAD_TOL,
    DEFAULT_ROTATED_GRID_POINTS,
    DEFAULT_THETA_N_MAX,
    DEFAULT_THETA_TOL,
)
from billiard_prop.utils.exceptions import (
    BilliardError,
    ConfigParseError,
    ConfigValidationError,
)
from billiard_prop.utils.helpers import config_digest
from billiard_prop.utils.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)


class Scenario(StrEnum):
    EIGEN = "eigen"
    EVOLVE = "evolve"
    COVARIANCE = "covariance"
    GREENS_CHECK = "greens-check"
    DOMAIN = "domain"


class CovarianceMode(StrEnum):
    BOUNDED = "bounded"
    FREE = "free"


# key -> (kind, default); kinds are checked by _coerce
CONFIG_KEYS: dict[str, tuple[str, Any]] = {
    "spec.m1": ("float", 1.0),
    "spec.m2": ("float", 1.0),
    "spec.d": ("float", 1.0),
    "spec.hbar": ("float", 1.0),
    "spec.a": ("float", 1.0),
    "spec.b": ("float", 1.0),
    "state.shape": ("str", "square"),
    "state.quantum_numbers": ("pairs", [[1, 1]]),
    "state.coefficients": ("coefficients", None),
    "time.t_start": ("float", 0.0),
    "time.t_end": ("float", 0.0),
    "time.n_steps": ("int", 1),
    "theta.n_max": ("int", DEFAULT_THETA_N_MAX),
    "theta.tol": ("float", DEFAULT_THETA_TOL),
    "theta.epsilon": ("float", DEFAULT_EPSILON),
    "theta.allow_undamped": ("bool", False),
    "theta.richardson": ("floats", []),
    "quadrature.order": ("int", DEFAULT_QUAD_ORDER),
    "quadrature.tol": ("float", DEFAULT_QUAD_TOL),
    "grid.nx": ("int", None),
    "grid.ny": ("int", None),
    "grid.alias_tol": ("float", 1e-3),
    "greens.n_samples": ("int", 100),
    "greens.seed": ("int", 0),
    "greens.n_cut": ("int", 0),
    "greens.tail_target": ("float", 1e-10),
    "domain.kind": ("str", "com"),
    "domain.impenetrable": ("bool", False),
    "eigen.fd_step_rel": ("float", 1e-3),
    "eigen.boundary_samples": ("int", 100),
    "evolve.normalize": ("bool", False),
    "covariance.mode": ("str", CovarianceMode.BOUNDED.value),
    "covariance.impenetrable": ("bool", False),
    "free.centers": ("floats", [0.0, 0.0]),
    "free.widths": ("floats", [1.0, 1.0]),
    "free.momenta": ("floats", [0.0, 0.0]),
    "free.chirps": ("floats", [0.0, 0.0]),
    "output.dir": ("str", "billiard-output"),
}


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    spec: BoxSpec
    shape: ShapeKind
    quantum_numbers: tuple[QuantumNumbers, ...]
    coefficients: tuple[complex, ...]
    t_start: float
    t_end: float
    n_steps: int
    theta: ThetaParams
    quad: QuadratureConfig
    output_dir: Path
    values: dict[str, Any] = field(repr=False)
    digest: str = ""

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def times(self) -> np.ndarray:
        if self.n_steps == 1:
            return np.array([self.t_start])
        return np.linspace(self.t_start, self.t_end, self.n_steps)

    def states(self) -> list[EigenState]:
        return [EigenState(self.shape, qn, self.spec) for qn in self.quantum_numbers]

    def superposition(self) -> Superposition:
        return Superposition.from_pairs(self.coefficients, self.states()).normalized()

    def free_state(self) -> FreeInitialState:
        return FreeInitialState(
            spec=self.spec,
            centers=tuple(self["free.centers"]),
            widths=tuple(self["free.widths"]),
            momenta=tuple(self["free.momenta"]),
            chirps=tuple(self["free.chirps"]),
        )

    def metadata(self) -> dict[str, Any]:
        """Values recorded in the trailing comment line of every output table."""
        return {
            "config_sha256": self.digest,
            "scenario": self.scenario.value,
            "epsilon": self.theta.epsilon,
            "theta_tol": self.theta.tol,
            "quad_order": self.quad.order,
            "quad_tol": self.quad.tol,
        }


def _is_number(value) -> bool:
    if isinstance(value, str):
        # YAML 1.1 reads exponent-only literals such as 1e-3 as strings
        try:
            float(value)
        except ValueError:
            return False
        return True
    return isinstance(value, int | float) and not isinstance(value, bool)


def _coerce(kind: str, key: str, value, line: int):
    """Check a raw YAML value against its declared kind."""

    def fail(expected: str):
        raise ConfigParseError(f"expected {expected}, got {value!r}", line=line, key=key)

    if kind == "float":
        if not _is_number(value):
            fail("a number")
        return float(value)
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            fail("an integer")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            fail("true or false")
        return value
    if kind == "str":
        if not isinstance(value, str):
            fail("a string")
        return value
    if kind == "floats":
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            fail("a list of numbers")
        return [float(v) for v in value]
    if kind == "pairs":
        if not isinstance(value, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(n, int) for n in p)
            for p in value
        ):
            fail("a list of [N1, N2] integer pairs")
        return [list(p) for p in value]
    if kind == "coefficients":
        if value is None:
            return None
        if not isinstance(value, list):
            fail("a list of numbers or [re, im] pairs")
        out = []
        for c in value:
            if _is_number(c):
                out.append(complex(float(c)))
            elif isinstance(c, list) and len(c) == 2 and all(_is_number(x) for x in c):
                out.append(complex(float(c[0]), float(c[1])))
            else:
                fail("a list of numbers or [re, im] pairs")
        return out
    raise ConfigParseError(f"unknown key kind {kind}", line=line, key=key)


def _read_document(text: str) -> dict[str, tuple[Any, int]]:
    """Map each top-level key to ``(value, line)``."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigParseError(f"malformed YAML: {getattr(e, 'problem', e)}", line=line) from e
    if root is None:
        return {}
    if not isinstance(root, yaml.MappingNode):
        raise ConfigParseError("configuration must be a mapping of dotted keys", line=1)

    constructor = yaml.SafeLoader("")
    entries: dict[str, tuple[Any, int]] = {}
    for key_node, value_node in root.value:
        line = key_node.start_mark.line + 1
        key = key_node.value
        if not isinstance(key_node, yaml.ScalarNode):
            raise ConfigParseError("keys must be plain strings", line=line)
        if key in entries:
            raise ConfigParseError("duplicate key", line=line, key=key)
        if isinstance(value_node, yaml.MappingNode):
            raise ConfigParseError(
                "nested mappings are not allowed; use dotted keys", line=line, key=key
            )
        if key not in CONFIG_KEYS:
            raise ConfigParseError("unknown key", line=line, key=key)
        entries[key] = (constructor.construct_object(value_node, deep=True), line)
    return entries


def _validate(scenario: Scenario, values: dict[str, Any]) -> None:
    if values["time.t_start"] < 0:
        raise ConfigValidationError("time grid monotone", "t_start must be >= 0")
    if values["time.t_end"] < values["time.t_start"]:
        raise ConfigValidationError(
            "time grid monotone",
            f"t_end={values['time.t_end']} < t_start={values['time.t_start']}",
        )
    if values["time.n_steps"] < 1:
        raise ConfigValidationError("time grid monotone", "n_steps must be >= 1")
    if values["grid.nx"] < 3 or values["grid.ny"] < 3:
        raise ConfigValidationError("grid size", "grid.nx and grid.ny must be >= 3")
    if values["greens.n_samples"] < 1:
        raise ConfigValidationError("greens samples", "greens.n_samples must be >= 1")
    if values["greens.n_cut"] < 0:
        raise ConfigValidationError("greens cut-off", "greens.n_cut must be >= 0 (0 picks it)")
    if values["greens.tail_target"] <= 0 or values["grid.alias_tol"] <= 0:
        raise ConfigValidationError(
            "tolerances positive", "greens.tail_target and grid.alias_tol must be > 0"
        )
    if values["eigen.boundary_samples"] < 10:
        raise ConfigValidationError(
            "boundary samples", "eigen.boundary_samples must be >= 10"
        )
    if not 0 < values["eigen.fd_step_rel"] < 0.01:
        raise ConfigValidationError(
            "stencil step", "eigen.fd_step_rel must lie in (0, 0.01)"
        )
    ladder = values["theta.richardson"]
    if ladder and (len(ladder) < 2 or len(set(ladder)) != len(ladder) or min(ladder) <= 0):
        raise ConfigValidationError(
            "damping ladder",
            "theta.richardson needs at least two distinct values, all > 0",
        )
    if values["theta.epsilon"] == 0 and not values["theta.allow_undamped"]:
        raise ConfigValidationError(
            "nome damping", "theta.epsilon = 0 needs theta.allow_undamped: true"
        )
    coefficients = values["state.coefficients"]
    if coefficients is not None:
        if len(coefficients) != len(values["state.quantum_numbers"]):
            raise ConfigValidationError(
                "coefficients normalisable",
                "state.coefficients and state.quantum_numbers differ in length",
            )
        if math.fsum(abs(c) ** 2 for c in coefficients) == 0:
            raise ConfigValidationError("coefficients normalisable", "all coefficients are zero")
    if values["covariance.mode"] not in {m.value for m in CovarianceMode}:
        raise ConfigValidationError(
            "covariance mode", f"unknown covariance.mode '{values['covariance.mode']}'"
        )
    kinds = {"com", *(k.value for k in ShapeKind)}
    if values["domain.kind"] not in kinds:
        raise ConfigValidationError("domain kind", f"unknown domain.kind '{values['domain.kind']}'")
    if (
        scenario == Scenario.COVARIANCE
        and values["covariance.mode"] == CovarianceMode.BOUNDED
        and values["state.shape"] != ShapeKind.TWO_PARTICLE_BOX
    ):
        raise ConfigValidationError(
            "covariance shape", "bounded covariance is defined for the two-particle box only"
        )


def parse_config(text: str, scenario: Scenario | str, output_dir: Path | None = None) -> RunConfig:
    """
    Parse and validate a run configuration document.

    Parameters
    ----------
    text : str
        YAML document with dotted keys.
    scenario : Scenario | str
        Subcommand the configuration is run under.
    output_dir : Path | None
        Overrides ``output.dir``.

    Returns
    -------
    RunConfig
        Validated configuration with defaults filled in.

    Raises
    ------
    ConfigParseError
        Malformed YAML, unknown or nested keys, wrongly typed values.
    ConfigValidationError
        A parsed value violates an invariant.
    """
    scenario = Scenario(scenario)
    entries = _read_document(text)
    values: dict[str, Any] = {}
    for key, (kind, default) in CONFIG_KEYS.items():
        if key in entries:
            raw, line = entries[key]
            values[key] = _coerce(kind, key, raw, line)
        else:
            values[key] = default
    rotated = values["state.shape"] in (ShapeKind.RHOMBUS, ShapeKind.TRIANGLE)
    for key in ("grid.nx", "grid.ny"):
        if values[key] is None:
            values[key] = DEFAULT_ROTATED_GRID_POINTS if rotated else DEFAULT_GRID_POINTS
    _validate(scenario, values)

    try:
        spec = BoxSpec(
            m1=values["spec.m1"],
            m2=values["spec.m2"],
            d=values["spec.d"],
            hbar=values["spec.hbar"],
            a=values["spec.a"],
            b=values["spec.b"],
        )
    except BilliardError as e:
        raise ConfigValidationError("box spec", str(e)) from e
    try:
        shape = ShapeKind(values["state.shape"])
    except ValueError as e:
        raise ConfigValidationError("shape", f"unknown state.shape '{values['state.shape']}'") from e
    try:
        qns = tuple(QuantumNumbers(n1, n2) for n1, n2 in values["state.quantum_numbers"])
        if shape == ShapeKind.TRIANGLE and any(q.N1 == q.N2 for q in qns):
            raise ConfigValidationError("quantum numbers", "triangle states need N1 != N2")
    except BilliardError as e:
        if isinstance(e, ConfigValidationError):
            raise
        raise ConfigValidationError("quantum numbers", str(e)) from e
    if not qns:
        raise ConfigValidationError("quantum numbers", "state.quantum_numbers is empty")
    try:
        theta = ThetaParams(
            n_max=values["theta.n_max"],
            tol=values["theta.tol"],
            epsilon=values["theta.epsilon"],
            allow_undamped=values["theta.allow_undamped"],
        )
        quad = QuadratureConfig(order=values["quadrature.order"], tol=values["quadrature.tol"])
    except (BilliardError, ValueError) as e:
        raise ConfigValidationError("numerical parameters", str(e)) from e

    coefficients = values["state.coefficients"] or [1.0 + 0j] * len(qns)
    config = RunConfig(
        scenario=scenario,
        spec=spec,
        shape=shape,
        quantum_numbers=qns,
        coefficients=tuple(complex(c) for c in coefficients),
        t_start=values["time.t_start"],
        t_end=values["time.t_end"],
        n_steps=values["time.n_steps"],
        theta=theta,
        quad=quad,
        output_dir=Path(output_dir) if output_dir is not None else Path(values["output.dir"]),
        values=values,
        digest=config_digest(text),
    )
    logger.debug(f"Parsed configuration for scenario '{scenario}': {config}")
    return config

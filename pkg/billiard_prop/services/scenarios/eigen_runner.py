# billiard_prop/services/scenarios/eigen_runner.py

import logging
from pathlib import Path

from billiard_prop.models.eigenstates import (
    TRIANGLE_ENERGY_FACTOR,
    boundary_residual,
    certify_triangle_energy,
    hamiltonian_residual,
)
from billiard_prop.models.geometry import ShapeKind
from billiard_prop.models.grid import GridState, write_grid_csv
from billiard_prop.services.scenarios.base import ScenarioRunner
from billiard_prop.utils.constants import SUBSTEP_INDENT

logger = logging.getLogger(__name__)


class EigenScenario(ScenarioRunner):
    """
    Tabulate the configured eigenstates and their self-checks.

    Writes one ``eigen_<shape>_<N1>_<N2>.csv`` lattice dump per state and an
    ``energies.csv`` summary with the boundary and stencil residuals.
    """

    name = "eigen"

    def run(self) -> list[Path]:
        cfg = self.config
        h = cfg["eigen.fd_step_rel"] * cfg.spec.d
        logger.info(f"== Eigenstates of the {cfg.shape} billiard ==")

        rows = []
        for state in cfg.states():
            grid = GridState.from_function(
                state.domain, cfg["grid.nx"], cfg["grid.ny"], state.evaluate, normalize=False
            )
            n1, n2 = state.qn.N1, state.qn.N2
            path = write_grid_csv(
                grid,
                self.path(f"eigen_{cfg.shape.value}_{n1}_{n2}.csv"),
                self.writer,
                {"N1": n1, "N2": n2, "energy": state.energy},
            )
            self.outputs.append(path)
            boundary = boundary_residual(state, cfg["eigen.boundary_samples"])
            stencil = hamiltonian_residual(state, h)
            logger.info(
                f"{SUBSTEP_INDENT}({n1},{n2}): E={state.energy:.12g}, "
                f"boundary {boundary:.2e}, stencil {stencil:.2e}"
            )
            rows.append((n1, n2, state.energy, state.norm, boundary, stencil))

        if cfg.shape == ShapeKind.TRIANGLE:
            self.certify_triangle(h)

        self.save_table(
            "energies.csv",
            ["N1", "N2", "energy", "normalization", "boundary_residual", "hamiltonian_residual"],
            rows,
            {"fd_step": h},
        )
        return self.outputs

    def certify_triangle(self, h: float) -> None:
        cert = certify_triangle_energy(self.config.spec, h=h)
        if cert.factor != TRIANGLE_ENERGY_FACTOR:
            logger.error(
                f"Stencil residual prefers energy factor {cert.factor}, "
                f"implementation uses {TRIANGLE_ENERGY_FACTOR}"
            )
        self.ledger.record(
            "triangle-energy-certified",
            "triangle billiard energy",
            "pi^2 (N1^2 + N2^2) / (m d^2)",
            f"factor {cert.factor} of pi^2 (N1^2 + N2^2) / (2 m d^2); "
            f"stencil residual {cert.residual_single:.3e} vs {cert.residual_double:.3e} "
            f"for the doubled value",
        )

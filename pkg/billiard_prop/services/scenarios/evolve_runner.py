# billiard_prop/services/scenarios/evolve_runner.py

import dataclasses
import logging
from pathlib import Path

from billiard_prop.models.grid import GridState, write_grid_csv
from billiard_prop.services.propagation.exact import evolve_superposition
from billiard_prop.services.propagation.grid_propagator import aliasing_estimate, propagate_grid
from billiard_prop.services.scenarios.base import ScenarioRunner
from billiard_prop.services.theta.jacobi_theta import richardson_epsilon
from billiard_prop.utils.constants import SUBSTEP_INDENT

logger = logging.getLogger(__name__)


class EvolveScenario(ScenarioRunner):
    """
    Propagate the configured superposition on a lattice and compare it with
    the exact phase evolution at every requested time.
    """

    name = "evolve"

    def run(self) -> list[Path]:
        cfg = self.config
        nx, ny = cfg["grid.nx"], cfg["grid.ny"]
        superposition = cfg.superposition()
        initial = GridState.from_superposition(superposition, nx, ny)
        logger.info(f"== Propagating a {cfg.shape} state over {cfg.n_steps} time(s) ==")
        tolerances = {
            "alias_estimate": self.alias_estimate(initial),
            "alias_tol": cfg["grid.alias_tol"],
        }

        rows = []
        for k, t in enumerate(cfg.times):
            t = float(t)
            grid = self.propagate(initial, t)
            exact = GridState.from_superposition(
                evolve_superposition(superposition, t), nx, ny, t=t
            )
            exact_overlap = abs(exact.overlap(grid)) / (exact.norm() * grid.norm())
            logger.info(f"{SUBSTEP_INDENT}t={t:g}: |<exact|grid>| = {exact_overlap:.12f}")
            path = write_grid_csv(grid, self.path(f"evolve_{k}.csv"), self.writer, tolerances)
            self.outputs.append(path)
            rows.append((t, grid.norm(), exact_overlap))

        self.save_table("evolve_summary.csv", ["t", "norm", "exact_overlap"], rows, tolerances)
        return self.outputs

    def propagate(self, initial: GridState, t: float) -> GridState:
        cfg = self.config
        options = {"normalize": cfg["evolve.normalize"], "alias_tol": cfg["grid.alias_tol"]}
        if not cfg["theta.richardson"]:
            return propagate_grid(initial, t, cfg.spec, cfg.theta, **options)

        def at(eps: float):
            params = dataclasses.replace(cfg.theta, epsilon=eps)
            return propagate_grid(initial, t, cfg.spec, params, **options).values

        values = richardson_epsilon(at, cfg["theta.richardson"])
        return initial.with_values(values, t)

    def alias_estimate(self, initial: GridState) -> float:
        """Aliasing estimate at the smallest damping the run uses."""
        cfg = self.config
        epsilon = min([cfg.theta.epsilon, *cfg["theta.richardson"]])
        return aliasing_estimate(initial, epsilon)

# billiard_prop/services/scenarios/covariance_runner.py

import logging
import math
from pathlib import Path

from billiard_prop.cli.config import CovarianceMode
from billiard_prop.models.eigenstates import QuantumNumbers
from billiard_prop.services.observables.covariance import (
    ClosedFormComparison,
    compare_closed_form,
    covariance_free,
    covariance_free_coefficients,
)
from billiard_prop.services.observables.moments import com_moments
from billiard_prop.services.scenarios.base import ScenarioRunner
from billiard_prop.utils.constants import SUBSTEP_INDENT
from billiard_prop.utils.helpers import format_float, render_template

logger = logging.getLogger(__name__)

COEFFICIENT_NAMES = ("constant", "cos", "cos^2")
COEFFICIENT_MATCH_TOL = 1e-6


class CovarianceScenario(ScenarioRunner):
    """
    Covariance of ``Xc`` and ``x`` over the configured time grid.

    The equal-weight (1,1) + (2,2) state additionally gets the printed closed
    form column and a comparison report.
    """

    name = "covariance"

    def run(self) -> list[Path]:
        cfg = self.config
        if cfg["covariance.mode"] == CovarianceMode.FREE:
            return self.run_free()
        if self.is_two_mode() and not cfg["covariance.impenetrable"]:
            return self.run_two_mode()

        logger.info("== Covariance of the confined state ==")
        state = cfg.superposition()
        impenetrable = cfg["covariance.impenetrable"]
        samples = [
            (float(t), com_moments(state, float(t), cfg.quad, impenetrable)) for t in cfg.times
        ]
        rows = [(t, m.covariance) for t, m in samples]
        quad_error = max(m.quad_error for _, m in samples)
        self.save_table(
            "covariance.csv",
            ["t", "cov"],
            rows,
            {"impenetrable": impenetrable, "quad_error": quad_error},
        )
        return self.outputs

    def is_two_mode(self) -> bool:
        cfg = self.config
        if cfg.quantum_numbers != (QuantumNumbers(1, 1), QuantumNumbers(2, 2)):
            return False
        c1, c2 = cfg.coefficients
        return math.isclose(c1.real, c2.real) and c1.imag == c2.imag == 0

    def run_free(self) -> list[Path]:
        init = self.config.free_state()
        c0, c1, c2 = covariance_free_coefficients(init)
        logger.info(f"== Free covariance: {c0:.6g} + {c1:.6g} t + {c2:.6g} t^2 ==")
        rows = [(float(t), covariance_free(init, float(t))) for t in self.config.times]
        self.save_table("covariance.csv", ["t", "cov"], rows, {"c0": c0, "c1": c1, "c2": c2})
        return self.outputs

    def run_two_mode(self) -> list[Path]:
        cfg = self.config
        logger.info("== Covariance of the two-mode state against the printed closed form ==")
        comparison = compare_closed_form(cfg.spec, [float(t) for t in cfg.times], cfg.quad)
        rows = [(s.t, s.cov, s.cov_printed, s.abs_diff) for s in comparison.samples]
        self.save_table(
            "covariance.csv",
            ["t", "cov", "cov_printed_closed_form", "abs_diff"],
            rows,
            {
                "max_relative_diff": comparison.max_relative_diff,
                "self_consistency": comparison.max_self_consistency,
            },
        )
        self.record_coefficients(comparison)
        report = render_template(
            "covariance_report.j2",
            {
                "spec": cfg.spec,
                "comparison": comparison,
                "coefficient_names": COEFFICIENT_NAMES,
                "agrees": comparison.agrees(COEFFICIENT_MATCH_TOL),
                "rel_tol": COEFFICIENT_MATCH_TOL,
                "digest": cfg.digest,
            },
        )
        self.outputs.append(self.writer.save_text(self.path("covariance_report.txt"), report))
        return self.outputs

    def record_coefficients(self, comparison: ClosedFormComparison) -> None:
        scale = max(abs(c) for c in comparison.exact) or 1.0
        for name, printed, fitted in zip(
            COEFFICIENT_NAMES, comparison.printed, comparison.fitted, strict=True
        ):
            if abs(printed - fitted) <= COEFFICIENT_MATCH_TOL * scale:
                logger.debug(f"{SUBSTEP_INDENT}{name} coefficient matches")
                continue
            self.ledger.record(
                f"two-mode-covariance-{name.replace('^', '')}",
                f"two-mode covariance closed form, {name} coefficient",
                format_float(printed),
                format_float(fitted),
            )

# billiard_prop/services/scenarios/greens_runner.py

import logging
from pathlib import Path

import numpy as np

from billiard_prop.models.geometry import (
    Containment,
    Point2,
    ShapeDomain,
    bounding_box,
    classify_points,
)
from billiard_prop.services.propagation.greens import GreensEval
from billiard_prop.services.scenarios.base import ScenarioRunner

logger = logging.getLogger(__name__)


def sample_interior_points(
    domain: ShapeDomain, n: int, rng: np.random.Generator
) -> list[Point2]:
    """Uniform interior points of ``domain`` by rejection from its bounding box."""
    umin, umax, vmin, vmax = bounding_box(domain.vertices)
    points: list[Point2] = []
    while len(points) < n:
        u = rng.uniform(umin, umax, size=2 * n)
        v = rng.uniform(vmin, vmax, size=2 * n)
        inside = classify_points(domain, u, v) == Containment.INTERIOR
        points.extend(Point2(float(a), float(b)) for a, b in zip(u[inside], v[inside]))
    return points[:n]


class GreensCheckScenario(ScenarioRunner):
    """
    Compare the theta form of the kernel with the damped spectral sum at
    seeded random interior point pairs and times.
    """

    name = "greens-check"

    def run(self) -> list[Path]:
        cfg = self.config
        n = cfg["greens.n_samples"]
        rng = np.random.default_rng(cfg["greens.seed"])
        domain = ShapeDomain(cfg.shape, cfg.spec)
        targets = sample_interior_points(domain, n, rng)
        sources = sample_interior_points(domain, n, rng)
        times = rng.uniform(cfg.t_start, cfg.t_end, size=n)
        n_cut = cfg["greens.n_cut"] or None
        logger.info(f"== Checking the {cfg.shape} kernel at {n} random point pairs ==")

        rows = []
        worst = 0.0
        tail = 0.0
        for target, source, t in zip(targets, sources, times, strict=True):
            result = GreensEval(cfg.shape, source, target, float(t), cfg.spec, cfg.theta).evaluate(
                n_cut, cfg["greens.tail_target"]
            )
            worst = max(worst, result.residual)
            tail = max(tail, result.tail_bound)
            rows.append(
                (
                    target.u,
                    target.v,
                    source.u,
                    source.v,
                    float(t),
                    result.theta.real,
                    result.theta.imag,
                    result.oracle.real,
                    result.oracle.imag,
                    result.residual,
                )
            )
        logger.info(f"Max relative residual {worst:.3e}, oracle tail bound {tail:.3e}")
        self.save_table(
            "greens_check.csv",
            ["x1", "x2", "x1p", "x2p", "t", "theta_re", "theta_im", "oracle_re", "oracle_im", "residual"],
            rows,
            {"max_residual": worst, "tail_bound": tail},
        )
        return self.outputs

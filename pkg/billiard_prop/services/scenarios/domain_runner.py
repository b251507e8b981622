# billiard_prop/services/scenarios/domain_runner.py

import logging
from pathlib import Path

from billiard_prop.models.geometry import ShapeDomain, ShapeKind, com_domain, polygon_area
from billiard_prop.services.scenarios.base import ScenarioRunner

logger = logging.getLogger(__name__)


class DomainScenario(ScenarioRunner):
    """Vertex table of the confinement polygon, in COM or particle coordinates."""

    name = "domain"

    def run(self) -> list[Path]:
        cfg = self.config
        kind = cfg["domain.kind"]
        if kind == "com":
            domain = com_domain(cfg.spec, cfg["domain.impenetrable"])
            header = ["Xc", "x"]
        else:
            domain = ShapeDomain(ShapeKind(kind), cfg.spec)
            header = ["x1", "x2"]
        vertices = domain.vertices
        area = polygon_area(vertices)
        logger.info(f"== {kind} domain: {len(vertices)} vertices, area {area:.12g} ==")
        self.save_table(
            "domain.csv",
            header,
            [p.as_tuple() for p in vertices],
            {"area": area, "boundary_tol": cfg.spec.boundary_tol},
        )
        return self.outputs

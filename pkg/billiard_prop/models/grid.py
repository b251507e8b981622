# billiard_prop/models/grid.py

"""Wavefunctions sampled on a regular lattice over a shape's bounding box."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from billiard_prop.models.eigenstates import Superposition
from billiard_prop.models.geometry import Containment, ShapeDomain, bounding_box, classify_points
from billiard_prop.utils.csv_writer import CsvTableWriter
from billiard_prop.utils.exceptions import GeometryError

logger = logging.getLogger(__name__)

MIN_NODES = 3


@dataclass(frozen=True)
class GridState:
    """
    Complex samples ``values[i, j]`` at ``(axis1[i], axis2[j])``.

    Nodes on the boundary or outside the domain always hold 0.
    """

    domain: ShapeDomain
    nx: int
    ny: int
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.nx < MIN_NODES or self.ny < MIN_NODES:
            raise GeometryError(f"grid needs at least {MIN_NODES} nodes per axis")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.nx, self.ny):
            raise GeometryError(
                f"grid values have shape {values.shape}, expected {(self.nx, self.ny)}"
            )
        values = np.where(self.interior_mask(), values, 0.0)
        object.__setattr__(self, "values", values)

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return lattice_axes(self.domain, self.nx, self.ny)

    @property
    def spacing(self) -> tuple[float, float]:
        a1, a2 = self.axes
        return float(a1[1] - a1[0]), float(a2[1] - a2[0])

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        a1, a2 = self.axes
        return np.meshgrid(a1, a2, indexing="ij")

    def interior_mask(self) -> np.ndarray:
        uu, vv = np.meshgrid(*lattice_axes(self.domain, self.nx, self.ny), indexing="ij")
        return classify_points(self.domain, uu, vv) == Containment.INTERIOR

    def weights(self) -> np.ndarray:
        """Tensor trapezoid weights over the bounding box."""
        h1, h2 = self.spacing
        return np.outer(_trapezoid_1d(self.nx) * h1, _trapezoid_1d(self.ny) * h2)

    def integrate(self, integrand: np.ndarray) -> complex:
        return complex(np.sum(self.weights() * integrand))

    def norm(self) -> float:
        return math.sqrt(self.integrate(np.abs(self.values) ** 2).real)

    def overlap(self, other: "GridState") -> complex:
        """``<self|other>`` by the lattice trapezoid rule."""
        if other.domain != self.domain or (other.nx, other.ny) != (self.nx, self.ny):
            raise GeometryError("overlap needs grids on the same lattice")
        return self.integrate(np.conj(self.values) * other.values)

    def normalized(self) -> "GridState":
        n = self.norm()
        if n == 0:
            raise GeometryError("cannot normalize a zero grid state")
        return replace(self, values=self.values / n)

    def with_values(self, values: np.ndarray, t: float) -> "GridState":
        return replace(self, values=values, t=t)

    @classmethod
    def from_function(
        cls,
        domain: ShapeDomain,
        nx: int,
        ny: int,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        normalize: bool = True,
        t: float = 0.0,
    ) -> "GridState":
        a1, a2 = lattice_axes(domain, nx, ny)
        uu, vv = np.meshgrid(a1, a2, indexing="ij")
        state = cls(domain, nx, ny, fn(uu, vv), t)
        return state.normalized() if normalize else state

    @classmethod
    def from_superposition(cls, s: Superposition, nx: int, ny: int, t: float = 0.0) -> "GridState":
        """Sample a superposition exactly; no renormalisation on the lattice."""
        domain = ShapeDomain(s.shape, s.spec)
        return cls.from_function(domain, nx, ny, s.evaluate, normalize=False, t=t)


def _trapezoid_1d(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def lattice_axes(domain: ShapeDomain, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    umin, umax, vmin, vmax = bounding_box(domain.vertices)
    return np.linspace(umin, umax, nx), np.linspace(vmin, vmax, ny)


def write_grid_csv(
    state: GridState, output_file: Path, writer: CsvTableWriter, extra_metadata=None
) -> Path:
    """Row-major dump with header ``x1,x2,re,im``."""
    uu, vv = state.mesh()
    header = ["x1", "x2", "re", "im"]
    rows = zip(
        uu.ravel(), vv.ravel(), state.values.real.ravel(), state.values.imag.ravel(), strict=True
    )
    metadata = {"t": state.t, "nx": state.nx, "ny": state.ny, "norm": state.norm()}
    metadata.update(extra_metadata or {})
    return writer.save_table(output_file, header, rows, metadata)

# billiard_prop/models/geometry.py

"""Coordinates and polygonal domains of the confined two-particle problem."""

import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from billiard_prop.utils.compat import StrEnum
from billiard_prop.utils.constants import DEFAULT_BOUNDARY_TOL_REL
from billiard_prop.utils.exceptions import GeometryError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BoxSpec:
    """
    Physical setup shared by every calculation.

    Parameters
    ----------
    m1, m2 : float
        Particle masses. The single-particle billiards use ``m1`` as their mass.
    d : float
        Box length.
    hbar : float
        Reduced Planck constant, 1 in natural units.
    a, b : float
        Dimensionless Hamiltonian scales, only read by the rectangle shape.
    """

    m1: float
    m2: float
    d: float
    hbar: float = 1.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        for name in ("m1", "m2", "d", "hbar", "a", "b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise GeometryError(f"BoxSpec.{name} must be finite and > 0, got {value}")

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @property
    def reduced_mass(self) -> float:
        return self.m1 * self.m2 / self.total_mass

    @property
    def frac1(self) -> float:
        """m1 / M"""
        return self.m1 / self.total_mass

    @property
    def frac2(self) -> float:
        """m2 / M"""
        return self.m2 / self.total_mass

    @property
    def boundary_tol(self) -> float:
        return DEFAULT_BOUNDARY_TOL_REL * self.d


@dataclass(frozen=True)
class Point2:
    """A point of a planar domain; (x1, x2), (Xc, x) or (y1, y2) by context."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise GeometryError(f"Point2 components must be finite, got ({self.u}, {self.v})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.u, self.v)


class Containment(IntEnum):
    """Classification of a point against a polygon."""

    EXTERIOR = -1
    BOUNDARY = 0
    INTERIOR = 1


class ShapeKind(StrEnum):
    SQUARE = "square"
    RHOMBUS = "rhombus"
    TRIANGLE = "triangle"
    RECTANGLE = "rectangle"
    TWO_PARTICLE_BOX = "two-particle-box"


@dataclass(frozen=True)
class ComDomain:
    """
    Support of the two-particle wavefunction in the (Xc, x) plane.

    The quadrilateral of the confined problem has four vertices; with the
    impenetrability condition only its x >= 0 triangle remains.
    """

    vertices: tuple[Point2, ...]
    impenetrable: bool
    spec: BoxSpec = field(repr=False)

    def __post_init__(self):
        expected = 3 if self.impenetrable else 4
        if len(self.vertices) != expected:
            raise GeometryError(
                f"ComDomain(impenetrable={self.impenetrable}) needs {expected} "
                f"vertices, got {len(self.vertices)}"
            )
        if polygon_area(self.vertices) <= 0:
            raise GeometryError("ComDomain vertices must be positively oriented")

    @property
    def axis_labels(self) -> tuple[str, str]:
        return ("Xc", "x")


@dataclass(frozen=True)
class ShapeDomain:
    """One of the planar billiards, or the particle-coordinate two-particle box."""

    kind: ShapeKind
    spec: BoxSpec

    @property
    def vertices(self) -> tuple[Point2, ...]:
        d = self.spec.d
        if self.kind == ShapeKind.SQUARE:
            corners = [(-d, -d), (d, -d), (d, d), (-d, d)]
        elif self.kind == ShapeKind.RHOMBUS:
            half = SQRT2 * d
            corners = [(0.0, -half), (half, 0.0), (0.0, half), (-half, 0.0)]
        elif self.kind == ShapeKind.TRIANGLE:
            # sides x1 = 0, x2 = x1 - sqrt(2) d, x2 = -x1 + sqrt(2) d
            half = SQRT2 * d
            corners = [(0.0, -half), (half, 0.0), (0.0, half)]
        elif self.kind == ShapeKind.RECTANGLE:
            ya = d * math.sqrt(self.spec.a)
            yb = d * math.sqrt(self.spec.b)
            corners = [(-ya, -yb), (ya, -yb), (ya, yb), (-ya, yb)]
        else:
            corners = [(0.0, 0.0), (d, 0.0), (d, d), (0.0, d)]
        return tuple(Point2(u, v) for u, v in corners)

    @property
    def axis_labels(self) -> tuple[str, str]:
        if self.kind == ShapeKind.RECTANGLE:
            return ("y1", "y2")
        return ("x1", "x2")


Domain = ComDomain | ShapeDomain


def to_com(x1, x2, spec: BoxSpec):
    """
    Particle coordinates to center-of-mass coordinates.

    Works on floats and on numpy arrays alike.

    Returns
    -------
    tuple
        ``(Xc, x)`` with ``Xc = (m1 x1 + m2 x2) / M`` and ``x = x1 - x2``.
    """
    xc = spec.frac1 * x1 + spec.frac2 * x2
    return xc, x1 - x2


def from_com(xc, x, spec: BoxSpec):
    """
    Center-of-mass coordinates back to particle coordinates.

    Returns
    -------
    tuple
        ``(x1, x2)`` with ``x1 = Xc + (m2/M) x`` and ``x2 = Xc - (m1/M) x``.
    """
    return xc + spec.frac2 * x, xc - spec.frac1 * x


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    pts = np.array([p.as_tuple() for p in vertices], dtype=float)
    u, v = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(u * np.roll(v, -1) - np.roll(u, -1) * v))


def polygon_edges(vertices) -> list[tuple[Point2, Point2]]:
    return [(vertices[i], vertices[(i + 1) % len(vertices)]) for i in range(len(vertices))]


def bounding_box(vertices) -> tuple[float, float, float, float]:
    """Return ``(u_min, u_max, v_min, v_max)``."""
    us = [p.u for p in vertices]
    vs = [p.v for p in vertices]
    return min(us), max(us), min(vs), max(vs)


def _order_counter_clockwise(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    cu = sum(p[0] for p in points) / len(points)
    cv = sum(p[1] for p in points) / len(points)
    ordered = sorted(points, key=lambda p: math.atan2(p[1] - cv, p[0] - cu))
    start = min(range(len(ordered)), key=lambda i: (ordered[i][0], ordered[i][1]))
    return ordered[start:] + ordered[:start]


def _dedupe_cyclic(points: list[tuple[float, float]], tol: float) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for p in points:
        if out and math.dist(out[-1], p) <= tol:
            continue
        out.append(p)
    while len(out) > 1 and math.dist(out[0], out[-1]) <= tol:
        out.pop()
    return out


def clip_half_plane(vertices, a: float, b: float, c: float, tol: float = 0.0):
    """
    Clip a convex polygon to the half-plane ``a*u + b*v >= c``.

    Sutherland-Hodgman against a single edge; consecutive duplicate vertices
    produced by vertices lying on the clip line are merged.
    """
    pts = [p.as_tuple() for p in vertices]
    out: list[tuple[float, float]] = []
    for i, p in enumerate(pts):
        q = pts[(i + 1) % len(pts)]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        p_in = fp >= -tol
        q_in = fq >= -tol
        if p_in:
            out.append(p)
        if p_in != q_in:
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    merged = _dedupe_cyclic(out, max(tol, 1e-15))
    return tuple(Point2(u, v) for u, v in merged)


def com_domain(spec: BoxSpec, impenetrable: bool = False) -> ComDomain:
    """
    Build the confinement quadrilateral (or its x >= 0 triangle) in the (Xc, x) plane.

    The vertices are the pairwise intersections of the lines
    ``Xc + (m2/M) x in {0, d}`` and ``Xc - (m1/M) x in {0, d}``.
    """
    d = spec.d
    # rows: (coefficient of Xc, coefficient of x, right-hand side)
    x1_lines = [(1.0, spec.frac2, 0.0), (1.0, spec.frac2, d)]
    x2_lines = [(1.0, -spec.frac1, 0.0), (1.0, -spec.frac1, d)]
    corners = []
    for l1 in x1_lines:
        for l2 in x2_lines:
            lhs = np.array([l1[:2], l2[:2]])
            rhs = np.array([l1[2], l2[2]])
            xc, x = np.linalg.solve(lhs, rhs)
            corners.append((float(xc), float(x)))
    vertices = tuple(Point2(u, v) for u, v in _order_counter_clockwise(corners))
    if impenetrable:
        vertices = clip_half_plane(vertices, 0.0, 1.0, 0.0, tol=spec.boundary_tol)
    logger.debug(
        f"COM domain (impenetrable={impenetrable}): "
        f"{[p.as_tuple() for p in vertices]}"
    )
    return ComDomain(vertices=vertices, impenetrable=impenetrable, spec=spec)


def signed_distance(vertices, u, v):
    """
    Signed distance to the boundary of a convex counter-clockwise polygon.

    Positive inside, negative outside; accepts scalars or arrays.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    dist = np.full(np.broadcast(u, v).shape, np.inf)
    for p, q in polygon_edges(vertices):
        eu, ev = q.u - p.u, q.v - p.v
        length = math.hypot(eu, ev)
        side = (eu * (v - p.v) - ev * (u - p.u)) / length
        dist = np.minimum(dist, side)
    return dist


def classify_points(domain: Domain, u, v, tol: float | None = None) -> np.ndarray:
    """Vectorised :func:`contains`; returns an int array of Containment codes."""
    tol = domain.spec.boundary_tol if tol is None else tol
    dist = signed_distance(domain.vertices, u, v)
    codes = np.where(dist > tol, Containment.INTERIOR, Containment.EXTERIOR)
    codes = np.where(np.abs(dist) <= tol, Containment.BOUNDARY, codes)
    return codes.astype(np.int8)


def contains(domain: Domain, p: Point2, tol: float | None = None) -> Containment:
    """
    Classify ``p`` as interior, boundary (within ``tol``) or exterior.

    Parameters
    ----------
    domain : ComDomain | ShapeDomain
        Convex polygon to test against.
    p : Point2
        Query point in the domain's own coordinates.
    tol : float | None
        Absolute boundary tolerance; defaults to ``1e-12 * d``.
    """
    if tol is not None and tol < 0:
        raise GeometryError(f"boundary tolerance must be >= 0, got {tol}")
    return Containment(int(classify_points(domain, p.u, p.v, tol)))


def reflect_x1(p: Point2) -> Point2:
    """Mirror image under x1 -> -x1, the antisymmetrisation of the triangle."""
    return Point2(-p.u, p.v)

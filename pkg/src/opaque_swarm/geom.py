"""Planar geometric primitives shared by the whole simulator.

Every equality-like predicate routes through a single :class:`Tolerance`
policy.  Coordinates are plain doubles; test instances are built with
margins far above the default epsilons, so the tolerance only has to absorb
floating-point noise, never modelling error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

TAU = 2.0 * math.pi


class GeometryError(ValueError):
    """Raised for degenerate geometric input (collinear circumcircle, ...)."""


class AmbiguityError(GeometryError):
    """Raised when a construction that needs a unique answer has a tie."""


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def angle(self) -> float:
        """Angle of the vector in [0, tau)."""
        return math.atan2(self.y, self.x) % TAU

    def unit(self) -> "Point":
        n = self.norm()
        if n == 0.0:
            raise GeometryError("cannot normalise the zero vector")
        return Point(self.x / n, self.y / n)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class Tolerance:
    """Shared tolerance policy: length scale eps = eps_abs + eps_rel * scale."""

    eps_rel: float = 1e-9
    eps_abs: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.eps_rel > 0.0 and self.eps_abs > 0.0):
            raise ValueError("tolerances must be strictly positive")
        if self.eps_rel >= 1e-3:
            raise ValueError("eps_rel must stay below 1e-3")

    def length(self, scale: float = 0.0) -> float:
        return self.eps_abs + self.eps_rel * abs(scale)

    def close(self, a: float, b: float, scale: float | None = None) -> bool:
        if scale is None:
            scale = max(abs(a), abs(b))
        return abs(a - b) <= self.length(scale)

    def points_close(self, p: Point, q: Point, scale: float | None = None) -> bool:
        if scale is None:
            scale = max(p.norm(), q.norm())
        return p.dist(q) <= self.length(scale)


DEFAULT_TOLERANCE = Tolerance()


def collinear(p: Point, q: Point, r: Point, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff the three points are collinear within tolerance.

    The test compares the perpendicular distance from the middle point to
    the line through the outer two against the tolerance scaled by the
    triple's diameter, which keeps it symmetric in all three arguments.
    Coincident points degenerate to a line and count as collinear.
    """
    d_pq = p.dist(q)
    d_pr = p.dist(r)
    d_qr = q.dist(r)
    longest = max(d_pq, d_pr, d_qr)
    if longest <= tol.length(0.0):
        return True
    area2 = abs((q - p).cross(r - p))
    return area2 / longest <= tol.length(longest)


def blocks(observer: Point, target: Point, candidate: Point,
           tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff candidate sits strictly inside the open segment observer-target.

    Candidates coinciding with either endpoint never block (distinct robots
    never coincide; the caller guarantees that much).
    """
    seg = target - observer
    length = seg.norm()
    if length <= tol.length(0.0):
        raise GeometryError("blocks() needs observer != target")
    eps = tol.length(length)
    rel = candidate - observer
    if rel.norm() <= eps or candidate.dist(target) <= eps:
        return False
    perp = abs(seg.cross(rel)) / length
    if perp > eps:
        return False
    t = seg.dot(rel) / (length * length)
    return 0.0 < t < 1.0


def circumcircle(p: Point, q: Point, r: Point,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[Point, float]:
    """Center and radius of the circle through three non-collinear points."""
    if collinear(p, q, r, tol):
        raise GeometryError("circumcircle of collinear points is degenerate")
    d = 2.0 * ((q - p).cross(r - p))
    sq_p = p.x * p.x + p.y * p.y
    sq_q = q.x * q.x + q.y * q.y
    sq_r = r.x * r.x + r.y * r.y
    ux = (sq_p * (q.y - r.y) + sq_q * (r.y - p.y) + sq_r * (p.y - q.y)) / d
    uy = (sq_p * (r.x - q.x) + sq_q * (p.x - r.x) + sq_r * (q.x - p.x)) / d
    center = Point(ux, uy)
    return center, center.dist(p)


def rotate_about(p: Point, center: Point, theta: float, orientation: int = 1) -> Point:
    """Rotate p about center by theta; orientation +1 is counterclockwise."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    a = theta * orientation
    c, s = math.cos(a), math.sin(a)
    v = p - center
    return Point(center.x + c * v.x - s * v.y, center.y + s * v.x + c * v.y)


@dataclass(frozen=True, slots=True)
class RegularPolygon:
    center: Point
    radius: float
    n: int
    phase: float  # angle of vertex 0, stored modulo the vertex step

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("a regular polygon needs n >= 3")
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "phase", self.phase % (TAU / self.n))

    @property
    def edge_length(self) -> float:
        return 2.0 * self.radius * math.sin(math.pi / self.n)

    def vertex(self, k: int) -> Point:
        a = self.phase + TAU * k / self.n
        return Point(self.center.x + self.radius * math.cos(a),
                     self.center.y + self.radius * math.sin(a))

    def vertices(self) -> list[Point]:
        return [self.vertex(k) for k in range(self.n)]


@dataclass(frozen=True, slots=True)
class PseudoPolygon:
    """More than half the vertices of a regular n-gon, plus that n-gon."""

    members: tuple[Point, ...]
    polygon: RegularPolygon


@dataclass(frozen=True, slots=True)
class AngularOrder:
    ordered: tuple[Point, ...]      # counterclockwise around the center
    angles: tuple[float, ...]
    gaps: tuple[float, ...]         # gaps[i] spans ordered[i] -> ordered[i+1]
    min_gap: float
    min_index: int
    ambiguous: bool                 # tie for the minimal gap


def angular_order(points: Iterable[Point], center: Point,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> AngularOrder:
    """Sort points by angle around center and locate the minimal gap."""
    pts = list(points)
    if len(pts) < 2:
        raise GeometryError("angular order needs at least two points")
    for p in pts:
        if p.dist(center) <= tol.length(p.dist(center)):
            raise GeometryError("point coincides with the center")
    decorated = sorted(((p - center).angle(), p) for p in pts)
    angles = tuple(a for a, _ in decorated)
    ordered = tuple(p for _, p in decorated)
    n = len(ordered)
    gaps = tuple((angles[(i + 1) % n] - angles[i]) % TAU for i in range(n))
    min_index = min(range(n), key=lambda i: gaps[i])
    min_gap = gaps[min_index]
    ang_eps = tol.eps_rel * TAU + 16 * sys_float_eps()
    ambiguous = sum(1 for g in gaps if g - min_gap <= ang_eps) > 1
    return AngularOrder(ordered, angles, gaps, min_gap, min_index, ambiguous)


def sys_float_eps() -> float:
    return 2.220446049250313e-16


def _lex_less(a: Sequence[float], b: Sequence[float], eps: float) -> bool:
    for x, y in zip(a, b):
        if abs(x - y) > eps:
            return x < y
    return False


@dataclass(frozen=True, slots=True)
class SpinFrame:
    """Unique minimal gap plus the global rotation direction it induces."""

    center: Point
    radius: float
    alpha: float
    a0: Point
    a1: Point
    orientation: int  # +1 counterclockwise, -1 clockwise, in global coords


def spin_frame(points: Sequence[Point], center: Point, radius: float,
               tol: Tolerance = DEFAULT_TOLERANCE) -> SpinFrame:
    """Derive the agreed rotation frame from robots on a circle.

    The minimal angular gap must be unique; the rotation direction is the
    one whose walk around the circle, starting across the minimal gap,
    reads the lexicographically smaller gap sequence.  Mirror-symmetric
    configurations admit no agreed direction and raise AmbiguityError.
    This is computed from positions only, so robots with opposite
    chiralities still agree on the global direction.
    """
    order = angular_order(points, center, tol)
    if order.ambiguous:
        raise AmbiguityError("minimal angular gap is not unique")
    gaps = order.gaps
    n = len(gaps)
    m = order.min_index
    ccw = [gaps[(m + i) % n] for i in range(n)]
    cw = [gaps[m]] + [gaps[(m - i) % n] for i in range(1, n)]
    ang_eps = tol.eps_rel * TAU + 16 * sys_float_eps()
    if _lex_less(ccw, cw, ang_eps):
        return SpinFrame(center, radius, order.min_gap,
                         order.ordered[m], order.ordered[(m + 1) % n], +1)
    if _lex_less(cw, ccw, ang_eps):
        return SpinFrame(center, radius, order.min_gap,
                         order.ordered[(m + 1) % n], order.ordered[m], -1)
    raise AmbiguityError("gap sequence is mirror symmetric; no agreed direction")


def concyclic(points: Sequence[Point], tol: Tolerance = DEFAULT_TOLERANCE
              ) -> tuple[Point, float] | None:
    """Circle through all points, or None if they are not concyclic."""
    pts = list(points)
    if len(pts) < 3:
        return None
    base = None
    for i in range(2, len(pts)):
        if not collinear(pts[0], pts[1], pts[i], tol):
            base = circumcircle(pts[0], pts[1], pts[i], tol)
            break
    if base is None:
        return None
    center, radius = base
    for p in pts:
        if not tol.close(center.dist(p), radius, radius):
            return None
    return center, radius


def associated_polygon(members: Iterable[Point],
                       tol: Tolerance = DEFAULT_TOLERANCE) -> PseudoPolygon:
    """Recover the unique regular polygon a pseudo-polygon belongs to.

    Works by (a) fitting the circumcircle, (b) reading the candidate vertex
    count off the minimal angular gap, then (c) brute-force verifying every
    n up to 2(|Q|-1) instead of trusting the gap alone, which guards
    against tolerance artifacts.
    """
    pts = list(members)
    if len(pts) < 3:
        raise GeometryError("a pseudo-polygon needs at least three members")
    circle = concyclic(pts, tol)
    if circle is None:
        raise GeometryError("members are not concyclic")
    center, radius = circle
    order = angular_order(pts, center, tol)
    q = len(pts)
    ang_eps = tol.eps_rel * TAU + 1e-12
    verified: list[int] = []
    for n in range(3, 2 * (q - 1) + 1):
        if q < n / 2.0 + 1.0:
            continue
        step = TAU / n
        anchor = order.angles[0]
        offsets = [((a - anchor) % TAU) / step for a in order.angles]
        if not all(abs(o - round(o)) * step <= ang_eps * 4 for o in offsets):
            continue
        slots = sorted(round(o) % n for o in offsets)
        if len(set(slots)) != q:
            continue
        adjacent = any((slots[(i + 1) % q] - slots[i]) % n == 1 for i in range(q))
        if not adjacent:
            continue
        verified.append(n)
    if not verified:
        raise GeometryError("not a pseudo-polygon of any regular n-gon")
    if len(verified) > 1:
        raise AmbiguityError(f"multiple consistent polygons: {verified}")
    n = verified[0]
    poly = RegularPolygon(center, radius, n, order.angles[0])
    return PseudoPolygon(tuple(order.ordered), poly)


def point_in_convex_polygon(vertices: Sequence[Point], x: Point,
                            tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff x lies inside or on the convex polygon (ccw or cw vertices)."""
    n = len(vertices)
    sign = 0
    scale = max(v.dist(x) for v in vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        c = (b - a).cross(x - a)
        if abs(c) <= tol.length(scale) * scale:
            continue
        s = 1 if c > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def safe_zone_contains(poly: RegularPolygon, x: Point,
                       tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Membership in the safe zone of a regular polygon.

    All four clauses must hold: x external to the polygon, not collinear
    with any pair of its vertices, off every edge's perpendicular bisector
    (never equidistant from two adjacent vertices), and at distance at
    least the edge length from every vertex.
    """
    verts = poly.vertices()
    if point_in_convex_polygon(verts, x, tol):
        return False
    n = poly.n
    for i in range(n):
        for j in range(i + 1, n):
            if collinear(verts[i], verts[j], x, tol):
                return False
    edge = poly.edge_length
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if tol.close(x.dist(a), x.dist(b), max(x.dist(a), x.dist(b))):
            return False
    for v in verts:
        if x.dist(v) < edge - tol.length(edge):
            return False
    return True


def segments_intersect(a0: Point, a1: Point, b0: Point, b1: Point,
                       tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Closed-segment intersection test, tolerant at endpoints."""
    scale = max(a0.dist(a1), b0.dist(b1), a0.dist(b0))
    eps = tol.length(scale) * max(scale, 1.0)

    def orient(p: Point, q: Point, r: Point) -> int:
        c = (q - p).cross(r - p)
        if abs(c) <= eps:
            return 0
        return 1 if c > 0 else -1

    def on_segment(p: Point, q: Point, r: Point) -> bool:
        return (min(p.x, r.x) - eps <= q.x <= max(p.x, r.x) + eps and
                min(p.y, r.y) - eps <= q.y <= max(p.y, r.y) + eps)

    o1 = orient(a0, a1, b0)
    o2 = orient(a0, a1, b1)
    o3 = orient(b0, b1, a0)
    o4 = orient(b0, b1, a1)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(a0, b0, a1):
        return True
    if o2 == 0 and on_segment(a0, b1, a1):
        return True
    if o3 == 0 and on_segment(b0, a0, b1):
        return True
    if o4 == 0 and on_segment(b0, a1, b1):
        return True
    return False


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    seg = b - a
    L2 = seg.dot(seg)
    if L2 == 0.0:
        return p.dist(a)
    t = max(0.0, min(1.0, seg.dot(p - a) / L2))
    return p.dist(a + seg.scaled(t))

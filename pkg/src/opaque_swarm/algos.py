"""Witness algorithms, one per solvability claim, plus deficient variants.

An algorithm is a pure function (Snapshot) -> (destination in the local
frame, new color or None).  Snapshots arrive in an adversarial local frame
(fresh rotation, reflection, and unit distance at every activation) and in
shuffled order, so every rule below works from ratios, angles, and colors
only -- never from entry order or absolute scale.  The default answer to a
view a rule does not recognise is the null movement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .geom import (GeometryError, ORIGIN, Point, Tolerance,
                   associated_polygon, circumcircle, collinear, concyclic,
                   point_segment_distance, rotate_about, safe_zone_contains,
                   spin_frame, TAU)
from .model import LightClass, ModelId, OFF, Snapshot, SyncMode

REL = 1e-6          # relative recognition band for geometric role guards
ALGO_TOL = Tolerance(1e-9, 1e-12)  # near-exact; local frames only add float noise

NULL = ORIGIN       # staying put, in the robot's own frame

Decision = tuple[Point, Optional[str]]


@dataclass(frozen=True)
class Algorithm:
    name: str
    light: LightClass
    palette: frozenset
    syncs: frozenset
    decide: Callable[[Snapshot], Decision]
    problem: str
    weakest: Optional[ModelId]
    requires_transparent: bool = False


def _positions(snap: Snapshot) -> list[Point]:
    return [e.position for e in snap.visible]


def _angle_at_origin(p: Point, q: Point) -> float:
    d = p.dot(q) / (p.norm() * q.norm())
    return math.acos(max(-1.0, min(1.0, d)))


def _feq(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= REL * max(scale, 1e-300)


# ---------------------------------------------------------------------------
# TriangleRoundTrip
# ---------------------------------------------------------------------------
# A robot at the center of the original triangle sees two robots equidistant
# from itself spanning 120 degrees; in the completed triangle everyone sees
# an equidistant pair spanning 60 degrees, so the two situations never mix.

def _trt_view(snap: Snapshot) -> Optional[str]:
    if snap.k != 2:
        return None
    p, q = _positions(snap)
    scale = max(p.norm(), q.norm(), p.dist(q))
    if not _feq(p.norm(), q.norm(), scale):
        return None
    ang = _angle_at_origin(p, q)
    if _feq(ang, 2 * math.pi / 3, 1.0):
        return "center"
    if _feq(ang, math.pi / 3, 1.0):
        return "equilateral"
    return None


def trt_fsta_decide(snap: Snapshot) -> Decision:
    view = _trt_view(snap)
    if view is None:
        return NULL, None
    p, q = _positions(snap)
    if view == "center" and snap.own_internal == OFF:
        return (p + q).scaled(-1.0), "went"      # empty vertex: a = -(p + q)
    if view == "equilateral" and snap.own_internal == "went":
        return (p + q).scaled(1.0 / 3.0), None   # triangle centroid
    return NULL, None


def trt_fcom_decide(snap: Snapshot) -> Decision:
    view = _trt_view(snap)
    if view is None:
        return NULL, None
    (e1, e2) = snap.visible
    p, q = e1.position, e2.position
    c1, c2 = e1.color, e2.color
    if view == "center":
        if c1 == OFF and c2 == OFF:
            return (p + q).scaled(-1.0), "M"
        return NULL, None
    # completed triangle: vertices ack the mover's M, the mover returns on B,B
    if "M" in (c1, c2):
        return NULL, "B"
    if c1 == "B" and c2 == "B":
        return (p + q).scaled(1.0 / 3.0), "D"
    return NULL, None


# ---------------------------------------------------------------------------
# FlipFlopFlip
# ---------------------------------------------------------------------------

def _fff_apex_view(snap: Snapshot) -> Optional[tuple[Point, Point, Point]]:
    """(p, q, b) when the observer is r: equidistant pair, not equilateral.

    An exactly equilateral snapshot is always ignored: it can only be a
    bystander catching r in transit through the forbidden height, never r
    itself (r is not activated mid-move and never stops there).
    """
    if snap.k != 2:
        return None
    p, q = _positions(snap)
    u = p.dist(q)
    scale = max(p.norm(), q.norm(), u)
    if not _feq(p.norm(), q.norm(), scale):
        return None
    if _feq(p.norm(), u, scale):
        return None  # equilateral transit
    return p, q, (p + q).scaled(0.5)


_EQUI = math.sqrt(3.0) / 2.0


def _fff_flip_target(b: Point, u: float) -> Point:
    """Mirror across b, nudged off the equilateral height."""
    h = b.norm()
    if _feq(h, _EQUI * u, u):
        h += u / 4.0
    return b + b.unit().scaled(h)


def _fff_flop_target(b: Point, u: float) -> Point:
    h = b.norm()
    step = u / 2.0
    if _feq(h + step, _EQUI * u, u):
        step = 0.75 * u
    return b.unit().scaled(-step)  # from my spot, straight away from b


def fff_fsta_decide(snap: Snapshot) -> Decision:
    view = _fff_apex_view(snap)
    if view is None:
        return NULL, None
    p, q, b = view
    u = p.dist(q)
    color = snap.own_internal
    if color in (OFF, "flip1"):
        return _fff_flip_target(b, u), "flop"
    if color == "flop":
        return _fff_flop_target(b, u), "flip2"
    if color == "flip2":
        return _fff_flip_target(b, u), "flip1"
    return NULL, None


_FFF_NEXT = {OFF: "flop", "flip1": "flop", "flop": "flip2", "flip2": "flip1"}


def fff_fcom_decide(snap: Snapshot) -> Decision:
    """All three robots advance one external color per round; r acts on it."""
    if snap.k != 2:
        return NULL, None
    (e1, e2) = snap.visible
    if e1.color != e2.color:
        return NULL, None  # colors out of lockstep; hold
    phase = e1.color
    view = _fff_apex_view(snap)
    if view is None:
        return NULL, _FFF_NEXT.get(phase)  # p, q keep the scheme ticking
    p, q, b = view
    u = p.dist(q)
    if phase in (OFF, "flip1", "flip2"):
        return _fff_flip_target(b, u), _FFF_NEXT.get(phase)
    if phase == "flop":
        return _fff_flop_target(b, u), _FFF_NEXT.get(phase)
    return NULL, None


def fff_memoryless_decide(snap: Snapshot) -> Decision:
    """Distance-threshold strategy (k=2, h=4 in units of dist(p,q)).

    Encodes the pending action into dist(p, r); fails exactly as adversarial
    initial placements predict, since r may start anywhere on gamma'.
    """
    view = _fff_apex_view(snap)
    if view is None:
        return NULL, None
    p, q, b = view
    u = p.dist(q)
    d = p.norm()
    away = b.unit()            # from me through b: the other semi-line
    here = away.scaled(-1.0)   # farther out on my own semi-line

    def at_height(direction: Point, dist_from_p: float) -> Point:
        h = math.sqrt(max(dist_from_p * dist_from_p - (u / 2.0) ** 2, 0.0))
        return b + direction.scaled(h)

    if d < 2.0 * u:
        return at_height(away, 3.0 * u), None      # flip out
    if d < 4.0 * u:
        return at_height(here, 5.0 * u), None      # flop farther, same side
    return at_height(away, 1.5 * u), None          # flip back close


# ---------------------------------------------------------------------------
# Newcomer
# ---------------------------------------------------------------------------

def nwc_ring_view(others: Sequence[Point]) -> Optional[tuple[list[int], float]]:
    """Indices of a >=7 group equidistant from the observer, none closer."""
    if len(others) < 7:
        return None
    dists = [p.norm() for p in others]
    d0 = min(dists)
    ring = [i for i, d in enumerate(dists) if _feq(d, d0, d0)]
    if len(ring) >= 7:
        return ring, d0
    return None


def nwc_outsider_candidates(others: Sequence[Point]) -> list[tuple[int, float]]:
    """(center index, ring radius) pairs that make the observer an outsider."""
    out = []
    for gi, g in enumerate(others):
        rest = [p for i, p in enumerate(others) if i != gi]
        by_dist = sorted(p.dist(g) for p in rest)
        i = 0
        while i < len(by_dist):
            j = i
            while j + 1 < len(by_dist) and _feq(by_dist[j + 1], by_dist[i], by_dist[i]):
                j += 1
            count = j - i + 1
            radius = by_dist[i]
            if count >= 4 and g.norm() > radius * 1.02:
                out.append((gi, radius))
                break
            i = j + 1
    return out


def nwc_fcom_decide(snap: Snapshot) -> Decision:
    others = _positions(snap)
    ring = nwc_ring_view(others)
    if ring is not None:
        idxs, rho = ring
        for i in idxs:
            if snap.visible[i].color == "s":
                u = others[i].unit()
                return u.scaled(rho / 2.0), None
        return NULL, None
    candidates = nwc_outsider_candidates(others)
    if len(candidates) == 1:
        gi, radius = candidates[0]
        g = others[gi]
        return g.unit().scaled(g.norm() - radius), "s"
    return NULL, None


# ---------------------------------------------------------------------------
# Spinning
# ---------------------------------------------------------------------------

def _circle_of(points: Sequence[Point]) -> Optional[tuple[Point, float]]:
    return concyclic(points, ALGO_TOL)


def spi_oblot_decide(snap: Snapshot) -> Decision:
    pts = [ORIGIN] + _positions(snap)
    if len(pts) < 5:
        return NULL, None
    circle = _circle_of(pts)
    if circle is None:
        return NULL, None
    center, radius = circle
    try:
        frame = spin_frame(pts, center, radius, ALGO_TOL)
    except GeometryError:
        return NULL, None
    return rotate_about(ORIGIN, center, frame.alpha / 2.0, frame.orientation), None


def _shorter_arc(center: Point, frm: Point, to: Point) -> tuple[float, int]:
    """(angle, orientation) of the shorter arc from frm to to around center."""
    a0 = (frm - center).angle()
    a1 = (to - center).angle()
    delta = (a1 - a0) % TAU
    if delta <= math.pi:
        return delta, +1
    return TAU - delta, -1


def spi_lumi_decide(snap: Snapshot) -> Decision:
    own = snap.own_internal
    entries = snap.visible
    colors = [e.color for e in entries]
    seen = set(colors)
    pts_all = [ORIGIN] + [e.position for e in entries]

    if own == OFF:
        if seen & {"moving0", "moving1"}:
            return NULL, None
        if seen == {OFF}:
            circle = _circle_of(pts_all)
            if circle is None:
                return NULL, None
            try:
                frame = spin_frame(pts_all, circle[0], circle[1], ALGO_TOL)
            except GeometryError:
                return NULL, None
            if frame.a0.dist(ORIGIN) <= REL * circle[1]:
                return NULL, "a0"
            return NULL, None
        if seen == {OFF, "a0"}:
            circle = _circle_of(pts_all)
            if circle is None:
                return NULL, None
            try:
                frame = spin_frame(pts_all, circle[0], circle[1], ALGO_TOL)
            except GeometryError:
                return NULL, None
            a0_pos = next(e.position for e in entries if e.color == "a0")
            if (frame.a1.dist(ORIGIN) <= REL * circle[1]
                    and frame.a0.dist(a0_pos) <= REL * circle[1]):
                return NULL, "a1"
            return NULL, None
        if "m0" in seen and "m1" in seen:
            m0 = next(e.position for e in entries if e.color == "m0")
            m1 = next(e.position for e in entries if e.color == "m1")
            try:
                center, _ = circumcircle(ORIGIN, m0, m1, ALGO_TOL)
            except GeometryError:
                return NULL, None
            alpha, orient = _shorter_arc(center, m0, m1)
            return rotate_about(ORIGIN, center, alpha / 2.0, orient), "moving"
        return NULL, None

    if own == "a0":
        if seen == {OFF, "a1"}:
            circle = _circle_of(pts_all)
            if circle is None:
                return NULL, None
            try:
                frame = spin_frame(pts_all, circle[0], circle[1], ALGO_TOL)
            except GeometryError:
                return NULL, None
            dest = rotate_about(ORIGIN, circle[0], frame.alpha / 2.0, frame.orientation)
            return dest, "moving0"
        return NULL, None

    if own == "a1":
        if "m0" in seen and not (seen & {"moving0", "moving"}):
            m0 = next(e.position for e in entries if e.color == "m0")
            anchor = next((e.position for e in entries if e.color == OFF), None)
            if anchor is None:
                return NULL, None
            try:
                center, _ = circumcircle(ORIGIN, m0, anchor, ALGO_TOL)
            except GeometryError:
                return NULL, None
            step, orient = _shorter_arc(center, m0, ORIGIN)
            return rotate_about(ORIGIN, center, step, orient), "moving1"
        return NULL, None

    if own == "moving0":
        return NULL, "m0"
    if own == "moving1":
        return NULL, "m1"
    if own == "moving":
        return NULL, "moved"
    if own in ("moved", "m0", "m1"):
        if seen <= {"m0", "m1", "moved", "end"}:
            return NULL, "end"
        return NULL, None
    if own == "end":
        if seen <= {"end", OFF}:
            return NULL, OFF
        return NULL, None
    return NULL, None


# ---------------------------------------------------------------------------
# AngleShift
# ---------------------------------------------------------------------------

def ash_oblot_decide(snap: Snapshot) -> Decision:
    if snap.k != 2:
        return NULL, None
    u, v = _positions(snap)
    tri = [ORIGIN, u, v]
    angles = []
    for i, at in enumerate(tri):
        x = tri[(i + 1) % 3] - at
        y = tri[(i + 2) % 3] - at
        denom = x.norm() * y.norm()
        if denom <= 0.0:
            return NULL, None
        angles.append(math.acos(max(-1.0, min(1.0, x.dot(y) / denom))))
    margin = math.radians(0.5)
    if max(angles) >= math.pi / 2 - margin:
        return NULL, None  # terminal: obtuse, right, or degenerate
    order = sorted(range(3), key=lambda i: angles[i])
    if angles[order[1]] - angles[order[0]] < margin or \
            angles[order[2]] - angles[order[1]] < margin:
        return NULL, None  # not recognisably scalene
    a_i, b_i, c_i = order[2], order[1], order[0]
    if a_i == 0:
        return NULL, None  # I am the rotation center
    a, b, c = tri[a_i], tri[b_i], tri[c_i]
    alpha = angles[a_i]
    orient = 1 if (b - a).cross(c - a) > 0 else -1
    if b_i == 0:
        return rotate_about(ORIGIN, a, alpha, orient), None
    return rotate_about(ORIGIN, a, math.pi - alpha, orient), None


# ---------------------------------------------------------------------------
# Pseudo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseView:
    watcher_index: int        # index into the points list below; 0 is self
    points: tuple[Point, ...]  # self first, then visible entries in order
    members: tuple[int, ...]   # indices into points
    polygon: object            # RegularPolygon


def pse_reconstruct(points: Sequence[Point]) -> Optional[PseView]:
    """Split self+visible into pseudo-polygon members and a single watcher.

    Exactly one split may exist: the excluded point is the watcher and all
    the rest (the observer included) sit on the associated polygon.  Any
    view with two robots off the polygon, or with the observer off it,
    yields no split, which is precisely the stand-still case.
    """
    found = None
    for z in range(len(points)):
        rest = [p for i, p in enumerate(points) if i != z]
        if len(rest) < 3:
            continue
        try:
            pp = associated_polygon(rest, ALGO_TOL)
        except GeometryError:
            continue
        if found is not None:
            return None  # ambiguous; generators exclude this
        found = (z, pp)
    if found is None:
        return None
    z, pp = found
    members = tuple(i for i in range(len(points)) if i != z)
    return PseView(z, tuple(points), members, pp.polygon)


def pse_roles(view: PseView) -> Optional[tuple[int, int, int]]:
    """(a, b, c) as indices into view.points; None if roles are ambiguous."""
    w = view.points[view.watcher_index]
    member_pts = [view.points[i] for i in view.members]
    dists = [p.dist(w) for p in member_pts]
    order = sorted(range(len(member_pts)), key=lambda i: dists[i], reverse=True)
    scale = view.polygon.radius
    if dists[order[0]] - dists[order[1]] <= REL * scale:
        return None
    a_local = order[0]
    ring = sorted(range(len(member_pts)),
                  key=lambda i: (member_pts[i] - view.polygon.center).angle())
    pos = ring.index(a_local)
    n1 = ring[(pos + 1) % len(ring)]
    n2 = ring[(pos - 1) % len(ring)]
    if abs(member_pts[n1].dist(w) - member_pts[n2].dist(w)) <= REL * scale:
        return None
    if member_pts[n1].dist(w) > member_pts[n2].dist(w):
        b_local, c_local = n1, n2
    else:
        b_local, c_local = n2, n1
    return view.members[a_local], view.members[b_local], view.members[c_local]


_PSE_JITTERS_DEG = (0.0, 3.0, -3.0, 6.0, -6.0, 9.0, -9.0, 12.0)


def pse_target(view: PseView, a: int, b: int, c: int) -> Optional[Point]:
    """Destination for the elected robot: ray through the polygon center,
    stepped outward from the far rim, first candidate passing all clauses."""
    poly = view.polygon
    w = view.points[view.watcher_index]
    a_pos = view.points[a]
    b_pos, c_pos = view.points[b], view.points[c]
    others = [view.points[i] for i in range(len(view.points)) if i != a]
    edge = poly.edge_length
    d = (poly.center - a_pos).unit()
    exit_point = a_pos + d.scaled(2.0 * poly.radius)
    side_a = (c_pos - b_pos).cross(a_pos - b_pos)
    for i in range(8):
        dist = edge * (1.0 + i / 7.0)
        for jit in _PSE_JITTERS_DEG:
            dd = rotate_about(d, ORIGIN, math.radians(jit), 1)
            x = exit_point + dd.scaled(dist)
            if not safe_zone_contains(poly, x, ALGO_TOL):
                continue
            side_x = (c_pos - b_pos).cross(x - b_pos)
            if side_a * side_x >= 0:
                continue
            if any(collinear(w, view.points[m], x, ALGO_TOL)
                   for m in view.members if m != a):
                continue
            if any(point_segment_distance(p, a_pos, x) <= 0.02 * edge for p in others):
                continue
            return x
    return None


def _pse_elect(snap: Snapshot) -> Optional[Point]:
    """Geometric election: the destination when self is the unique mover."""
    points = [ORIGIN] + _positions(snap)
    view = pse_reconstruct(points)
    if view is None or view.watcher_index == 0:
        return None
    roles = pse_roles(view)
    if roles is None:
        return None
    a, b, c = roles
    if a != 0:
        return None
    return pse_target(view, a, b, c)


def pse_oblot_decide(snap: Snapshot) -> Decision:
    dest = _pse_elect(snap)
    return (dest, None) if dest is not None else (NULL, None)


def pse_internal_only_decide(snap: Snapshot) -> Decision:
    """The synchronous election run with only an internal marker light."""
    if snap.own_internal == "done":
        return NULL, None
    dest = _pse_elect(snap)
    if dest is None:
        return NULL, None
    return dest, "done"


def pse_fcom_decide(snap: Snapshot) -> Decision:
    points = [ORIGIN] + _positions(snap)
    view = pse_reconstruct(points)
    if view is None:
        return NULL, None  # two robots off the polygon: already (being) formed
    roles = pse_roles(view)
    colors = [e.color for e in snap.visible]
    seen = set(colors)
    if view.watcher_index == 0:
        return NULL, "on"  # the watcher recolors idempotently and never moves
    if roles is None:
        return NULL, None
    a, b, _c = roles
    role_color = "a" if a == 0 else ("b" if b == 0 else "on")
    if OFF in seen:
        return NULL, role_color       # first epoch: advertise the role
    if seen == {"a", "b", "on"}:
        return NULL, "on"
    if seen == {"a", "on"}:
        return NULL, "b"
    if seen == {"b", "on"}:
        if a == 0:
            dest = pse_target(view, a, b, _c)
            if dest is not None:
                return dest, "a"
        return NULL, None
    if seen == {"on"}:
        return NULL, "b"              # I am b; a is hidden mid-move: hold
    return NULL, None


# ---------------------------------------------------------------------------
# LineStretch (transparent framework)
# ---------------------------------------------------------------------------

def ls_oblot_decide(snap: Snapshot) -> Decision:
    if snap.k < 3:
        return NULL, None
    pts = _positions(snap)
    far = max(pts, key=lambda p: p.norm())
    u = far.unit()
    scale = far.norm()
    if any(abs(p.cross(u)) > REL * scale for p in pts):
        return NULL, None  # not collinear with me: unknown situation
    coords = sorted(p.dot(u) for p in pts)
    low_end = coords[0] > -REL * scale      # every other robot ahead of me
    high_end = coords[-1] < REL * scale     # every other robot behind me
    if not (low_end or high_end):
        return NULL, None  # robots on both sides: I am internal
    line = sorted(coords + [0.0])
    gaps = [line[i + 1] - line[i] for i in range(len(line) - 1)]
    d = min(gaps)
    n = len(line)
    target_gap = d * (1.0 + 1.0 / n)
    mine = abs(coords[0]) if low_end else abs(coords[-1])
    if _feq(mine, target_gap, d):
        return NULL, None  # already stretched
    if low_end:
        return u.scaled(coords[0] - target_gap), None
    return u.scaled(coords[-1] + target_gap), None


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def _model(light: LightClass, sync: SyncMode) -> ModelId:
    return ModelId(light, sync)


_ALL_SYNCS = frozenset(SyncMode)
_SYNCHRONOUS = frozenset({SyncMode.FSYNC, SyncMode.SSYNC})
_FSYNC_ONLY = frozenset({SyncMode.FSYNC})

ALGORITHMS: dict[str, Algorithm] = {}


def _register(alg: Algorithm) -> Algorithm:
    ALGORITHMS[alg.name] = alg
    return alg


trt_fsta = _register(Algorithm(
    "trt_fsta", LightClass.FSTA, frozenset({OFF, "went"}), _ALL_SYNCS,
    trt_fsta_decide, "trt", _model(LightClass.FSTA, SyncMode.ASYNC)))

trt_fcom = _register(Algorithm(
    "trt_fcom", LightClass.FCOM, frozenset({OFF, "M", "B", "D"}), _ALL_SYNCS,
    trt_fcom_decide, "trt", _model(LightClass.FCOM, SyncMode.ASYNC)))

fff_fsta = _register(Algorithm(
    "fff_fsta", LightClass.FSTA, frozenset({OFF, "flip1", "flop", "flip2"}), _ALL_SYNCS,
    fff_fsta_decide, "fff", _model(LightClass.FSTA, SyncMode.ASYNC)))

fff_fcom_fsync = _register(Algorithm(
    "fff_fcom_fsync", LightClass.FCOM, frozenset({OFF, "flip1", "flop", "flip2"}),
    _FSYNC_ONLY, fff_fcom_decide, "fff", _model(LightClass.FCOM, SyncMode.FSYNC)))

nwc_fcom = _register(Algorithm(
    "nwc_fcom", LightClass.FCOM, frozenset({OFF, "s"}), _ALL_SYNCS,
    nwc_fcom_decide, "nwc", _model(LightClass.FCOM, SyncMode.ASYNC)))

spi_oblot_fsync = _register(Algorithm(
    "spi_oblot_fsync", LightClass.OBLOT, frozenset({OFF}), _FSYNC_ONLY,
    spi_oblot_decide, "spi", _model(LightClass.OBLOT, SyncMode.FSYNC)))

spi_lumi_async = _register(Algorithm(
    "spi_lumi_async", LightClass.LUMI,
    frozenset({OFF, "a0", "a1", "moving0", "moving1", "m0", "m1",
               "moving", "moved", "end"}),
    _ALL_SYNCS, spi_lumi_decide, "spi", _model(LightClass.LUMI, SyncMode.ASYNC)))

ash_oblot_fsync = _register(Algorithm(
    "ash_oblot_fsync", LightClass.OBLOT, frozenset({OFF}), _FSYNC_ONLY,
    ash_oblot_decide, "ash", _model(LightClass.OBLOT, SyncMode.FSYNC)))

pse_oblot_sync = _register(Algorithm(
    "pse_oblot_sync", LightClass.OBLOT, frozenset({OFF}), _SYNCHRONOUS,
    pse_oblot_decide, "pse", _model(LightClass.OBLOT, SyncMode.SSYNC)))

pse_fcom_async = _register(Algorithm(
    "pse_fcom_async", LightClass.FCOM, frozenset({OFF, "on", "a", "b"}), _ALL_SYNCS,
    pse_fcom_decide, "pse", _model(LightClass.FCOM, SyncMode.ASYNC)))

ls_oblot_transparent = _register(Algorithm(
    "ls_oblot_transparent", LightClass.OBLOT, frozenset({OFF}), _ALL_SYNCS,
    ls_oblot_decide, "ls", _model(LightClass.OBLOT, SyncMode.ASYNC),
    requires_transparent=True))

fff_memoryless = _register(Algorithm(
    "fff_memoryless", LightClass.OBLOT, frozenset({OFF}), _ALL_SYNCS,
    fff_memoryless_decide, "fff", None))

pse_internal_only = _register(Algorithm(
    "pse_internal_only", LightClass.FSTA, frozenset({OFF, "done"}), _ALL_SYNCS,
    pse_internal_only_decide, "pse", None))

# The opaque-framework positive witnesses, in lemma order.
POSITIVE_ALGORITHMS = (
    "trt_fsta", "trt_fcom", "fff_fsta", "fff_fcom_fsync", "nwc_fcom",
    "spi_oblot_fsync", "spi_lumi_async", "ash_oblot_fsync",
    "pse_oblot_sync", "pse_fcom_async",
)


def transparent_simulation(alg: Algorithm) -> Algorithm:
    """Run an opaque algorithm inside the transparent engine.

    Each full snapshot is reduced to what opacity would have shown before
    the wrapped algorithm sees it, so a transparent swarm simulates the
    opaque one exactly: whatever the opaque algorithm solves, this wrapper
    solves with transparent robots.
    """
    from .engine import filter_snapshot

    def decide(snap: Snapshot) -> Decision:
        return alg.decide(filter_snapshot(snap))

    return Algorithm(f"{alg.name}@transparent", alg.light, alg.palette,
                     alg.syncs, decide, alg.problem, alg.weakest,
                     requires_transparent=True)

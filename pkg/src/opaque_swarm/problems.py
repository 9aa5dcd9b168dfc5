"""The seven problem specifications: instance generators and trace monitors.

A problem is a sequence of configuration conditions (phases) plus path
conditions constraining how the swarm may travel between them.  Monitors
are pure functions of traces: they advance a phase when its condition first
holds at a stable instant (no robot mid-move) and report every path
violation with the offending event.  Phase predicates never look at light
colors or cycle counts; position equality uses the shared tolerance scaled
by the instance diameter.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .engine import Trace, Violation, configuration_at
from .geom import (DEFAULT_TOLERANCE, Point, RegularPolygon, Tolerance,
                   angular_order, collinear, point_segment_distance,
                   rotate_about, safe_zone_contains, spin_frame, TAU)
from .model import Configuration, OFF, validate_configuration


class InstanceError(ValueError):
    """The requested instance violates the problem's preconditions."""


@dataclass
class PhaseProgress:
    current_phase: int
    phase_entry_times: list[float]
    cycles: int = 0


@dataclass
class ProblemSpec:
    name: str
    params: dict
    terminal: str                      # "finite" | "perpetual"
    initial: Configuration
    meta: dict
    phase_conditions: tuple[Callable[[Configuration], bool], ...] = ()
    path_conditions: tuple[Callable[[Trace, PhaseProgress], list[Violation]], ...] = ()
    cycle_monitor: Optional[Callable[[Trace], tuple[PhaseProgress, list[Violation]]]] = None
    cycles_to_check: int = 5

    @property
    def n_phases(self) -> int:
        return len(self.phase_conditions)


def monitor(spec: ProblemSpec, trace: Trace) -> tuple[PhaseProgress, list[Violation]]:
    """Phase progress and violations for one trace of this problem."""
    if spec.terminal == "perpetual":
        assert spec.cycle_monitor is not None
        return spec.cycle_monitor(trace)
    moves = trace.moves()
    settle = sorted({0.0, trace.horizon} | {mv.t_end for mv in moves})
    phase = 0
    entries: list[float] = []
    for t in settle:
        if any(mv.t_start < t < mv.t_end for mv in moves):
            continue
        cfg = configuration_at(trace, t)
        while phase < spec.n_phases and spec.phase_conditions[phase](cfg):
            phase += 1
            entries.append(t)
    progress = PhaseProgress(phase, entries)
    violations: list[Violation] = []
    for cond in spec.path_conditions:
        violations.extend(cond(trace, progress))
    return progress, violations


def is_done(spec: ProblemSpec, progress: PhaseProgress) -> bool:
    if spec.terminal == "perpetual":
        return progress.cycles >= spec.cycles_to_check
    return progress.current_phase == spec.n_phases


# ---------------------------------------------------------------------------
# Shared monitor pieces
# ---------------------------------------------------------------------------

def _diameter(config: Configuration) -> float:
    pos = config.positions()
    return max((a.dist(b) for a in pos for b in pos), default=1.0)


def _near(p: Point, q: Point, scale: float, tol: Tolerance) -> bool:
    return p.dist(q) <= tol.length(scale) * 8


def _still_robots(still: Sequence[int], label: str):
    def cond(trace: Trace, progress: PhaseProgress) -> list[Violation]:
        out = []
        for mv in trace.moves():
            if mv.robot in still:
                out.append(Violation("PathConstraint", mv.t_start,
                                     {"robot": mv.robot, "rule": label}))
        return out
    return cond


def _stops_only_at(robot: int, targets_of: Callable[[PhaseProgress], list[Point]],
                   scale: float, tol: Tolerance, label: str):
    def cond(trace: Trace, progress: PhaseProgress) -> list[Violation]:
        targets = targets_of(progress)
        out = []
        for mv in trace.moves():
            if mv.robot != robot:
                continue
            if not any(_near(mv.to, t, scale, tol) for t in targets):
                out.append(Violation("PathConstraint", mv.t_end,
                                     {"robot": robot, "stop": mv.to.as_tuple(),
                                      "rule": label}))
        return out
    return cond


def _still_after_completion(n_phases: int):
    def cond(trace: Trace, progress: PhaseProgress) -> list[Violation]:
        if progress.current_phase < n_phases:
            return []
        t_done = progress.phase_entry_times[-1]
        return [Violation("PhaseRegression", mv.t_start,
                          {"robot": mv.robot, "rule": "moved after completion"})
                for mv in trace.moves() if mv.t_start >= t_done]
    return cond


def _check_initial(config: Configuration, tol: Tolerance) -> None:
    if any(c != OFF for c in config.lights()):
        raise InstanceError("phi0 requires all lights off")
    if validate_configuration(config, tol) is not None:
        raise InstanceError("initial configuration has a multiplicity")


def _rigid_motion(rng: random.Random) -> Callable[[Point], Point]:
    theta = rng.uniform(0.0, TAU)
    dx, dy = rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
    c, s = math.cos(theta), math.sin(theta)

    def apply(p: Point) -> Point:
        return Point(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy)
    return apply


# ---------------------------------------------------------------------------
# TriangleRoundTrip
# ---------------------------------------------------------------------------

def triangle_round_trip_spec(rho: float = 1.0, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Two robots on vertices of an equilateral triangle, one at the center.

    The center robot must occupy the empty vertex, then return, leaving the
    same vertex empty again; the vertex robots stay still throughout.
    """
    if not rho > 0:
        raise InstanceError("rho must be positive")
    rng = random.Random(f"trt:{seed}")
    move = _rigid_motion(rng)
    center = move(Point(0.0, 0.0))
    p = move(Point(rho * math.cos(math.pi / 2), rho * math.sin(math.pi / 2)))
    q = move(Point(rho * math.cos(7 * math.pi / 6), rho * math.sin(7 * math.pi / 6)))
    a = move(Point(rho * math.cos(11 * math.pi / 6), rho * math.sin(11 * math.pi / 6)))
    initial = Configuration.of([p, q, center])
    _check_initial(initial, tol)
    scale = _diameter(initial)
    meta = {"vertices": (0, 1), "mover": 2, "a": a, "center": center, "rho": rho}

    def phi1(cfg: Configuration) -> bool:
        pos = cfg.positions()
        return (_near(pos[2], a, scale, tol)
                and _near(pos[0], p, scale, tol) and _near(pos[1], q, scale, tol))

    def phi2(cfg: Configuration) -> bool:
        pos = cfg.positions()
        return (_near(pos[2], center, scale, tol)
                and _near(pos[0], p, scale, tol) and _near(pos[1], q, scale, tol))

    path = (
        _still_robots((0, 1), "vertex robots must stay still"),
        _stops_only_at(2, lambda _: [a, center], scale, tol,
                       "mover stops only at the empty vertex or the center"),
        _still_after_completion(2),
    )
    return ProblemSpec("trt", {"rho": rho, "seed": seed}, "finite", initial, meta,
                       (phi1, phi2), path)


# ---------------------------------------------------------------------------
# FlipFlopFlip
# ---------------------------------------------------------------------------

def flip_flop_flip_spec(u: float = 2.0, h0: float = 1.0, seed: int = 0,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Perpetual flip / flop / flip along the perpendicular bisector of p-q.

    r starts on the semi-line gamma' at height h0 over the base point b and
    must cycle: stop on gamma'' (not b), stop farther on gamma'', stop back
    on gamma' -- never stopping where p, q, r would form an equilateral
    triangle and never leaving the bisector.
    """
    if u <= 0 or h0 <= 0:
        raise InstanceError("u and h0 must be positive")
    equi = math.sqrt(3.0) / 2.0 * u
    if abs(h0 - equi) <= 1e-6 * u:
        raise InstanceError("initial triangle must be strictly isosceles")
    rng = random.Random(f"fff:{seed}")
    move = _rigid_motion(rng)
    p = move(Point(0.0, u / 2.0))
    q = move(Point(0.0, -u / 2.0))
    r = move(Point(h0, 0.0))
    b = move(Point(0.0, 0.0))
    gamma_dir = (move(Point(1.0, 0.0)) - b)  # unit vector toward gamma'
    initial = Configuration.of([p, q, r])
    _check_initial(initial, tol)
    scale = max(_diameter(initial), 4 * u)
    meta = {"p": 0, "q": 1, "r": 2, "b": b, "u": u, "gamma_dir": gamma_dir,
            "h0": h0, "equilateral_height": equi}

    def proj(pt: Point) -> float:
        return (pt - b).dot(gamma_dir)

    def off_line(pt: Point) -> bool:
        return abs((pt - b).cross(gamma_dir)) > tol.length(scale) * 8

    def cycle_monitor(trace: Trace) -> tuple[PhaseProgress, list[Violation]]:
        violations: list[Violation] = []
        for mv in trace.moves():
            if mv.robot in (0, 1):
                violations.append(Violation("PathConstraint", mv.t_start,
                                            {"robot": mv.robot, "rule": "p,q must stay still"}))
        stops = [(mv.t_end, mv.to) for mv in sorted(trace.moves(), key=lambda m: m.t_start)
                 if mv.robot == 2]
        eps = tol.length(scale) * 8
        expected = "flip_out"    # -> gamma'', then flop farther, then back to gamma'
        prev_height = None
        matched = 0
        for t, pos in stops:
            if off_line(pos):
                violations.append(Violation("PathConstraint", t,
                                            {"robot": 2, "rule": "r left gamma",
                                             "stop": pos.as_tuple()}))
                break
            s = proj(pos)
            if abs(s) <= eps:
                violations.append(Violation("PathConstraint", t,
                                            {"robot": 2, "rule": "stopped at b"}))
                break
            if abs(abs(s) - equi) <= eps:
                violations.append(Violation("PathConstraint", t,
                                            {"robot": 2, "rule": "stopped at equilateral point"}))
                break
            if expected == "flip_out":
                if s >= 0:
                    violations.append(Violation("PathConstraint", t,
                                                {"robot": 2, "rule": "flip must land on gamma''",
                                                 "stop": pos.as_tuple()}))
                    break
                prev_height = -s
                expected = "flop"
            elif expected == "flop":
                if s >= 0 or -s <= prev_height + eps:
                    violations.append(Violation("PathConstraint", t,
                                                {"robot": 2,
                                                 "rule": "flop must move farther on gamma''",
                                                 "stop": pos.as_tuple()}))
                    break
                expected = "flip_back"
            else:
                if s <= 0:
                    violations.append(Violation("PathConstraint", t,
                                                {"robot": 2, "rule": "flip must land on gamma'",
                                                 "stop": pos.as_tuple()}))
                    break
                expected = "flip_out"
            matched += 1
        progress = PhaseProgress(matched, [t for t, _ in stops[:matched]],
                                 cycles=matched // 3)
        return progress, violations

    return ProblemSpec("fff", {"u": u, "h0": h0, "seed": seed}, "perpetual",
                       initial, meta, cycle_monitor=cycle_monitor)


# ---------------------------------------------------------------------------
# Newcomer
# ---------------------------------------------------------------------------

def newcomer_spec(n: int = 8, rho: float = 2.0, seed: int = 0,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """n robots on a circle, one in the center, a newcomer outside.

    The newcomer walks its line of sight to the boundary; the center robot
    then retreats along that radius to half a radius from the newcomer.
    """
    if n < 7:
        raise InstanceError("newcomer needs n >= 7 circle robots")
    rng = random.Random(f"nwc:{seed}")
    for _ in range(256):
        angles = sorted(rng.uniform(0.0, TAU) for _ in range(n))
        gaps = [(angles[(i + 1) % n] - angles[i]) % TAU for i in range(n)]
        if min(gaps) < TAU / (4 * n):
            continue
        widest = max(range(n), key=lambda i: gaps[i])
        phi_s = (angles[widest] + gaps[widest] / 2.0) % TAU
        move = _rigid_motion(rng)
        O = move(Point(0.0, 0.0))
        ring = [move(Point(rho * math.cos(a), rho * math.sin(a))) for a in angles]
        ds = rng.uniform(1.5, 2.2) * rho
        s = move(Point(ds * math.cos(phi_s), ds * math.sin(phi_s)))
        if not _newcomer_valid(ring, O, s, rho, tol):
            continue
        initial = Configuration.of(ring + [O, s])
        _check_initial(initial, tol)
        c_idx, s_idx = n, n + 1
        u = (s - O).unit()
        boundary = O + u.scaled(rho)
        c_target = O + u.scaled(rho / 2.0)
        scale = _diameter(initial)
        meta = {"O": O, "rho": rho, "c": c_idx, "s": s_idx,
                "boundary": boundary, "c_target": c_target}

        def phi1(cfg: Configuration) -> bool:
            pos = cfg.positions()
            return (_near(pos[s_idx], boundary, scale, tol)
                    and _near(pos[c_idx], O, scale, tol)
                    and all(_near(pos[i], ring[i], scale, tol) for i in range(n)))

        def phi2(cfg: Configuration) -> bool:
            pos = cfg.positions()
            return (_near(pos[s_idx], boundary, scale, tol)
                    and _near(pos[c_idx], c_target, scale, tol)
                    and all(_near(pos[i], ring[i], scale, tol) for i in range(n)))

        def phase_order(trace: Trace, progress: PhaseProgress) -> list[Violation]:
            # s moves only before phi1; c only between phi1 and phi2.
            out = []
            t1 = progress.phase_entry_times[0] if progress.current_phase >= 1 else None
            for mv in trace.moves():
                if mv.robot == s_idx and t1 is not None and mv.t_start >= t1:
                    out.append(Violation("PathConstraint", mv.t_start,
                                         {"robot": s_idx, "rule": "s must stay still after phase 1"}))
                if mv.robot == c_idx and (t1 is None or mv.t_start < t1):
                    out.append(Violation("PathConstraint", mv.t_start,
                                         {"robot": c_idx, "rule": "c must stay still during phase 1"}))
            return out

        path = (
            _still_robots(tuple(range(n)), "circle robots must stay still"),
            _stops_only_at(s_idx, lambda _: [boundary], scale, tol,
                           "s stops only on the boundary"),
            _stops_only_at(c_idx, lambda _: [c_target], scale, tol,
                           "c stops only at half a radius from s"),
            phase_order,
            _still_after_completion(2),
        )
        return ProblemSpec("nwc", {"n": n, "rho": rho, "seed": seed}, "finite",
                           initial, meta, (phi1, phi2), path)
    raise InstanceError("could not generate a valid newcomer instance")


def _newcomer_valid(ring: list[Point], O: Point, s: Point, rho: float,
                    tol: Tolerance) -> bool:
    """Check the exact geometric role guards the algorithm will apply."""
    from .algos import nwc_outsider_candidates, nwc_ring_view
    from .model import visible_set

    # Unobstructed sight line s -> c, with a clearance margin.
    for x in ring:
        if point_segment_distance(x, s, O) < 0.05 * rho:
            return False
    everyone = ring + [O, s]
    n_all = len(everyone)
    views = []
    for i in range(n_all):
        vis = visible_set(everyone, i, False, tol)
        views.append([everyone[j] - everyone[i] for j in sorted(vis)])
    c_idx, s_idx = n_all - 2, n_all - 1
    for i in range(n_all):
        ring_view = nwc_ring_view(views[i])
        if (ring_view is not None) != (i == c_idx):
            return False
        outsiders = nwc_outsider_candidates(views[i])
        if i == s_idx:
            if len(outsiders) != 1:
                return False
        elif i != c_idx and outsiders:
            return False
    return True


# ---------------------------------------------------------------------------
# Spinning
# ---------------------------------------------------------------------------

def spinning_spec(angles_deg: Optional[Sequence[float]] = None, n: Optional[int] = None,
                  rho: float = 1.0, seed: int = 0,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Perpetual uniform rotation by half the unique minimal angular gap.

    Pass explicit angles, or a robot count n to sample angles with a unique
    minimal gap and a derivable global direction (rejection sampling).
    """
    rng = random.Random(f"spi:{seed}")
    if angles_deg is None:
        angles_deg = ((0, 20, 60, 100, 200, 280) if n is None
                      else _sample_spin_angles(n, rng))
    if len(angles_deg) < 5:
        raise InstanceError("spinning needs n >= 5 robots")
    move = _rigid_motion(rng)
    O = move(Point(0.0, 0.0))
    pts = [move(Point(rho * math.cos(math.radians(a)), rho * math.sin(math.radians(a))))
           for a in angles_deg]
    try:
        frame = spin_frame(pts, O, rho, tol)
    except Exception as exc:
        raise InstanceError(f"instance rejected: {exc}") from exc
    initial = Configuration.of(pts)
    _check_initial(initial, tol)
    scale = _diameter(initial)
    meta = {"O": O, "rho": rho, "alpha": frame.alpha, "orientation": frame.orientation}

    def cycle_monitor(trace: Trace) -> tuple[PhaseProgress, list[Violation]]:
        violations: list[Violation] = []
        eps = tol.length(scale) * 64
        settled = list(pts)
        counts = [0] * len(pts)
        for mv in sorted(trace.moves(), key=lambda m: m.t_start):
            i = mv.robot
            expected = rotate_about(settled[i], O, frame.alpha / 2.0, frame.orientation)
            on_circle = abs(mv.to.dist(O) - rho) <= eps
            if not on_circle or mv.to.dist(expected) > eps:
                violations.append(Violation("PathConstraint", mv.t_end,
                                            {"robot": i, "stop": mv.to.as_tuple(),
                                             "expected": expected.as_tuple(),
                                             "rule": "stops only on rotation targets"}))
                break
            settled[i] = mv.to
            counts[i] += 1
        cycles = min(counts) if counts else 0
        progress = PhaseProgress(cycles, [], cycles=cycles)
        return progress, violations

    return ProblemSpec("spi", {"angles_deg": tuple(angles_deg), "rho": rho, "seed": seed},
                       "perpetual", initial, meta, cycle_monitor=cycle_monitor)


def _sample_spin_angles(n: int, rng: random.Random) -> tuple[float, ...]:
    if n < 5:
        raise InstanceError("spinning needs n >= 5 robots")
    for _ in range(256):
        angles = sorted(rng.uniform(0.0, 360.0) for _ in range(n))
        gaps = sorted((angles[(i + 1) % n] - angles[i]) % 360.0 for i in range(n))
        if gaps[0] < 360.0 / (6 * n) or gaps[1] < 1.2 * gaps[0]:
            continue
        pts = [Point(math.cos(math.radians(a)), math.sin(math.radians(a)))
               for a in angles]
        try:
            spin_frame(pts, Point(0.0, 0.0), 1.0)
        except Exception:
            continue
        return tuple(angles)
    raise InstanceError("could not sample a valid spinning instance")


# ---------------------------------------------------------------------------
# AngleShift
# ---------------------------------------------------------------------------

def angle_shift_spec(ab: float = 2.0, ac: float = 3.0, alpha_deg: float = 80.0,
                     seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """b rotates by alpha about a, c rotates by pi - alpha, in one round.

    The initial triangle must be acute and scalene with alpha the greatest
    angle at a and the smallest at c.
    """
    rng = random.Random(f"ash:{seed}")
    move = _rigid_motion(rng)
    alpha = math.radians(alpha_deg)
    a = move(Point(0.0, 0.0))
    b = move(Point(ab, 0.0))
    c = move(Point(ac * math.cos(alpha), ac * math.sin(alpha)))
    ang_a, ang_b, ang_c = _triangle_angles(a, b, c)
    margin = math.radians(1.0)
    if not (ang_a > ang_b + margin and ang_b > ang_c + margin):
        raise InstanceError("need a strictly scalene triangle with the greatest angle at a "
                            "and the smallest at c")
    if max(ang_a, ang_b, ang_c) >= math.pi / 2 - margin:
        raise InstanceError("triangle must be acute")
    orient = 1 if (b - a).cross(c - a) > 0 else -1
    b_target = rotate_about(b, a, ang_a, orient)
    c_target = rotate_about(c, a, math.pi - ang_a, orient)
    initial = Configuration.of([a, b, c])
    _check_initial(initial, tol)
    scale = _diameter(initial)
    from .geom import segments_intersect
    if segments_intersect(b, b_target, c, c_target, tol):
        raise InstanceError("the two FSYNC chords collide; instance rejected")
    if point_segment_distance(a, b, b_target) <= tol.length(scale) * 8:
        raise InstanceError("b's chord passes through a")
    if point_segment_distance(a, c, c_target) <= tol.length(scale) * 8:
        raise InstanceError("c's chord passes through a")
    meta = {"a": 0, "b": 1, "c": 2, "alpha": ang_a, "orientation": orient,
            "b_target": b_target, "c_target": c_target}

    def phi1(cfg: Configuration) -> bool:
        pos = cfg.positions()
        return (_near(pos[0], a, scale, tol) and _near(pos[1], b_target, scale, tol)
                and _near(pos[2], c_target, scale, tol))

    path = (
        _still_robots((0,), "rotation center a must stay still"),
        _stops_only_at(1, lambda _: [b_target], scale, tol, "b stops only at its target"),
        _stops_only_at(2, lambda _: [c_target], scale, tol, "c stops only at its target"),
        _still_after_completion(1),
    )
    return ProblemSpec("ash", {"ab": ab, "ac": ac, "alpha_deg": alpha_deg, "seed": seed},
                       "finite", initial, meta, (phi1,), path)


def _triangle_angles(a: Point, b: Point, c: Point) -> tuple[float, float, float]:
    def ang(at: Point, u: Point, v: Point) -> float:
        x, y = u - at, v - at
        return math.acos(max(-1.0, min(1.0, x.dot(y) / (x.norm() * y.norm()))))
    return ang(a, b, c), ang(b, a, c), ang(c, a, b)


# ---------------------------------------------------------------------------
# Pseudo
# ---------------------------------------------------------------------------

OCTAGON_SLOTS = (0, 1, 2, 4, 5, 6, 7)  # slot 3 empty; matches the 7-member octagon


def pseudo_spec(n: int = 8, slots: Optional[Sequence[int]] = None,
                m: Optional[int] = None, rho: float = 1.0,
                w_angle_deg: Optional[float] = 265.0, w_dist: float = 2.3,
                seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Pseudo-polygon members plus a watcher in the safe zone.

    The farthest member from the watcher must move to a point of the safe
    zone across the b-c line, off every line through the watcher and
    another member; everyone else stays still.  Pass explicit slots and a
    watcher placement, or counts (n, m) to sample them.
    """
    rng = random.Random(f"pse:{seed}")
    if slots is None and (m is not None or n != 8):
        return _sample_pseudo(n, m if m is not None else n // 2 + 2, rho, seed, tol)
    if slots is None:
        slots = OCTAGON_SLOTS
    m = len(slots)
    if n < 6 or m < n / 2 + 2:
        raise InstanceError("pseudo needs n >= 6 and m >= n/2 + 2 members")
    if len(set(s % n for s in slots)) != m:
        raise InstanceError("duplicate polygon slots")
    move = _rigid_motion(rng)
    O = move(Point(0.0, 0.0))
    phase0 = TAU / (2 * n)
    members = [move(Point(rho * math.cos(phase0 + TAU * k / n),
                          rho * math.sin(phase0 + TAU * k / n))) for k in slots]
    w = move(Point(w_dist * rho * math.cos(math.radians(w_angle_deg)),
                   w_dist * rho * math.sin(math.radians(w_angle_deg))))
    polygon = RegularPolygon(O, rho, n, (move(Point(math.cos(phase0), math.sin(phase0))) - O).angle())
    _validate_pseudo_instance(polygon, members, w, rho, tol)
    initial = Configuration.of(members + [w])
    _check_initial(initial, tol)
    w_idx = m
    dists = [mm.dist(w) for mm in members]
    a_idx = max(range(m), key=lambda i: dists[i])
    b_idx, c_idx = _perimeter_neighbors(members, a_idx, O)
    if abs(members[b_idx].dist(w) - members[c_idx].dist(w)) < 1e-3 * rho:
        raise InstanceError("dist(b,w) and dist(c,w) are indistinguishable")
    if members[b_idx].dist(w) < members[c_idx].dist(w):
        b_idx, c_idx = c_idx, b_idx
    bc = members[c_idx] - members[b_idx]
    side_a = bc.cross(members[a_idx] - members[b_idx])
    side_O = bc.cross(O - members[b_idx])
    if side_a * side_O >= -1e-6 * rho * rho:
        raise InstanceError("polygon center is not across line(b,c) from a")
    from .algos import pse_reconstruct, pse_roles, pse_target
    local = [members[a_idx] - members[a_idx]] + \
        [p - members[a_idx] for i, p in enumerate(members) if i != a_idx] + \
        [w - members[a_idx]]
    view = pse_reconstruct(local)
    if view is None:
        raise InstanceError("instance is not uniquely reconstructible")
    roles = pse_roles(view)
    if roles is None or roles[0] != 0 or pse_target(view, *roles) is None:
        raise InstanceError("no valid destination exists for the mover")
    scale = _diameter(initial)
    meta = {"O": O, "rho": rho, "n": n, "polygon": polygon, "w": w_idx,
            "a": a_idx, "b": b_idx, "c": c_idx}

    a0, b0, c0 = members[a_idx], members[b_idx], members[c_idx]

    def valid_destination(x: Point) -> bool:
        if not safe_zone_contains(polygon, x, tol):
            return False
        side_a = (c0 - b0).cross(a0 - b0)
        side_x = (c0 - b0).cross(x - b0)
        if side_a * side_x >= 0:
            return False
        return all(not collinear(w, members[j], x, tol)
                   for j in range(m) if j != a_idx)

    def phi1(cfg: Configuration) -> bool:
        pos = cfg.positions()
        others_ok = all(_near(pos[i], members[i], scale, tol)
                        for i in range(m) if i != a_idx)
        return others_ok and _near(pos[w_idx], w, scale, tol) and valid_destination(pos[a_idx])

    def a_stops(trace: Trace, progress: PhaseProgress) -> list[Violation]:
        out = []
        for mv in trace.moves():
            if mv.robot == a_idx and not valid_destination(mv.to):
                out.append(Violation("PathConstraint", mv.t_end,
                                     {"robot": a_idx, "stop": mv.to.as_tuple(),
                                      "rule": "a must stop in the safe zone across bc"}))
        return out

    still = tuple(i for i in range(m + 1) if i != a_idx)
    path = (
        _still_robots(still, "only the farthest robot from w may move"),
        a_stops,
        _still_after_completion(1),
    )
    return ProblemSpec("pse", {"n": n, "slots": tuple(slots), "rho": rho,
                               "w_angle_deg": w_angle_deg, "w_dist": w_dist, "seed": seed},
                       "finite", initial, meta, (phi1,), path)


def _sample_pseudo(n: int, m: int, rho: float, seed: int,
                   tol: Tolerance) -> ProblemSpec:
    if n < 6 or m < n / 2 + 2 or m > n:
        raise InstanceError("pseudo needs n >= 6 and n/2 + 2 <= m <= n")
    rng = random.Random(f"pse-sample:{seed}")
    for _ in range(512):
        slots = tuple(sorted(rng.sample(range(n), m)))
        w_angle = rng.uniform(0.0, 360.0)
        w_dist = rng.uniform(1.6, 3.0)
        try:
            return pseudo_spec(n=n, slots=slots, rho=rho, w_angle_deg=w_angle,
                               w_dist=w_dist, seed=seed, tol=tol)
        except InstanceError:
            continue
    raise InstanceError("could not sample a valid pseudo instance")


def _perimeter_neighbors(members: list[Point], a_idx: int, O: Point) -> tuple[int, int]:
    """First members found from a along both perimeter directions."""
    order = angular_order(members, O)
    ring = list(order.ordered)
    pos = next(k for k, p in enumerate(ring) if p is members[a_idx] or p == members[a_idx])
    nxt = ring[(pos + 1) % len(ring)]
    prv = ring[(pos - 1) % len(ring)]
    return members.index(nxt), members.index(prv)


def _validate_pseudo_instance(polygon: RegularPolygon, members: list[Point], w: Point,
                              rho: float, tol: Tolerance) -> None:
    if not safe_zone_contains(polygon, w, tol):
        raise InstanceError("watcher is not in the safe zone")
    if abs(w.dist(polygon.center) - rho) < 0.2 * rho:
        raise InstanceError("watcher too close to the circumcircle")
    dists = sorted((mm.dist(w) for mm in members), reverse=True)
    if dists[0] - dists[1] < 1e-3 * rho:
        raise InstanceError("farthest robot from the watcher is ambiguous")


# ---------------------------------------------------------------------------
# LineStretch
# ---------------------------------------------------------------------------

def line_stretch_spec(n: int = 4, d: float = 1.0, seed: int = 0,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Equally spaced collinear robots; endpoints stretch the spacing to d + d/n."""
    if n <= 3:
        raise InstanceError("line stretch needs n > 3")
    rng = random.Random(f"ls:{seed}")
    move = _rigid_motion(rng)
    pts = [move(Point(i * d, 0.0)) for i in range(n)]
    origin = move(Point(0.0, 0.0))
    u = (move(Point(1.0, 0.0)) - origin)
    initial = Configuration.of(pts)
    _check_initial(initial, tol)
    stretch = d / n
    t0 = pts[0] - u.scaled(stretch)
    t1 = pts[-1] + u.scaled(stretch)
    scale = _diameter(initial) + 2 * stretch
    meta = {"d": d, "n": n, "dir": u, "targets": {0: t0, n - 1: t1}}

    def phi1(cfg: Configuration) -> bool:
        pos = cfg.positions()
        return (_near(pos[0], t0, scale, tol) and _near(pos[-1], t1, scale, tol)
                and all(_near(pos[i], pts[i], scale, tol) for i in range(1, n - 1)))

    def on_gamma(trace: Trace, progress: PhaseProgress) -> list[Violation]:
        out = []
        for mv in trace.moves():
            for pt in (mv.frm, mv.to):
                if abs((pt - origin).cross(u)) > tol.length(scale) * 8:
                    out.append(Violation("PathConstraint", mv.t_start,
                                         {"robot": mv.robot, "rule": "must travel along gamma"}))
                    break
        return out

    path = (
        _still_robots(tuple(range(1, n - 1)), "internal robots must stay still"),
        _stops_only_at(0, lambda _: [t0], scale, tol, "endpoint stops only at its target"),
        _stops_only_at(n - 1, lambda _: [t1], scale, tol, "endpoint stops only at its target"),
        on_gamma,
        _still_after_completion(1),
    )
    return ProblemSpec("ls", {"n": n, "d": d, "seed": seed}, "finite", initial,
                       meta, (phi1,), path)


PROBLEM_BUILDERS: dict[str, Callable[..., ProblemSpec]] = {
    "trt": triangle_round_trip_spec,
    "fff": flip_flop_flip_spec,
    "nwc": newcomer_spec,
    "spi": spinning_spec,
    "ash": angle_shift_spec,
    "pse": pseudo_spec,
    "ls": line_stretch_spec,
}

PROBLEM_ALIASES = {
    "triangleroundtrip": "trt", "flipflopflip": "fff", "newcomer": "nwc",
    "spinning": "spi", "angleshift": "ash", "pseudo": "pse", "linestretch": "ls",
}


def build_problem(name: str, params: dict | None = None,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    key = PROBLEM_ALIASES.get(name.lower(), name.lower())
    if key not in PROBLEM_BUILDERS:
        raise InstanceError(f"unknown problem {name!r}; known: {sorted(PROBLEM_BUILDERS)}")
    return PROBLEM_BUILDERS[key](**(params or {}), tol=tol)


# Instance files: {"problem": ..., "params": {...}, "robots": [{"x":..,"y":..}]}

def instance_to_json(spec: ProblemSpec) -> dict:
    return {"problem": spec.name, "params": _json_params(spec.params),
            "robots": [{"x": p.x, "y": p.y} for p in spec.initial.positions()]}


def _json_params(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def instance_from_json(doc: dict, tol: Tolerance = DEFAULT_TOLERANCE) -> ProblemSpec:
    """Rebuild the spec from its parameters and verify the stored robots match."""
    params = {k: tuple(v) if isinstance(v, list) else v for k, v in doc["params"].items()}
    spec = build_problem(doc["problem"], params, tol)
    stored = [Point(r["x"], r["y"]) for r in doc["robots"]]
    regenerated = spec.initial.positions()
    if len(stored) != len(regenerated) or any(
            s.dist(g) > 1e-9 for s, g in zip(stored, regenerated)):
        raise InstanceError("stored robots do not match the regenerated instance")
    return spec

"""Executes one algorithm under one model and one schedule, producing a trace.

One execution is strictly sequential and event-driven.  FSYNC/SSYNC rounds
are atomic: all activated robots look against the round-start configuration,
lights apply at the start of the move step, and every move completes within
the round.  ASYNC activations carry their own look/move windows; a
destination is fixed at the look and the motion is linear and rigid.
"""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .geom import (DEFAULT_TOLERANCE, Point, Tolerance, blocks,
                   point_segment_distance, segments_intersect)
from .model import (OFF, Configuration, LightClass, LocalFrame, ModelId, Snapshot,
                    take_snapshot, validate_configuration)
from .sched import AsyncActivation, RoundSchedule

EVENT_RANK = {"round_end": 0, "round_begin": 1, "look": 2, "light": 3,
              "move_start": 4, "move_end": 5}

# In-round timing for the synchronous modes: look at r, lights and motion
# start at r + LIGHT_AT, motion ends at r + SETTLE_AT, round closes at r + 1.
LIGHT_AT = 0.25
SETTLE_AT = 0.75


class ProtocolError(RuntimeError):
    """The algorithm violated its palette or light-class contract."""


@dataclass(frozen=True, slots=True)
class Move:
    robot: int
    frm: Point
    to: Point
    t_start: float
    t_end: float

    def at(self, t: float) -> Point:
        if t <= self.t_start:
            return self.frm
        if t >= self.t_end:
            return self.to
        u = (t - self.t_start) / (self.t_end - self.t_start)
        return self.frm + (self.to - self.frm).scaled(u)


@dataclass(frozen=True, slots=True)
class TraceEvent:
    t: float
    kind: str
    robot: Optional[int]
    payload: dict

    def sort_key(self):
        return (self.t, EVENT_RANK[self.kind], -1 if self.robot is None else self.robot)


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str  # Multiplicity | TrajectoryOverlap | PathConstraint | PhaseRegression | Starvation
    t: float
    details: dict


@dataclass
class Trace:
    model: ModelId
    seed: int
    n: int
    horizon: float
    transparent: bool
    initial: Configuration
    events: list[TraceEvent]
    final: Configuration
    violations: list[Violation] = field(default_factory=list)
    aborted: bool = False

    def moves(self) -> list[Move]:
        out = []
        open_starts: dict[int, TraceEvent] = {}
        for ev in self.events:
            if ev.kind == "move_start":
                open_starts[ev.robot] = ev
            elif ev.kind == "move_end":
                start = open_starts.pop(ev.robot)
                out.append(Move(ev.robot,
                                Point(*start.payload["from"]),
                                Point(*start.payload["to"]),
                                start.t, ev.t))
        return out

    def looks(self) -> list[TraceEvent]:
        return [ev for ev in self.events if ev.kind == "look"]


_LAST_KEY = "\uffff"  # sorts after any color name


def _light_at(history: list[tuple[float, str]], t: float) -> str:
    idx = bisect_right(history, (t, _LAST_KEY)) - 1
    return history[max(idx, 0)][1]


def _decide(algorithm, snap: Snapshot, frame: LocalFrame, current_pos: Point,
            current_color: str, tol: Tolerance) -> tuple[Point, Optional[str]]:
    dest_local, color = algorithm.decide(snap)
    if color is not None and color not in algorithm.palette:
        raise ProtocolError(f"{algorithm.name} emitted color {color!r} outside its palette")
    if algorithm.light is LightClass.OBLOT and color not in (None, OFF):
        raise ProtocolError(f"{algorithm.name} is OBLOT but tried to set a light")
    dest = frame.to_global(dest_local)
    if dest.dist(current_pos) <= tol.length(max(current_pos.norm(), 1.0)):
        dest = current_pos  # null movement
    new_color = None if (color is None or color == current_color) else color
    return dest, new_color


def run(model: ModelId, algorithm, initial: Configuration, schedule,
        horizon: Optional[float] = None, transparent: bool = False,
        seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE,
        monitors: Sequence[Callable[["Trace"], list[Violation]]] = ()) -> Trace:
    """Execute and return the trace; identical inputs give identical traces."""
    if algorithm.light is not model.light:
        raise ProtocolError(
            f"algorithm {algorithm.name} ({algorithm.light.name}) does not fit {model.label()}")
    bad = validate_configuration(initial, tol)
    if bad is not None:
        raise ValueError(f"initial configuration invalid: {bad}")
    rng = random.Random(f"run:{seed}")
    if isinstance(schedule, RoundSchedule):
        trace = _run_rounds(model, algorithm, initial, schedule, transparent, seed, rng, tol)
    else:
        acts = sorted(schedule, key=lambda a: (a.t_look, a.robot))
        last_end: dict[int, float] = {}
        for a in acts:
            if a.t_look < last_end.get(a.robot, -1.0):
                raise ValueError(f"robot {a.robot} activations overlap at t={a.t_look}")
            last_end[a.robot] = a.t_move_end
        if horizon is None:
            horizon = max((a.t_move_end for a in acts), default=0.0) + 1.0
        trace = _run_async(model, algorithm, initial, acts, float(horizon),
                           transparent, seed, rng, tol)
    for monitor in monitors:
        trace.violations.extend(monitor(trace))
    return trace


def _run_rounds(model: ModelId, algorithm, initial: Configuration,
                schedule: RoundSchedule, transparent: bool, seed: int,
                rng: random.Random, tol: Tolerance) -> Trace:
    n = initial.n
    positions = initial.positions()
    lights = initial.lights()
    events: list[TraceEvent] = []
    violations: list[Violation] = []
    light_history = [[(-1.0, c)] for c in lights]
    aborted = False

    for r, active in enumerate(schedule.rounds):
        if aborted:
            break
        t_r = float(r)
        events.append(TraceEvent(t_r, "round_begin", None, {"round": r}))
        start_positions = list(positions)
        start_lights = list(lights)
        round_moves: list[Move] = []
        for i in sorted(active):
            frame = LocalFrame.sample(rng, start_positions[i])
            snap = take_snapshot(start_positions, start_lights, i, frame, model,
                                 transparent, rng, tol)
            events.append(TraceEvent(t_r, "look", i, {"n_visible": snap.k}))
            dest, new_color = _decide(algorithm, snap, frame, start_positions[i],
                                      start_lights[i], tol)
            if new_color is not None:
                events.append(TraceEvent(t_r + LIGHT_AT, "light", i, {"color": new_color}))
                light_history[i].append((t_r + LIGHT_AT, new_color))
                lights[i] = new_color
            if dest is not start_positions[i]:
                mv = Move(i, start_positions[i], dest, t_r + LIGHT_AT, t_r + SETTLE_AT)
                round_moves.append(mv)
                events.append(TraceEvent(mv.t_start, "move_start", i,
                                         {"from": mv.frm.as_tuple(), "to": mv.to.as_tuple()}))
                events.append(TraceEvent(mv.t_end, "move_end", i, {"at": mv.to.as_tuple()}))
                positions[i] = dest
        viol = _round_collisions(round_moves, start_positions, positions, t_r, tol)
        if viol is not None:
            violations.append(viol)
            aborted = True
        events.append(TraceEvent(t_r + 1.0, "round_end", None, {"round": r}))

    events.sort(key=TraceEvent.sort_key)
    final = Configuration(tuple(zip(positions, lights)))
    return Trace(model, seed, n, float(len(schedule.rounds)), transparent,
                 initial, events, final, violations, aborted)


def _round_collisions(round_moves: list[Move], start_positions: list[Point],
                      end_positions: list[Point], t_r: float,
                      tol: Tolerance) -> Optional[Violation]:
    """Same-round moves count as concurrent; parked robots hold all round."""
    scale = max((p.norm() for p in start_positions), default=1.0)
    eps = tol.length(scale)
    moving = {mv.robot for mv in round_moves}
    for a_idx in range(len(round_moves)):
        for b_idx in range(a_idx + 1, len(round_moves)):
            a, b = round_moves[a_idx], round_moves[b_idx]
            if segments_intersect(a.frm, a.to, b.frm, b.to, tol):
                return Violation("TrajectoryOverlap", t_r + LIGHT_AT,
                                 {"robots": [a.robot, b.robot], "round": int(t_r)})
    for mv in round_moves:
        for j, p in enumerate(start_positions):
            if j == mv.robot or j in moving:
                continue
            if point_segment_distance(p, mv.frm, mv.to) <= eps:
                return Violation("TrajectoryOverlap", t_r + LIGHT_AT,
                                 {"robots": [mv.robot, j], "through": p.as_tuple()})
    for i in range(len(end_positions)):
        for j in range(i + 1, len(end_positions)):
            if end_positions[i].dist(end_positions[j]) <= eps:
                return Violation("Multiplicity", t_r + SETTLE_AT, {"robots": [i, j]})
    return None


def _run_async(model: ModelId, algorithm, initial: Configuration,
               schedule: list[AsyncActivation], horizon: float, transparent: bool,
               seed: int, rng: random.Random, tol: Tolerance) -> Trace:
    n = initial.n
    parked = initial.positions()  # latest settled position per robot
    lights = initial.lights()
    light_history = [[(-1.0, c)] for c in lights]
    moves_by_robot: list[list[Move]] = [[] for _ in range(n)]
    base_positions = initial.positions()
    events: list[TraceEvent] = []
    violations: list[Violation] = []
    aborted = False

    # Scheduled move windows per robot, for guaranteed-parked reasoning.
    windows: list[list[tuple[float, float]]] = [[] for _ in range(n)]
    for a in schedule:
        windows[a.robot].append((a.t_move_start, a.t_move_end))
    for w in windows:
        w.sort()

    def position_at(i: int, t: float) -> Point:
        mvs = moves_by_robot[i]
        for mv in reversed(mvs):
            if t >= mv.t_end:
                return mv.to
            if t >= mv.t_start:
                return mv.at(t)
        return base_positions[i]

    def next_window_start(i: int, t: float) -> float:
        for s, _ in windows[i]:
            if s > t:
                return s
        return float("inf")

    def check_new_move(mv: Move) -> Optional[Violation]:
        scale = max((p.norm() for p in parked), default=1.0)
        eps = tol.length(scale)
        for other in all_moves:
            if other.robot == mv.robot:
                continue
            lo = max(mv.t_start, other.t_start)
            hi = min(mv.t_end, other.t_end)
            if lo < hi:  # open-interval overlap
                if segments_intersect(mv.frm, mv.to, other.frm, other.to, tol):
                    return Violation("TrajectoryOverlap", lo,
                                     {"robots": [mv.robot, other.robot]})
                if _min_pair_distance(mv, other, lo, hi) <= eps:
                    return Violation("Multiplicity", lo,
                                     {"robots": [mv.robot, other.robot]})
        # Guaranteed-parked portion of every other robot during this move.
        for j in range(n):
            if j == mv.robot:
                continue
            guard_end = min(mv.t_end, next_window_start(j, mv.t_start))
            if guard_end <= mv.t_start:
                continue
            p = position_at(j, mv.t_start)
            sub_from = mv.at(mv.t_start)
            sub_to = mv.at(guard_end)
            if point_segment_distance(p, sub_from, sub_to) <= eps:
                return Violation("TrajectoryOverlap", mv.t_start,
                                 {"robots": [mv.robot, j], "through": p.as_tuple()})
        return None

    all_moves: list[Move] = []
    for act in schedule:
        if aborted or act.t_look > horizon:
            break
        i = act.robot
        now = act.t_look
        positions_now = [position_at(j, now) for j in range(n)]
        lights_now = [_light_at(light_history[j], now) for j in range(n)]
        frame = LocalFrame.sample(rng, positions_now[i])
        snap = take_snapshot(positions_now, lights_now, i, frame, model,
                             transparent, rng, tol)
        events.append(TraceEvent(now, "look", i, {"n_visible": snap.k}))
        dest, new_color = _decide(algorithm, snap, frame, positions_now[i],
                                  lights_now[i], tol)
        if new_color is not None:
            events.append(TraceEvent(act.t_move_start, "light", i, {"color": new_color}))
            light_history[i].append((act.t_move_start, new_color))
        if dest is not positions_now[i]:
            mv = Move(i, positions_now[i], dest, act.t_move_start, act.t_move_end)
            viol = check_new_move(mv)
            moves_by_robot[i].append(mv)
            all_moves.append(mv)
            parked[i] = dest
            events.append(TraceEvent(mv.t_start, "move_start", i,
                                     {"from": mv.frm.as_tuple(), "to": mv.to.as_tuple()}))
            events.append(TraceEvent(mv.t_end, "move_end", i, {"at": mv.to.as_tuple()}))
            if viol is not None:
                violations.append(viol)
                aborted = True

    events.sort(key=TraceEvent.sort_key)
    horizon = max([horizon] + [ev.t for ev in events])
    final_positions = [position_at(j, horizon) for j in range(n)]
    final_lights = [_light_at(light_history[j], horizon) for j in range(n)]
    final = Configuration(tuple(zip(final_positions, final_lights)))
    return Trace(model, seed, n, horizon, transparent, initial, events, final,
                 violations, aborted)


def _min_pair_distance(a: Move, b: Move, lo: float, hi: float) -> float:
    """Minimum distance between two linearly moving robots over [lo, hi]."""
    pa0, pa1 = a.at(lo), a.at(hi)
    pb0, pb1 = b.at(lo), b.at(hi)
    d0 = pa0 - pb0
    d1 = (pa1 - pb1) - d0
    # |d0 + u*d1| over u in [0,1]
    aa = d1.dot(d1)
    if aa == 0.0:
        return d0.norm()
    u = max(0.0, min(1.0, -d0.dot(d1) / aa))
    return (d0 + d1.scaled(u)).norm()


# ---------------------------------------------------------------------------
# Offline monitors and trace utilities
# ---------------------------------------------------------------------------

def configuration_at(trace: Trace, t: float) -> Configuration:
    """Configuration at time t: linear interpolation inside active moves."""
    n = trace.n
    positions = trace.initial.positions()
    lights = trace.initial.lights()
    moves = trace.moves()
    per_robot: list[list[Move]] = [[] for _ in range(n)]
    for mv in moves:
        per_robot[mv.robot].append(mv)
    for i in range(n):
        for mv in per_robot[i]:
            if t >= mv.t_end:
                positions[i] = mv.to
            elif t >= mv.t_start:
                positions[i] = mv.at(t)
    for ev in trace.events:
        if ev.kind == "light" and ev.t <= t:
            lights[ev.robot] = ev.payload["color"]
    return Configuration(tuple(zip(positions, lights)))


def _timeline(trace: Trace, i: int) -> list[tuple[float, float, Point, Point]]:
    """Piecewise-linear motion of robot i covering [0, horizon]."""
    pieces = []
    t_prev = 0.0
    p_prev = trace.initial.positions()[i]
    for mv in sorted((m for m in trace.moves() if m.robot == i), key=lambda m: m.t_start):
        if mv.t_start > t_prev:
            pieces.append((t_prev, mv.t_start, p_prev, p_prev))
        pieces.append((mv.t_start, mv.t_end, mv.frm, mv.to))
        t_prev, p_prev = mv.t_end, mv.to
    if t_prev < trace.horizon or not pieces:
        pieces.append((t_prev, max(trace.horizon, t_prev), p_prev, p_prev))
    return pieces


def collision_monitor(trace: Trace, tol: Tolerance = DEFAULT_TOLERANCE) -> list[Violation]:
    """Exhaustive offline collision check over the whole timeline.

    Multiplicity: two robots coincide at some instant.  TrajectoryOverlap:
    two temporally overlapping moves whose path segments intersect, or a
    move passing through a robot that is parked at the time.
    """
    out: list[Violation] = []
    n = trace.n
    scale = max((p.norm() for p in trace.initial.positions()), default=1.0)
    eps = tol.length(scale)
    timelines = [_timeline(trace, i) for i in range(n)]
    moves = trace.moves()

    for i in range(n):
        for j in range(i + 1, n):
            for (s0, e0, a0, a1) in timelines[i]:
                for (s1, e1, b0, b1) in timelines[j]:
                    lo, hi = max(s0, s1), min(e0, e1)
                    if lo > hi:
                        continue
                    pa = _piece_at(s0, e0, a0, a1)
                    pb = _piece_at(s1, e1, b0, b1)
                    moving_i = a0.dist(a1) > 0.0
                    moving_j = b0.dist(b1) > 0.0
                    dmin = _min_linear_distance(pa, pb, lo, hi)
                    if dmin <= eps:
                        if moving_i != moving_j:
                            through = (pb(lo) if moving_i else pa(lo)).as_tuple()
                            out.append(Violation("TrajectoryOverlap", lo,
                                                 {"robots": [i, j], "through": through}))
                        else:
                            out.append(Violation("Multiplicity", lo, {"robots": [i, j]}))

    for x in range(len(moves)):
        for y in range(x + 1, len(moves)):
            a, b = moves[x], moves[y]
            if a.robot == b.robot:
                continue
            if max(a.t_start, b.t_start) < min(a.t_end, b.t_end):
                if segments_intersect(a.frm, a.to, b.frm, b.to, tol):
                    out.append(Violation("TrajectoryOverlap", max(a.t_start, b.t_start),
                                         {"robots": [a.robot, b.robot], "moves": True}))
    return _dedupe(out)


def _piece_at(s, e, p0, p1):
    def at(t: float) -> Point:
        if e <= s or t <= s:
            return p0
        if t >= e:
            return p1
        u = (t - s) / (e - s)
        return p0 + (p1 - p0).scaled(u)
    return at


def _min_linear_distance(pa, pb, lo: float, hi: float) -> float:
    d0 = pa(lo) - pb(lo)
    d1 = (pa(hi) - pb(hi)) - d0
    aa = d1.dot(d1)
    if aa == 0.0:
        return d0.norm()
    u = max(0.0, min(1.0, -d0.dot(d1) / aa))
    return (d0 + d1.scaled(u)).norm()


def _dedupe(violations: list[Violation]) -> list[Violation]:
    seen = set()
    out = []
    for v in sorted(violations, key=lambda v: (v.t, v.kind)):
        key = (v.kind, tuple(v.details.get("robots", ())))
        if key in seen:
            continue
        seen.add(key)
        out.append(v)
    return out


def filter_snapshot(full: Snapshot, tol: Tolerance = DEFAULT_TOLERANCE) -> Snapshot:
    """Reduce a transparent snapshot to what an opaque robot would see.

    The observer sits at the local origin; an entry is dropped exactly when
    another entry blocks the segment from the origin to it.  Blocking is
    preserved by the similarity transform of local frames, so this equals
    the opaque engine's snapshot of the same world state.
    """
    from .geom import ORIGIN
    kept = []
    for e in full.visible:
        hidden = any(f is not e and blocks(ORIGIN, e.position, f.position, tol)
                     for f in full.visible)
        if not hidden:
            kept.append(e)
    return Snapshot(tuple(kept), full.own_internal, False)


def visibility_audit(trace: Trace, k: int) -> Optional[tuple[float, int]]:
    """First look that did not see the full swarm of k robots, if any."""
    for ev in trace.looks():
        if ev.payload["n_visible"] != k - 1:
            return (ev.t, ev.robot)
    return None


def first_nonnull_move_round(trace: Trace, robot: int) -> Optional[int]:
    for mv in sorted(trace.moves(), key=lambda m: m.t_start):
        if mv.robot == robot:
            return int(mv.t_start)
    return None


# ---------------------------------------------------------------------------
# Serialization: JSON lines, one event per line, header first
# ---------------------------------------------------------------------------

TRACE_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_trace(trace: Trace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "version": TRACE_VERSION,
            "model": trace.model.label(),
            "seed": trace.seed,
            "n": trace.n,
            "horizon": trace.horizon,
            "transparent": trace.transparent,
            "initial": [{"x": p.x, "y": p.y, "light": c} for p, c in trace.initial.robots],
        }
        fh.write(_dumps(header) + "\n")
        for ev in trace.events:
            fh.write(_dumps({"t": ev.t, "kind": ev.kind, "robot": ev.robot,
                             "payload": ev.payload}) + "\n")


def read_trace(path: str) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:1: corrupt header: {exc}") from exc
    if header.get("version") != TRACE_VERSION:
        raise ValueError(f"{path}: unsupported trace version {header.get('version')}")
    initial = Configuration(tuple(
        (Point(r["x"], r["y"]), r["light"]) for r in header["initial"]))
    events = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(ln)
            payload = rec["payload"]
            if "from" in payload:
                payload = {**payload, "from": tuple(payload["from"]), "to": tuple(payload["to"])}
            if "at" in payload:
                payload = {**payload, "at": tuple(payload["at"])}
            events.append(TraceEvent(rec["t"], rec["kind"], rec["robot"], payload))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValueError(f"{path}:{lineno}: corrupt event: {exc}") from exc
    trace = Trace(ModelId.parse(header["model"]), header["seed"], header["n"],
                  header["horizon"], header["transparent"], initial, events,
                  initial)
    trace.final = configuration_at(trace, trace.horizon)
    return trace

"""Activation schedules, fairness accounting, and adversarial constructions.

FSYNC/SSYNC schedules are lists of per-round activation sets over discrete
rounds; ASYNC schedules are per-robot streams of (look, move window) events
on continuous time.  Everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .geom import DEFAULT_TOLERANCE, Point, Tolerance, collinear

# Desk-scale ASYNC duration laws; the adversary's power over timing is only
# "finite but unpredictable", so bounded log-uniform draws are a convention.
LOOK_TO_MOVE = (0.1, 2.0)
MOVE_DURATION = (0.1, 2.0)
IDLE_GAP = (0.1, 4.0)
STALL_FACTOR = 4  # an SSYNC robot idle for 4n rounds is forced into the next round


class ScheduleError(ValueError):
    pass


class AdversaryInconclusive(RuntimeError):
    """The adversary's trigger never fired within the demo horizon."""


@dataclass(frozen=True, slots=True)
class RoundSchedule:
    rounds: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.rounds)


@dataclass(frozen=True, slots=True)
class AsyncActivation:
    robot: int
    t_look: float
    t_move_start: float
    t_move_end: float

    def __post_init__(self) -> None:
        ok = (math.isfinite(self.t_look) and math.isfinite(self.t_move_end)
              and self.t_look <= self.t_move_start <= self.t_move_end)
        if not ok:
            raise ScheduleError(f"bad activation times {self}")


@dataclass(frozen=True, slots=True)
class ScheduleSpec:
    """Declarative schedule description used by the CLI and generators.

    kind: 'fsync' | 'ssync' | 'async' | 'scripted'
    horizon: number of rounds (fsync/ssync/scripted) or time units (async).
    """

    kind: str
    horizon: float
    seed: int = 0
    activation_prob: float = 0.5
    rounds: Optional[tuple[frozenset[int], ...]] = None
    activations: Optional[tuple[AsyncActivation, ...]] = None


def generate(spec: ScheduleSpec, n_robots: int):
    """Materialise a ScheduleSpec into a RoundSchedule or activation list."""
    if n_robots < 1:
        raise ScheduleError("need at least one robot")
    if spec.horizon <= 0:
        raise ScheduleError("horizon must be positive")
    if spec.kind == "fsync":
        full = frozenset(range(n_robots))
        return RoundSchedule(tuple(full for _ in range(int(spec.horizon))))
    if spec.kind == "ssync":
        return _ssync_random(spec.seed, spec.activation_prob, int(spec.horizon), n_robots)
    if spec.kind == "async":
        return _async_random(spec.seed, float(spec.horizon), n_robots)
    if spec.kind == "scripted":
        if spec.rounds is not None:
            return RoundSchedule(spec.rounds)
        if spec.activations is not None:
            return list(spec.activations)
        raise ScheduleError("scripted spec carries no rounds or activations")
    raise ScheduleError(f"unknown schedule kind {spec.kind!r}")


def _ssync_random(seed: int, p: float, horizon: int, n: int) -> RoundSchedule:
    """Independent per-robot coin flips, re-rolled if empty, stall-forced fair."""
    rng = random.Random(f"ssync:{seed}")
    idle = [0] * n
    rounds = []
    for _ in range(horizon):
        active = {i for i in range(n) if idle[i] >= STALL_FACTOR * n}
        while True:
            trial = active | {i for i in range(n) if rng.random() < p}
            if trial:
                break
        rounds.append(frozenset(trial))
        for i in range(n):
            idle[i] = 0 if i in trial else idle[i] + 1
    return RoundSchedule(tuple(rounds))


def _async_random(seed: int, horizon: float, n: int) -> list[AsyncActivation]:
    def loguni(rng: random.Random, lo: float, hi: float) -> float:
        return math.exp(rng.uniform(math.log(lo), math.log(hi)))

    acts: list[AsyncActivation] = []
    for i in range(n):
        rng = random.Random(f"async:{seed}:{i}")
        t = loguni(rng, *IDLE_GAP)
        while t < horizon:
            look = t
            start = look + loguni(rng, *LOOK_TO_MOVE)
            end = start + loguni(rng, *MOVE_DURATION)
            acts.append(AsyncActivation(i, look, start, end))
            t = end + loguni(rng, *IDLE_GAP)
    acts.sort(key=lambda a: (a.t_look, a.robot))
    return acts


def activation_times(schedule, n_robots: int) -> list[tuple[float, int]]:
    """Flatten a schedule, activation list, or trace into (time, robot) pairs."""
    if isinstance(schedule, RoundSchedule):
        out = [(float(r), i) for r, s in enumerate(schedule.rounds) for i in sorted(s)]
    elif hasattr(schedule, "looks"):  # a Trace: use its look events
        out = [(ev.t, ev.robot) for ev in schedule.looks()]
    else:
        out = [(a.t_look, a.robot) for a in schedule]
    return sorted(out)


@dataclass(frozen=True, slots=True)
class StarvedRobot:
    robot: int


def check_fairness(schedule, n_robots: int) -> Optional[StarvedRobot]:
    """Report the first robot that is never activated over the horizon."""
    seen = {i for _, i in activation_times(schedule, n_robots)}
    for i in range(n_robots):
        if i not in seen:
            return StarvedRobot(i)
    return None


def epoch_partition(schedule, n_robots: int) -> list[tuple[float, float]]:
    """Greedy minimal windows in which every robot acts at least once.

    A trailing partial window (fair in the infinite extension, not yet
    complete here) is dropped.  Raises on a robot that never acts at all.
    """
    starved = check_fairness(schedule, n_robots)
    if starved is not None:
        raise ScheduleError(f"robot {starved.robot} is starved; no epoch partition")
    windows = []
    pending = set(range(n_robots))
    start: Optional[float] = None
    for t, robot in activation_times(schedule, n_robots):
        if start is None:
            start = t
        pending.discard(robot)
        if not pending:
            windows.append((start, t))
            pending = set(range(n_robots))
            start = None
    return windows


def double_activation_adversary(base: RoundSchedule, target: int, trigger_round: Optional[int],
                                n_robots: int, tail_rounds: int = 8) -> RoundSchedule:
    """SSYNC adversary: isolate the target on its trigger round, twice.

    trigger_round is the round at which the target would complete its first
    non-null move under the base schedule (found by dry-running; decisions
    depend only on the round-start snapshot, so restricting that round's
    activation set to the target alone leaves its action unchanged).  The
    schedule replays base up to the trigger, emits two consecutive rounds
    activating only the target, then resumes a fair full-activation tail.
    """
    if trigger_round is None or trigger_round >= len(base.rounds):
        raise AdversaryInconclusive("trigger never fired within the horizon")
    solo = frozenset({target})
    full = frozenset(range(n_robots))
    rounds = base.rounds[:trigger_round] + (solo, solo) + tuple(full for _ in range(tail_rounds))
    return RoundSchedule(rounds)


def collinearity_timed_look(mover_path: tuple[Point, Point, float, float],
                            b: Point, c: Point,
                            tol: Tolerance = DEFAULT_TOLERANCE) -> Optional[float]:
    """Instant at which a linearly moving robot crosses line(b, c).

    The mover travels from `frm` at t0 to `to` at t1.  Solves
    cross(a(t) - b, c - b) = 0; returns the crossing time inside [t0, t1]
    or None.  A path lying on the line degenerates to the whole interval
    and returns t0.  The caller still has to verify true hiding (c strictly
    between b and a(t)).
    """
    frm, to, t0, t1 = mover_path
    if b.dist(c) <= tol.length(b.dist(c)):
        raise ValueError("b and c must be distinct")
    line = c - b
    num = (frm - b).cross(line)
    den = (to - frm).cross(line)
    scale = max(line.norm(), frm.dist(to)) ** 2
    if abs(den) <= tol.length(scale):
        if abs(num) <= tol.length(scale):
            return t0
        return None
    s = -num / den
    if 0.0 <= s <= 1.0:
        t = t0 + s * (t1 - t0)
        a_t = frm + (to - frm).scaled(s)
        assert collinear(a_t, b, c, tol)
        return t
    return None


def load_round_schedule(path: str) -> RoundSchedule:
    """One round per line, comma-separated robot indices; blank lines skipped."""
    rounds = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rounds.append(frozenset(int(tok) for tok in line.split(",") if tok.strip()))
    return RoundSchedule(tuple(rounds))


def save_round_schedule(schedule: RoundSchedule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in schedule.rounds:
            fh.write(",".join(str(i) for i in sorted(s)) + "\n")


def load_async_schedule(path: str) -> list[AsyncActivation]:
    """JSON-lines of {robot, t_look, t_move_start, t_move_end} records."""
    acts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            acts.append(AsyncActivation(rec["robot"], rec["t_look"],
                                        rec["t_move_start"], rec["t_move_end"]))
    acts.sort(key=lambda a: (a.t_look, a.robot))
    return acts


def save_async_schedule(acts: Iterable[AsyncActivation], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in acts:
            fh.write(json.dumps({"robot": a.robot, "t_look": a.t_look,
                                 "t_move_start": a.t_move_start,
                                 "t_move_end": a.t_move_end}, sort_keys=True) + "\n")

"""Counterexample demos: adversarial schedules against fixed instances.

Each demo reproduces one impossibility construction deterministically and
reports whether the documented failure materialised.  Instances and
schedules are embedded fixtures so reruns reproduce the executions
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import algos, problems
from .engine import (Trace, first_nonnull_move_round, run, visibility_audit)
from .geom import DEFAULT_TOLERANCE, blocks, collinear
from .model import LightClass, ModelId, SyncMode, visible_set
from .sched import (AsyncActivation, RoundSchedule, ScheduleSpec,
                    collinearity_timed_look, double_activation_adversary, generate)


@dataclass
class DemoReport:
    name: str
    ok: bool
    summary: str
    lines: list[str] = field(default_factory=list)
    trace: Trace | None = None


def demo_fff_ssync_break() -> DemoReport:
    """A semi-synchronous adversary makes the round-driven solver flip twice.

    The base schedule activates only r on its first round; the adversary
    then doubles that activation.  With p and q frozen, their colors never
    advance, so r reads the same phase again and mirrors straight back.
    """
    spec = problems.flip_flop_flip_spec(u=2.0, h0=1.0, seed=0)
    alg = algos.ALGORITHMS["fff_fcom_fsync"]
    model = ModelId(LightClass.FCOM, SyncMode.SSYNC)
    r = spec.meta["r"]
    base = RoundSchedule((frozenset({r}),))
    dry = run(model, alg, spec.initial, base, seed=100)
    trigger = first_nonnull_move_round(dry, r)
    schedule = double_activation_adversary(base, r, trigger, spec.initial.n,
                                           tail_rounds=4)
    trace = run(model, alg, spec.initial, schedule, seed=100)
    progress, violations = problems.monitor(spec, trace)
    stops = [mv for mv in trace.moves() if mv.robot == r]
    gamma = spec.meta["gamma_dir"]
    b = spec.meta["b"]
    double_flip = (len(stops) >= 2
                   and (stops[0].to - b).dot(gamma) < 0    # first flip onto gamma''
                   and (stops[1].to - b).dot(gamma) > 0)   # flipped straight back
    flagged = any(v.kind == "PathConstraint" and v.details.get("robot") == r
                  for v in violations)
    ok = double_flip and flagged
    return DemoReport(
        "fff-ssync-break", ok,
        "r flipped again on its doubled activation" if ok else "no double flip",
        [f"rounds: {[sorted(s) for s in schedule.rounds]}",
         f"r stops: {[(m.t_end, m.to.as_tuple()) for m in stops[:3]]}",
         f"violations: {[v.details.get('rule') for v in violations]}"],
        trace)


def demo_spinning_double_activation() -> DemoReport:
    """Doubling r_0's activation makes it rotate twice in a row."""
    spec = problems.spinning_spec(seed=0)
    alg = algos.ALGORITHMS["spi_oblot_fsync"]
    model = ModelId(LightClass.OBLOT, SyncMode.SSYNC)
    from .geom import spin_frame
    frame = spin_frame(spec.initial.positions(), spec.meta["O"], spec.meta["rho"])
    r0 = min(range(spec.initial.n),
             key=lambda i: spec.initial.positions()[i].dist(frame.a0))
    base = generate(ScheduleSpec("fsync", 1), spec.initial.n)
    dry = run(model, alg, spec.initial, base, seed=200)
    trigger = first_nonnull_move_round(dry, r0)
    schedule = double_activation_adversary(base, r0, trigger, spec.initial.n,
                                           tail_rounds=2)
    trace = run(model, alg, spec.initial, schedule, seed=200)
    progress, violations = problems.monitor(spec, trace)
    r0_moves = [mv for mv in trace.moves() if mv.robot == r0]
    double_rotation = len(r0_moves) >= 2 and r0_moves[1].t_start < 2.0
    flagged = any(v.kind == "PathConstraint" and v.details.get("robot") == r0
                  and 1.0 <= v.t < 2.0 for v in violations)
    ok = double_rotation and flagged
    return DemoReport(
        "spinning-double-activation", ok,
        "r_0 rotated again off its target" if ok else "no double rotation",
        [f"r_0 index: {r0}",
         f"r_0 stops: {[(m.t_end, m.to.as_tuple()) for m in r0_moves[:2]]}",
         f"violations: {[(v.t, v.details.get('rule')) for v in violations[:2]]}"],
        trace)


def demo_pseudo_false_election() -> DemoReport:
    """b looks exactly while the true mover is hidden and elects itself.

    The hiding instant is computed with the collinearity-timed look on the
    mover's actual path; the blocking robot is whichever pseudo-polygon
    member the path crosses behind.
    """
    tol = DEFAULT_TOLERANCE
    spec = problems.pseudo_spec(seed=0)
    alg = algos.ALGORITHMS["pse_internal_only"]
    model = ModelId(LightClass.FSTA, SyncMode.ASYNC)
    meta = spec.meta
    a_i, b_i, w_i = meta["a"], meta["b"], meta["w"]
    pos = spec.initial.positions()
    n = spec.initial.n

    a_act = AsyncActivation(a_i, 0.2, 1.0, 3.0)
    dry = run(model, alg, spec.initial, [a_act], seed=300)
    a_move = next(mv for mv in dry.moves() if mv.robot == a_i)
    path = (a_move.frm, a_move.to, a_move.t_start, a_move.t_end)

    hiding = []
    for z in range(n):
        if z in (a_i, b_i, w_i):
            continue
        t_z = collinearity_timed_look(path, pos[b_i], pos[z], tol)
        if t_z is None:
            continue
        frac = (t_z - a_move.t_start) / (a_move.t_end - a_move.t_start)
        a_at = a_move.frm + (a_move.to - a_move.frm).scaled(frac)
        if blocks(pos[b_i], a_at, pos[z], tol):
            world = [a_at if i == a_i else pos[i] for i in range(n)]
            if visible_set(world, b_i, False, tol) == set(range(n)) - {a_i, b_i}:
                hiding.append((t_z, z))
    if not hiding:
        return DemoReport("pseudo-false-election", False,
                          "no hiding instant found on the mover's path")
    t_hide, blocker = min(hiding)

    acts = [a_act, AsyncActivation(b_i, t_hide, t_hide + 0.4, t_hide + 1.6)]
    t_tail = 6.0
    for i in range(n):
        acts.append(AsyncActivation(i, t_tail + 0.4 * i, t_tail + 0.4 * i + 0.1,
                                    t_tail + 0.4 * i + 0.2))
    acts.sort(key=lambda a: (a.t_look, a.robot))
    trace = run(model, alg, spec.initial, acts, horizon=t_tail + 0.4 * n + 1, seed=300)
    progress, violations = problems.monitor(spec, trace)

    b_moves = [mv for mv in trace.moves() if mv.robot == b_i]
    b_look = next(ev for ev in trace.looks() if ev.robot == b_i)
    concurrent = (bool(b_moves)
                  and b_moves[0].t_start < a_move.t_end
                  and a_move.t_start < b_moves[0].t_end)
    flagged = any(v.kind == "PathConstraint" and v.details.get("robot") == b_i
                  for v in violations)
    ok = concurrent and flagged and b_look.payload["n_visible"] == n - 2
    return DemoReport(
        "pseudo-false-election", ok,
        (f"two robots moving concurrently at t={b_moves[0].t_start:g}" if ok
         else "no false election"),
        [f"a path: {a_move.frm.as_tuple()} -> {a_move.to.as_tuple()} over [1, 3]",
         f"hiding instant t={t_hide:.6f} behind member {blocker}",
         f"b saw {b_look.payload['n_visible']} of {n - 1} robots",
         f"violations: {[v.details.get('rule') for v in violations[:2]]}"],
        trace)


def demo_angleshift_ssync_loss() -> DemoReport:
    """Activating b alone leaves the three robots collinear: alpha is gone."""
    tol = DEFAULT_TOLERANCE
    spec = problems.angle_shift_spec(seed=0)
    alg = algos.ALGORITHMS["ash_oblot_fsync"]
    model = ModelId(LightClass.OBLOT, SyncMode.SSYNC)
    schedule = RoundSchedule((frozenset({1}), frozenset({2}), frozenset({0, 1, 2})))
    trace = run(model, alg, spec.initial, schedule, seed=400)
    progress, violations = problems.monitor(spec, trace)
    from .engine import configuration_at
    after = configuration_at(trace, 1.0).positions()
    collinear_now = collinear(after[0], after[1], after[2], tol)
    c_look = next(ev for ev in trace.looks() if ev.robot == 2 and ev.t >= 1.0)
    ok = (collinear_now and c_look.payload["n_visible"] == 1
          and progress.current_phase == 0 and not violations)
    return DemoReport(
        "angleshift-ssync-loss", ok,
        "post-move collinearity; alpha unrecoverable" if ok else "no information loss",
        [f"positions after b's round: {[p.as_tuple() for p in after]}",
         f"c then saw {c_look.payload['n_visible']} robot(s)",
         f"phase reached: {progress.current_phase} of 1"],
        trace)


def demo_linestretch_opacity() -> DemoReport:
    """Opaque endpoints see a single robot, for every n in 4..10."""
    lines = []
    ok = True
    last_trace = None
    for n in range(4, 11):
        spec = problems.line_stretch_spec(n=n, d=1.0, seed=0)
        alg = algos.ALGORITHMS["ls_oblot_transparent"]
        model = ModelId(LightClass.OBLOT, SyncMode.FSYNC)
        schedule = generate(ScheduleSpec("fsync", 2), n)
        trace = run(model, alg, spec.initial, schedule, transparent=False, seed=500)
        endpoint_views = sorted({ev.payload["n_visible"] for ev in trace.looks()
                                 if ev.robot in (0, n - 1)})
        audit = visibility_audit(trace, n)
        good = endpoint_views == [1] and audit is not None
        ok = ok and good
        lines.append(f"n={n}: endpoint snapshot cardinality {endpoint_views}, "
                     f"audit fails at {audit}")
        last_trace = trace
    return DemoReport(
        "linestretch-opacity", ok,
        "endpoints cannot count the swarm" if ok else "audit unexpectedly passed",
        lines, last_trace)


DEMOS = {
    "fff-ssync-break": demo_fff_ssync_break,
    "spinning-double-activation": demo_spinning_double_activation,
    "pseudo-false-election": demo_pseudo_false_election,
    "angleshift-ssync-loss": demo_angleshift_ssync_loss,
    "linestretch-opacity": demo_linestretch_opacity,
}


def run_demo(name: str) -> DemoReport:
    if name not in DEMOS:
        raise KeyError(f"unknown demo {name!r}; known: {sorted(DEMOS)}")
    return DEMOS[name]()

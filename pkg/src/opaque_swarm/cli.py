"""Command-line entry point: run, demo, relmap, render, problems.

Every command is reproducible from its configuration and seeds alone; the
run report embeds both.  Runs write a JSON-lines trace and can render a
figure next to it.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from typing import Optional, Sequence

from . import algos, demos, problems, relmap
from .engine import collision_monitor, read_trace, run, write_trace
from .model import ModelId, SyncMode
from .sched import (ScheduleSpec, generate, load_async_schedule,
                    load_round_schedule)

DEFAULT_SEED = 1


def _env_seed() -> int:
    raw = os.environ.get("OPAQUE_SWARM_SEED")
    return int(raw) if raw else DEFAULT_SEED


def _parse_kv(text: str) -> dict:
    """'n=6,rho=2.0,seed=1' -> {'n': 6, 'rho': 2.0, 'seed': 1}"""
    out: dict = {}
    if not text:
        return out
    for part in text.split(","):
        if not part.strip():
            continue
        key, _, value = part.partition("=")
        key, value = key.strip(), value.strip()
        try:
            out[key] = int(value)
        except ValueError:
            try:
                out[key] = float(value)
            except ValueError:
                out[key] = value
    return out


def _parse_schedule(text: str, horizon: float, model: ModelId):
    """'fsync' | 'ssync:seed=3,p=0.5' | 'async:seed=2' | 'scripted:file=PATH'"""
    kind, _, rest = text.partition(":")
    opts = _parse_kv(rest)
    if kind == "scripted":
        path = opts.get("file")
        if not path:
            raise ValueError("scripted schedule needs file=PATH")
        if model.sync is SyncMode.ASYNC:
            return load_async_schedule(str(path))
        return load_round_schedule(str(path))
    spec = ScheduleSpec(kind, horizon, seed=int(opts.get("seed", 0)),
                        activation_prob=float(opts.get("p", 0.5)))
    return spec


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _count_epochs(trace) -> int:
    acts = [(ev.t, ev.robot) for ev in trace.looks()]
    if {r for _, r in acts} != set(range(trace.n)):
        return 0
    windows = []
    pending = set(range(trace.n))
    for t, r in sorted(acts):
        pending.discard(r)
        if not pending:
            windows.append(t)
            pending = set(range(trace.n))
    return len(windows)


def _single_run(args: dict) -> dict:
    """Worker for one seeded run; arguments and result are plain data."""
    model = ModelId.parse(args["model"])
    algorithm = algos.ALGORITHMS[args["algo"]]
    if args.get("instance"):
        with open(args["instance"], "r", encoding="utf-8") as fh:
            spec = problems.instance_from_json(json.load(fh))
    else:
        spec = problems.build_problem(args["problem"], args.get("gen") or {})
    horizon = float(args["horizon"])
    schedule = _parse_schedule(args["schedule"], horizon, model)
    if isinstance(schedule, ScheduleSpec):
        schedule = generate(schedule, spec.initial.n)
    seed = int(args["seed"])
    trace = run(model, algorithm, spec.initial, schedule,
                horizon=horizon, transparent=bool(args.get("transparent")),
                seed=seed, monitors=[collision_monitor])
    progress, violations = problems.monitor(spec, trace)
    trace.violations.extend(violations)
    trace_path = args.get("trace")
    if trace_path:
        write_trace(trace, trace_path)
    if args.get("figure"):
        from .render import render_trace
        render_trace(trace, args["figure"])
    activated = {ev.robot for ev in trace.looks()}
    starved = next((i for i in range(trace.n) if i not in activated), None)
    if starved is not None:
        from .engine import Violation
        trace.violations.append(Violation("Starvation", trace.horizon,
                                          {"robot": starved}))
    return {
        "seed": seed,
        "model": model.label(),
        "algo": args["algo"],
        "problem": spec.name,
        "phases": progress.current_phase,
        "phases_required": spec.n_phases if spec.terminal == "finite" else None,
        "cycles": progress.cycles,
        "cycles_required": spec.cycles_to_check if spec.terminal == "perpetual" else None,
        "epochs": _count_epochs(trace),
        "violations": [{"kind": v.kind, "t": v.t, "details": v.details}
                       for v in trace.violations],
        "done": problems.is_done(spec, progress),
        "aborted": trace.aborted,
        "starved": starved,
        "trace": trace_path,
    }


def cmd_run(args: argparse.Namespace) -> int:
    algorithm = algos.ALGORITHMS.get(args.algo or "")
    if algorithm is None:
        print(f"error: unknown algorithm {args.algo!r}; known: "
              f"{', '.join(sorted(algos.ALGORITHMS))}", file=sys.stderr)
        return 2
    model = ModelId.parse(args.model)
    if algorithm.light is not model.light or model.sync not in algorithm.syncs:
        print(f"error: algorithm {algorithm.name} is not compatible with "
              f"{model.label()}", file=sys.stderr)
        return 2
    problem = args.problem or algorithm.problem
    problem = problems.PROBLEM_ALIASES.get(problem.lower(), problem.lower())
    if problem != algorithm.problem:
        print(f"error: algorithm {algorithm.name} solves {algorithm.problem!r}, "
              f"not {problem!r}", file=sys.stderr)
        return 2
    if algorithm.requires_transparent and not args.transparent:
        print(f"note: {algorithm.name} is a transparent-framework algorithm; "
              "running opaque will fail its visibility needs", file=sys.stderr)

    base = {
        "model": args.model, "algo": args.algo, "problem": problem,
        "gen": _parse_kv(args.gen or ""), "instance": args.instance,
        "schedule": args.schedule, "horizon": args.horizon,
        "transparent": args.transparent, "seed": args.seed,
        "trace": args.trace, "figure": args.figure,
    }
    reports = []
    if args.batch > 1:
        jobs = []
        for k in range(args.batch):
            job = dict(base)
            job["seed"] = args.seed + k
            if args.trace:
                stem, dot, ext = args.trace.rpartition(".")
                job["trace"] = f"{stem}-{k:04d}{dot}{ext}" if dot else f"{args.trace}-{k:04d}"
            if args.figure:
                stem, dot, ext = args.figure.rpartition(".")
                job["figure"] = f"{stem}-{k:04d}{dot}{ext}" if dot else None
            jobs.append(job)
        with concurrent.futures.ProcessPoolExecutor() as pool:
            reports = list(pool.map(_single_run, jobs))
    else:
        reports = [_single_run(base)]

    exit_code = 0
    print(json.dumps({"config": base, "runs": len(reports)}, sort_keys=True))
    for rep in reports:
        status = "ok" if rep["done"] and not rep["violations"] else "FAIL"
        target = (f"phases {rep['phases']}/{rep['phases_required']}"
                  if rep["phases_required"] is not None
                  else f"cycles {rep['cycles']}/{rep['cycles_required']}")
        print(f"seed={rep['seed']} {status}: {target}, epochs={rep['epochs']}, "
              f"violations={len(rep['violations'])}"
              + (f", trace={rep['trace']}" if rep["trace"] else ""))
        for v in rep["violations"][:5]:
            print(f"    {v['kind']} at t={v['t']:g}: {v['details']}")
        if not rep["done"] or rep["violations"]:
            exit_code = 1
    return exit_code


def cmd_demo(args: argparse.Namespace) -> int:
    try:
        report = demos.run_demo(args.name)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{report.name}: {'reproduced' if report.ok else 'REGRESSION'}")
    print(f"  {report.summary}")
    for line in report.lines:
        print(f"  {line}")
    if args.trace and report.trace is not None:
        write_trace(report.trace, args.trace)
        print(f"  trace written to {args.trace}")
    return 0 if report.ok else 1


def cmd_relmap(args: argparse.Namespace) -> int:
    try:
        facts = relmap.load_facts(args.facts)
        cells = relmap.derive_table(facts)
    except (relmap.InconsistentFacts, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(relmap.emit_table(cells, args.format))
    if args.check:
        mismatches = relmap.check_against_expected(cells)
        if mismatches:
            print(f"relmap check FAILED: {len(mismatches)} mismatching cell(s)",
                  file=sys.stderr)
            for m in mismatches:
                print(f"  {m}", file=sys.stderr)
            return 1
        print(f"relmap check passed: {len(cells)} cells match the published table")
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    from .render import render_trace
    try:
        trace = read_trace(args.trace)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    render_trace(trace, args.out, at=args.at)
    print(f"wrote {args.out}")
    return 0


def cmd_problems(_args: argparse.Namespace) -> int:
    for name in sorted(problems.PROBLEM_BUILDERS):
        spec = problems.build_problem(name)
        kind = ("perpetual" if spec.terminal == "perpetual"
                else f"{spec.n_phases} phase(s)")
        solvers = sorted(a.name for a in algos.ALGORITHMS.values()
                         if a.problem == name and a.weakest is not None)
        print(f"{name:4s} {kind:12s} n={spec.initial.n:2d}  "
              f"algorithms: {', '.join(solvers) or '-'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opaque-swarm",
        description="Simulate and verify look-compute-move swarms of opaque, "
                    "collision-intolerant robots.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one algorithm under one model")
    p_run.add_argument("--config", help="key = value file; flags override it")
    p_run.add_argument("--model", help="light,sync e.g. fcom,async or FCOM^A")
    p_run.add_argument("--algo", help="algorithm registry name")
    p_run.add_argument("--problem", help="problem name (defaults to the algorithm's)")
    p_run.add_argument("--gen", help="instance generator params, k=v,k=v")
    p_run.add_argument("--instance", help="instance JSON file instead of --gen")
    p_run.add_argument("--schedule", default="fsync",
                       help="fsync | ssync:seed=S,p=P | async:seed=S | scripted:file=F")
    p_run.add_argument("--horizon", type=float, default=20.0,
                       help="rounds (fsync/ssync) or time units (async)")
    p_run.add_argument("--transparent", action="store_true")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--trace", help="write the JSON-lines trace here")
    p_run.add_argument("--figure", help="render a figure of the run here (svg/png)")
    p_run.add_argument("--batch", type=int, default=1,
                       help="run this many consecutive seeds concurrently")
    p_run.set_defaults(func=cmd_run)

    p_demo = sub.add_parser("demo", help="replay a counterexample construction")
    p_demo.add_argument("name", choices=sorted(demos.DEMOS))
    p_demo.add_argument("--trace", help="write the demo trace here")
    p_demo.set_defaults(func=cmd_demo)

    p_rel = sub.add_parser("relmap", help="derive and print the relation map")
    p_rel.add_argument("--facts", help="witness facts JSON (default: embedded)")
    p_rel.add_argument("--format", choices=("text", "csv"), default="text")
    p_rel.add_argument("--check", action="store_true",
                       help="compare against the published table; nonzero on mismatch")
    p_rel.set_defaults(func=cmd_relmap)

    p_ren = sub.add_parser("render", help="draw a trace to an SVG/PNG file")
    p_ren.add_argument("trace")
    p_ren.add_argument("out")
    p_ren.add_argument("--at", type=float, default=None,
                       help="draw the configuration at this instant only")
    p_ren.set_defaults(func=cmd_render)

    p_prob = sub.add_parser("problems", help="list problem specifications")
    p_prob.set_defaults(func=cmd_problems)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        for key, value in file_values.items():
            if getattr(args, key, None) in (None, False) and hasattr(args, key):
                if key in ("horizon",):
                    value = float(value)
                elif key in ("seed", "batch"):
                    value = int(value)
                elif key == "transparent":
                    value = value.lower() in ("1", "true", "yes")
                setattr(args, key, value)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _env_seed()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

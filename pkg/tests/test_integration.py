"""Cross-cutting integration checks: every positive algorithm under every
compatible synchronization mode, plus frame equivariance of the
deterministic-target solvers."""

import random

import pytest

from opaque_swarm import algos, problems
from opaque_swarm.engine import collision_monitor, run
from opaque_swarm.model import LocalFrame, ModelId, SyncMode, take_snapshot
from opaque_swarm.sched import ScheduleSpec, generate

MODE_RUNS = {
    # algorithm -> {sync kind: (schedule kind, horizon)}
    "trt_fsta": {"fsync": 8, "ssync": 14, "async": 30.0},
    "trt_fcom": {"fsync": 10, "ssync": 20, "async": 45.0},
    "fff_fsta": {"fsync": 17, "ssync": 40, "async": 60.0},
    "fff_fcom_fsync": {"fsync": 17},
    "nwc_fcom": {"fsync": 8, "ssync": 18, "async": 40.0},
    "spi_oblot_fsync": {"fsync": 6},
    "spi_lumi_async": {"fsync": 60, "ssync": 160, "async": 300.0},
    "ash_oblot_fsync": {"fsync": 4},
    "pse_oblot_sync": {"fsync": 6, "ssync": 16},
    "pse_fcom_async": {"fsync": 12, "ssync": 24, "async": 50.0},
}

GEN_PARAMS = {"nwc": {"n": 8}}


@pytest.mark.parametrize("name", sorted(MODE_RUNS))
def test_every_compatible_mode_is_clean(name):
    alg = algos.ALGORITHMS[name]
    assert set(MODE_RUNS[name]) == {s.value for s in alg.syncs}
    for kind, horizon in MODE_RUNS[name].items():
        model = ModelId(alg.light, SyncMode(kind))
        for seed in range(3):
            spec = problems.build_problem(
                alg.problem, {**GEN_PARAMS.get(alg.problem, {}), "seed": seed})
            schedule = generate(ScheduleSpec(kind, horizon, seed=300 + seed),
                                spec.initial.n)
            trace = run(model, alg, spec.initial, schedule,
                        horizon=float(horizon), seed=400 + seed)
            progress, violations = problems.monitor(spec, trace)
            assert not trace.aborted, (name, kind, seed)
            assert collision_monitor(trace) == [], (name, kind, seed)
            assert not violations, (name, kind, seed, violations[:1])
            assert problems.is_done(spec, progress), (name, kind, seed, progress)


SPARSE_SSYNC = {
    # sparse activations (p=0.12) isolate robots and stress the color
    # protocols with long stale-view stretches
    "spi_lumi_async": (420, {}),
    "pse_fcom_async": (90, {}),
    "trt_fcom": (70, {}),
    "fff_fsta": (80, {}),
    "nwc_fcom": (60, {"n": 8}),
}


@pytest.mark.parametrize("name", sorted(SPARSE_SSYNC))
def test_sparse_ssync_torture(name):
    alg = algos.ALGORITHMS[name]
    horizon, gen = SPARSE_SSYNC[name]
    model = ModelId(alg.light, SyncMode.SSYNC)
    for seed in range(5):
        spec = problems.build_problem(alg.problem, {**gen, "seed": seed})
        schedule = generate(ScheduleSpec("ssync", horizon, seed=seed,
                                         activation_prob=0.12), spec.initial.n)
        trace = run(model, alg, spec.initial, schedule, seed=seed + 7000)
        progress, violations = problems.monitor(spec, trace)
        assert problems.is_done(spec, progress), (name, seed, progress)
        assert not violations, (name, seed, violations[:1])
        assert collision_monitor(trace) == [], (name, seed)


class TestFrameEquivariance:
    """Algorithms with a unique geometric target pick the same global point
    under any local frame (rotation, reflection, and scale included)."""

    def global_decisions(self, alg_name, positions, lights, observer, model,
                         n_frames=24):
        alg = algos.ALGORITHMS[alg_name]
        rng = random.Random(1234)
        out = []
        for _ in range(n_frames):
            frame = LocalFrame.sample(rng, positions[observer])
            snap = take_snapshot(positions, lights, observer, frame, model,
                                 False, rng)
            dest_local, color = alg.decide(snap)
            out.append((frame.to_global(dest_local), color))
        return out

    def assert_agree(self, decisions, scale):
        first, color0 = decisions[0]
        for dest, color in decisions[1:]:
            assert dest.dist(first) <= 1e-9 * scale
            assert color == color0

    def test_trt_mover(self):
        spec = problems.build_problem("trt", {"seed": 11})
        decisions = self.global_decisions(
            "trt_fsta", spec.initial.positions(), spec.initial.lights(),
            spec.meta["mover"], ModelId.parse("FSTA^A"))
        self.assert_agree(decisions, 1.0)
        # and the common destination is the empty vertex itself
        assert decisions[0][0].dist(spec.meta["a"]) < 1e-9

    def test_spinning_rotation(self):
        spec = problems.build_problem("spi", {"seed": 12})
        decisions = self.global_decisions(
            "spi_oblot_fsync", spec.initial.positions(), spec.initial.lights(),
            0, ModelId.parse("OBLOT^F"))
        self.assert_agree(decisions, spec.meta["rho"])
        from opaque_swarm.geom import rotate_about
        want = rotate_about(spec.initial.positions()[0], spec.meta["O"],
                            spec.meta["alpha"] / 2, spec.meta["orientation"])
        assert decisions[0][0].dist(want) < 1e-9

    def test_angleshift_rotations(self):
        spec = problems.build_problem("ash", {"seed": 13})
        for robot, target_key in ((1, "b_target"), (2, "c_target")):
            decisions = self.global_decisions(
                "ash_oblot_fsync", spec.initial.positions(),
                spec.initial.lights(), robot, ModelId.parse("OBLOT^F"))
            self.assert_agree(decisions, 3.0)
            assert decisions[0][0].dist(spec.meta[target_key]) < 1e-8

    def test_newcomer_boundary(self):
        spec = problems.build_problem("nwc", {"n": 8, "seed": 14})
        decisions = self.global_decisions(
            "nwc_fcom", spec.initial.positions(), spec.initial.lights(),
            spec.meta["s"], ModelId.parse("FCOM^A"))
        self.assert_agree(decisions, spec.meta["rho"])
        assert decisions[0][0].dist(spec.meta["boundary"]) < 1e-8
        assert decisions[0][1] == "s"

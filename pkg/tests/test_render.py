from opaque_swarm import problems
from opaque_swarm.algos import ALGORITHMS
from opaque_swarm.engine import run
from opaque_swarm.model import ModelId
from opaque_swarm.render import render_trace
from opaque_swarm.sched import ScheduleSpec, generate


def sample_trace():
    spec = problems.build_problem("nwc", {"seed": 1})
    acts = generate(ScheduleSpec("async", 40.0, seed=2), spec.initial.n)
    return run(ModelId.parse("FCOM^A"), ALGORITHMS["nwc_fcom"], spec.initial,
               acts, seed=3)


class TestRender:
    def test_svg_deterministic(self, tmp_path):
        trace = sample_trace()
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render_trace(trace, str(a))
        render_trace(trace, str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_single_instant_frame(self, tmp_path):
        trace = sample_trace()
        out = tmp_path / "frame.svg"
        render_trace(trace, str(out), at=2.5)
        assert out.exists() and b"svg" in out.read_bytes()[:200]

    def test_empty_trace_initial_only(self, tmp_path):
        spec = problems.build_problem("trt", {"seed": 0})
        schedule = generate(ScheduleSpec("scripted", 1, rounds=(frozenset(),)), 3)
        # a schedule with an empty round is not produced by generators; fake
        # an eventless trace by running a null horizon instead
        from opaque_swarm.algos import Algorithm
        from opaque_swarm.geom import ORIGIN
        from opaque_swarm.model import LightClass, OFF, SyncMode
        null_alg = Algorithm("null", LightClass.OBLOT, frozenset({OFF}),
                             frozenset(SyncMode), lambda s: (ORIGIN, None),
                             "trt", None)
        trace = run(ModelId.parse("OBLOT^A"), null_alg, spec.initial, [],
                    horizon=1.0, seed=0)
        out = tmp_path / "empty.svg"
        render_trace(trace, str(out))
        assert out.exists()

    def test_png_output(self, tmp_path):
        trace = sample_trace()
        out = tmp_path / "t.png"
        render_trace(trace, str(out))
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

import math
import random

from opaque_swarm import algos
from opaque_swarm.algos import (ALGORITHMS, POSITIVE_ALGORITHMS, fff_memoryless_decide,
                                nwc_fcom_decide, pse_fcom_decide, pse_reconstruct,
                                pse_roles, spi_lumi_decide, trt_fcom_decide,
                                trt_fsta_decide)
from opaque_swarm.geom import ORIGIN, Point, RegularPolygon
from opaque_swarm.model import OFF, Snapshot, VisibleRobot


def pt(x, y):
    return Point(float(x), float(y))


def snap(entries, own=None, transparent=False):
    return Snapshot(tuple(VisibleRobot(p, c) for p, c in entries), own, transparent)


def is_null(dest):
    return dest.dist(ORIGIN) < 1e-9


class TestRegistry:
    def test_positive_algorithms_present(self):
        for name in POSITIVE_ALGORITHMS:
            assert name in ALGORITHMS

    def test_naive_variants_present(self):
        assert "fff_memoryless" in ALGORITHMS
        assert "pse_internal_only" in ALGORITHMS
        assert "ls_oblot_transparent" in ALGORITHMS

    def test_oblot_palettes_are_off_only(self):
        for alg in ALGORITHMS.values():
            if alg.light.name == "OBLOT":
                assert alg.palette == frozenset({OFF})

    def test_weakest_models_match_light(self):
        for alg in ALGORITHMS.values():
            if alg.weakest is not None:
                assert alg.weakest.light is alg.light


class TestShuffleInvariance:
    """Permuting snapshot entry order never changes an algorithm's output."""

    def cases(self):
        trt = snap([(pt(0, 1), OFF), (pt(-0.87, -0.5), OFF)], own=OFF)
        pts6 = [pt(math.cos(math.radians(a)), math.sin(math.radians(a)))
                for a in (20, 40, 80, 120, 220, 300)]
        spi = snap([(p - pts6[0], OFF) for p in pts6[1:]], own=OFF)
        yield "trt_fsta", trt
        yield "spi_lumi_async", spi

    def test_double_evaluation_reshuffled(self):
        for name, s in self.cases():
            alg = ALGORITHMS[name]
            base_dest, base_color = alg.decide(s)
            for seed in range(6):
                entries = list(s.visible)
                random.Random(seed).shuffle(entries)
                dest, color = alg.decide(Snapshot(tuple(entries), s.own_internal,
                                                  s.transparent))
                assert dest.dist(base_dest) < 1e-9
                assert color == base_color


class TestTriangleRoundTrip:
    RHO = 1.0

    def center_view(self):
        p = pt(0, 1)
        q = pt(math.cos(math.radians(210)), math.sin(math.radians(210)))
        return p, q

    def test_fsta_mover_goes_to_empty_vertex(self):
        p, q = self.center_view()
        dest, color = trt_fsta_decide(snap([(p, None), (q, None)], own=OFF))
        want = (p + q).scaled(-1.0)
        assert dest.dist(want) < 1e-9 and color == "went"
        # and that is the empty vertex of the circumscribed triangle
        assert abs(dest.norm() - self.RHO) < 1e-9

    def test_fsta_vertex_stays(self):
        # a vertex sees the center robot and the other vertex: unequal distances
        dest, color = trt_fsta_decide(
            snap([(pt(0, -1), None), (pt(-1.5, 0.2), None)], own=OFF))
        assert is_null(dest) and color is None

    def test_fsta_returns_from_equilateral(self):
        s = math.radians(60)
        p = pt(2.0, 0.0)
        q = pt(2.0 * math.cos(s), 2.0 * math.sin(s))
        dest, color = trt_fsta_decide(snap([(p, None), (q, None)], own="went"))
        assert dest.dist((p + q).scaled(1 / 3)) < 1e-9
        assert color is None

    def test_fcom_two_acknowledgements(self):
        s = math.radians(60)
        p, q = pt(2.0, 0.0), pt(2.0 * math.cos(s), 2.0 * math.sin(s))
        # a vertex seeing the mover's M acks with B
        dest, color = trt_fcom_decide(snap([(p, "M"), (q, OFF)]))
        assert is_null(dest) and color == "B"
        # the mover sees two Bs and no M: it concludes and returns
        dest, color = trt_fcom_decide(snap([(p, "B"), (q, "B")]))
        assert dest.dist((p + q).scaled(1 / 3)) < 1e-9 and color == "D"
        # with one ack missing it waits
        dest, color = trt_fcom_decide(snap([(p, "B"), (q, OFF)]))
        assert is_null(dest) and color is None

    def test_fcom_center_moves_only_on_fresh_configuration(self):
        p, q = self.center_view()
        dest, color = trt_fcom_decide(snap([(p, OFF), (q, OFF)]))
        assert not is_null(dest) and color == "M"
        dest, color = trt_fcom_decide(snap([(p, "B"), (q, "B")]))
        assert is_null(dest)


class TestFlipFlopFlip:
    def apex_view(self, height, side=1.0):
        # r at origin on gamma' (side=+1) or gamma'' (side=-1), u = 2
        p = pt(-height * side, 1.0)
        q = pt(-height * side, -1.0)
        return snap([(p, None), (q, None)], own=OFF)

    def test_flip_mirrors_across_b(self):
        s = self.apex_view(1.0)
        dest, color = ALGORITHMS["fff_fsta"].decide(s)
        b = pt(-1.0, 0.0)
        assert dest.dist(b.scaled(2.0)) < 1e-9  # mirror of the origin across b
        assert color == "flop"

    def test_flop_moves_away(self):
        s = Snapshot(self.apex_view(1.0).visible, "flop", False)
        dest, color = ALGORITHMS["fff_fsta"].decide(s)
        # farther from b along my own semi-line: +u/2 outward
        assert dest.dist(pt(1.0, 0.0)) < 1e-9
        assert color == "flip2"

    def test_flip2_returns(self):
        s = Snapshot(self.apex_view(1.0).visible, "flip2", False)
        dest, color = ALGORITHMS["fff_fsta"].decide(s)
        assert dest.dist(pt(-2.0, 0.0)) < 1e-9
        assert color == "flip1"

    def test_equilateral_nudge_on_flop(self):
        # a +u/2 flop from this height would stop exactly on the forbidden
        # equilateral height; the step is stretched instead
        h = math.sqrt(3.0) - 1.0
        s = Snapshot(self.apex_view(h).visible, "flop", False)
        dest, _color = ALGORITHMS["fff_fsta"].decide(s)
        new_height = (dest - pt(-h, 0.0)).norm()
        assert abs(new_height - math.sqrt(3.0)) > 0.4

    def test_base_robot_stays(self):
        # p sees q at distance 2 and r at some other distance
        s = snap([(pt(0, -2), None), (pt(1.3, -1.0), None)], own=OFF)
        dest, color = ALGORITHMS["fff_fsta"].decide(s)
        assert is_null(dest) and color is None

    def test_equilateral_transit_ignored(self):
        a = math.radians(60)
        s = snap([(pt(2, 0), None), (pt(2 * math.cos(a), 2 * math.sin(a)), None)],
                 own=OFF)
        dest, color = ALGORITHMS["fff_fsta"].decide(s)
        assert is_null(dest) and color is None

    def test_fcom_reads_phase_from_others(self):
        v = self.apex_view(1.0).visible
        dest, color = ALGORITHMS["fff_fcom_fsync"].decide(
            Snapshot(tuple(VisibleRobot(e.position, "flop") for e in v), None, False))
        assert dest.dist(pt(1.0, 0.0)) < 1e-9 and color == "flip2"

    def test_fcom_mixed_colors_hold(self):
        v = self.apex_view(1.0).visible
        entries = (VisibleRobot(v[0].position, "flop"), VisibleRobot(v[1].position, OFF))
        dest, color = ALGORITHMS["fff_fcom_fsync"].decide(Snapshot(entries, None, False))
        assert is_null(dest) and color is None

    def test_memoryless_thresholds(self):
        # d < 2u: flip out to distance 3u from p
        s = self.apex_view(0.5)
        dest, _ = fff_memoryless_decide(s)
        assert abs(dest.dist(pt(-0.5, 1.0)) - 6.0) < 1e-9
        assert (dest - pt(-0.5, 0)).dot(pt(-1, 0)) > 0  # crossed to the far side
        # 2u <= d < 4u: flop farther on my own side
        s = self.apex_view(math.sqrt(25 - 1))  # dist to p = 5 < 8
        dest, _ = fff_memoryless_decide(s)
        assert abs(dest.dist(pt(-math.sqrt(24), 1.0)) - 10.0) < 1e-9
        # d >= 4u: flip back close
        s = self.apex_view(math.sqrt(81 - 1))
        dest, _ = fff_memoryless_decide(s)
        assert abs(dest.dist(pt(-math.sqrt(80), 1.0)) - 3.0) < 1e-9


class TestNewcomer:
    def ring_world(self, n=8, rho=2.0, observer="s"):
        angles = [360.0 * k / n + 7.0 for k in range(n)]
        ring = [pt(rho * math.cos(math.radians(a)), rho * math.sin(math.radians(a)))
                for a in angles]
        center = pt(0.0, 0.0)
        s = pt(1.9 * rho * math.cos(0.4), 1.9 * rho * math.sin(0.4))
        return ring, center, s

    def test_s_first_activation(self):
        ring, center, s = self.ring_world()
        entries = [(p - s, OFF) for p in ring] + [(center - s, OFF)]
        dest, color = nwc_fcom_decide(snap(entries))
        assert color == "s"
        # lands on the boundary: distance 2.0 from the center robot
        assert abs((dest - (center - s)).norm() - 2.0) < 1e-9

    def test_c_waits_while_s_travels(self):
        ring, center, s = self.ring_world()
        mid = s.scaled(0.7)  # en route, still outside the circle
        entries = [(p, OFF) for p in ring] + [(mid, "s")]
        dest, color = nwc_fcom_decide(snap(entries))
        assert is_null(dest) and color is None

    def test_c_moves_when_s_lands(self):
        ring, center, s = self.ring_world()
        landed = s.unit().scaled(2.0)
        entries = [(p, OFF) for p in ring] + [(landed, "s")]
        dest, color = nwc_fcom_decide(snap(entries))
        assert color is None
        assert dest.dist(landed.scaled(0.5)) < 1e-9  # half a radius from s

    def test_ring_robot_stays(self):
        ring, center, s = self.ring_world()
        me = ring[0]
        entries = [(p - me, OFF) for p in ring[1:]] + [(center - me, OFF),
                                                       (s - me, OFF)]
        dest, color = nwc_fcom_decide(snap(entries))
        assert is_null(dest) and color is None


class TestSpinningLumi:
    def world(self):
        degs = [0, 20, 60, 100, 200, 280]
        return [pt(math.cos(math.radians(a)), math.sin(math.radians(a)))
                for a in degs]

    def view_from(self, pts, i, colors):
        return snap([(pts[j] - pts[i], colors[j])
                     for j in range(len(pts)) if j != i], own=colors[i])

    def test_first_robot_claims_a0(self):
        pts = self.world()
        colors = [OFF] * 6
        dest, color = spi_lumi_decide(self.view_from(pts, 0, colors))
        assert is_null(dest) and color == "a0"
        # everyone else stays off
        dest, color = spi_lumi_decide(self.view_from(pts, 3, colors))
        assert is_null(dest) and color is None

    def test_partner_claims_a1(self):
        pts = self.world()
        colors = ["a0"] + [OFF] * 5
        dest, color = spi_lumi_decide(self.view_from(pts, 1, colors))
        assert is_null(dest) and color == "a1"
        dest, color = spi_lumi_decide(self.view_from(pts, 2, colors))
        assert color is None

    def test_a0_moves_once_a1_set(self):
        pts = self.world()
        colors = ["a0", "a1", OFF, OFF, OFF, OFF]
        dest, color = spi_lumi_decide(self.view_from(pts, 0, colors))
        assert color == "moving0" and not is_null(dest)
        # rotation by alpha/2 = 10 degrees toward a1
        want = pt(math.cos(math.radians(10)), math.sin(math.radians(10))) - pts[0]
        assert dest.dist(want) < 1e-9

    def test_off_robot_waits_for_m_pair(self):
        pts = self.world()
        colors = ["moving0", "a1", OFF, OFF, OFF, OFF]
        dest, color = spi_lumi_decide(self.view_from(pts, 3, colors))
        assert is_null(dest) and color is None

    def test_off_robot_moves_on_m0_m1(self):
        degs = [10, 30, 60, 100, 200, 280]
        pts = [pt(math.cos(math.radians(a)), math.sin(math.radians(a)))
               for a in degs]
        colors = ["m0", "m1", OFF, OFF, OFF, OFF]
        dest, color = spi_lumi_decide(self.view_from(pts, 3, colors))
        assert color == "moving"
        want = pt(math.cos(math.radians(110)), math.sin(math.radians(110))) - pts[3]
        assert dest.dist(want) < 1e-9

    def test_moving_parks_to_moved(self):
        pts = self.world()
        colors = ["m0", "m1", "moved", "moving", OFF, OFF]
        dest, color = spi_lumi_decide(self.view_from(pts, 3, colors))
        assert is_null(dest) and color == "moved"

    def test_end_transition(self):
        pts = self.world()
        colors = ["m0", "m1", "moved", "moved", "moved", "moved"]
        dest, color = spi_lumi_decide(self.view_from(pts, 2, colors))
        assert is_null(dest) and color == "end"

    def test_end_resets_to_off(self):
        pts = self.world()
        colors = ["end"] * 6
        dest, color = spi_lumi_decide(self.view_from(pts, 2, colors))
        assert is_null(dest) and color == OFF

    def test_end_waits_while_m_remain(self):
        pts = self.world()
        colors = ["m0", "end", "end", "end", "end", "end"]
        dest, color = spi_lumi_decide(self.view_from(pts, 2, colors))
        assert is_null(dest) and color is None


class TestPseudoDecisions:
    def world(self):
        poly = RegularPolygon(pt(0, 0), 1.0, 8, math.radians(22.5))
        members = [poly.vertex(k) for k in (0, 1, 2, 4, 5, 6, 7)]
        w = pt(2.3 * math.cos(math.radians(265)), 2.3 * math.sin(math.radians(265)))
        return members, w

    def roles(self):
        members, w = self.world()
        dists = [m.dist(w) for m in members]
        a = max(range(7), key=lambda i: dists[i])
        return members, w, a

    def view_from(self, points, colors, i):
        return snap([(points[j] - points[i], colors[j])
                     for j in range(len(points)) if j != i])

    def test_reconstruction_identifies_watcher(self):
        members, w = self.world()
        pts = [ORIGIN] + [m - members[0] for m in members[1:]] + [w - members[0]]
        view = pse_reconstruct(pts)
        assert view is not None and view.watcher_index == len(pts) - 1
        assert view.polygon.n == 8

    def test_two_outsiders_no_reconstruction(self):
        members, w = self.world()
        moved = list(members) + [w]
        moved[1] = pt(1.9, 1.4)  # second robot off the polygon
        pts = [ORIGIN] + [p - moved[0] for p in moved[1:]]
        assert pse_reconstruct(pts) is None

    def test_fcom_first_epoch_roles(self):
        members, w, a = self.roles()
        points = members + [w]
        colors = [OFF] * 8
        dest, color = pse_fcom_decide(self.view_from(points, colors, a))
        assert is_null(dest) and color == "a"
        dest, color = pse_fcom_decide(self.view_from(points, colors, 7))
        assert is_null(dest) and color == "on"  # the watcher

    def test_fcom_case_analysis(self):
        members, w, a = self.roles()
        points = members + [w]
        # full view {a, b, on} -> on
        colors = ["on"] * 8
        colors[a] = "a"
        b = 2 if a != 2 else 0
        colors[b] = "b"
        other = next(i for i in range(7) if i not in (a, b))
        dest, color = pse_fcom_decide(self.view_from(points, colors, other))
        assert is_null(dest) and color == "on"
        # V = {a, on}: the robot seeing no b is b itself
        colors_b = ["on"] * 8
        colors_b[a] = "a"
        dest, color = pse_fcom_decide(self.view_from(points, colors_b, b))
        assert is_null(dest) and color == "b"
        # V = {b, on} and farthest: elects itself and moves
        colors_a = ["on"] * 8
        colors_a[b] = "b"
        dest, color = pse_fcom_decide(self.view_from(points, colors_a, a))
        assert color == "a" and not is_null(dest)
        # V = {on} only: hold (the mover is hidden)
        colors_on = ["on"] * 8
        dest, color = pse_fcom_decide(self.view_from(points, colors_on, b))
        assert is_null(dest) and color == "b"

    def test_oblot_nonfarthest_stays(self):
        members, w, a = self.roles()
        points = members + [w]
        i = next(j for j in range(7) if j != a)
        dest, _ = algos.pse_oblot_decide(
            snap([(points[j] - points[i], None) for j in range(8) if j != i]))
        assert is_null(dest)

    def test_oblot_farthest_target_valid(self):
        from opaque_swarm.geom import collinear, safe_zone_contains
        members, w, a = self.roles()
        points = members + [w]
        view = snap([(points[j] - points[a], None) for j in range(8) if j != a])
        dest, _ = algos.pse_oblot_decide(view)
        assert not is_null(dest)
        poly = RegularPolygon(pt(0, 0) - points[a], 1.0, 8, math.radians(22.5))
        assert safe_zone_contains(poly, dest)
        w_local = w - points[a]
        for j in range(7):
            if j == a:
                continue
            assert not collinear(w_local, points[j] - points[a], dest)


class TestTransparentSimulation:
    """An opaque solver keeps working when simulated by transparent robots."""

    def test_wrapped_algorithm_still_solves(self):
        from opaque_swarm import problems
        from opaque_swarm.engine import run, visibility_audit
        from opaque_swarm.sched import ScheduleSpec, generate

        base = ALGORITHMS["trt_fsta"]
        wrapped = algos.transparent_simulation(base)
        spec = problems.build_problem("trt", {"seed": 5})
        acts = generate(ScheduleSpec("async", 30.0, seed=6), 3)
        trace = run(base.weakest, wrapped, spec.initial, acts,
                    transparent=True, seed=7)
        progress, violations = problems.monitor(spec, trace)
        assert progress.current_phase == 2 and not violations
        # transparent robots always see the whole swarm
        assert visibility_audit(trace, 3) is None

    def test_filtering_changes_what_the_algorithm_sees(self):
        from opaque_swarm.engine import filter_snapshot
        full = snap([(pt(1, 0), None), (pt(2, 0), None), (pt(0.4, 1.1), None)],
                    transparent=True)
        reduced = filter_snapshot(full)
        assert reduced.k == 2  # the far collinear robot is dropped


class TestLineStretchDecide:
    def test_endpoint_moves_out(self):
        entries = [(pt(1, 0), None), (pt(2, 0), None), (pt(3, 0), None)]
        dest, color = ALGORITHMS["ls_oblot_transparent"].decide(snap(entries))
        assert color is None
        assert dest.dist(pt(-0.25, 0)) < 1e-9  # d + d/n = 1.25 from the neighbour

    def test_internal_stays(self):
        entries = [(pt(-1, 0), None), (pt(1, 0), None), (pt(2, 0), None)]
        dest, _ = ALGORITHMS["ls_oblot_transparent"].decide(snap(entries))
        assert is_null(dest)

    def test_too_few_visible_stays(self):
        entries = [(pt(1, 0), None)]
        dest, _ = ALGORITHMS["ls_oblot_transparent"].decide(snap(entries))
        assert is_null(dest)

    def test_already_stretched_stays(self):
        entries = [(pt(1.25, 0), None), (pt(2.25, 0), None), (pt(3.25, 0), None)]
        dest, _ = ALGORITHMS["ls_oblot_transparent"].decide(snap(entries))
        assert is_null(dest)

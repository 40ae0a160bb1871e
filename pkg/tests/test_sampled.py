import math
import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypcert import freetree, graphspace, halfplane, sampled
from hypcert.errors import BudgetError, InputError, PreconditionError

H2 = halfplane.H2


def euclidean_square():
    pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return sampled.from_points(pts, lambda p, q: math.dist(p, q))


class TestSampledSpace:
    def test_validates_symmetry(self):
        import numpy as np
        D = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(InputError):
            sampled.SampledSpace(("p", "q"), D)

    def test_validates_triangle(self):
        import numpy as np
        D = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(InputError):
            sampled.SampledSpace(("p", "q", "r"), D)

    def test_json_roundtrip(self, tree_ball_space):
        again = sampled.SampledSpace.from_json(tree_ball_space.to_json())
        assert again.points == tree_ball_space.points
        assert (again.dist == tree_ball_space.dist).all()


class TestFourPointDelta:
    def test_tree_sample_is_exactly_zero(self, tree2):
        pts = tree2.ball("", 3)[:60]
        sp = sampled.from_points(pts, tree2.dist)
        est = sampled.four_point_delta(sp)
        assert est.delta_hat == 0.0

    def test_square_defect(self):
        est = sampled.four_point_delta(euclidean_square())
        assert est.delta_hat == pytest.approx(math.sqrt(2.0) - 1.0)
        assert est.quadruples_checked == 1

    def test_sampled_mode_lower_bounds_exhaustive(self):
        T = freetree.FreeTreeSpace(2)
        pts = T.ball("", 2)
        sp = sampled.from_points(pts, T.dist)
        full = sampled.four_point_delta(sp)
        part = sampled.four_point_delta(sp, mode="sampled",
                                        n_quadruples=300, seed=3)
        assert part.delta_hat <= full.delta_hat

    def test_sampled_mode_is_seeded(self, tree_ball_space):
        a = sampled.four_point_delta(tree_ball_space, mode="sampled",
                                     n_quadruples=200, seed=9)
        b = sampled.four_point_delta(tree_ball_space, mode="sampled",
                                     n_quadruples=200, seed=9)
        assert a.delta_hat == b.delta_hat
        assert a.worst_quadruple == b.worst_quadruple

    def test_exhaustive_cap(self):
        T = freetree.FreeTreeSpace(2)
        pts = T.ball("", 4)
        sp = sampled.from_points(pts, T.dist)
        with pytest.raises(BudgetError):
            sampled.four_point_delta(sp, cap=100)

    def test_h2_sample_bounded_by_known_constant(self):
        rng = random.Random(2)
        pts = halfplane.sample_ball(1j, 4.0, 40, rng)
        sp = sampled.from_points(pts, halfplane.dist)
        est = sampled.four_point_delta(sp)
        # four-point delta of the hyperbolic plane is at most log 3
        assert 0.0 < est.delta_hat <= math.log(3.0)


class TestPackingAndCovering:
    def test_tree_unit_ball_fixture(self, tree_ball_space):
        prof = sampled.packing_number(tree_ball_space, "", 1.0, 1.0)
        assert prof.pack_exact == 1

    def test_tree_two_ball_fixture(self, tree_ball_space):
        prof = sampled.packing_number(tree_ball_space, "", 2.0, 1.0)
        assert prof.pack_exact == 4

    def test_greedy_never_exceeds_exact(self, tree_ball_space):
        for r in (0.5, 1.0, 1.5):
            prof = sampled.packing_number(tree_ball_space, "", 2.0, r)
            assert prof.pack_greedy <= prof.pack_exact

    def test_exact_cap_fallback(self, tree_ball_space):
        with pytest.raises(BudgetError) as exc:
            sampled.packing_number(tree_ball_space, "", 2.0, 1.0, cap=4)
        assert exc.value.fallback.pack_greedy >= 1

    def test_covering_tree_ball(self, tree_ball_space):
        assert sampled.covering_number(
            tree_ball_space, tree_ball_space.points, 1.0) == 4

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_packing_chain_on_random_graphs(self, seed):
        G = graphspace.random_connected_graph(10, 5, seed)
        sp = sampled.from_points(G.vertices, G.dist)
        for r in (0.5, 1.0):
            p2r = sampled.packing_number(sp, G.vertices[0], math.inf,
                                         2.0 * r).pack_exact
            c2r = sampled.covering_number(sp, sp.points, 2.0 * r)
            pr = sampled.packing_number(sp, G.vertices[0], math.inf,
                                        r).pack_exact
            assert p2r <= c2r <= pr


class TestTripodsAndProjections:
    def test_tree_tripod_is_degenerate(self, tree2):
        c_x, c_y, c_z, thin = sampled.tripod_points(tree2, "aa", "ab", "ba")
        assert thin == 0
        assert c_x == c_y == c_z == "a"

    def test_h2_tripod_thinness_small(self):
        c_x, c_y, c_z, thin = sampled.tripod_points(H2, 1j, 4j, 2 + 2j)
        assert thin <= 4.0 * math.log(3.0)

    def test_h2_projection(self):
        g = H2.geodesic_from_boundary(-1.0, 1.0)
        assert sampled.project(H2, g, 5j) == pytest.approx(1j)

    def test_h2_boundary_projection(self):
        g = H2.geodesic_from_boundary(-1.0, 1.0)
        assert sampled.project(H2, g, math.inf) == pytest.approx(1j)

    def test_tree_line_projection(self):
        line = freetree.axis_ends("a")
        assert sampled.project(None, line, "aab") == "aa"
        assert sampled.project(None, line, "baa") == ""

    def test_tree_end_projection(self):
        line = freetree.axis_ends("a")
        xi = freetree.TreeEnd("b", "b")
        assert sampled.project(None, line, xi) == ""

    @given(st.floats(min_value=-30.0, max_value=30.0),
           st.floats(min_value=-30.0, max_value=30.0))
    def test_h2_projection_contracts(self, s, t):
        g = H2.geodesic_from_boundary(0.0, math.inf)
        z, w = complex(1.0, math.exp(s / 3.0)), complex(-2.0, math.exp(t / 3.0))
        dp = halfplane.dist(g.project(z), g.project(w))
        assert dp <= halfplane.dist(z, w) + 1e-9

    def test_point_on_geodesic_h2(self):
        z = sampled.point_on_geodesic(H2, 1j, 4j, math.log(2.0))
        assert z == pytest.approx(2j)

    def test_point_on_geodesic_tree(self):
        T = freetree.FreeTreeSpace(2)
        assert sampled.point_on_geodesic(T, "aa", "ab", 1.0) == "a"
        assert sampled.point_on_geodesic(T, "aa", "ab", 2.0) == "ab"


class TestHelly:
    def test_witness_for_nested_tree_balls(self, tree2):
        sets = [tree2.ball("", 1), tree2.ball("a", 1), tree2.ball("", 2)]
        w = sampled.helly_witness(tree2, sets, 0.0, 1.0)
        assert all(min(tree2.dist(w, p) for p in s) <= 2.0 for s in sets)

    def test_disjoint_sets_rejected(self, tree2):
        sets = [["aaa"], ["bbb"]]
        with pytest.raises(PreconditionError):
            sampled.helly_witness(tree2, sets, 0.0, 0.0)


class TestHausdorff:
    def test_symmetric_zero(self, tree2):
        A = ["", "a", "b"]
        assert sampled.hausdorff_distance(tree2, A, A) == 0

    def test_known_value(self, tree2):
        assert sampled.hausdorff_distance(tree2, [""], ["aa", "b"]) == 2


class TestRuntimeBudgets:
    def test_hundred_point_exhaustive_under_a_second(self, tree2):
        pts = tree2.ball("", 3)[:100]
        sp = sampled.from_points(pts, tree2.dist)
        t0 = time.monotonic()
        est = sampled.four_point_delta(sp)
        assert time.monotonic() - t0 < 1.0
        assert est.delta_hat == 0.0

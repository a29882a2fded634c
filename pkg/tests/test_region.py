import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcdist.errors import DimensionError
from bcdist.region import (Frontier, diagonal_violation, frontier_compare, frontier_contains,
                           frontier_from_csv, lower_hull, pareto_reduce, trace_boundary,
                           trace_frontier)

coords = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
# grid coordinates keep distinct points farther apart than the 1e-12 dedup tolerance
grid = st.integers(0, 1000).map(lambda i: i / 1000)
clouds = st.lists(st.tuples(grid, grid), min_size=1, max_size=40)


def brute_pareto(pts):
    """O(n^2) dominance filter, evaluated in row blocks."""
    pts = np.asarray(pts, dtype=float)
    keep = []
    for s in range(0, len(pts), 500):
        blk = pts[s:s + 500]
        le = np.all(pts[None, :, :] <= blk[:, None, :], axis=2)
        lt = np.any(pts[None, :, :] < blk[:, None, :], axis=2)
        dominated = np.any(le & lt, axis=1)
        keep.extend(tuple(p) for p in blk[~dominated])
    return sorted(set(keep))


def monotone_chain_lower_left(pts):
    """Andrew's monotone chain lower hull, cut to the decreasing (lower-left) part."""
    pts = sorted(set(map(tuple, np.asarray(pts, dtype=float))))
    lower = []
    for p in pts:
        while len(lower) >= 2:
            (ax, ay), (bx, by) = lower[-2], lower[-1]
            if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) <= 0:
                lower.pop()
            else:
                break
        lower.append(p)
    i = int(np.argmin([q[1] for q in lower]))
    # among equal minimal D2 keep the leftmost, which is where the decreasing part ends
    return lower[:i + 1]


class TestParetoReduce:
    def test_single(self):
        assert pareto_reduce([(1, 1)]).points.tolist() == [[1.0, 1.0]]

    def test_dominance(self):
        assert pareto_reduce([(1, 2), (2, 1), (2, 2)]).points.tolist() == [[1.0, 2.0], [2.0, 1.0]]

    def test_tie_keeps_smaller_d2(self):
        assert pareto_reduce([(1, 3), (1, 2)]).points.tolist() == [[1.0, 2.0]]

    def test_near_duplicates_merge(self):
        f = pareto_reduce([(0.0, 1e-12), (1e-200, 0.0)])
        assert len(f) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            pareto_reduce([])

    def test_ragged(self):
        with pytest.raises((ValueError, DimensionError)):
            pareto_reduce([(1, 2), (1, 2, 3)])

    def test_matches_bruteforce_large(self):
        rng = np.random.default_rng(42)
        cloud = rng.random((10_000, 2))
        got = [tuple(p) for p in pareto_reduce(cloud).points]
        assert got == brute_pareto(cloud)

    @given(clouds)
    def test_matches_bruteforce(self, cloud):
        got = [tuple(p) for p in pareto_reduce(cloud).points]
        assert got == brute_pareto(cloud)

    @given(clouds)
    def test_idempotent_and_sorted(self, cloud):
        f = pareto_reduce(cloud)
        g = pareto_reduce(f.points)
        np.testing.assert_array_equal(f.points, g.points)
        assert np.all(np.diff(f.points[:, 0]) > 0)
        assert np.all(np.diff(f.points[:, 1]) < 0)

    def test_three_dimensions(self):
        cloud = [(1, 2, 3), (2, 1, 3), (1, 2, 4), (3, 3, 0)]
        assert pareto_reduce(cloud).points.tolist() == [[1, 2, 3], [2, 1, 3], [3, 3, 0]]


class TestLowerHull:
    def test_collinear(self):
        f = lower_hull([(0, 2), (1, 1), (2, 0)])
        assert f.points.tolist() == [[0, 2], [2, 0]]

    def test_interior_above_chord(self):
        f = lower_hull([(0, 1), (1, 0), (0.6, 0.6)])
        assert f.points.tolist() == [[0, 1], [1, 0]]

    def test_matches_monotone_chain(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            cloud = rng.random((200, 2))
            got = [tuple(p) for p in lower_hull(cloud).points]
            assert got == monotone_chain_lower_left(cloud)

    @settings(max_examples=60)
    @given(clouds)
    def test_hull_subset_of_pareto_and_covers_cloud(self, cloud):
        hull = lower_hull(cloud)
        par = {tuple(p) for p in pareto_reduce(cloud).points}
        assert {tuple(p) for p in hull.points} <= par
        for p in cloud:
            assert frontier_contains(hull, p)


class TestContains:
    F = Frontier(np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_vertex(self):
        assert frontier_contains(self.F, (1.0, 0.0))

    def test_left_of_vertex(self):
        assert not frontier_contains(self.F, (-1e-6, 1.0))

    def test_chord_midpoint(self):
        assert frontier_contains(self.F, (0.5, 0.5 + 1e-9))
        assert not frontier_contains(self.F, (0.5, 0.5 - 1e-6))

    def test_beyond_range_uses_extreme_vertex(self):
        assert frontier_contains(self.F, (5.0, 0.0))

    @given(coords, coords, coords, coords)
    def test_monotone(self, x, y, dx, dy):
        if frontier_contains(self.F, (x, y)):
            assert frontier_contains(self.F, (x + dx, y + dy))

    def test_dimension(self):
        with pytest.raises(DimensionError):
            frontier_contains(self.F, (1.0, 2.0, 3.0))


class TestCompare:
    B = Frontier(np.array([[0.1, 0.9], [0.3, 0.4], [0.6, 0.2], [0.9, 0.1]]))

    def test_self(self):
        rep = frontier_compare(self.B, self.B)
        assert rep.a_inside_b
        assert rep.max_violation <= 0

    def test_shift_out(self):
        a = Frontier(self.B.points + 0.05)
        assert frontier_compare(a, self.B).a_inside_b

    def test_shift_in(self):
        a = Frontier(self.B.points - 0.02)
        rep = frontier_compare(a, self.B)
        assert not rep.a_inside_b
        assert rep.max_violation == pytest.approx(0.02, abs=1e-9)

    def test_diagonal_violation_sign(self):
        t = diagonal_violation(self.B, np.array([[0.3, 0.4], [0.5, 0.5], [0.2, 0.3]]))
        assert abs(t[0]) < 1e-12
        assert t[1] < 0
        assert t[2] > 0


class TestSerialization:
    def test_csv_round_trip(self):
        f = Frontier(np.array([[1 / 3, 2 / 7], [0.5, 1e-300]]), "x")
        text = f.to_csv()
        assert text.startswith("D1,D2\n")
        assert "\r" not in text
        np.testing.assert_array_equal(frontier_from_csv(text).points, f.points)

    def test_dict(self):
        d = Frontier(np.array([[1.0, 2.0]]), "lbl", {"a": 1}).to_dict()
        assert d == {"label": "lbl", "meta": {"a": 1}, "points": [[1.0, 2.0]]}


class TestTracing:
    @staticmethod
    def member(d1, d2):
        # convex region d1 * d2 >= 0.01
        return d1 * d2 >= 0.01

    def test_trace_boundary(self):
        rows = trace_boundary(self.member, np.array([0.1, 0.2, 0.5]), 1e-4, 1.0, rtol=1e-10)
        np.testing.assert_allclose(rows[:, 1], 0.01 / rows[:, 0], rtol=1e-8)
        # the traced value lies on the outside of the boundary
        assert not np.any(self.member(rows[:, 0], rows[:, 1]))

    def test_trace_frontier_two_axes(self):
        f = trace_frontier(self.member, (0.01, 1.0), (0.01, 1.0), 21, rtol=1e-10)
        np.testing.assert_allclose(f.points[:, 0] * f.points[:, 1], 0.01, rtol=1e-8)
        assert len(f) >= 30

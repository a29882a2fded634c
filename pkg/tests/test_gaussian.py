import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcdist.capacity import GaussianBcSpec, SideInfoSpec
from bcdist.errors import DimensionError, UnsupportedError
from bcdist.gaussian import (inner_frontier, inner_point, outer_frontier, outer_member,
                             outer_member_many, outer_rates, tau_chains, trivial_point,
                             uncoded_point, wz_outer_frontier, wz_outer_member,
                             wz_outer_member_many, wz_trivial_point)
from bcdist.region import frontier_compare

FIG3 = GaussianBcSpec(P=50, N=(10, 1), Ns=1, b=2)
FIG3_WZ = GaussianBcSpec(P=50, N=(10, 1), Ns=1, b=1)
SI = SideInfoSpec(beta=(1 / 6, 1 / 51))


def outer_slack_ref(point, top, spec, taus):
    """Scalar re-derivation of the K=2 outer-bound test for explicit tau_1 values."""
    P, (n1, n2), b = spec.P, spec.N, spec.b
    worst = math.inf
    for t in taus:
        d1, d2 = min(point[0], top[0]), min(point[1], top[1])
        if math.isinf(t):
            r1 = 0.0
            r2 = math.log2(top[1] / d2) / (2 * b)
        else:
            r1 = 0.5 / b * math.log2((top[0] + t) / (d1 + t))
            r2 = 0.5 / b * (math.log2(top[1] / d2) - math.log2((top[1] + t) / (d2 + t)))
        r1, r2 = max(r1, 0.0), max(r2, 0.0)
        lhs = (n1 - n2) * 2 ** (2 * r1) + n2 * 2 ** (2 * (r1 + r2))
        worst = min(worst, P + n1 - lhs)
    return worst


class TestTrivialPoint:
    def test_matched_bandwidth(self):
        spec = GaussianBcSpec(P=50, N=(10,), b=1)
        assert trivial_point(spec)[0] == pytest.approx(1 / 6, abs=1e-15)

    def test_figure_params(self):
        np.testing.assert_allclose(trivial_point(FIG3), [1 / 36, 1 / 2601], atol=1e-15)

    def test_uncoded(self):
        np.testing.assert_allclose(uncoded_point(FIG3_WZ), [1 / 6, 1 / 51])

    def test_wz_reductions(self):
        np.testing.assert_allclose(wz_trivial_point(FIG3, SideInfoSpec((1.0, 1.0))), trivial_point(FIG3))
        np.testing.assert_allclose(wz_trivial_point(FIG3_WZ, SI), [1 / 36, 1 / 2601], atol=1e-15)

    def test_wz_dimension(self):
        with pytest.raises(DimensionError):
            wz_trivial_point(FIG3, SideInfoSpec((0.5,)))


class TestInnerPoint:
    def test_lambda_zero(self):
        np.testing.assert_allclose(inner_point(0.0, 0.5, FIG3), [1 / 36, 1 / 306], atol=1e-12)

    def test_lambda_one(self):
        np.testing.assert_allclose(inner_point(1.0, 0.5, FIG3), [1 / 6, 1 / 2601], atol=1e-12)

    def test_compression_corner(self):
        spec = GaussianBcSpec(P=50, N=(10, 1), b=0.5)
        assert inner_point(1.0, 1.0, spec)[0] == pytest.approx(1.0, abs=1e-12)

    def test_hand_evaluation_expansion(self):
        # b=2 so P' = 2(1-gamma)P and the exponents b-1 are 1
        lam, gam = 0.3, 0.4
        pp = 2 * (1 - gam) * 50
        a = (pp + 10) / (lam * pp + 10)
        d1 = 1 / (a * (2 * gam * 50 + 10) / 10)
        d2 = 1 / (a * (2 * gam * 50 + 1) * (lam * pp + 1))
        np.testing.assert_allclose(inner_point(lam, gam, FIG3), [d1, d2], rtol=1e-13)

    def test_rejects_matched_bandwidth(self):
        with pytest.raises(UnsupportedError):
            inner_point(0.5, 0.5, FIG3_WZ)

    def test_rejects_three_users(self):
        with pytest.raises(UnsupportedError):
            inner_point(0.5, 0.5, GaussianBcSpec(P=1, N=(3, 2, 1), b=2))

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            inner_point(1.5, 0.5, FIG3)

    def test_vectorized(self):
        d1, d2 = inner_point(np.array([0.0, 1.0]), np.array([0.5, 0.5]), FIG3)
        np.testing.assert_allclose(d1, [1 / 36, 1 / 6], atol=1e-12)
        np.testing.assert_allclose(d2, [1 / 306, 1 / 2601], atol=1e-12)


class TestInnerFrontier:
    def test_density_one(self):
        f = inner_frontier(FIG3, 1)
        assert len(f) == 1
        np.testing.assert_allclose(f.points[0], inner_point(0.0, 0.0, FIG3))

    def test_contains_anchors(self):
        pts = inner_frontier(FIG3, 201).points
        for anchor in ([1 / 36, 1 / 306], [1 / 6, 1 / 2601]):
            assert np.min(np.max(np.abs(pts - anchor), axis=1)) <= 1e-9

    def test_min_d2_is_trivial(self):
        pts = inner_frontier(FIG3, 201).points
        assert pts[:, 1].min() == pytest.approx(1 / 2601, abs=1e-12)

    def test_deterministic(self):
        np.testing.assert_array_equal(inner_frontier(FIG3, 31).points, inner_frontier(FIG3, 31).points)


class TestOuterMember:
    def test_source_variance_point(self):
        assert outer_member((1.0, 1.0), FIG3).member

    def test_joint_trivial_rejected(self):
        res = outer_member((1 / 36, 1 / 2601), FIG3)
        assert not res.member
        assert res.witness.shape == (1,)

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(42)
        taus = tau_chains(2, 4096, 1.0)[:, 1]
        for d in rng.uniform([1 / 36, 1 / 2601], [0.3, 0.05], size=(30, 2)):
            res = outer_member(d, FIG3)
            ref = outer_slack_ref(d, (1.0, 1.0), FIG3, taus)
            assert res.slack == pytest.approx(ref, rel=1e-9, abs=1e-9)
            assert res.member == (ref >= -1e-12 * 60)

    @pytest.mark.parametrize("axis", [0, 1])
    def test_axis_limits(self, axis):
        dstar = trivial_point(FIG3)
        above = np.ones(2)
        above[axis] = dstar[axis] * (1 + 1e-6)
        below = np.ones(2)
        below[axis] = dstar[axis] * (1 - 1e-6)
        assert outer_member(above, FIG3).member
        assert not outer_member(below, FIG3).member

    def test_clamp_above_source_variance(self):
        # distortions above N_S give negative raw rates that must clamp to zero
        rates = outer_rates(np.array([2.0, 2.0]), np.array([1.0, 1.0]),
                            tau_chains(2, 64, 1.0), 2.0)
        assert np.all(rates == 0.0)
        assert outer_member((2.0, 2.0), FIG3).member

    def test_rates_nonnegative(self):
        rng = np.random.default_rng(42)
        tau = tau_chains(2, 256, 1.0)
        for d in rng.uniform(1e-4, 1.0, size=(20, 2)):
            assert np.all(outer_rates(d, np.ones(2), tau, 2.0) >= 0)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.02, 1.0), st.floats(3e-4, 1.0), st.floats(0, 0.2), st.floats(0, 0.2))
    def test_monotone(self, d1, d2, e1, e2):
        if outer_member((d1, d2), FIG3, tau_grid=512).member:
            assert outer_member((d1 + e1, d2 + e2), FIG3, tau_grid=512).member

    def test_many_matches_single(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform([0.02, 3e-4], [0.2, 0.01], size=(40, 2))
        many = outer_member_many(pts, FIG3)
        assert list(many) == [outer_member(p, FIG3).member for p in pts]

    def test_matched_bandwidth_is_trivial(self):
        dstar = trivial_point(FIG3_WZ)
        g1 = np.geomspace(dstar[0] * (1 + 1e-9), 1.0, 20)
        g2 = np.geomspace(dstar[1] * (1 + 1e-9), 1.0, 20)
        pts = np.array([(a, c) for a in g1 for c in g2])
        assert np.all(outer_member_many(pts, FIG3_WZ))

    def test_three_receivers(self):
        spec = GaussianBcSpec(P=10, N=(4, 2, 1), b=2)
        assert outer_member((1.0, 1.0, 1.0), spec, tau_grid=512).member
        assert not outer_member(trivial_point(spec), spec, tau_grid=512).member
        assert tau_chains(3, 512, 1.0).shape[1] == 4

    def test_too_many_receivers(self):
        with pytest.raises(UnsupportedError):
            tau_chains(5, 64, 1.0)


class TestWzOuterMember:
    def test_uninformative_side_info_matches(self):
        rng = np.random.default_rng(42)
        si = SideInfoSpec((1.0, 1.0))
        for d in rng.uniform([0.02, 3e-4], [0.3, 0.05], size=(30, 2)):
            assert wz_outer_member(d, FIG3, si).member == outer_member(d, FIG3).member

    def test_caption_instance(self):
        assert not wz_outer_member((1 / 36, 1 / 2601), FIG3_WZ, SI).member
        assert wz_outer_member(SI.beta, FIG3_WZ, SI).member

    def test_scalar_reference(self):
        rng = np.random.default_rng(42)
        taus = tau_chains(2, 4096, 1 / 6)[:, 1]
        for d in rng.uniform([1 / 36, 1 / 2601], [1 / 6, 1 / 51], size=(20, 2)):
            res = wz_outer_member(d, FIG3_WZ, SI)
            ref = outer_slack_ref(d, SI.beta, FIG3_WZ, taus)
            assert res.slack == pytest.approx(ref, rel=1e-9, abs=1e-9)

    def test_many_matches_single(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform([0.02, 3e-4], [0.1, 0.01], size=(30, 2))
        many = wz_outer_member_many(pts, FIG3_WZ, SI)
        assert list(many) == [wz_outer_member(p, FIG3_WZ, SI).member for p in pts]


@pytest.fixture(scope="module")
def outer():
    return outer_frontier(FIG3, 41)


class TestOuterFrontiers:
    def test_vertices_just_outside(self, outer):
        # every vertex is on the outside edge, a hair up-right is inside
        pts = outer.points
        inner_ok = outer_member_many(pts * (1 + 1e-5), FIG3)
        assert np.all(inner_ok)

    def test_inside_trivial(self, outer):
        dstar = trivial_point(FIG3)
        assert np.all(outer.points >= dstar * (1 - 1e-9))

    def test_inner_inside_outer(self, outer):
        inner = inner_frontier(FIG3, 101)
        assert np.all(outer_member_many(inner.points, FIG3))
        rep = frontier_compare(inner, outer)
        assert rep.a_inside_b and rep.max_violation <= 0

    def test_wz_frontier(self):
        f = wz_outer_frontier(FIG3_WZ, SI, 21)
        assert np.all(f.points >= wz_trivial_point(FIG3_WZ, SI) * (1 - 1e-9))
        assert np.all(f.points <= np.array(SI.beta) * (1 + 1e-12))

    def test_requires_two_users(self):
        with pytest.raises(UnsupportedError):
            outer_frontier(GaussianBcSpec(P=1, N=(3, 2, 1), b=2))

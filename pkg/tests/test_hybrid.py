import json
from importlib.resources import files

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcdist.errors import ConfigError, DimensionError, DomainError, MemoryGuardError
from bcdist.hybrid import (Codebook, SchemeSpec, TypParams, bsc_test_pair, codebook_sizes,
                           codewords, covering_experiment, decode, encode, gen_codebook,
                           is_typical, jointly_typical, packing_experiment, parse_config,
                           point_to_point_scheme, scheme_from_dict, simulate)

PAIR = bsc_test_pair(0.25)


def load_config(name):
    return json.loads(files("bcdist").joinpath("configs", name).read_text())


TWO_LAYER = scheme_from_dict(load_config("simulate_two_layer.json")["scheme"])
# every (s, v1, v2) cell has mass 1/8, so short blocks still contain typical candidates
FLAT = SchemeSpec(source=[0.5, 0.5], test_channel=np.full((2, 2, 2), 0.25), parents=((), (0,)),
                  x_map=np.zeros((2, 2, 2), int), channels=[np.eye(2), np.eye(2)],
                  shat_maps=[np.zeros((2, 2), int), np.zeros((2, 2, 2), int)],
                  distortion=[1 - np.eye(2)] * 2, decodable=((0,), (0, 1)))


def typical_ref(seqs, joint, eps):
    """Count every joint symbol by hand and compare with n p."""
    n = len(seqs[0])
    counts = {}
    for i in range(n):
        key = tuple(int(s[i]) for s in seqs)
        counts[key] = counts.get(key, 0) + 1
    for idx in np.ndindex(joint.shape):
        target = n * joint[idx]
        if abs(counts.get(idx, 0) - target) > eps * target + 1e-9:
            return False
    return True


def first_encode_ref(s, cb, eps):
    """Exhaustive scan; the last index is the most significant."""
    joint = cb.spec.joint()
    if cb.spec.N == 1:
        for m1 in range(cb.sizes[0]):
            if typical_ref([s, cb.tables[0][m1]], joint, eps):
                return (m1,)
        return None
    for m2 in range(cb.sizes[1]):
        for m1 in range(cb.sizes[0]):
            if typical_ref([s, cb.tables[0][m1], cb.tables[1][m1, m2]], joint, eps):
                return (m1, m2)
    return None


def planted_codebook(spec, n, planted, size=8):
    """Codebook whose rows are the complement of ``base`` except at the planted indices."""
    base = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    good = np.array([0, 0, 0, 1, 1, 1, 1, 0])
    table = np.tile(1 - base, (size, 1)).astype(np.int8)
    for i in planted:
        table[i] = good
    return base, Codebook(spec, n, (np.log2(size) / n,), (size,), [table])


class TestTypicality:
    def test_all_zeros(self):
        assert not is_typical([0] * 10, [0.5, 0.5], 0.1)

    def test_deterministic_pmf(self):
        assert is_typical([2, 2, 2], [0, 0, 1], 0.01)

    def test_alphabet_mismatch(self):
        with pytest.raises(DomainError):
            is_typical([0, 3], [0.5, 0.5], 0.1)

    def test_bernoulli_rate(self):
        rng = np.random.default_rng(42)
        draws = rng.random((1000, 500)) < 0.3
        rate = np.mean([is_typical(d.astype(int), [0.7, 0.3], 0.2) for d in draws])
        assert rate >= 0.99

    @settings(max_examples=60)
    @given(st.integers(1, 12), st.integers(0, 2 ** 31 - 1), st.floats(0.05, 0.9))
    def test_joint_matches_hand_count(self, n, seed, eps):
        rng = np.random.default_rng(seed)
        joint = rng.dirichlet(np.ones(12)).reshape(2, 3, 2)
        seqs = [rng.integers(0, k, n) for k in joint.shape]
        assert jointly_typical(seqs, joint, eps) == typical_ref(seqs, joint, eps)

    def test_params(self):
        assert TypParams(0.1).eps_prime == pytest.approx(0.2)
        with pytest.raises(DomainError):
            TypParams(0.3, 0.2)
        with pytest.raises(DomainError):
            TypParams(0.6)


class TestCodebook:
    def test_sizes_round_near_integers(self):
        assert codebook_sizes(20, [0.35]) == (2 ** 7,)
        assert codebook_sizes(10, [0.31]) == (2 ** 4,)
        assert codebook_sizes(8, [0.0]) == (1,)

    def test_deterministic(self):
        spec = point_to_point_scheme(0.25, 0.1)
        a = gen_codebook(spec, 8, [0.25], seed=3)
        b = gen_codebook(spec, 8, [0.25], seed=3)
        assert a.tables[0].tobytes() == b.tables[0].tobytes()
        assert a.tables[0].shape == (4, 8)

    def test_rate_zero_single_codeword_per_parent(self):
        cb = gen_codebook(TWO_LAYER, 10, [0.3, 0.0], seed=0)
        assert cb.tables[1].shape == (8, 1, 10)

    def test_no_parent_layer_uses_marginal(self):
        spec = point_to_point_scheme(0.25, 0.1)
        cb = gen_codebook(spec, 2000, [0.004], seed=1)
        assert cb.tables[0].mean() == pytest.approx(0.5, abs=0.02)

    def test_superposition_conditional(self):
        cb = gen_codebook(TWO_LAYER, 4000, [0.001, 0.001], seed=2)
        v1 = cb.tables[0][0]
        v2 = cb.tables[1][0, 0]
        cond = TWO_LAYER.layer_conditional(1)
        for a in (0, 1):
            assert v2[v1 == a].mean() == pytest.approx(cond[a, 1], abs=0.03)

    def test_memory_guard(self):
        spec = point_to_point_scheme(0.25, 0.1)
        with pytest.raises(MemoryGuardError):
            gen_codebook(spec, 60, [0.5], seed=0)


class TestPlantedEncoder:
    SPEC = point_to_point_scheme(0.25, 0.25)
    TP = TypParams(0.05, 0.1)

    def test_unique_planted(self):
        s, cb = planted_codebook(self.SPEC, 8, [5])
        m, x, found = encode(s, cb, self.TP)
        assert found and m == (5,)
        np.testing.assert_array_equal(x, cb.tables[0][5])

    def test_smallest_of_two(self):
        s, cb = planted_codebook(self.SPEC, 8, [3, 7])
        assert encode(s, cb, self.TP)[0] == (3,)

    def test_none_falls_back_to_first(self):
        s, cb = planted_codebook(self.SPEC, 8, [])
        m, _, found = encode(s, cb, self.TP)
        assert m == (0,) and not found

    def test_rate_zero(self):
        cb = gen_codebook(self.SPEC, 8, [0.0], seed=0)
        rng = np.random.default_rng(42)
        for _ in range(5):
            assert encode(rng.integers(0, 2, 8), cb, self.TP)[0] == (0,)

    def test_length_check(self):
        _, cb = planted_codebook(self.SPEC, 8, [5])
        with pytest.raises(DimensionError):
            encode([0, 1], cb, self.TP)


class TestPlantedDecoder:
    # BSC(0.25) makes p(v, y) equal to p(s, v), so the same planted rows apply
    SPEC = point_to_point_scheme(0.25, 0.25)
    TP = TypParams(0.02, 0.05)

    def test_unique_planted(self):
        y, cb = planted_codebook(self.SPEC, 8, [5])
        m, s_hat, found = decode(y, cb, 0, self.TP)
        assert found and m == (5,)
        np.testing.assert_array_equal(s_hat, cb.tables[0][5])

    def test_smallest_of_two(self):
        y, cb = planted_codebook(self.SPEC, 8, [3, 7])
        assert decode(y, cb, 0, self.TP)[0] == (3,)

    def test_rate_zero(self):
        cb = gen_codebook(self.SPEC, 8, [0.0], seed=0)
        assert decode(np.zeros(8, int), cb, 0, self.TP)[0] == (0,)


class TestSmallestIndexRule:
    def test_encoder_exhaustive(self):
        rng = np.random.default_rng(42)
        hits = 0
        for t in range(40):
            n = int(rng.integers(8, 11))
            r = rng.uniform(0.3, 0.5, size=2)
            cb = gen_codebook(FLAT, n, r, seed=t)
            s = rng.integers(0, 2, n)
            m, _, found = encode(s, cb, TypParams(0.9, 0.95))
            ref = first_encode_ref(s, cb, 0.9)
            assert found == (ref is not None)
            if ref is not None:
                assert m == ref
                hits += 1
        assert hits >= 5

    def test_decoder_exhaustive(self):
        rng = np.random.default_rng(42)
        joint = TWO_LAYER.receiver_joint(1)
        for t in range(30):
            n = int(rng.integers(4, 11))
            r = rng.uniform(0.1, 0.5, size=2)
            cb = gen_codebook(TWO_LAYER, n, r, seed=100 + t)
            y = rng.integers(0, 2, n)
            m, s_hat, found = decode(y, cb, 1, TypParams(0.4, 0.9))
            ref = None
            for m2 in range(cb.sizes[1]):
                for m1 in range(cb.sizes[0]):
                    if ref is None and typical_ref([cb.tables[0][m1], cb.tables[1][m1, m2], y],
                                                   joint, 0.9):
                        ref = (m1, m2)
            assert found == (ref is not None)
            assert m == (ref if ref is not None else (0, 0))
            v1, v2 = codewords(cb, m, (0, 1))
            np.testing.assert_array_equal(s_hat, TWO_LAYER.shat_maps[1][v1, v2, y])

    def test_weak_receiver_decodes_first_layer_only(self):
        cb = gen_codebook(TWO_LAYER, 8, [0.25, 0.25], seed=0)
        m, _, _ = decode(np.zeros(8, int), cb, 0, TypParams(0.4, 0.9))
        assert len(m) == 1


class TestLemmaExperiments:
    I_SV = 1 - 0.8112781244591328  # 1 - h2(0.25)

    def test_explicit_matches_exact_sampler(self):
        kw = dict(n=40, trials=400, seed=5, pair_pmf=PAIR, eps=0.3)
        a = covering_experiment(0.15, method="explicit", **kw)
        b = covering_experiment(0.15, method="exact", **kw)
        se = np.sqrt(0.25 / 400)
        assert 0.05 < a < 0.95
        assert abs(a - b) <= 4 * np.sqrt(2) * se

    def test_packing_explicit_matches_exact(self):
        pmf = np.array([[[0.375, 0.125]], [[0.125, 0.375]]])
        kw = dict(n=40, trials=400, seed=5, triple_pmf=pmf, eps=0.3)
        a = packing_experiment(0.15, method="explicit", **kw)
        b = packing_experiment(0.15, method="exact", **kw)
        assert abs(a - b) <= 4 * np.sqrt(2) * np.sqrt(0.25 / 400)

    def test_monotone_ladder(self):
        rates = self.I_SV + np.array([-0.15, -0.075, 0.0, 0.075, 0.15])
        freq = [covering_experiment(r, 300, 100, 0, PAIR, eps=0.1) for r in rates]
        assert all(b >= a for a, b in zip(freq, freq[1:]))
        assert freq[0] <= 0.1

    def test_single_codeword_independent_pair(self):
        indep = np.full((2, 2), 0.25)
        assert covering_experiment(0.0, 300, 100, 0, indep, eps=0.5) >= 0.95

    def test_blocklength_one(self):
        f = packing_experiment(0.5, 1, 20, 0, np.array([[[0.375, 0.125]], [[0.125, 0.375]]]))
        assert 0.0 <= f <= 1.0
        assert 0.0 <= covering_experiment(0.5, 1, 20, 0, PAIR) <= 1.0

    def test_exact_needs_binary_codewords(self):
        with pytest.raises(DimensionError):
            covering_experiment(0.5, 300, 2, 0, np.full((2, 3), 1 / 6), method="exact")


class TestSimulate:
    @staticmethod
    def noiseless():
        return SchemeSpec(source=[0.5, 0.5], test_channel=np.eye(2), parents=((),),
                          x_map=np.array([[0, 0], [1, 1]]), channels=[np.eye(2)],
                          shat_maps=[np.array([[0, 0], [1, 1]])],
                          distortion=[1 - np.eye(2)], decodable=((0,),))

    def test_noiseless_trend(self):
        spec = self.noiseless()
        tp = TypParams(0.5, 0.9)
        res = {n: simulate(spec, [1.1], n, 100, 0, tp) for n in (8, 12, 16)}
        d = [res[n]["avg_distortion"][0] for n in (8, 12, 16)]
        se = [res[n]["distortion_stderr"][0] for n in (8, 12, 16)]
        assert d[2] < d[0]
        assert d[2] <= d[1] + 2 * np.hypot(se[1], se[2])
        assert res[12]["decode_error_rate"][0] <= 0.05

    def test_zero_rate_constant_estimator(self):
        spec = SchemeSpec(source=[0.7, 0.3], test_channel=[[1.0, 0.0], [1.0, 0.0]],
                          parents=((),), x_map=np.zeros((2, 2), int),
                          channels=[np.array([[0.9, 0.1], [0.1, 0.9]])],
                          shat_maps=[np.zeros((2, 2), int)], distortion=[1 - np.eye(2)],
                          decodable=((0,),))
        res = simulate(spec, [0.0], 20, 400, 1, TypParams(0.3))
        assert abs(res["avg_distortion"][0] - 0.3) <= 2 * res["distortion_stderr"][0]

    def test_two_layer_run(self):
        res = simulate(TWO_LAYER, [0.1, 0.2], 10, 20, 0, TypParams(0.35))
        assert len(res["avg_distortion"]) == 2
        assert all(0 <= d <= 1 for d in res["avg_distortion"])
        assert 0 <= res["encode_failure_rate"] <= 1

    def test_deterministic(self):
        spec = point_to_point_scheme(0.25, 0.1)
        a = simulate(spec, [0.35], 12, 30, 9, TypParams(0.35))
        b = simulate(spec, [0.35], 12, 30, 9, TypParams(0.35))
        assert a == b

    def test_memory_guard(self):
        with pytest.raises(MemoryGuardError):
            simulate(point_to_point_scheme(0.25, 0.1), [0.5], 60, 1, 0)


class TestConfig:
    def test_syntax_error_position(self):
        with pytest.raises(ConfigError, match="line 3 column"):
            parse_config('{\n "n": 3,\n "rates": [0.1,,]\n}')

    def test_missing_field(self):
        cfg = load_config("simulate_p2p.json")["scheme"]
        del cfg["x_map"]
        with pytest.raises(ConfigError, match="x_map"):
            scheme_from_dict(cfg)

    def test_layers_are_one_based(self):
        assert TWO_LAYER.parents == ((), (0,))
        assert TWO_LAYER.decodable == ((0,), (0, 1))

    def test_decodable_must_close_over_parents(self):
        cfg = load_config("simulate_two_layer.json")["scheme"]
        cfg["decodable"] = [[1], [2]]
        cfg["shat_maps"][1] = [[0, 0], [1, 1]]
        with pytest.raises(ConfigError, match="decodable"):
            scheme_from_dict(cfg)

"""Monte Carlo hybrid coding over a broadcast channel at small blocklength.

A scheme draws a layered random codebook: layer j holds 2^ceil(n r_j)
sequences for every index of its parent layers A_j, generated symbol by
symbol from p(v_j | v_{A_j}). The encoder picks the smallest index vector
whose codewords are jointly typical with the source, sends x(v_i, s_i)
symbol by symbol, and receiver k decodes the layers in D_k by joint
typicality before forming s_hat_k(v_{D_k,i}, y_{k,i}).

Indices are 0-based. Index vectors are ordered by their last coordinate
first, then the one before it, and so on. The first codeword (index 0)
stands in when no typical candidate exists.

The covering and packing experiments estimate how often a random codebook
contains a sequence jointly typical with an independent sequence. For
codebooks too large to store they draw the outcome from its exact
distribution, computed by summing binomial probabilities over joint types.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .errors import ConfigError, DimensionError, DomainError, MemoryGuardError

MAX_STORED_SEQUENCES = 2 ** 22
EXPLICIT_CODEBOOK_MAX = 2 ** 12
_COUNT_TOL = 1e-9
_NORM_TOL = 1e-12


def _codes(seqs, sizes):
    """Mixed-radix joint symbol, first sequence least significant."""
    code = np.zeros(np.shape(seqs[0]), dtype=np.int64)
    radix = 1
    for seq, size in zip(seqs, sizes):
        code = code + radix * np.asarray(seq, dtype=np.int64)
        radix *= size
    return code


def _typical_counts(counts, pmf, n, eps):
    """Typicality of count vectors (last axis) against a flat pmf."""
    target = n * pmf
    return np.all(np.abs(counts - target) <= eps * target + _COUNT_TOL, axis=-1)


def is_typical(seq, pmf, eps):
    """True iff every symbol a has |count(a)/n - p(a)| <= eps p(a).

    Symbols are integers indexing ``pmf``. For joint typicality pass a
    joint pmf and the joint symbols, or use :func:`jointly_typical`.

    >>> is_typical([0] * 10, [0.5, 0.5], 0.1)
    False
    """
    seq = np.asarray(seq, dtype=np.int64).ravel()
    pmf = np.asarray(pmf, dtype=float).ravel()
    if seq.size == 0:
        raise DimensionError("sequence must be nonempty")
    if np.any(seq < 0) or np.any(seq >= len(pmf)):
        raise DomainError(f"symbols must lie in [0, {len(pmf)})")
    counts = np.bincount(seq, minlength=len(pmf)).astype(float)
    return bool(_typical_counts(counts, pmf, len(seq), eps))


def jointly_typical(seqs, joint, eps):
    """Joint typicality of equal-length sequences against a joint pmf p[a, b, ...]."""
    joint = np.asarray(joint, dtype=float)
    if len(seqs) != joint.ndim:
        raise DimensionError("one sequence per axis of the joint pmf is needed")
    # ravel order of the pmf is C order, so the last sequence is least significant
    code = _codes(seqs[::-1], joint.shape[::-1])
    return is_typical(code, joint.ravel(), eps)


@dataclass(frozen=True)
class TypParams:
    """Encoder and decoder typicality slacks; eps_prime defaults to 2 eps."""

    eps: float
    eps_prime: float = None

    def __post_init__(self):
        if self.eps_prime is None:
            object.__setattr__(self, "eps_prime", 2.0 * self.eps)
        if not 0 < self.eps < self.eps_prime < 1:
            raise DomainError(f"need 0 < eps < eps_prime < 1, got {self.eps}, {self.eps_prime}")


def _tuple_sets(sets, name):
    out = tuple(tuple(sorted(int(i) for i in s)) for s in sets)
    for s in out:
        if len(set(s)) != len(s):
            raise DomainError(f"{name} entries must not repeat")
    return out


@dataclass
class SchemeSpec:
    """A hybrid coding scheme over finite alphabets.

    ``test_channel[s, v_1, ..., v_N]`` is p(v | s); with the source pmf it
    fixes the joint law the codebook layers are generated from.
    ``parents[j]`` lists A_j (earlier layers), ``decodable[k]`` lists D_k.
    ``x_map[v_1, ..., v_N, s]`` is the channel input and
    ``shat_maps[k][v_{D_k}..., y]`` the estimate of receiver k.
    """

    source: np.ndarray
    test_channel: np.ndarray
    parents: tuple
    x_map: np.ndarray
    channels: list
    shat_maps: list
    distortion: list
    decodable: tuple

    def __post_init__(self):
        self.source = np.asarray(self.source, dtype=float)
        self.test_channel = np.asarray(self.test_channel, dtype=float)
        self.x_map = np.asarray(self.x_map, dtype=int)
        self.channels = [np.asarray(w, dtype=float) for w in self.channels]
        self.shat_maps = [np.asarray(m, dtype=int) for m in self.shat_maps]
        self.distortion = [np.asarray(d, dtype=float) for d in self.distortion]
        self.parents = _tuple_sets(self.parents, "parents")
        self.decodable = _tuple_sets(self.decodable, "decodable")
        ns = len(self.source)
        if np.any(self.source < 0) or abs(self.source.sum() - 1) > _NORM_TOL:
            raise DomainError("source must be a pmf")
        if self.test_channel.shape[0] != ns or self.test_channel.ndim < 2:
            raise DimensionError("test_channel must be indexed [s, v_1, ..., v_N]")
        rows = self.test_channel.reshape(ns, -1)
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1) > _NORM_TOL):
            raise DomainError("each test_channel row must be a pmf")
        N = self.N
        if len(self.parents) != N:
            raise DimensionError(f"parents needs {N} entries")
        for j, a in enumerate(self.parents):
            if any(i >= j for i in a):
                raise DomainError(f"layer {j} may only superpose on earlier layers")
            for i in a:
                if not set(self.parents[i]) <= set(a):
                    raise DomainError(f"parents of layer {j} must include the parents of layer {i}")
        if self.x_map.shape != self.v_sizes + (ns,):
            raise DimensionError("x_map must be indexed [v_1, ..., v_N, s]")
        K = len(self.channels)
        if not (len(self.shat_maps) == len(self.distortion) == len(self.decodable) == K):
            raise DimensionError("one channel, reconstruction map, distortion table and D_k per receiver")
        nx = self.channels[0].shape[0]
        if np.any(self.x_map < 0) or np.any(self.x_map >= nx):
            raise DimensionError("x_map values must be channel inputs")
        for k in range(K):
            w = self.channels[k]
            if w.shape[0] != nx or np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1) > _NORM_TOL):
                raise DomainError(f"channels[{k}] must be a stochastic matrix with {nx} rows")
            dk = self.decodable[k]
            if any(j >= N for j in dk):
                raise DomainError(f"decodable[{k}] names a missing layer")
            for j in dk:
                if not set(self.parents[j]) <= set(dk):
                    raise DomainError(f"decodable[{k}] must contain the parents of layer {j}")
            shape = tuple(self.v_sizes[j] for j in dk) + (w.shape[1],)
            if self.shat_maps[k].shape != shape:
                raise DimensionError(f"shat_maps[{k}] must have shape {shape}")
            d = self.distortion[k]
            if d.shape[0] != ns or np.any(d < 0):
                raise DimensionError(f"distortion[{k}] must be nonnegative with {ns} rows")
            if np.any(self.shat_maps[k] < 0) or np.any(self.shat_maps[k] >= d.shape[1]):
                raise DimensionError(f"shat_maps[{k}] values must be reconstruction symbols")

    @property
    def N(self):
        return self.test_channel.ndim - 1

    @property
    def K(self):
        return len(self.channels)

    @property
    def v_sizes(self):
        return self.test_channel.shape[1:]

    def joint(self):
        """p(s, v_1, ..., v_N)."""
        return self.source.reshape((-1,) + (1,) * self.N) * self.test_channel

    def layer_conditional(self, j):
        """p(v_j | v_{A_j}) as a matrix with one row per parent symbol (mixed radix, first parent least significant)."""
        joint = self.joint()
        keep = self.parents[j] + (j,)
        drop = tuple(a + 1 for a in range(self.N) if a not in keep)
        marg = joint.sum(axis=(0,) + drop)  # axes: parents in increasing order, then j
        n_par = len(self.parents[j])
        # reverse the parent axes so that C order makes the first parent least significant
        marg = marg.transpose(tuple(range(n_par))[::-1] + (n_par,))
        par = marg.reshape(-1, self.v_sizes[j])
        tot = par.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(tot > 0, par / tot, 1.0 / self.v_sizes[j])

    def receiver_joint(self, k):
        """p(v_{D_k}..., y_k) from the scheme's joint law."""
        joint = self.joint()
        w = self.channels[k]
        trans = w[np.moveaxis(self.x_map, -1, 0)]  # (s, v..., y)
        full = joint[..., None] * trans
        dk = self.decodable[k]
        drop = (0,) + tuple(a + 1 for a in range(self.N) if a not in dk)
        return full.sum(axis=drop)


def codebook_sizes(n, rates):
    """2^ceil(n r_j) per layer; products within 1e-9 of an integer are rounded first."""
    sizes = []
    for r in rates:
        if r < 0:
            raise DomainError("rates must be nonnegative")
        bits = n * r
        bits = round(bits) if abs(bits - round(bits)) < 1e-9 else math.ceil(bits)
        sizes.append(2 ** int(bits))
    return tuple(sizes)


def stored_sequences(spec, sizes):
    """Total sequences a codebook with these per-layer sizes stores."""
    return sum(int(np.prod([sizes[a] for a in spec.parents[j]] + [sizes[j]]))
               for j in range(spec.N))


@dataclass
class Codebook:
    """Layer tables: ``tables[j]`` has axes (m_a for a in A_j..., m_j, time)."""

    spec: SchemeSpec
    n: int
    rates: tuple
    sizes: tuple
    tables: list = field(default_factory=list)


def _guard(count, what):
    if count > MAX_STORED_SEQUENCES:
        raise MemoryGuardError(f"{what} needs {count} sequences, limit is {MAX_STORED_SEQUENCES}")


def _parent_symbols(cb, j):
    """For layer j, parent codeword symbols with axes (m_{A_j}..., time), one array per parent."""
    spec = cb.spec
    a_j = spec.parents[j]
    grid = np.indices(tuple(cb.sizes[a] for a in a_j), sparse=True)
    out = []
    for i in a_j:
        idx = tuple(grid[a_j.index(a)] for a in spec.parents[i] + (i,))
        out.append(cb.tables[i][idx])
    return out


def _draw_layers(spec, n, sizes, rng):
    cb = Codebook(spec, n, (), sizes, [])
    for j in range(spec.N):
        cond = spec.layer_conditional(j)
        cdf = np.cumsum(cond, axis=1)[:, :-1]
        par_shape = tuple(sizes[a] for a in spec.parents[j])
        u = rng.random(par_shape + (sizes[j], n))
        if spec.parents[j]:
            parents = _parent_symbols(cb, j)
            code = _codes(parents, [spec.v_sizes[a] for a in spec.parents[j]])
            thresholds = cdf[code][..., None, :, :]  # (m_A..., 1, time, V-1)
        else:
            thresholds = cdf[0]
        table = np.sum(u[..., None] >= thresholds, axis=-1).astype(np.int8)
        cb.tables.append(table)
    return cb


def gen_codebook(spec, n, rates, seed):
    """Random layered codebook; identical for identical (spec, n, rates, seed)."""
    return _gen_codebook(spec, n, rates, np.random.default_rng(seed))


def _gen_codebook(spec, n, rates, rng):
    if len(rates) != spec.N:
        raise DimensionError(f"need {spec.N} rates")
    if n < 1:
        raise DomainError("blocklength must be positive")
    sizes = codebook_sizes(n, rates)
    _guard(stored_sequences(spec, sizes), "codebook")
    cb = _draw_layers(spec, n, sizes, rng)
    cb.rates = tuple(float(r) for r in rates)
    return cb


def _candidates(cb, layers):
    """Codeword symbols for every index vector over ``layers``.

    Returns one array per layer with axes (m_last, ..., m_first, time), so
    that C-order flattening lists index vectors in the required order.
    """
    spec = cb.spec
    shape = tuple(cb.sizes[j] for j in layers[::-1])
    _guard(int(np.prod(shape)), "index enumeration")
    grid = np.indices(shape, sparse=True)
    pos = {j: len(layers) - 1 - i for i, j in enumerate(layers)}
    out = []
    for j in layers:
        idx = tuple(grid[pos[a]] for a in spec.parents[j] + (j,))
        out.append(cb.tables[j][idx])
    return out, shape


def _first_typical(seqs, sizes, pmf, eps, shape, n):
    full = [np.broadcast_to(s, shape + (n,)) for s in seqs]
    code = _codes(full, sizes).reshape(-1, n)
    A = int(np.prod(sizes))
    rows = np.arange(code.shape[0])[:, None]
    counts = np.bincount((code + A * rows).ravel(), minlength=code.shape[0] * A)
    counts = counts.reshape(-1, A).astype(float)
    ok = _typical_counts(counts, pmf, n, eps)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    return np.unravel_index(int(hits[0]), shape)


def _pmf_flat(joint):
    """Flatten a joint pmf so that axis 0 is least significant, matching :func:`_codes`."""
    return np.asarray(joint).transpose().ravel()


def encode(s_seq, cb, tp):
    """Smallest index vector jointly eps-typical with the source sequence.

    Returns ``(m, x, found)``: m lists one index per layer, x is the channel
    input sequence and found is False when index 0 was used as fallback.
    """
    spec = cb.spec
    s = np.asarray(s_seq, dtype=np.int64)
    if s.shape != (cb.n,):
        raise DimensionError(f"source sequence must have length {cb.n}")
    layers = tuple(range(spec.N))
    seqs, shape = _candidates(cb, layers)
    pmf = _pmf_flat(spec.joint())
    sizes = (len(spec.source),) + spec.v_sizes
    hit = _first_typical([np.broadcast_to(s, shape + (cb.n,))] + seqs, sizes, pmf,
                         tp.eps, shape, cb.n)
    found = hit is not None
    m = tuple(int(v) for v in hit[::-1]) if found else (0,) * spec.N
    v = codewords(cb, m)
    x = spec.x_map[tuple(v) + (s,)]
    return m, x, found


def codewords(cb, m, layers=None):
    """Codeword sequences of the given layers at index vector m (indexed by layer)."""
    spec = cb.spec
    layers = tuple(range(spec.N)) if layers is None else layers
    full = dict(zip(layers, m))
    out = []
    for j in layers:
        idx = tuple(full[a] for a in spec.parents[j] + (j,))
        out.append(cb.tables[j][idx].astype(np.int64))
    return out


def decode(y_seq, cb, k, tp):
    """Receiver k: smallest index vector over D_k jointly eps'-typical with y.

    Returns ``(m_hat, s_hat, found)`` with m_hat listed in the order of D_k.
    """
    spec = cb.spec
    y = np.asarray(y_seq, dtype=np.int64)
    if y.shape != (cb.n,):
        raise DimensionError(f"channel output must have length {cb.n}")
    dk = spec.decodable[k]
    ny = spec.channels[k].shape[1]
    if not dk:
        return (), spec.shat_maps[k][(y,)], True
    seqs, shape = _candidates(cb, dk)
    pmf = _pmf_flat(spec.receiver_joint(k))
    sizes = tuple(spec.v_sizes[j] for j in dk) + (ny,)
    hit = _first_typical(seqs + [np.broadcast_to(y, shape + (cb.n,))], sizes, pmf,
                         tp.eps_prime, shape, cb.n)
    found = hit is not None
    m = tuple(int(v) for v in hit[::-1]) if found else (0,) * len(dk)
    v = codewords(cb, m, dk)
    s_hat = spec.shat_maps[k][tuple(v) + (y,)]
    return m, s_hat, found


def _sample_rows(rng, rows, cond):
    """One symbol per entry of ``rows`` from the conditional pmf matrix ``cond``."""
    cdf = np.cumsum(cond, axis=1)[:, :-1]
    u = rng.random(len(rows))
    return np.sum(u[:, None] >= cdf[rows], axis=1)


def simulate(spec, rates, n, trials, seed, tp=None):
    """Average distortion and error rates over fresh codebooks, sources and noise.

    Trial t uses the generator ``default_rng([seed, t])``, so any subset of
    trials can be rerun on its own. Standard errors are sample standard
    deviations over sqrt(trials).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tp = tp or TypParams(0.1)
    sizes = codebook_sizes(n, rates)
    _guard(stored_sequences(spec, sizes), "codebook")
    K = spec.K
    dist = np.zeros((trials, K))
    dec_err = np.zeros((trials, K))
    enc_fail = np.zeros(trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        cb = _gen_codebook(spec, n, rates, rng)
        s = rng.choice(len(spec.source), size=n, p=spec.source)
        m, x, found = encode(s, cb, tp)
        enc_fail[t] = not found
        for k in range(K):
            y = _sample_rows(rng, x, spec.channels[k])
            m_hat, s_hat, _ = decode(y, cb, k, tp)
            want = tuple(m[j] for j in spec.decodable[k])
            dec_err[t, k] = m_hat != want
            dist[t, k] = spec.distortion[k][s, s_hat].mean()
    root = math.sqrt(trials)
    sd = dist.std(axis=0, ddof=1) if trials > 1 else np.zeros(K)
    return {
        "n": n,
        "trials": trials,
        "seed": seed,
        "rates": [float(r) for r in rates],
        "eps": tp.eps,
        "eps_prime": tp.eps_prime,
        "avg_distortion": dist.mean(axis=0).tolist(),
        "distortion_stderr": (sd / root).tolist(),
        "decode_error_rate": dec_err.mean(axis=0).tolist(),
        "decode_error_stderr": (dec_err.std(axis=0, ddof=min(1, trials - 1)) / root).tolist(),
        "encode_failure_rate": float(enc_fail.mean()),
        "encode_failure_stderr": float(enc_fail.std(ddof=min(1, trials - 1)) / root),
    }


# ---- covering and packing experiments ---------------------------------------------


def _count_box(n, p, eps):
    """Integer counts c with |c - n p| <= eps n p."""
    lo = math.ceil(n * p * (1 - eps) - _COUNT_TOL)
    hi = math.floor(n * p * (1 + eps) + _COUNT_TOL)
    return max(lo, 0), hi


def _hit_probability(ctx_counts, draw, target, n, eps):
    """Probability that one random codeword is jointly typical with a fixed context sequence.

    ``draw[c]`` is the law of a binary codeword symbol at positions with
    context c and ``target[c, v]`` the joint pmf. Cells of different
    contexts are independent binomials, so the probability factorizes.
    """
    q = 1.0
    for c, nc in enumerate(ctx_counts):
        lo1, hi1 = _count_box(n, target[c, 1], eps)
        lo0, hi0 = _count_box(n, target[c, 0], eps)
        # ones count x must satisfy both the (c,1) box and nc - x in the (c,0) box
        lo = max(lo1, nc - hi0)
        hi = min(hi1, nc - lo0)
        if hi < lo:
            return 0.0
        q *= float(binom.cdf(hi, nc, draw[c][1]) - (binom.cdf(lo - 1, nc, draw[c][1]) if lo > 0 else 0.0))
    return min(max(q, 0.0), 1.0)


def _collision_frequency(ctx_pmf, draw, target, rate, n, trials, seed, eps, method):
    n_ctx, nv = target.shape
    M = codebook_sizes(n, [rate])[0]
    if method == "auto":
        method = "explicit" if M <= EXPLICIT_CODEBOOK_MAX else "exact"
    if method == "exact" and nv != 2:
        raise DimensionError("the exact sampler handles binary codeword alphabets")
    if method == "explicit":
        _guard(M, "codebook")
    pmf = _pmf_flat(target)
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        ctx = rng.choice(n_ctx, size=n, p=ctx_pmf)
        if method == "exact":
            q = _hit_probability(np.bincount(ctx, minlength=n_ctx), draw, target, n, eps)
            p_any = -math.expm1(M * math.log1p(-q)) if q < 1 else 1.0
            hits += rng.random() < p_any
        else:
            u = rng.random((M, n))
            cdf = np.cumsum(draw, axis=1)[:, :-1]
            v = np.sum(u[..., None] >= cdf[ctx][None], axis=-1)
            code = ctx[None, :] + n_ctx * v
            A = n_ctx * nv
            rows = np.arange(M)[:, None]
            counts = np.bincount((code + A * rows).ravel(), minlength=M * A).reshape(M, A)
            hits += bool(np.any(_typical_counts(counts.astype(float), pmf, n, eps)))
    return hits / trials


def covering_experiment(rate, n, trials, seed, pair_pmf, eps=0.1, method="auto"):
    """Frequency with which 2^ceil(n r) codewords drawn i.i.d. from p_V cover a source sequence.

    ``pair_pmf[s, v]`` is the target joint law. A trial succeeds when some
    codeword is jointly eps-typical with a fresh i.i.d. source sequence.
    ``method`` is "explicit" (store the codebook), "exact" (draw the
    outcome from its exact law) or "auto" (explicit up to 2^12 codewords).
    """
    joint = np.asarray(pair_pmf, dtype=float)
    if joint.ndim != 2 or abs(joint.sum() - 1) > _NORM_TOL or np.any(joint < 0):
        raise DomainError("pair_pmf must be a joint pmf matrix")
    ps = joint.sum(axis=1)
    pv = joint.sum(axis=0)
    draw = np.tile(pv, (len(ps), 1))
    return _collision_frequency(ps, draw, joint, rate, n, trials, seed, eps, method)


def packing_experiment(rate, n, trials, seed, triple_pmf, eps=0.1, method="auto"):
    """Frequency with which some of 2^ceil(n r) independent codewords is jointly typical with (U, V_0).

    ``triple_pmf[u, v0, v]`` is the target joint law. Each trial draws a
    fresh (U, V_0) sequence and codewords symbol by symbol from p(v | v0),
    independently of U.
    """
    joint = np.asarray(triple_pmf, dtype=float)
    if joint.ndim != 3 or abs(joint.sum() - 1) > _NORM_TOL or np.any(joint < 0):
        raise DomainError("triple_pmf must be a joint pmf over (u, v0, v)")
    nu, n0, nv = joint.shape
    p_v0v = joint.sum(axis=0)
    tot = p_v0v.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(tot > 0, p_v0v / tot, 1.0 / nv)
    # context symbol c = u * n0 + v0
    target = joint.reshape(nu * n0, nv)
    ctx_pmf = target.sum(axis=1)
    draw = np.tile(cond, (nu, 1))
    return _collision_frequency(ctx_pmf, draw, target, rate, n, trials, seed, eps, method)


def bsc_test_pair(q):
    """Joint pmf of a uniform bit S and V = S xor Bern(q)."""
    return np.array([[(1 - q) / 2, q / 2], [q / 2, (1 - q) / 2]])


def point_to_point_scheme(q, p):
    """Single-layer scheme: V = S xor Bern(q), x = v, s_hat = v, over BSC(p)."""
    test = np.array([[1 - q, q], [q, 1 - q]])
    return SchemeSpec(
        source=[0.5, 0.5], test_channel=test, parents=((),),
        x_map=np.array([[0, 0], [1, 1]]),
        channels=[np.array([[1 - p, p], [p, 1 - p]])],
        shat_maps=[np.array([[0, 0], [1, 1]])],
        distortion=[np.array([[0.0, 1.0], [1.0, 0.0]])],
        decodable=((0,),))


# ---- configuration files --------------------------------------------------------


def _field(cfg, key, where):
    if key not in cfg:
        raise ConfigError(f"{where}: missing field '{key}'")
    return cfg[key]


def scheme_from_dict(cfg, where="scheme"):
    """Build a :class:`SchemeSpec` from a parsed JSON object; layer numbers are 1-based."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be an object")
    try:
        parents = [[int(a) - 1 for a in s] for s in _field(cfg, "parents", where)]
        decodable = [[int(a) - 1 for a in s] for s in _field(cfg, "decodable", where)]
        return SchemeSpec(
            source=_field(cfg, "source", where),
            test_channel=np.array(_field(cfg, "test_channel", where), dtype=float),
            parents=parents,
            x_map=np.array(_field(cfg, "x_map", where), dtype=int),
            channels=[np.array(w, dtype=float) for w in _field(cfg, "channels", where)],
            shat_maps=[np.array(m, dtype=int) for m in _field(cfg, "shat_maps", where)],
            distortion=[np.array(d, dtype=float) for d in _field(cfg, "distortion", where)],
            decodable=decodable)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(text, source="config"):
    """Parse JSON text, reporting syntax errors with line and column."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{source}: top level must be an object")
    return cfg

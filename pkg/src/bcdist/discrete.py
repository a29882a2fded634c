"""Brute-force inner bound for sending a discrete source over a degraded broadcast channel.

A candidate scheme is a Markov chain S -> V_K -> V_{K-1} -> ... -> V_1 of
auxiliary descriptions, a symbol map x(v_K, s) for the channel input and
reconstruction maps s_hat_k(v_k, y_k). It is achievable when, for every k,

    I(S; V_k) <= sum_{j <= k} I(Y_j; V_j | V_{j-1}),   V_0 constant.

Receivers are ordered weakest first, so Y_k is a degraded copy of Y_{k+1}.
Only the per-receiver marginals p(y_k | x) enter these quantities, so an
instance stores one transition matrix per receiver.
"""
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import ConfigError, DimensionError, DomainError, UnsupportedError
from .region import pareto_reduce

NORM_TOL = 1e-12
DEGRADED_TOL = 1e-9
STRICT_MARGIN = 1e-9
ZERO_INFO = 1e-12
MAX_ALPHABET = 4
MAX_SUPERSYMBOL = 16
MAX_ENUMERATED_MAPS = 4096
REFINE_SEEDS = 8
SPARSE_CONCENTRATION = 0.1
REFINE_STEP = 0.05
REFINE_ROUNDS = 5


def _pmf(mass, name="pmf"):
    p = np.asarray(mass, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"{name} must be a nonempty vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
        raise DomainError(f"{name} must be nonnegative and sum to 1")
    return p


def _cond(rows, name="conditional pmf"):
    m = np.asarray(rows, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"{name} must be a nonempty matrix")
    if np.any(m < 0) or np.any(np.abs(m.sum(axis=1) - 1.0) > NORM_TOL):
        raise DomainError(f"every row of {name} must be a pmf")
    return m


def _plogp_ratio(joint, denom):
    """Sum of joint * log2(joint / denom) with 0 log 0 = 0."""
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / denom[mask])))


def mutual_info(joint):
    """I(A;B) in bits for a joint pmf given as a matrix p[a, b].

    >>> mutual_info([[0.5, 0.0], [0.0, 0.5]])
    1.0
    """
    p = np.asarray(joint, dtype=float)
    if p.ndim != 2:
        raise DimensionError("joint must be a matrix")
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
        raise DomainError("joint must be nonnegative and sum to 1")
    pa = p.sum(axis=1, keepdims=True)
    pb = p.sum(axis=0, keepdims=True)
    return max(_plogp_ratio(p, pa * pb), 0.0)


def cond_mutual_info(joint):
    """I(A;B|C) for a joint pmf given as a 3-d array p[c, a, b]."""
    p = np.asarray(joint, dtype=float)
    if p.ndim != 3:
        raise DimensionError("joint must be a 3-d array indexed [c, a, b]")
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
        raise DomainError("joint must be nonnegative and sum to 1")
    pc = p.sum(axis=(1, 2), keepdims=True)
    pac = p.sum(axis=2, keepdims=True)
    pbc = p.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = pac * pbc / pc
    return max(_plogp_ratio(p, denom), 0.0)


def degrading_map(strong, weak):
    """Stochastic matrix M with strong @ M = weak, or None when none exists.

    Solved as a linear feasibility problem over row-stochastic matrices.
    """
    strong = np.asarray(strong, dtype=float)
    weak = np.asarray(weak, dtype=float)
    nx, ns = strong.shape
    nw = weak.shape[1]
    n_var = ns * nw
    # strong @ M = weak, one equation per (x, y_weak)
    a_eq = [np.kron(strong[x], np.eye(nw)[y]) for x in range(nx) for y in range(nw)]
    b_eq = [weak[x, y] for x in range(nx) for y in range(nw)]
    # rows of M sum to one
    for r in range(ns):
        row = np.zeros(n_var)
        row[r * nw:(r + 1) * nw] = 1.0
        a_eq.append(row)
        b_eq.append(1.0)
    res = linprog(np.zeros(n_var), A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=[(0, None)] * n_var, method="highs")
    if res.status != 0:
        return None
    m = res.x.reshape(ns, nw)
    if np.max(np.abs(strong @ m - weak)) > DEGRADED_TOL:
        return None
    return m


@dataclass
class DbcInstance:
    """Source pmf, per-receiver channels p(y_k|x) and distortion tables d_k(s, s_hat).

    With ``b = 2`` each channel is replaced by its two-use product so that one
    source symbol is sent over a pair of channel uses.
    """

    source: np.ndarray
    channels: list
    distortion: list
    b: int = 1
    v_sizes: tuple = None

    def __post_init__(self):
        self.source = _pmf(self.source, "source")
        self.channels = [_cond(w, f"channels[{k}]") for k, w in enumerate(self.channels)]
        self.distortion = [np.asarray(d, dtype=float) for d in self.distortion]
        K = len(self.channels)
        if K == 0:
            raise DimensionError("at least one receiver is needed")
        if len(self.distortion) != K:
            raise DimensionError("one distortion table per receiver is needed")
        nx = self.channels[0].shape[0]
        ns = len(self.source)
        for k, (w, d) in enumerate(zip(self.channels, self.distortion)):
            if w.shape[0] != nx:
                raise DimensionError(f"channels[{k}] has {w.shape[0]} input rows, expected {nx}")
            if d.ndim != 2 or d.shape[0] != ns:
                raise DimensionError(f"distortion[{k}] must have {ns} rows")
            if np.any(d < 0):
                raise DomainError(f"distortion[{k}] must be nonnegative")
            if max(w.shape[1], d.shape[1]) > MAX_ALPHABET:
                raise UnsupportedError(f"receiver {k + 1} alphabets exceed {MAX_ALPHABET}")
        if max(ns, nx) > MAX_ALPHABET:
            raise UnsupportedError(f"source and input alphabets are capped at {MAX_ALPHABET}")
        for k in range(K - 1):
            if degrading_map(self.channels[k + 1], self.channels[k]) is None:
                raise DomainError(f"receiver {k + 1} is not a degraded version of receiver {k + 2}")
        if self.b not in (1, 2):
            raise UnsupportedError(f"bandwidth factor must be 1 or 2, got {self.b}")
        if self.v_sizes is None:
            self.v_sizes = (MAX_ALPHABET,) * K
        self.v_sizes = tuple(int(v) for v in self.v_sizes)
        if len(self.v_sizes) != K or min(self.v_sizes) < 1 or max(self.v_sizes) > MAX_ALPHABET:
            raise DimensionError(f"v_sizes needs {K} entries in [1, {MAX_ALPHABET}]")
        if self.b == 2:
            big = max(max(w.shape) for w in self.channels) ** 2
            if big > MAX_SUPERSYMBOL:
                raise UnsupportedError(f"supersymbol alphabets would exceed {MAX_SUPERSYMBOL}")

    @property
    def K(self):
        return len(self.channels)

    def effective_channels(self):
        """Channels per source symbol: the matrices themselves, or their Kronecker squares for b=2."""
        if self.b == 1:
            return list(self.channels)
        return [np.kron(w, w) for w in self.channels]


def binary_instance(p, b=1, v_sizes=None):
    """Uniform binary source, Hamming distortion and BSC(p_k) receivers."""
    bsc = [np.array([[1 - q, q], [q, 1 - q]]) for q in p]
    ham = np.array([[0.0, 1.0], [1.0, 0.0]])
    return DbcInstance(np.array([0.5, 0.5]), bsc, [ham] * len(p), b=b, v_sizes=v_sizes)


@dataclass
class DbcCandidate:
    """Auxiliary chain [p(v_K|s), p(v_{K-1}|v_K), ..., p(v_1|v_2)] with its symbol maps.

    ``x_map[v_K, s]`` is the channel input and ``shat_maps[k][v, y]`` the
    estimate of receiver k+1. ``shat_maps=None`` asks :func:`eval_candidate`
    for Bayes-optimal estimators.
    """

    chain: list
    x_map: np.ndarray
    shat_maps: list = None

    def __post_init__(self):
        self.chain = [_cond(m, f"chain[{i}]") for i, m in enumerate(self.chain)]
        self.x_map = np.asarray(self.x_map, dtype=int)
        if self.shat_maps is not None:
            self.shat_maps = [np.asarray(m, dtype=int) for m in self.shat_maps]


@dataclass
class Evaluation:
    feasible: bool
    D: np.ndarray
    info_source: np.ndarray = None
    info_channel: np.ndarray = None
    shat_maps: list = field(default_factory=list)


def _check_candidate(c, inst, chans):
    K = inst.K
    ns = len(inst.source)
    if len(c.chain) != K:
        raise DimensionError(f"chain needs {K} conditional pmfs, got {len(c.chain)}")
    if c.chain[0].shape[0] != ns:
        raise DimensionError("first chain matrix must have one row per source symbol")
    for i in range(1, K):
        if c.chain[i].shape[0] != c.chain[i - 1].shape[1]:
            raise DimensionError(f"chain[{i}] rows do not match chain[{i - 1}] columns")
    if c.x_map.shape != (c.chain[0].shape[1], ns):
        raise DimensionError("x_map must be indexed [v_K, s]")
    nx = chans[0].shape[0]
    if np.any(c.x_map < 0) or np.any(c.x_map >= nx):
        raise DimensionError("x_map values must be channel input symbols")
    if c.shat_maps is not None:
        if len(c.shat_maps) != K:
            raise DimensionError("one reconstruction map per receiver is needed")
        for k in range(K):
            nv = c.chain[K - 1 - k].shape[1]
            if c.shat_maps[k].shape != (nv, chans[k].shape[1]):
                raise DimensionError(f"shat_maps[{k}] must be indexed [v_{k + 1}, y_{k + 1}]")
            if np.any(c.shat_maps[k] < 0) or np.any(c.shat_maps[k] >= inst.distortion[k].shape[1]):
                raise DimensionError(f"shat_maps[{k}] values must be reconstruction symbols")


def _evaluate(chain, x_map, shat_maps, inst, chans):
    K = inst.K
    # axes of ``full``: s, v_K, v_{K-1}, ..., v_1
    full = inst.source[:, None] * chain[0]
    for m in chain[1:]:
        full = full[..., None] * m
    info_s = np.zeros(K)
    info_c = np.zeros(K)
    D = np.zeros(K)
    maps = []
    for k in range(1, K + 1):
        ax = 1 + K - k
        w = chans[k - 1]
        trans = w[x_map.T]  # (s, v_K, y)
        trans = trans.reshape(trans.shape[:2] + (1,) * (K - 1) + trans.shape[2:])
        joint = full[..., None] * trans
        drop = tuple(a for a in range(1, K + 1) if a != ax)
        svy = joint.sum(axis=drop)  # (s, v_k, y)
        info_s[k - 1] = mutual_info(svy.sum(axis=2))
        if k == 1:
            info_c[0] = mutual_info(svy.sum(axis=0))
        else:
            prev = ax + 1
            drop = tuple(a for a in range(0, K + 1) if a not in (ax, prev))
            pvy = joint.sum(axis=drop)  # (v_k, v_{k-1}, y) since ax < prev
            info_c[k - 1] = cond_mutual_info(np.transpose(pvy, (1, 0, 2)))
        d = inst.distortion[k - 1]
        cost = np.einsum("svy,st->vyt", svy, d)
        if shat_maps is None:
            m = np.argmin(cost, axis=2)
        else:
            m = shat_maps[k - 1]
        maps.append(m)
        D[k - 1] = float(np.take_along_axis(cost, m[..., None], axis=2).sum())
    rhs = np.cumsum(info_c)
    ok = (info_s <= ZERO_INFO) | (rhs - info_s > STRICT_MARGIN)
    return Evaluation(bool(np.all(ok)), D, info_s, rhs, maps)


def eval_candidate(c, inst):
    """Feasibility and distortion vector of a candidate scheme.

    ``feasible`` requires every constraint to hold with slack above 1e-9,
    except that I(S;V_k) = 0 is always admissible. ``D`` is reported either
    way. The returned object also carries I(S;V_k), the cumulative channel
    informations and the reconstruction maps that were used.
    """
    chans = inst.effective_channels()
    _check_candidate(c, inst, chans)
    return _evaluate(c.chain, c.x_map, c.shat_maps, inst, chans)


def constant_candidate(inst):
    """All auxiliaries constant and a constant channel input: the zero-rate scheme."""
    chain = _constant_chain(inst)
    return DbcCandidate(chain, np.zeros((inst.v_sizes[-1], len(inst.source)), dtype=int))


def _constant_chain(inst):
    sizes = [len(inst.source)] + list(inst.v_sizes[::-1])
    chain = []
    for a, c in zip(sizes[:-1], sizes[1:]):
        m = np.zeros((a, c))
        m[:, 0] = 1.0
        chain.append(m)
    return chain


def _x_map_from_index(index, shape, nx):
    digits = np.zeros(int(np.prod(shape)), dtype=int)
    for i in range(len(digits)):
        index, digits[i] = divmod(index, nx)
    return digits.reshape(shape)


def _sample(i, inst, seed, n_maps, shape, nx):
    if i == 0:
        return _constant_chain(inst), np.zeros(shape, dtype=int)
    rng = np.random.default_rng([seed, i])
    sizes = [len(inst.source)] + list(inst.v_sizes[::-1])
    # odd candidates use a sparse Dirichlet so that near-deterministic chains are visited
    conc = 1.0 if i % 2 == 0 else SPARSE_CONCENTRATION
    chain = [rng.dirichlet(np.full(c, conc), size=a) for a, c in zip(sizes[:-1], sizes[1:])]
    if n_maps is not None:
        x_map = _x_map_from_index(i % n_maps, shape, nx)
    else:
        x_map = rng.integers(0, nx, size=shape)
    return chain, x_map


def _moves(chain, step):
    """Every single transfer of ``step`` mass between two entries of one chain row."""
    for mi, m in enumerate(chain):
        for r in range(m.shape[0]):
            for a in range(m.shape[1]):
                for c in range(m.shape[1]):
                    if a != c and m[r, a] > 0:
                        yield mi, r, a, c


def _dominates(a, b):
    return bool(np.all(a <= b) and np.any(a < b))


def _refine(chain, x_map, ev, inst, chans):
    """Coordinatewise local search on the chain rows; keeps Pareto-improving feasible moves."""
    chain = [m.copy() for m in chain]
    step = REFINE_STEP
    for _ in range(REFINE_ROUNDS):
        improved = False
        for mi, r, a, c in list(_moves(chain, step)):
            m = chain[mi]
            delta = min(step, m[r, a])
            if delta <= 0:
                continue
            trial = [x.copy() for x in chain]
            trial[mi][r, a] -= delta
            trial[mi][r, c] += delta
            # keep rows exactly normalized after repeated updates
            trial[mi][r] = np.maximum(trial[mi][r], 0.0)
            trial[mi][r] /= trial[mi][r].sum()
            tev = _evaluate(trial, x_map, None, inst, chans)
            if tev.feasible and _dominates(tev.D, ev.D):
                chain, ev = trial, tev
                improved = True
        if not improved:
            step /= 2.0
    return chain, ev


def search_region(inst, budget, seed=0, refine=True):
    """Pareto frontier of feasible distortion vectors found by randomized search.

    Candidate i draws its chain rows from a flat Dirichlet with the
    generator ``default_rng([seed, i])``, so results do not depend on the
    order in which candidates are evaluated. Candidate 0 is the zero-rate
    scheme. When the input maps are few enough they are enumerated
    cyclically (candidate i uses map i mod count), otherwise they are drawn
    at random. Reconstructions are Bayes-optimal. The best feasible
    candidates then go through a few rounds of local refinement.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    chans = inst.effective_channels()
    nx = chans[0].shape[0]
    shape = (inst.v_sizes[-1], len(inst.source))
    n_maps = nx ** int(np.prod(shape))
    n_maps = n_maps if n_maps <= MAX_ENUMERATED_MAPS else None
    found = []
    for i in range(budget):
        chain, x_map = _sample(i, inst, seed, n_maps, shape, nx)
        ev = _evaluate(chain, x_map, None, inst, chans)
        if ev.feasible:
            found.append((i, chain, x_map, ev))
    points = [f[3].D for f in found]
    if refine and found:
        for i, chain, x_map, ev in _refine_seeds(found):
            _, rev = _refine(chain, x_map, ev, inst, chans)
            points.append(rev.D)
    return pareto_reduce(np.array(points), label="discrete inner",
                         meta={"budget": budget, "seed": seed, "feasible": len(found),
                               "v_sizes": list(inst.v_sizes), "b": inst.b})


def _refine_seeds(found):
    """Candidates on the sampled frontier, topped up with the lowest total distortion ones."""
    D = np.array([f[3].D for f in found])
    keys = [tuple(d) + (f[0],) for d, f in zip(D, found)]
    order = sorted(range(len(found)), key=lambda j: (float(D[j].sum()), keys[j]))
    chosen = []
    for j in order:
        if not any(_dominates(D[o], D[j]) for o in range(len(found))):
            chosen.append(j)
    for j in order:
        if len(chosen) >= REFINE_SEEDS:
            break
        if j not in chosen:
            chosen.append(j)
    chosen = sorted(chosen, key=lambda j: found[j][0])
    return [found[j] for j in chosen]


def load_instance(text):
    """Build a :class:`DbcInstance` from JSON text.

    Fields: ``source`` (vector), ``channels`` (list of matrices p(y_k|x)),
    ``distortion`` (list of matrices d_k(s, s_hat)) and optional ``sizes``
    (object with ``V``: auxiliary alphabet sizes) and ``b``.
    """
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"instance JSON line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("instance JSON must be an object")
    for key in ("source", "channels", "distortion"):
        if key not in cfg:
            raise ConfigError(f"instance field '{key}' is missing")
    sizes = cfg.get("sizes", {}) or {}
    if not isinstance(sizes, dict):
        raise ConfigError("instance field 'sizes' must be an object")
    try:
        return DbcInstance(cfg["source"], cfg["channels"], cfg["distortion"],
                           b=cfg.get("b", 1), v_sizes=sizes.get("V"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"instance field error: {exc}") from exc

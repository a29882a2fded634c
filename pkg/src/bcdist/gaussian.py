"""Distortion bounds for a Gaussian source (quadratic distortion) over a Gaussian broadcast channel.

Outer bounds quantify over chains +inf = tau_0 >= tau_1 >= ... >= tau_K = 0.
Chains are searched on a finite log-spaced grid. A finite grid can miss a
violating chain but never invents one, so the computed outer region is an
upper estimate of the true one.
"""
from itertools import combinations_with_replacement

import numpy as np

from .capacity import GaussianBcSpec, Membership, SideInfoSpec, gbc_slack
from .errors import DimensionError, UnsupportedError
from .region import pareto_reduce, trace_frontier

DEFAULT_TAU_GRID = 4096
MAX_OUTER_K = 4
TAU_MIN_REL = 1e-9
TAU_MAX_REL = 1e6


def trivial_point(spec):
    """Per-receiver Shannon limits D*_k = N_S / (1 + P/N_k)^b."""
    return spec.Ns / (1.0 + spec.P / np.array(spec.N)) ** spec.b


def wz_trivial_point(spec, si):
    """Per-receiver limits with side information: beta_k / (1 + P/N_k)^b."""
    _check_si(spec, si)
    return np.array(si.beta) / (1.0 + spec.P / np.array(spec.N)) ** spec.b


def uncoded_point(spec):
    """Uncoded transmission at matched bandwidth: D_k = N_S N_k / (P + N_k)."""
    n = np.array(spec.N)
    return spec.Ns * n / (spec.P + n)


def _check_si(spec, si):
    if si.K != spec.K:
        raise DimensionError(f"side information has {si.K} entries, channel has {spec.K} receivers")


def inner_point(lam, gamma, spec):
    """Hybrid-coding distortion pair for two receivers at parameters (lambda, gamma).

    Accepts scalars or broadcastable arrays. Defined for b < 1 and b > 1.

    >>> spec = GaussianBcSpec(P=50, N=(10, 1), Ns=1, b=2)
    >>> d1, d2 = inner_point(1.0, 0.5, spec)
    >>> round(1 / d1, 9), round(1 / d2, 9)
    (6.0, 2601.0)
    """
    if spec.K != 2:
        raise UnsupportedError(f"inner bound needs K=2, got K={spec.K}")
    b, P, Ns = spec.b, spec.P, spec.Ns
    n1, n2 = spec.N
    lam = np.asarray(lam, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if np.any((lam < 0) | (lam > 1) | (gamma < 0) | (gamma > 1)):
        raise ValueError("lambda and gamma must lie in [0, 1]")
    if b == 1:
        raise UnsupportedError("inner bound formulas exclude b = 1; use uncoded_point")
    if b > 1:
        pp = b * (1.0 - gamma) * P / (b - 1.0)
        a = ((pp + n1) / (lam * pp + n1)) ** (b - 1.0)
        d1 = Ns / (a * (b * gamma * P + n1) / n1)
        d2 = Ns / (a * (b * gamma * P + n2) / n2 * ((lam * pp + n2) / n2) ** (b - 1.0))
    else:
        e = b / (1.0 - b)
        first = b * Ns / ((lam * P + n1) / (lam * gamma * P + n1))
        ratio = (P + n1) / (lam * P + n1)
        d1 = first + (1.0 - b) * Ns / ratio ** e
        d2 = first + (1.0 - b) * Ns / (ratio * (lam * gamma * P + n2) / n2) ** e
    if d1.ndim == 0:
        return np.array([float(d1), float(d2)])
    return d1, d2


def inner_frontier(spec, grid_density=201):
    """Pareto frontier of inner_point over a uniform (lambda, gamma) grid on [0, 1]^2."""
    g = np.linspace(0.0, 1.0, grid_density) if grid_density > 1 else np.array([0.0])
    lam, gam = np.meshgrid(g, g, indexing="ij")
    d1, d2 = inner_point(lam.ravel(), gam.ravel(), spec)
    cloud = np.column_stack([d1, d2])
    return pareto_reduce(cloud, label="gaussian inner",
                         meta={"P": spec.P, "N": list(spec.N), "Ns": spec.Ns, "b": spec.b,
                               "density": grid_density})


def tau_axis(n_points, scale):
    """Search values for one tau coordinate: 0, a log sweep, and +inf."""
    n_log = max(n_points - 2, 1)
    sweep = np.geomspace(TAU_MIN_REL * scale, TAU_MAX_REL * scale, n_log)
    return np.concatenate([[0.0], sweep, [np.inf]])


def tau_chains(K, tau_grid, scale):
    """All grid chains as rows (tau_0=inf, tau_1, ..., tau_{K-1}, tau_K=0)."""
    if K == 1:
        return np.array([[np.inf, 0.0]])
    if K > MAX_OUTER_K:
        raise UnsupportedError(f"outer bound search supports K <= {MAX_OUTER_K}, got {K}")
    if K == 2:
        axis = tau_axis(tau_grid, scale)
        inner = axis[:, None]
    else:
        per_axis = max(3, int(round(tau_grid ** (1.0 / (K - 1)))))
        axis = tau_axis(per_axis, scale)[::-1]
        inner = np.array(list(combinations_with_replacement(axis, K - 1)))
    n = len(inner)
    return np.column_stack([np.full(n, np.inf), inner, np.zeros(n)])


def _log_ratio(top, d, tau):
    """log2((top + tau)/(d + tau)), equal to 0 at tau = inf."""
    with np.errstate(invalid="ignore"):
        val = np.log2((top + tau) / (d + tau))
    return np.where(np.isinf(tau), 0.0, val)


def outer_rates(point, top, tau, b):
    """Rate vectors required by a distortion point for each tau chain.

    ``top`` is N_S (no side information) or beta_k per receiver. Distortions
    above ``top`` are clamped to it and negative rates to 0.
    """
    top = np.asarray(top, dtype=float)
    d = np.minimum(np.asarray(point, dtype=float), top)
    f_hi = _log_ratio(top, d, tau[..., 1:])
    f_lo = _log_ratio(top, d, tau[..., :-1])
    return np.maximum((f_hi - f_lo) / (2.0 * b), 0.0)


def _outer_test(point, spec, top, tau_grid):
    point = np.asarray(point, dtype=float)
    if point.shape != (spec.K,):
        raise DimensionError(f"point must have {spec.K} coordinates")
    if np.any(point <= 0):
        return Membership(False, -np.inf, None, {"reason": "nonpositive distortion"})
    tau = tau_chains(spec.K, tau_grid, float(np.max(top)))
    slack = gbc_slack(outer_rates(point, top, tau, spec.b), spec)
    i = int(np.argmin(slack))
    scale = spec.P + spec.N[0]
    member = bool(slack[i] >= -1e-12 * scale)
    return Membership(member, float(slack[i]), tau[i, 1:-1].copy(),
                      {"chains": len(tau)})


def outer_member(point, spec, tau_grid=DEFAULT_TAU_GRID):
    """Outer-bound membership; the witness is the most violating (tau_1..tau_{K-1})."""
    return _outer_test(point, spec, np.full(spec.K, spec.Ns), tau_grid)


def wz_outer_member(point, spec, si, tau_grid=DEFAULT_TAU_GRID):
    """Outer-bound membership when receiver k also observes side information of quality beta_k."""
    _check_si(spec, si)
    return _outer_test(point, spec, np.array(si.beta), tau_grid)


def _outer_member_many(points, spec, top, tau_grid):
    """Membership verdicts for many points at once."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tau = tau_chains(spec.K, tau_grid, float(np.max(top)))
    scale = spec.P + spec.N[0]
    out = np.zeros(len(points), dtype=bool)
    for s in range(0, len(points), 64):
        chunk = points[s:s + 64]
        rates = outer_rates(chunk[:, None, :], top, tau[None, :, :], spec.b)
        slack = gbc_slack(rates, spec)
        out[s:s + 64] = np.all(slack >= -1e-12 * scale, axis=1) & np.all(chunk > 0, axis=1)
    return out


def outer_member_many(points, spec, tau_grid=DEFAULT_TAU_GRID):
    """Vectorized :func:`outer_member` verdicts (no witnesses)."""
    return _outer_member_many(points, spec, np.full(spec.K, spec.Ns), tau_grid)


def wz_outer_member_many(points, spec, si, tau_grid=DEFAULT_TAU_GRID):
    """Vectorized :func:`wz_outer_member` verdicts (no witnesses)."""
    _check_si(spec, si)
    return _outer_member_many(points, spec, np.array(si.beta), tau_grid)


def outer_frontier(spec, n_points=101, tau_grid=DEFAULT_TAU_GRID):
    """Boundary of the outer region (K=2), traced by bisection along both axes.

    Each vertex sits on the outside edge of the boundary, so the frontier
    bounds the region from below.
    """
    if spec.K != 2:
        raise UnsupportedError("frontier tracing needs K=2")
    dstar = trivial_point(spec)
    return trace_frontier(
        lambda a, c: outer_member_many(np.column_stack([a, c]), spec, tau_grid),
        (dstar[0], spec.Ns), (dstar[1], spec.Ns), n_points,
        label="gaussian outer", meta={"tau_grid": tau_grid, "b": spec.b})


def wz_outer_frontier(spec, si, n_points=101, tau_grid=DEFAULT_TAU_GRID):
    """Boundary of the side-information outer region (K=2), traced like :func:`outer_frontier`."""
    if spec.K != 2:
        raise UnsupportedError("frontier tracing needs K=2")
    dstar = wz_trivial_point(spec, si)
    return trace_frontier(
        lambda a, c: wz_outer_member_many(np.column_stack([a, c]), spec, si, tau_grid),
        (dstar[0], si.beta[0]), (dstar[1], si.beta[1]), n_points,
        label="gaussian wz outer",
        meta={"tau_grid": tau_grid, "b": spec.b, "beta": list(si.beta)})

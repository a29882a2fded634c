"""Problem instances and capacity-region membership for degraded broadcast channels.

Receivers are indexed 1..K from weakest to strongest, so Gaussian noise
variances and binary crossover probabilities are nonincreasing in k.
Rates are in bits per channel use.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .infomath import bconv, h2, h2_inv

_FEAS_TOL = 1e-12


def _vector(values, name):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty vector")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class GaussianBcSpec:
    """Gaussian broadcast channel Y_k = X + Z_k with E[X^2] <= P and Var Z_k = N_k."""

    P: float
    N: tuple
    Ns: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "N", _vector(self.N, "N"))
        if not self.P > 0:
            raise DomainError(f"P must be positive, got {self.P}")
        if not self.Ns > 0:
            raise DomainError(f"Ns must be positive, got {self.Ns}")
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")
        n = np.array(self.N)
        if np.any(n <= 0):
            raise DomainError("noise variances must be positive")
        if np.any(np.diff(n) > 0):
            raise DomainError("noise variances must be nonincreasing (receiver K strongest)")

    @property
    def K(self):
        return len(self.N)

    def capacities(self):
        """Single-user capacities 0.5*log2(1 + P/N_k)."""
        return 0.5 * np.log2(1.0 + self.P / np.array(self.N))


@dataclass(frozen=True)
class BinaryBcSpec:
    """Binary broadcast channel Y_k = X xor W_k with W_k ~ Bern(p_k)."""

    p: tuple
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p", _vector(self.p, "p"))
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")
        p = np.array(self.p)
        if np.any(p < 0) or np.any(p > 0.5):
            raise DomainError("crossover probabilities must lie in [0, 1/2]")
        if np.any(np.diff(p) > 0):
            raise DomainError("crossover probabilities must be nonincreasing (receiver K strongest)")

    @property
    def K(self):
        return len(self.p)

    def capacities(self):
        """Single-user capacities 1 - h2(p_k)."""
        return 1.0 - h2(np.array(self.p))


@dataclass(frozen=True)
class SideInfoSpec:
    """Per-receiver side-information quality beta_k (nonincreasing in k).

    For a binary source beta_k is the crossover of Z_k = S xor Bern(beta_k);
    for a Gaussian source it is the MMSE of S given Z_k.
    """

    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", _vector(self.beta, "beta"))
        b = np.array(self.beta)
        if np.any(b < 0):
            raise DomainError("beta must be nonnegative")
        if np.any(np.diff(b) > 0):
            raise DomainError("beta must be nonincreasing (degraded side information)")

    @property
    def K(self):
        return len(self.beta)


@dataclass
class Membership:
    """Outcome of a membership test.

    ``slack`` is a signed margin (negative means outside) and ``witness``
    carries whatever certificate the test produced: a theta chain for the
    binary capacity region, the most violating tau chain for outer bounds,
    an auxiliary vector for the binary side-information bound.
    """

    member: bool
    slack: float
    witness: object = None
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.member)


def _rates(rates, K):
    r = np.asarray(rates, dtype=float)
    if r.shape[-1:] != (K,):
        raise DimensionError(f"expected {K} rates, got shape {r.shape}")
    if np.any(r < -_FEAS_TOL):
        raise DomainError("rates must be nonnegative")
    return np.maximum(r, 0.0)


def gbc_slack(rates, spec):
    """Vectorized (P + N_1) - sum_k (N_k - N_{k+1}) 2^(2 sum_{j<=k} R_j) over the last axis."""
    r = _rates(rates, spec.K)
    n = np.array(spec.N)
    dn = n - np.append(n[1:], 0.0)
    with np.errstate(over="ignore"):
        lhs = np.sum(dn * np.exp2(2.0 * np.cumsum(r, axis=-1)), axis=-1)
    return spec.P + n[0] - lhs


def gbc_member(rates, spec):
    """Membership in the Gaussian broadcast capacity region.

    >>> spec = GaussianBcSpec(P=50, N=(10, 1))
    >>> gbc_member((0.0, 0.0), spec).slack
    50.0
    """
    slack = float(gbc_slack(rates, spec))
    scale = spec.P + spec.N[0]
    return Membership(slack >= -_FEAS_TOL * scale, slack)


def bbc_chain(rates, spec):
    """Greedy minimal theta chain for the binary broadcast capacity region.

    Works on arrays of rate vectors (last axis K). Returns ``(feasible,
    theta, slack)`` where theta has K+1 entries per vector, theta[..., 0] is
    set to 1/2 and theta[..., K] = 0. Starting from theta_K = 0, each
    theta_{k-1} is the smallest value >= theta_k that leaves room for R_k;
    keeping every theta as small as possible only loosens the remaining
    constraints, so the greedy chain exists iff any chain does.
    ``slack`` is the smallest per-constraint margin of the witness when
    feasible and 1 - (required entropy) at the first failing stage otherwise.
    """
    r = _rates(rates, spec.K)
    K = spec.K
    batch = r.shape[:-1]
    theta = np.zeros(batch + (K + 1,))
    feasible = np.ones(batch, dtype=bool)
    fail_slack = np.full(batch, np.inf)
    cur = np.zeros(batch)
    for k in range(K, 0, -1):
        p = spec.p[k - 1]
        rk = r[..., k - 1]
        if p >= 0.5:
            ok = rk <= _FEAS_TOL
            nxt = cur
            short = -rk
        else:
            target = rk + h2(bconv(cur, p))
            ok = target <= 1.0 + _FEAS_TOL
            short = 1.0 - target
            if k > 1:
                star = h2_inv(np.minimum(target, 1.0))
                nxt = np.clip((np.asarray(star) - p) / (1.0 - 2.0 * p), 0.0, 0.5)
                nxt = np.maximum(nxt, cur)
            else:
                # theta_0 is pinned to 1/2 below, so its minimal value is not needed
                nxt = cur
        newly = feasible & ~ok
        fail_slack = np.where(newly, short, fail_slack)
        feasible &= ok
        cur = np.where(feasible, nxt, cur)
        theta[..., k - 1] = cur
    theta[..., 0] = 0.5
    # margins of the witness chain
    p = np.array(spec.p)
    caps = h2(bconv(theta[..., :-1], p)) - h2(bconv(theta[..., 1:], p))
    margin = np.min(np.asarray(caps) - r, axis=-1)
    slack = np.where(feasible, margin, fail_slack)
    return feasible, theta, slack


def bbc_member(rates, spec):
    """Membership in the binary broadcast capacity region with a theta-chain witness.

    The witness lists theta_0 = 1/2, theta_1, ..., theta_K = 0.
    """
    feasible, theta, slack = bbc_chain(rates, spec)
    feasible = bool(feasible)
    return Membership(feasible, float(slack), theta if feasible else None)

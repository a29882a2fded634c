"""Frontier geometry: Pareto reduction, lower convex hull, containment and comparison.

A frontier is the lower-left boundary of a distortion region, stored as
its vertices only. Containment queries interpolate linearly between
neighbouring vertices.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

DEDUP_TOL = 1e-12
CONTAIN_TOL = 1e-12


@dataclass
class Frontier:
    """Pareto-minimal vertex list, sorted by D1 ascending (so D2 descending for K=2)."""

    points: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(len(self.points), -1)

    def __len__(self):
        return len(self.points)

    @property
    def K(self):
        return self.points.shape[1]

    def to_csv(self):
        """CSV text with a ``D1,D2[,...]`` header and 17 significant digits."""
        header = ",".join(f"D{k + 1}" for k in range(self.K))
        rows = [",".join(f"{v:.17g}" for v in row) for row in self.points]
        return "\n".join([header] + rows) + "\n"

    def to_dict(self):
        return {
            "label": self.label,
            "meta": self.meta,
            "points": [[float(v) for v in row] for row in self.points],
        }


def frontier_from_csv(text, label=""):
    """Parse the output of :meth:`Frontier.to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("D1"):
        raise ValueError("missing D1,... header")
    pts = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return Frontier(np.array(pts).reshape(len(pts), len(lines[0].split(","))), label)


def _cloud(cloud):
    pts = np.asarray(cloud, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 0)
    if pts.ndim != 2:
        raise DimensionError("cloud must be a list of equal-length points")
    if len(pts) == 0:
        raise ValueError("cloud is empty")
    return pts


def _dedup_sorted(pts):
    keep = [0]
    for i in range(1, len(pts)):
        if np.any(np.abs(pts[i] - pts[keep[-1]]) > DEDUP_TOL):
            keep.append(i)
    return pts[keep]


def pareto_reduce(cloud, label="", meta=None):
    """Keep exactly the points not componentwise dominated by another point.

    >>> pareto_reduce([(1, 2), (2, 1), (2, 2)]).points.tolist()
    [[1.0, 2.0], [2.0, 1.0]]
    """
    pts = _cloud(cloud)
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    if len(pts) == 0:
        raise ValueError("cloud has no finite points")
    K = pts.shape[1]
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    if K == 2:
        # sorted by (D1, D2); a point survives iff its D2 beats every earlier one
        prev_min = np.minimum.accumulate(pts[:, 1])
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = pts[1:, 1] < prev_min[:-1]
        kept = pts[keep]
    else:
        # in lexicographic order a point can only be dominated by an earlier one
        kept = []
        for q in pts:
            if kept:
                arr = np.array(kept)
                if np.any(np.all(arr <= q, axis=1)):
                    continue
            kept.append(q)
        kept = np.array(kept)
    return Frontier(_dedup_sorted(kept), label, dict(meta or {}))


def lower_hull(cloud, label="", meta=None):
    """Lower-left convex hull vertices (K=2) by quickhull on the Pareto set.

    Collinear interior points are dropped, leaving segment endpoints only.
    """
    front = pareto_reduce(cloud)
    if front.K != 2:
        raise DimensionError("lower_hull supports K=2 only")
    pts = front.points
    if len(pts) <= 2:
        return Frontier(pts.copy(), label, dict(meta or {}))
    chosen = {0, len(pts) - 1}
    stack = [(0, len(pts) - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        a, c = pts[i], pts[j]
        mid = pts[i + 1:j]
        # positive cross product means strictly below the chord a -> c
        cross = (c[0] - a[0]) * (mid[:, 1] - a[1]) - (c[1] - a[1]) * (mid[:, 0] - a[0])
        depth = -cross
        m = int(np.argmax(depth))
        if depth[m] <= 0:
            continue
        idx = i + 1 + m
        chosen.add(idx)
        stack.append((i, idx))
        stack.append((idx, j))
    return Frontier(pts[sorted(chosen)], label, dict(meta or {}))


def _interp_d2(points, d1):
    """Frontier height at d1; inf left of the first vertex."""
    x, y = points[:, 0], points[:, 1]
    d1 = np.asarray(d1, dtype=float)
    out = np.interp(d1, x, y)
    out = np.where(d1 >= x[-1], y[-1], out)
    return np.where(d1 < x[0] - CONTAIN_TOL, np.inf, out)


def frontier_contains(f, p):
    """True iff p lies in the closed upper-right region bounded by frontier f."""
    p = np.asarray(p, dtype=float)
    if f.K != 2 or p.shape != (2,):
        raise DimensionError("frontier_contains needs K=2 frontier and point")
    return bool(p[1] >= _interp_d2(f.points, p[0]) - CONTAIN_TOL)


def _contains_many(points, q):
    return q[:, 1] >= _interp_d2(points, q[:, 0]) - CONTAIN_TOL


def diagonal_violation(f, q, iters=200):
    """Signed diagonal distance from points q to the region of frontier f.

    For each point returns the smallest t with q + (t, t) inside the region:
    t > 0 means q is outside by that much, t <= 0 means inside with margin -t.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    span = np.max(np.abs(f.points)) + np.max(np.abs(q)) + 1.0
    lo = np.full(len(q), -2.0 * span)
    hi = np.full(len(q), 2.0 * span)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = _contains_many(f.points, q + mid[:, None])
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
        if np.all(hi - lo <= 1e-15 * span):
            break
    return hi


@dataclass
class CompareReport:
    a_inside_b: bool
    max_violation: float
    at: tuple

    def to_dict(self):
        return {"a_inside_b": self.a_inside_b, "max_violation": self.max_violation,
                "at": [float(v) for v in self.at]}


def sample_frontier(f, samples=1):
    """Vertices of f plus ``samples`` evenly spaced interior points on each chord."""
    pts = f.points
    if len(pts) < 2 or samples <= 0:
        return pts.copy()
    w = np.arange(1, samples + 1) / (samples + 1)
    a, c = pts[:-1], pts[1:]
    inner = a[:, None, :] + w[None, :, None] * (c - a)[:, None, :]
    return np.vstack([pts, inner.reshape(-1, 2)])


def frontier_compare(a, b, samples=1):
    """Check region(a) inside region(b) at a's vertices and chord samples.

    ``max_violation`` is the largest signed diagonal distance (equal shift in
    both coordinates) needed to bring a sample of a into region(b), so a copy
    of b moved by (-d, -d) reports d.
    """
    if a.K != 2 or b.K != 2:
        raise DimensionError("frontier_compare supports K=2 only")
    q = sample_frontier(a, samples)
    t = diagonal_violation(b, q)
    i = int(np.argmax(t))
    inside = bool(np.all(_contains_many(b.points, q)))
    return CompareReport(inside, float(t[i]), tuple(q[i]))


def _bisect_many(member, fixed, lo, hi, rtol, max_iter):
    """Vectorized bisection of the free coordinate for every fixed value.

    ``member(fixed, free)`` takes two equal-length arrays and returns a
    boolean array. Returns (fixed, free) rows for the fixed values that have
    a member at ``hi``; free is the largest value found outside the region,
    or ``lo`` when ``lo`` is already inside.
    """
    fixed = np.asarray(fixed, dtype=float)
    top = member(fixed, np.full(len(fixed), hi))
    fixed = fixed[top]
    a = np.full(len(fixed), float(lo))
    c = np.full(len(fixed), float(hi))
    done = member(fixed, a)
    for _ in range(max_iter):
        active = ~done & (c - a > rtol * c)
        if not np.any(active):
            break
        m = np.where(a > 0, np.sqrt(np.maximum(a, 0) * c), 0.5 * (a + c))
        inside = np.zeros(len(fixed), dtype=bool)
        inside[active] = member(fixed[active], m[active])
        c = np.where(active & inside, m, c)
        a = np.where(active & ~inside, m, a)
    return np.column_stack([fixed, a])


def trace_boundary(member, d1_values, lo, hi, rtol=1e-7, max_iter=80):
    """Minimal D2 in a membership region for each D1, by bisection.

    ``member(d1, d2)`` is called with equal-length arrays and must return a
    boolean array, monotone in d2. Each returned D2 is the largest value
    found outside the region (the conservative lower side of the boundary),
    or ``lo`` when already inside at ``lo``. D1 values with no member up
    to ``hi`` are skipped. Bisection runs in log space once the lower end
    is positive.
    """
    return _bisect_many(member, d1_values, lo, hi, rtol, max_iter)


def trace_frontier(member, d1_range, d2_range, n_points, rtol=1e-7, max_iter=80,
                   label="", meta=None):
    """Frontier of a monotone region traced along both axes.

    D2 is bisected on a log-spaced D1 grid and D1 on a log-spaced D2 grid,
    so that steep and flat parts of the boundary are both sampled. The
    union is Pareto-reduced.
    """
    d1 = np.geomspace(d1_range[0], d1_range[1], n_points)
    d2 = np.geomspace(d2_range[0], d2_range[1], n_points)
    rows_a = _bisect_many(member, d1, d2_range[0], d2_range[1], rtol, max_iter)
    rows_b = _bisect_many(lambda y, x: member(x, y), d2, d1_range[0], d1_range[1],
                          rtol, max_iter)[:, ::-1]
    rows = np.vstack([rows_a, rows_b])
    return pareto_reduce(rows, label=label, meta=meta)

"""Minimal SVG line plots: linear x axis, log or linear y axis, one polyline per series."""
import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 480
MARGIN = dict(left=80, right=180, top=30, bottom=50)
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


def _fmt(v):
    return f"{v:.2f}"


def _ticks_linear(lo, hi, count=5):
    step = (hi - lo) / count
    return [lo + i * step for i in range(count + 1)]


def _ticks_log(lo, hi):
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(a, b + 1)]


def render(series, title="", xlabel="D1", ylabel="D2", log_y=True):
    """SVG text for ``series``: a list of (label, [(x, y), ...]) pairs.

    Points with nonpositive y are dropped on a log axis. Output is
    deterministic for identical input.
    """
    pts = [(x, y) for _, s in series for x, y in s if not log_y or y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if log_y:
        y_lo, y_hi = 10.0 ** math.floor(math.log10(min(ys))), 10.0 ** math.ceil(math.log10(max(ys)))
        if y_hi == y_lo:
            y_hi = y_lo * 10.0
        ty = lambda y: (math.log10(y) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
        yticks = _ticks_log(y_lo, y_hi)
    else:
        y_lo, y_hi = min(ys), max(ys)
        if y_hi == y_lo:
            y_hi = y_lo + 1.0
        ty = lambda y: (y - y_lo) / (y_hi - y_lo)
        yticks = _ticks_linear(y_lo, y_hi)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    px = lambda x: MARGIN["left"] + pw * (x - x_lo) / (x_hi - x_lo)
    py = lambda y: MARGIN["top"] + ph * (1.0 - ty(y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
           f'fill="none" stroke="black"/>']
    for t in _ticks_linear(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{MARGIN["top"] + ph}" x2="{_fmt(px(t))}" '
                   f'y2="{MARGIN["top"] + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{MARGIN["top"] + ph + 16}" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in yticks:
        out.append(f'<line x1="{MARGIN["left"] - 4}" y1="{_fmt(py(t))}" x2="{MARGIN["left"]}" '
                   f'y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{_fmt(py(t) + 4)}" '
                   f'text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    for i, (label, s) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        keep = [(x, y) for x, y in s if not log_y or y > 0]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in keep)
        if len(keep) == 1:
            x, y = keep[0]
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" fill="{color}"/>')
        elif keep:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN["top"] + 14 * (i + 1)
        lx = WIDTH - MARGIN["right"] + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 16}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 20}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def corner_rays(point, x_max, y_max):
    """Polyline for the boundary of the rectangle {D >= point}: up, corner, right."""
    x, y = float(point[0]), float(point[1])
    return [(x, y_max), (x, y), (x_max, y)]

"""Command-line entry point: figure reproductions, membership queries, frontiers and simulations.

Every command exits with status 0 only when its computations and asserted
containments succeed. Otherwise it prints a JSON object with ``"ok": false``
and exits with status 1.
"""
import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import binary, discrete, gaussian, hybrid
from .capacity import BinaryBcSpec, GaussianBcSpec, SideInfoSpec, bbc_member, gbc_member
from .errors import ConfigError
from .region import Frontier, frontier_compare
from .svg import corner_rays, render

BUNDLED = {
    "simulate": "simulate_p2p.json",
    "lemma": "lemma_covering.json",
    "instance": "dbc_binary_k2.json",
}


class CommandFailed(Exception):
    """Raised when a run completes but an asserted property does not hold."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


def _floats(text):
    try:
        vals = [_number(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    return tuple(vals)


def _number(token):
    token = token.strip()
    if "/" in token:
        num, den = token.split("/")
        return float(num) / float(den)
    return float(token)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--format", choices=["csv", "json"], default="csv", help="frontier file format")
    p.add_argument("--svg", action="store_true", help="also write an SVG overlay")
    p.add_argument("--seed", type=int, default=None, help="random seed (overrides config files)")
    p.add_argument("--density", type=int, default=None, help="inner-bound grid density per axis")
    p.add_argument("--tau-grid", type=int, default=None, help="tau search grid size for outer bounds")
    p.add_argument("--alpha-grid", type=int, default=None,
                   help="alpha grid size for the binary side-information outer bound")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="bcdist",
        description="Distortion regions for sending a source over a broadcast channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    f3 = sub.add_parser("figure3", parents=[common],
                        help="Gaussian source: inner bound, two outer bounds and the trivial bound")
    f3.add_argument("--P", type=float, default=50.0)
    f3.add_argument("--N", type=_floats, default=(10.0, 1.0))
    f3.add_argument("--Ns", type=float, default=1.0)
    f3.add_argument("--b", type=float, default=2.0)
    f3.add_argument("--beta", type=_floats, default=(1 / 6, 1 / 51),
                    help="side-information MMSE per receiver for outer bound 2 (b=1)")
    f3.add_argument("--points", type=int, default=101, help="bisection points per outer frontier axis")

    f4 = sub.add_parser("figure4", parents=[common],
                        help="binary source: coding schemes, two outer bounds and two trivial bounds")
    f4.add_argument("--p", type=_floats, default=(0.18, 0.12))
    f4.add_argument("--b", type=float, default=2.0)
    f4.add_argument("--points", type=int, default=41, help="bisection points per outer frontier axis")

    mem = sub.add_parser("member", parents=[common], help="membership query for one point")
    mem.add_argument("--bound", required=True,
                     choices=["gauss-outer", "gauss-wz-outer", "bin-outer", "bin-wz-outer",
                              "gbc", "bbc"],
                     help="region to test; gbc and bbc take a rate vector")
    mem.add_argument("--point", type=_floats, required=True)
    _channel_args(mem)

    fr = sub.add_parser("frontier", parents=[common], help="compute one frontier")
    fr.add_argument("--kind", required=True,
                    choices=["gauss-inner", "gauss-outer", "gauss-wz-outer", "csc", "separate", "ldc",
                             "bin-outer", "bin-wz-outer", "discrete"])
    fr.add_argument("--points", type=int, default=41)
    fr.add_argument("--instance", default=None, help="JSON instance for --kind discrete")
    fr.add_argument("--budget", type=int, default=2000)
    _channel_args(fr)

    sim = sub.add_parser(
        "simulate", parents=[common],
        help="Monte Carlo hybrid coding; codebooks are limited to "
             f"{hybrid.MAX_STORED_SEQUENCES} stored sequences")
    sim.add_argument("--config", default=None, help="JSON config (default: bundled example)")

    lem = sub.add_parser("lemma", parents=[common], help="covering or packing experiment over a rate ladder")
    lem.add_argument("--config", default=None, help="JSON config (default: bundled example)")
    return parser


def _channel_args(p):
    p.add_argument("--P", type=float, default=50.0)
    p.add_argument("--N", type=_floats, default=(10.0, 1.0))
    p.add_argument("--Ns", type=float, default=1.0)
    p.add_argument("--p", type=_floats, default=(0.18, 0.12))
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--beta", type=_floats, default=None)


# ---- output helpers ----------------------------------------------------------------


def _write(path, text):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return str(path)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _save_frontier(out, name, front, fmt):
    if fmt == "json":
        return _write(out / f"{name}.json", _json(front.to_dict()))
    return _write(out / f"{name}.csv", front.to_csv())


def _compare(name_a, a, name_b, b, asserted):
    rep = frontier_compare(a, b).to_dict()
    rep.update({"a": name_a, "b": name_b, "asserted": asserted})
    return rep


def _finish(out, report, files, svg_series, args, title):
    if args.svg:
        files.append(_write(out / "overlay.svg", render(svg_series, title=title)))
    report["files"] = files
    failed = [c for c in report["containments"] if c["asserted"] and not c["a_inside_b"]]
    report["ok"] = not failed
    files.append(_write(out / "report.json", _json(report)))
    print(_json(report), end="")
    if failed:
        raise CommandFailed("asserted containment failed",
                            {"failed": [f"{c['a']} in {c['b']}" for c in failed]})


# ---- commands -------------------------------------------------------------------------


def cmd_figure3(args):
    out = Path(args.out)
    spec = GaussianBcSpec(P=args.P, N=args.N, Ns=args.Ns, b=args.b)
    spec1 = GaussianBcSpec(P=args.P, N=args.N, Ns=args.Ns, b=1.0)
    si = SideInfoSpec(args.beta)
    density = args.density or 201
    points = min(args.points, density) if args.density else args.points
    tau = args.tau_grid or gaussian.DEFAULT_TAU_GRID
    if spec.b == 1:
        inner = Frontier(gaussian.uncoded_point(spec)[None, :], "inner bound 1", {"uncoded": True})
    else:
        inner = gaussian.inner_frontier(spec, density)
    outer1 = gaussian.outer_frontier(spec, points, tau)
    outer2 = gaussian.wz_outer_frontier(spec1, si, points, tau)
    triv = Frontier(gaussian.trivial_point(spec)[None, :], "trivial outer bound")
    fronts = {"inner_bound_1": inner, "outer_bound_1": outer1,
              "outer_bound_2": outer2, "trivial_outer_bound": triv}
    files = [_save_frontier(out, k, f, args.format) for k, f in fronts.items()]
    containments = [
        _compare("inner_bound_1", inner, "outer_bound_1", outer1, True),
        _compare("outer_bound_1", outer1, "trivial_outer_bound", triv, True),
        _compare("outer_bound_2", outer2, "trivial_outer_bound", triv, True),
        # outer bound 2 only covers schemes that send the source uncoded first,
        # so the hybrid inner bound may cross it; reported, not asserted
        _compare("inner_bound_1", inner, "outer_bound_2", outer2, False),
    ]
    report = {"command": "figure3", "params": {"P": spec.P, "N": list(spec.N), "Ns": spec.Ns,
                                                 "b": spec.b, "beta": list(si.beta),
                                                 "density": density, "points": points,
                                                 "tau_grid": tau},
              "containments": containments}
    x_max = spec.Ns
    series = [("Inner Bound 1", inner.points.tolist()), ("Outer Bound 1", outer1.points.tolist()),
              ("Outer Bound 2", outer2.points.tolist()),
              ("Trivial Outer Bound", corner_rays(triv.points[0], x_max, spec.Ns))]
    _finish(out, report, files, series, args, "Gaussian source")


def cmd_figure4(args):
    out = Path(args.out)
    spec = BinaryBcSpec(p=args.p, b=args.b)
    spec1 = BinaryBcSpec(p=args.p, b=1.0)
    si = SideInfoSpec(args.p)
    density = args.density or 101
    ldc_density = min(density, 41)
    points = min(args.points, density) if args.density else args.points
    tau = args.tau_grid or binary.DEFAULT_TAU_GRID
    alpha = args.alpha_grid or binary.DEFAULT_ALPHA_GRID
    sep = binary.separate_frontier(spec, density)
    ldc = binary.ldc_inner_frontier(spec1, si, ldc_density)
    csc = binary.csc_inner_frontier(spec, density)
    outer1 = binary.outer_frontier(spec, points, tau)
    outer2 = binary.wz_outer_frontier(spec1, si, points, alpha, tau)
    triv1 = Frontier(binary.trivial_point(spec)[None, :], "trivial outer bound 1")
    triv2 = Frontier(binary.wz_trivial_point(spec1, si)[None, :], "trivial outer bound 2")
    fronts = {"separate_coding": sep, "uncoded_systematic_coding": ldc,
              "coded_systematic_coding": csc, "outer_bound_1": outer1, "outer_bound_2": outer2,
              "trivial_outer_bound_1": triv1, "trivial_outer_bound_2": triv2}
    files = [_save_frontier(out, k, f, args.format) for k, f in fronts.items()]
    containments = [
        _compare("separate_coding", sep, "outer_bound_1", outer1, True),
        _compare("coded_systematic_coding", csc, "outer_bound_1", outer1, True),
        _compare("uncoded_systematic_coding", ldc, "outer_bound_2", outer2, True),
        _compare("outer_bound_1", outer1, "trivial_outer_bound_1", triv1, True),
        _compare("outer_bound_2", outer2, "trivial_outer_bound_2", triv2, True),
    ]
    report = {"command": "figure4", "params": {"p": list(spec.p), "b": spec.b,
                                                 "density": density, "ldc_density": ldc_density,
                                                 "points": points, "tau_grid": tau,
                                                 "alpha_grid": alpha},
              "containments": containments}
    series = [("Separate Coding", sep.points.tolist()),
              ("Uncoded Systematic", ldc.points.tolist()),
              ("Coded Systematic", csc.points.tolist()),
              ("Outer Bound 1", outer1.points.tolist()),
              ("Outer Bound 2", outer2.points.tolist()),
              ("Trivial Outer Bound 1", corner_rays(triv1.points[0], 0.5, 0.5)),
              ("Trivial Outer Bound 2", corner_rays(triv2.points[0], 0.5, 0.5))]
    _finish(out, report, files, series, args, "Binary source")


def _si(args, K):
    if args.beta is None:
        raise ConfigError("--beta is required for side-information bounds")
    si = SideInfoSpec(args.beta)
    if si.K != K:
        raise ConfigError(f"--beta needs {K} entries")
    return si


def cmd_member(args):
    point = np.array(args.point)
    sel = args.bound
    if sel.startswith("gauss") or sel == "gbc":
        spec = GaussianBcSpec(P=args.P, N=args.N, Ns=args.Ns, b=args.b)
    else:
        spec = BinaryBcSpec(p=args.p, b=args.b)
    tau = args.tau_grid
    if sel == "gauss-outer":
        res = gaussian.outer_member(point, spec, tau or gaussian.DEFAULT_TAU_GRID)
    elif sel == "gauss-wz-outer":
        res = gaussian.wz_outer_member(point, spec, _si(args, spec.K), tau or gaussian.DEFAULT_TAU_GRID)
    elif sel == "bin-outer":
        res = binary.outer_member(point, spec, tau or binary.DEFAULT_TAU_GRID)
    elif sel == "bin-wz-outer":
        res = binary.wz_outer_member(point, spec, _si(args, spec.K),
                                     args.alpha_grid or binary.DEFAULT_ALPHA_GRID,
                                     tau or binary.DEFAULT_TAU_GRID)
    elif sel == "gbc":
        res = gbc_member(point, spec)
    else:
        res = bbc_member(point, spec)
    witness = res.witness
    if isinstance(witness, np.ndarray):
        witness = witness.tolist()
    elif witness is not None and hasattr(witness, "alpha"):
        witness = {"alpha": np.asarray(witness.alpha).tolist(), "eta": np.asarray(witness.eta).tolist(),
                   "Dprime": np.asarray(witness.Dprime).tolist()}
    if args.format == "json":
        print(_json({"bound": sel, "point": point.tolist(), "member": bool(res.member),
                     "slack": float(res.slack), "witness": witness}), end="")
    else:
        kind = "witness" if res.member else "violating"
        print(f"{sel} point={','.join(f'{v:.17g}' for v in point)} "
              f"member={'true' if res.member else 'false'} slack={float(res.slack):.6g} "
              f"{kind}={json.dumps(witness)}")


def cmd_frontier(args):
    out = Path(args.out)
    kind = args.kind
    tau = args.tau_grid
    if kind.startswith("gauss"):
        spec = GaussianBcSpec(P=args.P, N=args.N, Ns=args.Ns, b=args.b)
        if kind == "gauss-inner":
            front = gaussian.inner_frontier(spec, args.density or 201)
        elif kind == "gauss-outer":
            front = gaussian.outer_frontier(spec, args.points, tau or gaussian.DEFAULT_TAU_GRID)
        else:
            front = gaussian.wz_outer_frontier(spec, _si(args, spec.K), args.points,
                                               tau or gaussian.DEFAULT_TAU_GRID)
    elif kind == "discrete":
        text = _read_config(args.instance, "instance")
        inst = discrete.load_instance(text)
        front = discrete.search_region(inst, args.budget, 0 if args.seed is None else args.seed)
    else:
        spec = BinaryBcSpec(p=args.p, b=args.b)
        if kind == "csc":
            front = binary.csc_inner_frontier(spec, args.density or 101)
        elif kind == "separate":
            front = binary.separate_frontier(spec, args.density or 101)
        elif kind == "ldc":
            front = binary.ldc_inner_frontier(spec, _si(args, spec.K), args.density or 41)
        elif kind == "bin-outer":
            front = binary.outer_frontier(spec, args.points, tau or binary.DEFAULT_TAU_GRID)
        else:
            front = binary.wz_outer_frontier(spec, _si(args, spec.K), args.points,
                                             args.alpha_grid or binary.DEFAULT_ALPHA_GRID,
                                             tau or binary.DEFAULT_TAU_GRID)
    files = [_save_frontier(out, kind.replace("-", "_"), front, args.format)]
    if args.svg and front.K == 2:
        files.append(_write(out / f"{kind.replace('-', '_')}.svg",
                            render([(kind, front.points.tolist())], title=kind)))
    print(_json({"command": "frontier", "kind": kind, "vertices": len(front), "files": files}), end="")


def _read_config(path, key):
    if path is None:
        return resources.files("bcdist").joinpath("configs", BUNDLED[key]).read_text(encoding="utf-8")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


def _get(cfg, key, kind, where, default=None):
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"{where}: missing field '{key}'")
    try:
        return kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: field '{key}' is invalid ({exc})") from exc


def _typ(cfg, where):
    eps = _get(cfg, "eps", float, where, 0.1)
    eps_prime = cfg.get("eps_prime")
    try:
        return hybrid.TypParams(eps, None if eps_prime is None else float(eps_prime))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def cmd_simulate(args):
    out = Path(args.out)
    where = args.config or "bundled simulate config"
    cfg = hybrid.parse_config(_read_config(args.config, "simulate"), where)
    spec = hybrid.scheme_from_dict(_get(cfg, "scheme", dict, where), f"{where}: scheme")
    rates = _get(cfg, "rates", list, where)
    ns = _get(cfg, "n", lambda v: [int(x) for x in v] if isinstance(v, list) else [int(v)], where)
    trials = _get(cfg, "trials", int, where)
    seed = args.seed if args.seed is not None else _get(cfg, "seed", int, where, 0)
    tp = _typ(cfg, where)
    runs = [hybrid.simulate(spec, rates, n, trials, seed, tp) for n in ns]
    result = {"command": "simulate", "runs": runs}
    path = _write(out / "simulate.json", _json(result))
    print(_json({"command": "simulate", "files": [path],
                 "avg_distortion": [r["avg_distortion"] for r in runs]}), end="")


def cmd_lemma(args):
    out = Path(args.out)
    where = args.config or "bundled lemma config"
    cfg = hybrid.parse_config(_read_config(args.config, "lemma"), where)
    lemma = _get(cfg, "lemma", str, where)
    if lemma not in ("covering", "packing"):
        raise ConfigError(f"{where}: field 'lemma' must be 'covering' or 'packing'")
    pmf = np.array(_get(cfg, "pmf", list, where), dtype=float)
    rates = [float(r) for r in _get(cfg, "rates", list, where)]
    n = _get(cfg, "n", int, where)
    trials = _get(cfg, "trials", int, where)
    seed = args.seed if args.seed is not None else _get(cfg, "seed", int, where, 0)
    eps = _get(cfg, "eps", float, where, 0.1)
    fn = hybrid.covering_experiment if lemma == "covering" else hybrid.packing_experiment
    freqs = [fn(r, n, trials, seed, pmf, eps) for r in rates]
    csv = "rate,frequency\n" + "".join(f"{r:.17g},{f:.17g}\n" for r, f in zip(rates, freqs))
    files = [_write(out / f"{lemma}.csv", csv)]
    result = {"command": "lemma", "lemma": lemma, "n": n, "trials": trials, "seed": seed,
              "eps": eps, "rates": rates, "frequency": freqs,
              "stderr": [float(np.sqrt(f * (1 - f) / trials)) for f in freqs]}
    files.append(_write(out / f"{lemma}.json", _json(result)))
    print(_json({"command": "lemma", "files": files, "frequency": freqs}), end="")


COMMANDS = {
    "figure3": cmd_figure3,
    "figure4": cmd_figure4,
    "member": cmd_member,
    "frontier": cmd_frontier,
    "simulate": cmd_simulate,
    "lemma": cmd_lemma,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except CommandFailed as exc:
        print(_json({"ok": False, "error": "CommandFailed", "message": str(exc), **exc.details}),
              end="")
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(_json({"ok": False, "error": type(exc).__name__, "message": str(exc)}), end="")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands write CSV/JSON into ``--out``; every file starts with (CSV) or
contains (JSON) the run manifest, so identical arguments give identical bytes.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import flow, stationary, twistmap
from .action import action_eval
from .configspace import Configuration, _extended
from .model import FAMILIES, load_model, preset

log = logging.getLogger("fkstates")


class UsageError(Exception):
    pass


def _floats(text, n=None, name="value"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {name} {text!r}")
    if n is not None and len(vals) != n:
        raise UsageError(f"{name} needs {n} comma-separated numbers, got {text!r}")
    return vals


def parse_eps_grid(text):
    """``start:stop:step`` -> ascending grid including ``stop``."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--eps expects start:stop:step, got {text!r}")
    if step <= 0 or stop < start:
        raise UsageError(f"bad --eps range {text!r}")
    n = int(np.floor((stop - start) / step + 1e-9))
    return np.round(start + step * np.arange(n + 1), 12)


def _model(args):
    if args.model:
        return load_model(args.model), f"file:{args.model}"
    if not args.preset:
        raise UsageError("one of --preset or --model is required")
    try:
        return preset(args.preset), f"preset:{args.preset}"
    except ValueError as exc:
        raise UsageError(str(exc))


def _threads():
    try:
        return max(1, int(os.environ.get("FK_THREADS", "1")))
    except ValueError:
        return 1


def _manifest(args, source, outputs, **extra):
    m = {"command": args.command, "model": source}
    for key in ("p", "q", "density", "tol"):
        if getattr(args, key, None) is not None:
            m[key] = getattr(args, key)
    m.update(extra)
    m["outputs"] = outputs
    return m


def _header(manifest):
    return [f"{k}={json.dumps(v, sort_keys=True)}" for k, v in manifest.items()]


def _write_json(path, doc):
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_stationary(args):
    m, source = _model(args)
    records, ctx, report = stationary.analyze(m, args.p, args.q, density=args.density,
                                              tol=args.tol, workers=_threads())
    paths = {"records": _out(args, "records.json"), "audit": _out(args, "audit.json")}
    man = _manifest(args, source, paths)
    with open(paths["records"], "w", newline="\n") as fh:
        stationary.records_to_json(records, fh, man)
    _write_json(paths["audit"], {"manifest": man, **report.to_dict()})
    for r in records:
        xs = ",".join(f"{v:.10f}" for v in r.config.coords)
        print(f"({xs})  index={r.index}  {r.label:<10}  {r.region.value:<17}  "
              f"ordered={int(r.cyclically_ordered)}  R={r.residue:+.6g}")
    for name, check in report.checks.items():
        print(f"{name}: {'PASS' if check.passed else 'FAIL'}"
              + ("" if check.passed else f" ({len(check.offenders)} offenders)"))
    return 0 if report.passed else 2


def _translates_in_window(c: Configuration, win):
    x0lo, x0hi, x1lo, x1hi = win
    out = []
    for i in range(c.q):
        base = _extended(c, i, c.q)
        for j in range(int(np.ceil(x0lo - base[0])), int(np.floor(x0hi - base[0])) + 1):
            t = base + j
            if x1lo <= t[1] <= x1hi:
                out.append(t)
    return out


def cmd_contour(args):
    if args.q != 2:
        raise UsageError("contour grids need q = 2")
    m, source = _model(args)
    win = _floats(args.window, 4, "--window")
    n = args.resolution
    X0 = np.linspace(win[0], win[1], n)
    X1 = np.linspace(win[2], win[3], n)
    paths = {"grid": _out(args, "contour.csv"), "overlay": _out(args, "overlay.json")}
    man = _manifest(args, source, paths, window=win, resolution=n)
    with open(paths["grid"], "w", newline="\n") as fh:
        for line in _header(man):
            fh.write(f"# {line}\n")
        fh.write("X0,X1,W\n")
        for a in X0:
            for b in X1:
                W = action_eval(m, Configuration(args.p, 2, (a, b)))
                fh.write(f"{a:.17g},{b:.17g},{W:.17g}\n")
    records, ctx, report = stationary.analyze(m, args.p, 2, density=args.density,
                                              tol=args.tol, workers=_threads())
    points = []
    for r in records:
        for t in _translates_in_window(r.config, win):
            if not any(np.allclose(t, pt["coords"], atol=1e-9) for pt in points):
                d = r.to_dict()
                d["coords"] = [float(v) for v in t]
                points.append(d)
    points.sort(key=lambda d: tuple(d["coords"]))
    _write_json(paths["overlay"], {"manifest": man, "audit_passed": report.passed,
                                   "points": points})
    print(f"wrote {n}x{n} grid and {len(points)} stationary points")
    return 0


def cmd_flow(args):
    m, source = _model(args)
    x = _floats(args.start, name="--from")
    c = Configuration(args.p, len(x), x)
    ctrl = flow.StepControl(abs_tol=args.abs_tol, rel_tol=args.abs_tol)
    path = flow.evolve(m, c, args.T, ctrl, stop_at_stationary=args.stop)
    paths = {"path": _out(args, "flow.csv")}
    man = _manifest(args, source, paths, start=x, T=args.T, status=path.status.value)
    path.to_csv(paths["path"], m, _header(man))
    print(",".join(f"{v:.17g}" for v in [path.times[-1], *path.final.coords]))
    return 1 if path.status is flow.FlowStatus.STEP_FAILURE else 0


def cmd_heteroclinic(args):
    m, source = _model(args)
    x = _floats(args.at, name="--at")
    y, res, ok = stationary.newton_polish(m, args.p, x)
    if not ok:
        raise UsageError(f"--at is not near a stationary state (residual {res:.3g})")
    start = Configuration(args.p, len(x), y)
    try:
        lower, upper = flow.trace_unstable(m, start, delta=args.delta)
    except (flow.NotMinimax, flow.NonConvergence) as exc:
        raise UsageError(str(exc))
    paths = {"lower": _out(args, "heteroclinic_lower.csv"),
             "upper": _out(args, "heteroclinic_upper.csv")}
    man = _manifest(args, source, paths, at=[float(v) for v in y], delta=args.delta)
    for key, path in (("lower", lower), ("upper", upper)):
        path.to_csv(paths[key], m, _header(man))
        idx = stationary.make_record(m, path.limit).index
        xs = ",".join(f"{v:.12g}" for v in path.limit.coords)
        print(f"{key}: limit ({xs}) index={idx} samples={len(path)}")
    return 0


def cmd_scan(args):
    grid = parse_eps_grid(args.eps)
    fam = FAMILIES[args.family]
    result = twistmap.rimmer_scan(fam, args.p, args.q, grid, density=args.density)
    paths = {"scan": _out(args, "scan.csv"), "thresholds": _out(args, "thresholds.json")}
    man = _manifest(args, f"family:{args.family}", paths, eps=args.eps)
    result.to_csv(paths["scan"], _header(man))
    _write_json(paths["thresholds"], {
        "manifest": man,
        "thresholds": [t.to_dict() for t in result.thresholds],
        "failures": [{"eps": e, "message": msg} for e, msg in result.failures],
    })
    for t in result.thresholds:
        print(f"{t.kind}: eps in ({t.eps_below:g}, {t.eps_above:g}]")
    if not result.thresholds:
        print("no asymmetric births or deaths detected")
    return 0


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for audit violations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="fkstates", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, model=True, q_default=2):
        if model:
            sp.add_argument("--preset", help="standard:EPS, threeharmonic:EPS or example4")
            sp.add_argument("--model", help="JSON file {'harmonics': [{'k':..,'c':..}]}; overrides --preset")
        sp.add_argument("-p", type=int, default=1)
        sp.add_argument("-q", type=int, default=q_default)
        sp.add_argument("--tol", type=float, default=1e-9, help="order tie tolerance")
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("stationary", help="enumerate, classify and audit stationary states")
    common(sp)
    sp.add_argument("--density", type=int, default=64)
    sp.set_defaults(func=cmd_stationary)

    sp = sub.add_parser("contour", help="action on a grid (q = 2) plus stationary overlay")
    common(sp)
    sp.add_argument("--density", type=int, default=64)
    sp.add_argument("--window", default="0,1,0,1", help="x0min,x0max,x1min,x1max")
    sp.add_argument("--resolution", type=int, default=101)
    sp.set_defaults(func=cmd_contour)

    sp = sub.add_parser("flow", help="integrate the gradient flow")
    common(sp)
    sp.add_argument("--from", dest="start", required=True, help="comma-separated coordinates")
    sp.add_argument("-T", type=float, required=True)
    sp.add_argument("--abs-tol", type=float, default=1e-10)
    sp.add_argument("--stop", action="store_true", help="stop once stationary")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("heteroclinic", help="unstable manifold of an index-1 state")
    common(sp)
    sp.add_argument("--at", required=True, help="comma-separated coordinates")
    sp.add_argument("--delta", type=float, default=1e-6)
    sp.set_defaults(func=cmd_heteroclinic)

    sp = sub.add_parser("scan", help="symmetry-breaking scan over eps")
    common(sp, model=False)
    sp.add_argument("--family", choices=sorted(FAMILIES), required=True)
    sp.add_argument("--eps", required=True, help="start:stop:step")
    sp.add_argument("--density", type=int, default=16)
    sp.set_defaults(func=cmd_scan)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, OSError, ValueError, KeyError, json.JSONDecodeError,
            stationary.NoMinimizerFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

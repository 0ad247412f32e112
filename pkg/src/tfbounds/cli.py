"""Command-line front end.

Every subcommand renders all of its outputs in memory and then writes
``<out>.csv`` (when tabular), ``<out>.json`` and ``<out>.manifest.json``.
Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical
guard.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .cohen import CohenKernel, cohen_distribution
from .errors import InputError, NumericalGuard
from .exponents import ExtReal
from .io import (dumps_json, load_signal, load_symbol, signal_csv, symbol_from_obj, table_csv,
                 tfarray_csv, write_outputs, read_json)
from .norms import (MixedNormSpec, amalgam_norm, mixed_norm, modulation_norm,
                    wigner_mod_norm)
from .quantization import (localization_apply, localization_weyl_symbol, weak_identity_residuals,
                           weyl_apply)
from .sharpness import FAMILIES, IndexTuple, check_conditions, sweep
from .signals import AxisGrid, DEFAULT_GRID, TfArray, gaussian
from .transforms import ambiguity, cross_wigner, stft
from .verify import SUITES, run_suite

__all__ = ["main", "build_parser"]

log = logging.getLogger("tfbounds")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """Argument errors raise :class:`InputError` instead of exiting."""

    def error(self, message):
        raise InputError(message)


def _grid(args) -> AxisGrid:
    return AxisGrid(args.n, args.delta)


def _tf_summary(F: TfArray) -> dict:
    return {"xgrid": F.xgrid.to_dict(), "xigrid": F.xigrid.to_dict(),
            "max_abs": float(np.max(np.abs(F.values)))}


def _params(args, skip=("func", "command")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _finish(args, files: dict, inputs: dict) -> int:
    paths = write_outputs(args.out, files, args.command, _params(args), inputs)
    for p in paths:
        log.info("wrote %s", p)
    return EXIT_OK


def _sidecar(args, payload: dict) -> str:
    payload = dict(payload)
    payload["manifest"] = args.out.split("/")[-1] + ".manifest.json"
    return dumps_json(payload)


# ---------------------------------------------------------------- subcommands
def cmd_transform(args) -> int:
    grid = _grid(args)
    f = load_signal(args.f, grid)
    if args.command == "stft":
        g = load_signal(args.window, grid)
        F = stft(f, g)
        inputs = {"f": args.f, "window": args.window}
    else:
        g = load_signal(args.g, grid)
        F = (cross_wigner if args.command == "wigner" else ambiguity)(f, g)
        inputs = {"f": args.f, "g": args.g}
    return _finish(args, {".csv": tfarray_csv(F), ".json": _sidecar(args, _tf_summary(F))}, inputs)


def _load_kernel(text: str) -> CohenKernel:
    if text.startswith("file:"):
        sym = symbol_from_obj(read_json(text[5:]))
        return CohenKernel("custom", custom=sym)
    return CohenKernel.parse(text)


def cmd_cohen(args) -> int:
    f = load_signal(args.f, _grid(args))
    M = cohen_distribution(f, _load_kernel(args.kernel))
    return _finish(args, {".csv": tfarray_csv(M), ".json": _sidecar(args, _tf_summary(M))},
                   {"f": args.f, "kernel": args.kernel})


def _norm_settings(args):
    p, q, s, space = args.p, args.q, args.s, args.space
    if args.spec is not None:
        spec = read_json(args.spec)
        if not isinstance(spec, dict):
            raise InputError("norm spec JSON must be an object")
        p = spec.get("p", p)
        q = spec.get("q", q)
        s = float(spec.get("s", s))
        space = spec.get("space", space)
    if p is None or q is None:
        raise InputError("norm needs --p and --q (or a --spec file)")
    if space not in ("modulation", "amalgam", "mixed"):
        raise InputError(f"unknown norm space {space!r}")
    return ExtReal.parse(str(p)), ExtReal.parse(str(q)), s, space


def cmd_norm(args) -> int:
    """``modulation``: M^{p,q}_{v_s} of f, or of W(f, g) when --g is given.

    ``amalgam``: W(FL^p, L^q_{v_s}) norm of A(f, g).  ``mixed``: plain mixed
    Lebesgue norm of W(f, g) (of V_phi f without --g).
    """
    p, q, s, space = _norm_settings(args)
    grid = _grid(args)
    f = load_signal(args.f, grid)
    inputs = {"f": args.f}
    g = None
    if args.g is not None:
        g = load_signal(args.g, grid)
        inputs["g"] = args.g
    if args.spec is not None:
        inputs["spec"] = args.spec
    if space == "modulation" and g is None:
        value = modulation_norm(f, p, q, s)
    elif space == "modulation":
        side = 64 if p.is_inf and not (q.is_inf and s == 0) else 128
        xg = grid.decimated(max(1, grid.n // side))
        xig = grid.dual().decimated(max(1, grid.n // side))
        value = wigner_mod_norm(f, g, p, q, s, xgrid=xg, xigrid=xig)
    elif space == "amalgam":
        sq = AxisGrid(64, 1.0 / 8)
        A = ambiguity(f, f if g is None else g, sq, sq)
        value = amalgam_norm(A, p, q, s)
    else:
        F = stft(f, gaussian(1.0, grid)) if g is None else cross_wigner(f, g)
        value = mixed_norm(F, MixedNormSpec(p, q, s, "full"))
    payload = {"space": space, "p": str(p), "q": str(q), "s": s, "value": value,
               "pair": g is not None}
    return _finish(args, {".json": _sidecar(args, payload)}, inputs)


def cmd_sweep(args) -> int:
    t = IndexTuple.parse(args.indices)
    if args.lambda_points < 2:
        raise InputError("--lambda-points must be at least 2")
    if not (args.lambda_min > 0 and args.lambda_max > args.lambda_min):
        raise InputError("need 0 < --lambda-min < --lambda-max")
    # interpolate in log2 so power-of-two endpoints give exact powers of two
    lams = np.exp2(np.linspace(np.log2(args.lambda_min), np.log2(args.lambda_max), args.lambda_points))
    report = sweep(t, args.family, list(lams), args.resolution)
    cond = check_conditions(t)
    payload = report.to_dict()
    payload["conditions"] = {"bounded": cond.bounded, "failures": list(cond.failures)}
    csv = table_csv(("lambda", "ratio"), zip(report.lambdas, report.ratios))
    return _finish(args, {".csv": csv, ".json": _sidecar(args, payload)}, {"indices": args.indices})


def cmd_weyl(args) -> int:
    grid = _grid(args)
    sigma = load_symbol(args.symbol)
    f = load_signal(args.f, grid)
    out = weyl_apply(sigma, f)
    payload = {"l2_norm": out.norm()}
    if args.check_weak_identity:
        probes = [load_signal(s, grid) for s in args.probe] or [f]
        rows = weak_identity_residuals(sigma, [(a, b) for a in probes for b in probes])
        payload["weak_identity"] = [
            {"residual": r["residual"], "scale": r["scale"], "relative": r["residual"] / r["scale"]}
            for r in rows]
    return _finish(args, {".csv": signal_csv(out), ".json": _sidecar(args, payload)},
                   {"symbol": args.symbol, "f": args.f})


def cmd_localize(args) -> int:
    grid = _grid(args)
    a = load_symbol(args.symbol)
    phi1 = load_signal(args.window1, grid)
    phi2 = load_signal(args.window2, grid)
    f = load_signal(args.f, grid)
    if args.route == "direct":
        out = localization_apply(a, phi1, phi2, f)
    else:
        out = weyl_apply(localization_weyl_symbol(a, phi1, phi2), f)
    payload = {"route": args.route, "l2_norm": out.norm()}
    return _finish(args, {".csv": signal_csv(out), ".json": _sidecar(args, payload)},
                   {"symbol": args.symbol, "window1": args.window1, "window2": args.window2,
                    "f": args.f})


def cmd_verify(args) -> int:
    report = run_suite(args.suite)
    for c in report["checks"]:
        log.info("%s %s: %.3g (tol %.3g)", "PASS" if c["passed"] else "FAIL",
                 c["name"], c["value"], c["tolerance"])
    _finish(args, {".json": _sidecar(args, report)}, {})
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------- parser
def _add_common(p: argparse.ArgumentParser, out_default: str):
    p.add_argument("--n", type=int, default=DEFAULT_GRID.n, help="signal grid size (power of two)")
    p.add_argument("--delta", type=float, default=DEFAULT_GRID.delta, help="signal grid spacing")
    p.add_argument("--out", default=out_default, help="output path prefix")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tfbounds", description="Time-frequency norms, Wigner bounds and quantization.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    for name, second in (("wigner", "g"), ("ambiguity", "g"), ("stft", "window")):
        p = sub.add_parser(name, help=f"{name} transform to CSV")
        p.add_argument("--f", required=True, help="signal shorthand or JSON path")
        p.add_argument(f"--{second}", required=True, help="second signal or window")
        _add_common(p, name)
        p.set_defaults(func=cmd_transform)

    p = sub.add_parser("cohen", help="Cohen-class distribution")
    p.add_argument("--f", required=True)
    p.add_argument("--kernel", required=True, help="tau:<t> | bj | delta | file:<path>")
    _add_common(p, "cohen")
    p.set_defaults(func=cmd_cohen)

    p = sub.add_parser("norm", help="modulation, amalgam or mixed norms")
    p.add_argument("--f", required=True)
    p.add_argument("--g", default=None, help="second signal: take the norm of W(f, g) or A(f, g)")
    p.add_argument("--p", default=None)
    p.add_argument("--q", default=None)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--space", default="modulation", help="modulation | amalgam | mixed")
    p.add_argument("--spec", default=None, help='JSON {"p", "q", "s", "space"}')
    _add_common(p, "norm")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("sharpness-sweep", help="dilation sweep of a witness family")
    p.add_argument("--indices", required=True, help="p1,q1,p2,q2,p,q (inf and 4/3 accepted)")
    p.add_argument("--family", choices=FAMILIES, default="off")
    p.add_argument("--lambda-min", type=float, default=2.0 ** -10)
    p.add_argument("--lambda-max", type=float, default=2.0 ** 10)
    p.add_argument("--lambda-points", type=int, default=21)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--out", default="sweep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("weyl", help="apply a Weyl operator")
    p.add_argument("--symbol", required=True, help="gengauss:a,b,c | const:v | JSON path")
    p.add_argument("--f", required=True)
    p.add_argument("--check-weak-identity", action="store_true")
    p.add_argument("--probe", action="append", default=[], help="extra signals for the residual table")
    _add_common(p, "weyl")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("localize", help="apply a localization operator")
    p.add_argument("--symbol", required=True)
    p.add_argument("--window1", default="gauss:1")
    p.add_argument("--window2", default="gauss:1")
    p.add_argument("--f", required=True)
    p.add_argument("--route", choices=("direct", "weyl"), default="direct")
    _add_common(p, "localize")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        log.setLevel(logging.INFO if args.verbose else logging.WARNING)
        if args.command == "verify" and args.out is None:
            args.out = f"verify-{args.suite}"
        return args.func(args)
    except InputError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except NumericalGuard as exc:
        log.error("numerical guard %s: %s", type(exc).__name__, exc)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())

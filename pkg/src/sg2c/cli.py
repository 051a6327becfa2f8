"""Command-line front end.

Subcommands: decompose, gain, certify, sweep, simulate, repro.  Exit
codes: 0 success, 1 NotCertified (certify), 2 usage error, 3 numerical
failure/divergence.  All JSON and CSV output is deterministic, with
floats at 12 significant digits.
"""

import argparse
import json
import sys as _sys

import numpy as np

from .compound_algebra import decompose, second_additive_compound
from .errors import (InvalidParameter, InvalidPartition, NoFiniteGain,
                     NonFinite, NoSignChange, ParseError, SchemaError,
                     Sg2cError, SolverFailure)
from .gains import gamma1, gamma2, gamma12
from .models import get_system, load_model, BUILTIN_NAMES
from .repro import canonical_example_name, format_table, repro_example
from .sdp import SolverOptions
from .smallgain import (CERTIFIED, NOT_CERTIFIED, certify, matrix_to_dict,
                        report_to_dict)
from . import sweep as _sweep

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _round12(obj):
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            return repr(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(doc, path: str | None) -> None:
    text = json.dumps(_round12(doc), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _write_text(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _add_model_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=BUILTIN_NAMES,
                     help="built-in system name")
    src.add_argument("--file", help="path to a JSON polytopic model")
    p.add_argument("--param", type=float,
                   help="parameter value for a built-in (k or b)")
    p.add_argument("--route", choices=("modular", "direct"), default=None,
                   help="vertex enumeration route for built-ins")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=None,
                   help="lower bound weight for Lyapunov unknowns")
    p.add_argument("--solver-tol", type=float, default=None,
                   help="backend tolerance (overrides SG2C_SOLVER_TOL)")
    p.add_argument("--output", help="write result here instead of stdout")


def _solver_options(args) -> SolverOptions | None:
    if getattr(args, "solver_tol", None) is None:
        return None
    return SolverOptions(tolerance=args.solver_tol)


def _resolve_model(args, default_route: str = "modular"):
    if args.file:
        return load_model(args.file)
    sys_ = get_system(args.builtin, args.param)
    return sys_.hull(route=args.route or default_route)


def _eps_kwargs(args) -> dict:
    return {} if args.eps is None else {"eps": args.eps}


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="sg2c",
        description="Certification of 2-contraction for interconnected "
                    "systems via compound-matrix small-gain conditions.")
    top.add_argument("--config",
                     help="JSON file of flag defaults for the subcommand")
    sub = top.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("decompose",
                       help="emit the block decomposition of each vertex")
    _add_model_source(p)
    p.add_argument("--output")

    p = sub.add_parser("gain", help="per-channel gain certificates")
    _add_model_source(p)
    _add_common(p)

    p = sub.add_parser("certify", help="run one certification route")
    _add_model_source(p)
    p.add_argument("--method", required=True,
                   choices=("thm1", "thm2", "n3", "direct"))
    _add_common(p)

    p = sub.add_parser("sweep", help="bisect a threshold or tabulate curves")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--bisect", action="store_true")
    mode.add_argument("--curve", action="store_true")
    p.add_argument("--builtin", required=True, choices=BUILTIN_NAMES)
    p.add_argument("--method", default="thm1",
                   choices=("thm1", "thm2", "n3", "direct"))
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--grid", help="comma-separated parameter values")
    p.add_argument("--points", type=int, default=11,
                   help="grid size when --grid is absent (curve)")
    p.add_argument("--direction", choices=("increasing", "decreasing"))
    p.add_argument("--tol", type=float, default=_sweep.DEFAULT_BISECT_TOL)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("simulate", help="integrate a built-in system")
    p.add_argument("--builtin", required=True, choices=BUILTIN_NAMES)
    p.add_argument("--param", type=float)
    p.add_argument("--x0", required=True,
                   help="comma-separated initial state")
    p.add_argument("--t-end", type=float, default=_sweep.DEFAULT_T_END)
    p.add_argument("--step", type=float, default=_sweep.DEFAULT_STEP)
    p.add_argument("--output")

    p = sub.add_parser("repro",
                       help="measure an example and compare with the "
                            "bundled reference values")
    p.add_argument("--example", required=True,
                   help="1 | multistable4 | thomas4 | thomas3")
    p.add_argument("--output")

    # subparsers resolve option defaults in their own namespace, so
    # config-file defaults must be pushed down to each of them
    top.subcommand_parsers = {name: sub.choices[name] for name in sub.choices}
    return top


def _cmd_decompose(args) -> int:
    model = _resolve_model(args)
    vertices = []
    for v in model.vertices:
        d = decompose(v)
        vertices.append({
            "a11c2": matrix_to_dict(d.a11c2),
            "b1": matrix_to_dict(d.b1),
            "a22c2": matrix_to_dict(d.a22c2),
            "b2": matrix_to_dict(d.b2),
            "ksum": matrix_to_dict(d.ksum),
            "g1": matrix_to_dict(d.g1),
            "g2": matrix_to_dict(d.g2),
            "compound": matrix_to_dict(second_additive_compound(v.entries)),
            "permutation": d.perm.tolist(),
        })
    _emit({"n1": model.n1, "n2": model.n2,
           "vertex_count": len(model.vertices), "vertices": vertices},
          args.output)
    return EXIT_OK


def _cmd_gain(args) -> int:
    model = _resolve_model(args)
    opts = _solver_options(args)
    decs = [decompose(v) for v in model.vertices]
    doc = {}
    for name, fn in (("gamma1", gamma1), ("gamma2", gamma2),
                     ("gamma12", gamma12)):
        try:
            cert = fn(decs, options=opts, **_eps_kwargs(args))
        except NoFiniteGain as exc:
            doc[name] = {"value": None, "error": str(exc)}
            continue
        doc[name] = {"kind": cert.kind, "value": cert.value,
                     "eps": cert.eps, "vertex_count": cert.vertex_count,
                     "P": matrix_to_dict(cert.P)}
    _emit(doc, args.output)
    return EXIT_OK


def _cmd_certify(args) -> int:
    model = _resolve_model(args,
                           "direct" if args.method == "direct" else "modular")
    report = certify(model, args.method, options=_solver_options(args),
                     **_eps_kwargs(args))
    _emit(report_to_dict(report), args.output)
    if report.verdict == CERTIFIED:
        return EXIT_OK
    if report.verdict == NOT_CERTIFIED:
        return EXIT_NOT_CERTIFIED
    return EXIT_NUMERICAL


def _cmd_sweep(args) -> int:
    sys_ = get_system(args.builtin)
    opts = _solver_options(args)
    if args.bisect:
        if args.range is None:
            raise InvalidParameter("--bisect needs --range LO HI")
        result = _sweep.bisect_threshold(
            sys_, args.method, args.range, direction=args.direction,
            tol=args.tol, options=opts, **_eps_kwargs(args))
        _emit({
            "method": result.method,
            "threshold": result.threshold,
            "bracket": list(result.bracket),
            "tolerance_achieved": result.tolerance_achieved,
            "unknown_encountered": result.unknown_encountered,
            "probes": [
                {"param": float(p), "condition_value": float(c),
                 "verdict": v}
                for p, c, v in zip(result.parameter_grid,
                                   result.condition_values,
                                   result.verdicts)],
        }, args.output)
        return EXIT_OK
    if args.grid:
        grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
    elif args.range is not None:
        grid = np.linspace(args.range[0], args.range[1],
                           args.points).tolist()
    else:
        raise InvalidParameter("--curve needs --grid or --range")
    result = _sweep.curve(sys_, grid, options=opts, jobs=args.jobs,
                          **_eps_kwargs(args))
    _write_text(_sweep.curve_to_csv(result), args.output)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sys_ = get_system(args.builtin, args.param)
    x0 = [float(tok) for tok in args.x0.split(",") if tok.strip()]
    traj = _sweep.simulate(sys_, x0, t_end=args.t_end, step=args.step)
    _write_text(_sweep.trajectory_to_csv(traj), args.output)
    return EXIT_OK


def _cmd_repro(args) -> int:
    name = canonical_example_name(args.example)
    report = repro_example(name)
    _write_text(format_table(report) + "\n", args.output)
    return EXIT_OK


_COMMANDS = {
    "decompose": _cmd_decompose,
    "gain": _cmd_gain,
    "certify": _cmd_certify,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "repro": _cmd_repro,
}


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> list:
    """Pull --config out of argv and fold its JSON content into parser
    defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise InvalidParameter("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("config root must be an object")
    defaults = {k.replace("-", "_"): v for k, v in doc.items()}
    parser.set_defaults(**defaults)
    for sp in getattr(parser, "subcommand_parsers", {}).values():
        sp.set_defaults(**defaults)
    return rest


def main(argv=None) -> int:
    argv = list(_sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.subcommand](args)
    except (ParseError, SchemaError, InvalidParameter, InvalidPartition,
            ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (SolverFailure, NoSignChange, NonFinite, NoFiniteGain) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL
    except Sg2cError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())

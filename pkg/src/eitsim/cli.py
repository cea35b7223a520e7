"""Command-line front end.

Exit codes: 0 ok, 1 configuration error, 2 numerical failure,
3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import warnings

import numpy as np

from . import analytic as an
from . import validation as val
from .cooling import CoolingParams, scan_cooling
from .discrim import TRACKING_MODES, DiscriminationScenario, ScenarioKind, apply_coordinates, scan_surface
from .obe import steady_state_rho33
from .params import ConfigError, config_to_dict, load_config, validate_config
from .scan import Axis, SpectralScan, evaluate_grid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

_PROFILE_FIELDS = ("omega_1", "omega_2", "delta_1", "delta_2", "gamma")


class _Table:
    """Column data for the one-dimensional figure presets."""

    def __init__(self, columns: dict[str, list[float]], metadata: dict):
        self.columns = columns
        self.metadata = metadata

    def config_hash(self) -> str:
        blob = json.dumps({"columns": list(self.columns), "metadata": self.metadata},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# config {self.config_hash()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.columns))
        for row in zip(*self.columns.values()):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {"config_hash": self.config_hash(), "columns": self.columns,
                "metadata": self.metadata}
        return json.dumps(data, indent=1, sort_keys=True) + "\n"


class _ProfilePoint:
    def __init__(self, cfg, names):
        self.cfg, self.names = cfg, names

    def __call__(self, *coords):
        try:
            cfg, _ = apply_coordinates(self.cfg, self.names, coords)
            validate_config(cfg)
            return steady_state_rho33(cfg), True
        except (ConfigError, ArithmeticError):
            return math.nan, False


def _config(args):
    if args.config is None:
        raise ConfigError(["--config is required for this command"])
    return load_config(args.config)


def _axes(args, count: tuple[int, ...], allowed) -> list[Axis]:
    axes = [Axis.parse(g) for g in args.grid]
    if len(axes) not in count:
        raise ConfigError([f"expected {' or '.join(map(str, count))} --grid option(s)"])
    for ax in axes:
        if ax.name not in allowed:
            raise ConfigError([f"grid parameter {ax.name!r} not one of {', '.join(allowed)}"])
    return axes


def cmd_profile(args):
    cfg = _config(args)
    axes = _axes(args, (1, 2), _PROFILE_FIELDS)
    values, valid = evaluate_grid(_ProfilePoint(cfg, tuple(a.name for a in axes)), axes,
                                  args.threads)
    return SpectralScan(axes, values, valid, "rho33", {"config": config_to_dict(cfg)})


def cmd_scan_r(args):
    cfg = _config(args)
    sc = DiscriminationScenario(ScenarioKind(args.scenario), cfg, args.Z, args.C)
    a1, a2 = _axes(args, (2,), ("omega_1", "omega_2", "delta_1", "delta_2", "gamma", "Z"))
    return scan_surface(sc, a1, a2, tracking=args.tracking, threads=args.threads)


def cmd_scan_cooling(args):
    cfg = _config(args)
    p = CoolingParams(cfg, args.nu, args.eta1, args.eta2, args.alpha1, args.alpha2)
    a1, a2 = _axes(args, (2,), ("omega_1", "omega_2", "delta_2", "gamma", "nu", "eta1", "eta2"))
    return scan_cooling(p, a1, a2, tracking=args.tracking, threads=args.threads)


def figure_data(fig: int, threads=None, n: int = 60):
    """Data behind one of the preset figures (2, 3, 6 or 7)."""
    if fig == 2:
        deltas = np.linspace(-1.5, 1.5, 601)
        cols = {"delta": list(deltas)}
        for g in (0.0, 0.05, 0.1):
            cols[f"rho33_gamma_{g:g}"] = [an.rho33_exact(val.fig2_config(g, x)) for x in deltas]
        return _Table(cols, {"figure": 2, **val.FIG2, "gammas": [0.0, 0.05, 0.1]})
    if fig == 3:
        d1 = np.linspace(-4.0, 4.0, 801)
        cols = {"delta_1": list(d1),
                "rho33_D": [val.fig3_d_profile(x) for x in d1],
                "rho33_B": [val.fig3_b_profile(x) for x in d1]}
        return _Table(cols, {"figure": 3, **val.FIG3})
    if fig == 6:
        return val.fig6_scan(n, threads)
    if fig == 7:
        return val.fig7_scan(n, threads)
    raise ConfigError([f"unknown figure {fig}"])


def cmd_figure(args):
    fig = args.figure if args.figure is not None else args.figure_id
    if fig is None:
        raise ConfigError(["figure id required (2, 3, 6 or 7)"])
    return figure_data(int(fig), args.threads)


def cmd_validate(args):
    results = val.run_validation(quick=not args.full)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON system configuration")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--grid", action="append", default=[],
                        help="axis as name:lo:hi:n:log|lin (repeatable)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: EITSIM_THREADS or 1)")
    common.add_argument("--tracking", choices=TRACKING_MODES, default="peak")

    parser = argparse.ArgumentParser(prog="eitsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("profile", parents=[common], help="steady-state rho33 on a grid")

    p = sub.add_parser("scan-r", parents=[common], help="discrimination ratio surface")
    p.add_argument("--scenario", choices=("two-lambda", "resonant"), default="two-lambda")
    p.add_argument("--Z", type=float, default=0.2, help="level splitting of the second manifold")
    p.add_argument("--C", type=float, default=1.0)

    p = sub.add_parser("scan-cooling", parents=[common], help="cooling 1/q surface")
    p.add_argument("--nu", type=float, default=0.2, help="trap frequency")
    p.add_argument("--eta1", type=float, default=val.FIG7_ETA[0])
    p.add_argument("--eta2", type=float, default=val.FIG7_ETA[1])
    p.add_argument("--alpha1", type=float, default=1.0 / 3.0)
    p.add_argument("--alpha2", type=float, default=1.0 / 3.0)

    p = sub.add_parser("figure", parents=[common], help="data for a preset figure")
    p.add_argument("figure_id", nargs="?", type=int, choices=(2, 3, 6, 7))
    p.add_argument("--figure", type=int, choices=(2, 3, 6, 7))

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--full", action="store_true", help="full sample counts")
    return parser


_COMMANDS = {"profile": cmd_profile, "scan-r": cmd_scan_r, "scan-cooling": cmd_scan_cooling,
             "figure": cmd_figure, "validate": cmd_validate}


def _emit(result, args) -> None:
    text = result.to_json() if args.format == "json" else result.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", an.ApproximationWarning)
            result = _COMMANDS[args.command](args)
        if isinstance(result, int):
            return result
        _emit(result, args)
    except (ConfigError, OSError, ValueError) as exc:
        errors = getattr(exc, "errors", None) or [str(exc)]
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

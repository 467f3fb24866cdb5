"""``crw`` command line: point evaluations, sweeps, windows and oracle checks.

Exit codes: 0 success, 1 verification failed, 2 domain error (wavenumber at
or beyond a band edge, unevaluable point), 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .config import ConfigError, load_config, write_csv, write_json_lines
from .core import BandEdge, ScatteringError, dispersion
from .sweep import DEFAULT_THRESHOLD, SweepSpec, evaluate, find_windows, sweep_k, verify_against_oracle

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DOMAIN = 2
EXIT_INPUT = 3
VERIFY_TOL = 1e-8

SWEEP_COLUMNS = ("k", "E", "detuning", "R", "T")
WINDOW_COLUMNS = ("k_lo", "k_hi", "max_R", "slope_lo", "slope_hi")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _sweep_spec(args, cluster) -> SweepSpec:
    try:
        return SweepSpec(cluster, args.k_min, args.k_max, args.points, args.reference_emitter)
    except BandEdge:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_point(args) -> int:
    cluster = load_config(args.config)
    mode = dispersion(args.k, cluster.params)
    res, _ = evaluate(cluster, mode)
    doc = {
        "k": args.k,
        "E": mode.energy,
        "r_re": res.r.real,
        "r_im": res.r.imag,
        "tN_re": res.t_N.real,
        "tN_im": res.t_N.imag,
        "R": res.R,
        "T": res.T,
        "hermitian": res.hermitian,
    }
    sys.stdout.write(json.dumps(doc) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cluster = load_config(args.config)
    record = sweep_k(_sweep_spec(args, cluster))
    rows = [(row.k, row.energy, row.detuning, row.R, row.T) for row in record.rows]
    writer = write_csv if args.format == "csv" else write_json_lines
    _emit(writer(SWEEP_COLUMNS, rows), args.out)
    return EXIT_OK


def cmd_windows(args) -> int:
    if not 0.0 < args.threshold < 1.0:
        raise InputError(f"threshold must lie in (0, 1), got {args.threshold!r}")
    cluster = load_config(args.config)
    record = sweep_k(_sweep_spec(args, cluster))
    windows = find_windows(record, args.threshold)
    rows = [(w.k_lo, w.k_hi, w.max_R, w.slope_lo, w.slope_hi) for w in windows]
    _emit(write_csv(WINDOW_COLUMNS, rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise InputError(f"samples must be >= 1, got {args.samples}")
    cluster = load_config(args.config)
    report = verify_against_oracle(cluster, args.samples, args.seed)
    doc = {
        "samples": report.samples,
        "seed": report.seed,
        "max_abs_dr": report.max_abs_dr,
        "max_abs_dt": report.max_abs_dt,
        "worst_k": report.worst_k,
    }
    sys.stdout.write(json.dumps(doc) + "\n")
    return EXIT_OK if report.passed(VERIFY_TOL) else EXIT_VERIFY_FAILED


def _add_sweep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="JSON cluster configuration")
    p.add_argument("--k-min", type=float, required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument(
        "--reference-emitter",
        type=int,
        default=None,
        metavar="INDEX",
        help="emitter (channel-major order) whose detuning fills the detuning column",
    )
    p.add_argument("--out", default=None, help="write to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crw", description="Single-photon scattering through coupled-resonator clusters.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("point", help="amplitudes at one wavenumber")
    p.add_argument("--config", required=True)
    p.add_argument("--k", type=float, required=True)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="R and T over a uniform k grid")
    _add_sweep_args(p)
    p.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("windows", help="perfect-reflection windows of a sweep")
    _add_sweep_args(p)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser("verify", help="compare closed forms with the network oracle")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        for name in ("k", "k_min", "k_max", "threshold"):
            value = getattr(args, name, None)
            if value is not None and not math.isfinite(value):
                raise InputError(f"--{name.replace('_', '-')} must be finite")
        return args.func(args)
    except (ConfigError, InputError, OSError) as exc:
        print(f"crw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ScatteringError as exc:
        print(f"crw: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

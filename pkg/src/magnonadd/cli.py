"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a numeric/closed-form
comparison fails, 2 on a config or domain error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
import warnings
from pathlib import Path

from .errors import MagnonAddError
from .experiments import (
    ExperimentConfig,
    FigureId,
    load_config,
    run_figure,
    run_protocol,
    run_sweep,
    validate,
)
from .experiments.config import GridSpec

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--out", type=Path, help="output directory (overrides config)")
    common.add_argument("--dim", type=int, help="Fock truncation override")
    common.add_argument("--grid-step", type=float, help="Wigner grid step override")

    parser = argparse.ArgumentParser(prog="magnonadd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fig = sub.add_parser("figure", parents=[common], help="emit plot-ready data for one figure")
    fig.add_argument("figure_id", choices=[f.value for f in FigureId])
    sub.add_parser("protocol", parents=[common], help="run prepare -> add -> read once")
    sub.add_parser("validate", parents=[common], help="closed forms vs Fock-space numerics")
    sub.add_parser("sweep", parents=[common], help="sweep one parameter through the protocol")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.dim is not None:
        changes["dim"] = args.dim
    if args.grid_step is not None:
        g = cfg.grid
        changes["grid"] = GridSpec(g.x_range, g.p_range, args.grid_step)
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _report_files(result) -> None:
    for f in result.files:
        status = "ok" if f["passed"] else "FAIL"
        diffs = " ".join(f"{k}={v:.3g}" for k, v in f["max_abs_diff"].items())
        print(f"{status:4} {f['file']} ({f['rows']} rows) max|num-analytic|: {diffs}")
    print(f"manifest: {result.manifest_path}")


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    warnings.showwarning = _show_warning
    try:
        cfg = _config(args)
        if args.command == "figure":
            result = run_figure(cfg, args.figure_id)
            _report_files(result)
            passed = result.passed
        elif args.command == "sweep":
            result = run_sweep(cfg)
            _report_files(result)
            passed = result.passed
        elif args.command == "protocol":
            result = run_protocol(cfg)
            print(result.summary())
            print(f"manifest: {result.manifest_path}")
            passed = result.passed
        else:
            report = validate(cfg)
            csv_path, _ = report.write(cfg.output_dir)
            for name, d in report.by_quantity().items():
                status = "ok" if not d["failed"] else "FAIL"
                print(f"{status:4} {name}: {d['rows']} rows, max err {d['max_abs_error']:.3g} (tol {d['tol']:.0e})")
            print(f"{len(report.rows)} rows, {len(report.failures)} failed; report: {csv_path}")
            passed = report.passed
    except MagnonAddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

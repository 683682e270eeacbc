"""Command-line front end: quadrature rasters, time evolution, reports,
and the built-in verification suite.

Exit codes: 0 success, 1 validation error, 2 numerical-guard failure,
3 I/O error.
"""

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    exit_code_for,
)
from .fockspace import pair_cat
from .presets import EVOLVE_PRESETS, PRESET_NAMES, QUAD_PRESETS, load_preset, preset_text
from .quadrature import default_grid, quadrature_distribution, write_raster_csv, write_raster_matrix
from .runner import (
    ExperimentConfig,
    _parse_grid,
    format_series_csv,
    load_config,
    run,
    series_json_payload,
    sweep,
)


class _UsageError(Exception):
    def __init__(self, parser, message):
        self.parser = parser
        self.message = message
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # allow option values like -4:4:50
        self._negative_number_matcher = re.compile(r"^-\d")

    def error(self, message):
        raise _UsageError(self, message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="paircat",
        description=(
            "Pair cat states of a trapped ion's vibrational motion: "
            "quadrature rasters, joint evolution, and entanglement series. "
            "Negative charge q is reduced to q >= 0 by relabeling the two "
            "modes (noted in the run manifest)."
        ),
    )
    parser.add_argument("--version", action="version", version=f"paircat {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    quad = sub.add_parser("quad", help="rasterize a quadrature distribution")
    quad.add_argument("--preset", choices=QUAD_PRESETS, help="named parameter set")
    quad.add_argument("--xi", help="pair amplitude (complex accepted)")
    quad.add_argument("--q", type=int, help="number-difference charge")
    quad.add_argument("--phi", help="relative phase (accepts pi fractions)")
    quad.add_argument("--tail-epsilon", type=float, default=1e-12)
    quad.add_argument("--grid", help="lo:hi:n or xlo:xhi:nx,ylo:yhi:ny")
    quad.add_argument("--out", help="output path (stdout when omitted)")
    quad.add_argument("--format", choices=("matrix", "csv"), default="matrix")
    quad.add_argument("--threads", type=int, default=1)
    quad.add_argument("--print-config", action="store_true",
                      help="dump the frozen preset file and exit")
    quad.set_defaults(handler=cmd_quad, parser=quad)

    evolve = sub.add_parser("evolve", help="evolve and write a time series")
    group = evolve.add_mutually_exclusive_group()
    group.add_argument("--config", help="experiment config file")
    group.add_argument("--preset", choices=EVOLVE_PRESETS)
    evolve.add_argument("--out", help="CSV output path (manifest JSON sits beside it)")
    evolve.add_argument("--json", dest="json_out", help="also write a JSON export")
    evolve.add_argument("--threads", type=int, default=1)
    evolve.add_argument("--print-config", action="store_true",
                        help="dump the frozen preset file and exit")
    evolve.set_defaults(handler=cmd_evolve, parser=evolve)

    selftest = sub.add_parser("selftest", help="run the verification suite")
    selftest.add_argument("--quick", action="store_true",
                          help="reduced parameter grid, a few seconds")
    selftest.add_argument("--list", action="store_true", dest="list_only",
                          help="enumerate checks without running them")
    selftest.set_defaults(handler=cmd_selftest, parser=selftest)

    report = sub.add_parser(
        "report", help="run a preset and render its figure beside the data"
    )
    report.add_argument("--preset", choices=PRESET_NAMES, required=True)
    report.add_argument("--out", required=True, help="output directory")
    report.add_argument("--threads", type=int, default=1)
    report.set_defaults(handler=cmd_report, parser=report)

    return parser


def _check_threads(parser, threads):
    if threads < 1:
        raise _UsageError(parser, "--threads must be >= 1")


def _quad_config(args) -> ExperimentConfig:
    if args.preset:
        config = load_preset(args.preset)
    else:
        if args.xi is None or args.q is None or args.phi is None:
            raise _UsageError(
                args.parser, "either --preset or all of --xi/--q/--phi are required"
            )
        lines = [f"xi = {args.xi}", f"q = {args.q}", f"phi = {args.phi}",
                 f"tail_epsilon = {args.tail_epsilon:g}",
                 "outputs = quadrature"]
        config = load_config("\n".join(lines))
    if args.grid:
        config = replace(config, grid=_parse_grid(args.grid))
    return replace(config, outputs=frozenset({"quadrature"}))


def _state_label(config: ExperimentConfig) -> str:
    xi = config.xi
    xi_text = f"{xi.real:g}" if xi.imag == 0 else f"{xi.real:g}{xi.imag:+g}j"
    return (
        f"xi={xi_text} q={config.q} phi={config.phi:.17g} "
        f"tail_epsilon={config.tail_epsilon:g}"
    )


def cmd_quad(args) -> int:
    if args.print_config:
        if not args.preset:
            raise _UsageError(args.parser, "--print-config requires --preset")
        sys.stdout.write(preset_text(args.preset))
        return EXIT_OK
    _check_threads(args.parser, args.threads)
    config = _quad_config(args)
    raster = quadrature_distribution(
        pair_cat(config.state_spec()),
        config.grid or default_grid(),
        threads=args.threads,
    )
    writer = write_raster_matrix if args.format == "matrix" else write_raster_csv
    label = _state_label(config)
    if args.out:
        with open(args.out, "w") as fh:
            writer(raster, fh, label)
    else:
        writer(raster, sys.stdout, label)
    return EXIT_OK


def _sweep_file_name(base: Path, parameter: str, value) -> Path:
    if isinstance(value, complex) and value.imag == 0:
        value = value.real
    text = f"{value:g}" if isinstance(value, float) else str(value)
    text = text.replace("+", "p").replace("/", "_")
    return base.with_name(f"{base.stem}.{parameter}-{text}{base.suffix}")


def _write_evolve_outputs(result, out_path: Path, json_out):
    out_path.write_text(format_series_csv(result.series))
    manifest_path = out_path.with_suffix(".manifest.json")
    manifest_path.write_text(
        json.dumps(result.manifest.to_dict(include_volatile=True), indent=2)
        + "\n"
    )
    if json_out:
        Path(json_out).write_text(
            json.dumps(series_json_payload(result), indent=2) + "\n"
        )


def cmd_evolve(args) -> int:
    if args.print_config:
        if not args.preset:
            raise _UsageError(args.parser, "--print-config requires --preset")
        sys.stdout.write(preset_text(args.preset))
        return EXIT_OK
    if not args.out:
        raise _UsageError(args.parser, "the following arguments are required: --out")
    _check_threads(args.parser, args.threads)
    if args.config:
        config = load_config(Path(args.config).read_text())
    elif args.preset:
        config = load_preset(args.preset)
    else:
        raise _UsageError(args.parser, "either --config or --preset is required")

    out_path = Path(args.out)
    if config.sweep_parameter is None:
        result = run(config, threads=args.threads)
        if result.series is None:
            raise _UsageError(
                args.parser,
                "config requests no time-series outputs; add inversion or "
                "entropies to `outputs`",
            )
        _write_evolve_outputs(result, out_path, args.json_out)
        return EXIT_OK

    points = sweep(config, threads=args.threads)
    worst = EXIT_OK
    for point in points:
        target = _sweep_file_name(out_path, point.parameter, point.value)
        if point.error is not None:
            print(
                f"error at {point.parameter} = {point.value}: {point.error}",
                file=sys.stderr,
            )
            worst = max(worst, exit_code_for(point.error))
            continue
        json_target = (
            _sweep_file_name(Path(args.json_out), point.parameter, point.value)
            if args.json_out
            else None
        )
        _write_evolve_outputs(point.result, target, json_target)
    return worst


def cmd_selftest(args) -> int:
    from .selftest import list_checks, run_selftest

    if args.list_only:
        for name in list_checks():
            print(name)
        return EXIT_OK
    results = run_selftest(quick=args.quick)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  [{r.seconds:6.2f}s]  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def cmd_report(args) -> int:
    from .plotting import render_raster_figure, render_series_figure

    _check_threads(args.parser, args.threads)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = load_preset(args.preset)
    result = run(config, threads=args.threads)
    written = []
    if result.raster is not None:
        data_path = out_dir / f"{args.preset}.dat"
        with open(data_path, "w") as fh:
            write_raster_matrix(result.raster, fh, _state_label(config))
        written.append(data_path)
        written.append(
            render_raster_figure(
                result.raster,
                out_dir / f"{args.preset}.png",
                f"quadrature distribution ({args.preset})",
            )
        )
    if result.series is not None:
        csv_path = out_dir / f"{args.preset}.csv"
        csv_path.write_text(format_series_csv(result.series))
        manifest_path = out_dir / f"{args.preset}.manifest.json"
        manifest_path.write_text(
            json.dumps(result.manifest.to_dict(include_volatile=True), indent=2)
            + "\n"
        )
        written.extend([csv_path, manifest_path])
        written.append(
            render_series_figure(
                result.series,
                out_dir / f"{args.preset}.png",
                f"joint evolution ({args.preset})",
            )
        )
    for path in written:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    if getattr(args, "command", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.handler(args)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())

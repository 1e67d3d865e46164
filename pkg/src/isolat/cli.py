"""Command-line front end.

``isolat solve FILE`` isolates the real roots of one system and renders a
text or JSON report.  ``isolat bench [DIR]`` runs a directory of systems
(default: the vendored benchmark suite) and emits a CSV or JSON table.

Exit codes for ``solve``: 0 success, 1 input/parse failure, 2 when any
candidate zero could not be verified, 3 when an expected count mismatches
(checked before the unverified condition).
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .homotopy import RootsFileError, TrackerConfig, load_zeros
from .isolate import real_root_isolate
from .parser import ParseError, parse_system
from .poly import NonSquareSystemError
from .report import (
    bench_error_row,
    bench_row,
    render_bench_csv,
    render_bench_json,
    render_bench_text,
    render_json,
    render_text,
)

_BENCHMARK_DIR = Path(__file__).parent / "benchmarks"


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    tau: float = 1e-10
    roots_file: Optional[str] = None
    seed: int = 0
    output_format: str = "text"
    expected_real: Optional[int] = None
    expected_total: Optional[int] = None
    phase_timing: bool = False


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if not (cfg.tau > 0.0 and math.isfinite(cfg.tau)):
        print(f"isolat: tau must be positive and finite, got {cfg.tau}", file=err)
        return 1
    try:
        text = Path(cfg.input_path).read_text()
    except OSError as exc:
        print(f"isolat: cannot read {cfg.input_path}: {exc}", file=err)
        return 1
    try:
        system = parse_system(text)
    except (ParseError, NonSquareSystemError) as exc:
        print(f"isolat: {cfg.input_path}: {exc}", file=err)
        return 1

    zeros = None
    if cfg.roots_file is not None:
        try:
            zeros = load_zeros(cfg.roots_file, system.nvars, system)
        except OSError as exc:
            print(f"isolat: cannot read {cfg.roots_file}: {exc}", file=err)
            return 1
        except RootsFileError as exc:
            print(f"isolat: {cfg.roots_file}: {exc}", file=err)
            return 1

    report = real_root_isolate(
        system,
        zeros=zeros,
        tau=cfg.tau,
        cfg=TrackerConfig.from_seed(cfg.seed),
    )

    if cfg.output_format == "json":
        out.write(render_json(report, system, cfg.phase_timing))
    else:
        out.write(render_text(report, system, cfg.phase_timing))

    if cfg.expected_real is not None and report.nreal != cfg.expected_real:
        print(
            f"isolat: expected {cfg.expected_real} real roots, found {report.nreal}",
            file=err,
        )
        return 3
    if cfg.expected_total is not None and report.total_candidates != cfg.expected_total:
        print(
            f"isolat: expected {cfg.expected_total} zeros in total, "
            f"found {report.total_candidates}",
            file=err,
        )
        return 3
    if report.unverified:
        print(
            f"isolat: {len(report.unverified)} candidate(s) left unverified",
            file=err,
        )
        return 2
    return 0


def bench(
    suite_dir: Optional[str] = None,
    output_format: str = "csv",
    seed: int = 0,
    tau: float = 1e-10,
    out=None,
    err=None,
) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    directory = Path(suite_dir) if suite_dir is not None else _BENCHMARK_DIR
    files = sorted(directory.glob("*.txt"))
    if not files:
        print(f"isolat: no .txt systems found in {directory}", file=err)
        return 1
    rows = []
    for path in files:
        name = path.stem
        try:
            system = parse_system(path.read_text())
            paths = math.prod(system.total_degrees())
            report = real_root_isolate(
                system, tau=tau, cfg=TrackerConfig.from_seed(seed)
            )
            rows.append(bench_row(name, report, paths))
            print(
                f"{name}: total {report.total_candidates}, real {report.nreal}, "
                f"filtered {report.rejected_nonreal}, "
                f"unverified {len(report.unverified)}",
                file=err,
            )
        except Exception as exc:  # per-system failure; keep the suite going
            rows.append(bench_error_row(name, f"{type(exc).__name__}: {exc}"))
            print(f"{name}: failed ({type(exc).__name__}: {exc})", file=err)
    print(render_bench_text(rows), file=err)
    if output_format == "json":
        out.write(render_bench_json(rows))
    else:
        out.write(render_bench_csv(rows))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isolat",
        description="Certified real-root isolation for square polynomial systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="isolate the real roots of one system")
    solve.add_argument("file", help="input file, one polynomial per line")
    solve.add_argument("--tau", type=float, default=1e-10, metavar="T",
                       help="target box radius (default 1e-10)")
    solve.add_argument("--roots-file", metavar="F",
                       help="skip tracking; read approximate zeros from F")
    solve.add_argument("--seed", type=int, default=0, help="tracker seed (default 0)")
    solve.add_argument("--format", choices=("text", "json"), default="text")
    solve.add_argument("--expected-real", type=int, metavar="N",
                       help="exit 3 unless exactly N real roots are found")
    solve.add_argument("--expected-total", type=int, metavar="N",
                       help="exit 3 unless the tracker finds N zeros in total")
    solve.add_argument("--phase-timing", action="store_true",
                       help="include wall-clock phase times in the report")

    bench_cmd = sub.add_parser("bench", help="run a directory of benchmark systems")
    bench_cmd.add_argument("dir", nargs="?", default=None,
                           help="directory of .txt systems (default: vendored suite)")
    bench_cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    bench_cmd.add_argument("--seed", type=int, default=0)
    bench_cmd.add_argument("--tau", type=float, default=1e-10)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "solve":
        cfg = RunConfig(
            input_path=args.file,
            tau=args.tau,
            roots_file=args.roots_file,
            seed=args.seed,
            output_format=args.format,
            expected_real=args.expected_real,
            expected_total=args.expected_total,
            phase_timing=args.phase_timing,
        )
        return run(cfg)
    return bench(args.dir, args.format, args.seed, args.tau)


if __name__ == "__main__":
    sys.exit(main())

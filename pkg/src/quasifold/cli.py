"""Command line front end: ``quasifold --input problem.cfg``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import parse_config
from .pipeline import ExitCode, exit_code_for, run_pipeline


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = _count(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quasifold",
        description="Reduce a simple polytope to its quotient space, classify it, and sample its moment image.",
    )
    p.add_argument("--input", required=True, help="problem description file")
    p.add_argument("--samples", type=_count, help="number of moment-image samples (overrides the file)")
    p.add_argument("--seed", type=_seed, help="sampling seed (overrides the file)")
    p.add_argument("--tolerance", type=float, help="float residual tolerance (overrides the file)")
    p.add_argument("--emit-samples", metavar="PATH", help="write sampled moment values as CSV")
    p.add_argument("--report", default="stdout", metavar="PATH", help="report destination (default stdout)")
    p.add_argument("--faces", choices=("vertices", "all"), default="vertices",
                   help="faces listed in the isotropy section")
    p.add_argument("--workers", type=_count, default=1, help="sampling threads")
    return p


def _write(path: str, text: str) -> None:
    if path in ("-", "stdout"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.input).read_text(encoding="utf-8"))
    except Exception as exc:
        code = exit_code_for(exc)
        if code is ExitCode.INTERNAL:
            raise
        print(f"quasifold: {type(exc).__name__}: {exc}", file=sys.stderr)
        return int(code)

    overrides = {
        k: v for k, v in (
            ("samples", args.samples),
            ("seed", args.seed),
            ("tolerance", args.tolerance),
            ("emit_samples", args.emit_samples),
        ) if v is not None
    }
    cfg = dataclasses.replace(cfg, **overrides)

    report = run_pipeline(cfg, faces=args.faces, workers=args.workers)
    try:
        _write(args.report, report.render())
        if cfg.emit_samples and report.samples is not None:
            _write(cfg.emit_samples, report.samples_csv())
    except OSError as exc:
        print(f"quasifold: {exc}", file=sys.stderr)
        return int(ExitCode.IO)
    if report.exit_code:
        diag = report.sections.get("diagnostics", {})
        msg = diag.get("message", report.sections["status"])
        print(f"quasifold: {report.sections['status']}: {msg}", file=sys.stderr)
    return int(report.exit_code)


if __name__ == "__main__":
    sys.exit(main())

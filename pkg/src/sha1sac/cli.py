"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 validation failure,
5 data error (short input corpus, empty or inconsistent bundle).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import reports, statistics, vectors
from .bundle import BundleError, load_bundle, save_bundle
from .runner import RunConfig, SourceExhausted, run_experiment

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_DATA = 5

log = logging.getLogger("sha1sac")


class UsageError(Exception):
    pass


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hexadecimal: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text}")
    return value


def _rounds(text: str) -> tuple[int, int]:
    try:
        return reports.parse_rounds(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError("range must have LO < HI")
    return lo, hi


def cmd_sample_size(args) -> int:
    n = statistics.sample_size(statistics.SampleSizeParams(args.confidence, args.moe))
    print(n)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        report = vectors.validate(args.vectors)
    except (vectors.VectorFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in report.results:
        if args.verbose or not r.passed:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {r.vector.source}#{r.vector.index} len={len(r.vector.message)} "
                  f"expected={r.vector.digest} actual={r.actual}")
    for path in report.empty_files:
        print(f"FAIL {path}: no vectors", file=sys.stderr)
    passed = sum(r.passed for r in report.results)
    if not report.results:
        print("FAIL: no vectors were run", file=sys.stderr)
    print(f"{passed}/{len(report.results)} vectors passed")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_run(args) -> int:
    config = RunConfig(
        sample_count=args.samples,
        out_dir=args.out,
        inputs=tuple(args.input or ()),
        seed=args.seed,
        worker_count=args.workers,
        round_floor=args.round_floor,
    )
    started = time.perf_counter()
    try:
        bundle = run_experiment(config)
    except SourceExhausted as exc:
        print(f"error: partial run: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    save_bundle(bundle, args.out)
    print(f"{bundle.matrix.samples} samples, {bundle.matrix.trials} trials -> {args.out} "
          f"({time.perf_counter() - started:.1f}s)", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    bundle = None
    if args.kind != "toy":
        if args.source is None:
            raise UsageError(f"report {args.kind} needs --from DIR")
        try:
            bundle = load_bundle(args.source)
        except BundleError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        text = reports.render(
            args.kind,
            bundle,
            rounds=args.rounds,
            buckets=args.buckets,
            value_range=args.range,
            per_round=args.per_round,
            round_floor=args.round_floor,
            max_points=None if args.qq_points == 0 else args.qq_points,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    out = args.out
    if out is None:
        out = "-" if bundle is None else str(Path(args.source) / "reports" / reports.default_filename(args.kind, args.per_round))
    if out == "-":
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sha1sac", description="Strict avalanche analysis of the SHA-1 compression function.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", help="samples needed for a margin of error at a confidence level")
    p.add_argument("--confidence", type=_fraction, default=0.99)
    p.add_argument("--moe", type=_fraction, default=0.01, help="margin of error")
    p.set_defaults(func=cmd_sample_size)

    p = sub.add_parser("validate", help="check SHA-1 against the NIST byte-oriented vectors")
    p.add_argument("--vectors", type=Path, default=None, help="directory holding SHA1ShortMsg.rsp and SHA1LongMsg.rsp")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="trace samples and accumulate flip counts")
    p.add_argument("--samples", type=_positive, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", nargs="+", metavar="FILE", help="raw binary corpus files, read in order")
    src.add_argument("--seed", type=_seed, help="hex seed for the built-in deterministic generator")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--round-floor", type=int, choices=range(1, 81), default=24, metavar="R")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="emit plot-ready data from a result bundle")
    p.add_argument("kind", choices=reports.KINDS)
    p.add_argument("--from", dest="source", type=Path)
    p.add_argument("--rounds", type=_rounds, default=None, help="1-based inclusive range, e.g. 24..80")
    p.add_argument("--out", default=None, help="output file, '-' for stdout")
    p.add_argument("--buckets", type=_positive, default=None)
    p.add_argument("--range", type=_range, default=None, help="histogram value range LO..HI")
    p.add_argument("--per-round", action="store_true", help="per-round histogram variant")
    p.add_argument("--round-floor", type=int, choices=range(1, 81), default=None, metavar="R")
    p.add_argument("--qq-points", type=int, default=1000, help="ranks per Q-Q series (0 = all)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); nothing left to report.
        sys.stderr.close()
        return EXIT_OK
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

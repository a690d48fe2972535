"""Command-line front end.

Exit status: 0 success, 1 a property violation, 2 usage error, 3 resource
guard abort.  ``TRICOLLATZ_OUTPUT`` and ``TRICOLLATZ_JOBS`` override the
default output path and worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import IO, Iterator, Sequence

from . import analysis, formats
from .diophantine import PrecisionGuardError, prefix_target, record_pairs, steering_pairs
from .maps import DEFAULT_MAX_STEPS, orbit
from .triadic import digits_base3, floor_scale, log3_floor, parse_triadic

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_INTERRUPTED = 130

ENV_OUTPUT = "TRICOLLATZ_OUTPUT"
ENV_JOBS = "TRICOLLATZ_JOBS"


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text}")
    return v


def _psi(text: str) -> int:
    v = _positive(text)
    if v < 2:
        raise argparse.ArgumentTypeError("psi must be >= 2")
    return v


def default_jobs() -> int:
    env = os.environ.get(ENV_JOBS)
    if env:
        return _positive(env)
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None,
                        help=f"output file (default: ${ENV_OUTPUT} or stdout)")

    parser = argparse.ArgumentParser(
        prog="tricollatz",
        description="Exact rescaled Collatz orbits, base-3 windows and 3^k/2^n approximations.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("orbit", parents=[common], help="Col2 orbit with exact q and c per step")
    p.add_argument("a0", type=_positive)
    p.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)

    p = sub.add_parser("prefix-count", parents=[common], help="steps whose leading base-3 digits spell psi")
    p.add_argument("a0", type=_positive)
    p.add_argument("psi", type=_psi)
    p.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)

    p = sub.add_parser("coverage", parents=[common], help="bin the rescaled values c over a seed range")
    p.add_argument("--seed-lo", type=_positive, default=2)
    p.add_argument("--seed-hi", type=_positive, default=10**5)
    p.add_argument("--bins", type=_positive, default=200)
    p.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)
    p.add_argument("--jobs", type=_positive, default=None)

    p = sub.add_parser("approx-records", parents=[common], help="record pairs of frac(k log2 3)")
    p.add_argument("--kmax", type=_positive, default=50)

    p = sub.add_parser("approx-steer", parents=[common], help="steering pairs for prefix targets")
    p.add_argument("psi", type=_psi, nargs="+")
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--kmax", type=_positive, default=5000)

    p = sub.add_parser("verify", parents=[common], help="run every property harness")
    p.add_argument("--trials", type=_nonneg, default=1000)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive, default=None)

    p = sub.add_parser("describe", parents=[common], help="digits and windows of a triadic rational")
    p.add_argument("value", help='e.g. "17/3^3" or "2.1_3"')
    p.add_argument("--scale", type=int, action="append", default=None,
                   help="window exponent k for [3^k b]; repeatable")
    return parser


@contextmanager
def _open_output(path: str | None) -> Iterator[IO[str]]:
    path = path or os.environ.get(ENV_OUTPUT)
    if not path or path == "-":
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _pool_map(jobs: int, fn, items: list) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *it) for it in items]
        return [f.result() for f in futures]


def _seed_chunks(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    total = hi - lo + 1
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [(s, min(hi, s + step - 1)) for s in range(lo, hi + 1, step)]


def run_coverage(seed_lo: int, seed_hi: int, bins: int, max_steps: int, jobs: int) -> analysis.CoverageReport:
    """Coverage over a seed range, partitioned across ``jobs`` worker processes."""
    chunks = _seed_chunks(seed_lo, seed_hi, 1 if jobs <= 1 else jobs * 4)
    parts = _pool_map(jobs, analysis.coverage, [(a, b, bins, max_steps) for a, b in chunks])
    return analysis.merge_coverage(parts)


def run_verify(seed: int, trials: int, jobs: int) -> list[analysis.VerificationReport]:
    names = list(analysis.PROPERTIES)
    return _pool_map(jobs, analysis.run_property, [(n, seed, trials) for n in names])


def _cmd_orbit(args: argparse.Namespace, out: IO[str]) -> int:
    result = orbit(args.a0, args.max_steps)
    em = formats.Emitter(out, args.format, formats.ORBIT_FIELDS)
    try:
        em.rows(formats.orbit_row(r) for r in result.records)
    except KeyboardInterrupt:
        em.truncate()
        raise
    em.close()
    if not result.reached_one:
        print(f"orbit of {args.a0} did not reach 1 within {args.max_steps} steps", file=sys.stderr)
    return EXIT_OK


def _cmd_prefix(args: argparse.Namespace, out: IO[str]) -> int:
    rep = analysis.prefix_hits(args.a0, args.psi, args.max_steps)
    if args.format == "json":
        formats.dump_json(rep.to_dict(), out)
    else:
        em = formats.Emitter(out, "csv", formats.PREFIX_FIELDS)
        em.row(formats.prefix_row(rep))
        em.close()
    if not rep.reached_one:
        print(f"orbit of {args.a0} did not reach 1 within {args.max_steps} steps", file=sys.stderr)
    return EXIT_OK


def _cmd_coverage(args: argparse.Namespace, out: IO[str]) -> int:
    if args.seed_hi < args.seed_lo:
        raise UsageError("--seed-hi must be >= --seed-lo")
    jobs = args.jobs or default_jobs()
    rep = run_coverage(args.seed_lo, args.seed_hi, args.bins, args.max_steps, jobs)
    if args.format == "json":
        formats.dump_json(rep.to_dict(), out)
    else:
        em = formats.Emitter(out, "csv", formats.COVERAGE_FIELDS)
        em.row(rep.to_dict())
        em.close()
    return EXIT_OK


def _cmd_records(args: argparse.Namespace, out: IO[str]) -> int:
    em = formats.Emitter(out, args.format, formats.RECORD_FIELDS)
    em.rows(formats.record_row(p) for p in record_pairs(args.kmax))
    em.close()
    return EXIT_OK


def _cmd_steer(args: argparse.Namespace, out: IO[str]) -> int:
    em = formats.Emitter(out, args.format, formats.STEER_FIELDS)
    short = []
    try:
        for psi in args.psi:
            target = prefix_target(psi)
            pairs = steering_pairs(target, args.count, args.kmax)
            if len(pairs) < args.count:
                short.append(psi)
            em.rows(formats.steer_row(target, p) for p in pairs)
    except KeyboardInterrupt:
        em.truncate()
        raise
    em.close()
    for psi in short:
        print(f"psi={psi}: fewer than {args.count} pairs with k <= {args.kmax}", file=sys.stderr)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, out: IO[str]) -> int:
    jobs = args.jobs or default_jobs()
    reports = run_verify(args.rng_seed, args.trials, jobs)
    if args.format == "json":
        formats.dump_json([r.to_dict() for r in reports], out)
    else:
        em = formats.Emitter(out, "csv", formats.VERIFY_FIELDS)
        em.rows(formats.verify_row(r) for r in reports)
        em.close()
    for r in reports:
        print(r.to_text(), file=sys.stderr)
    return EXIT_OK if analysis.all_pass(reports) else EXIT_VIOLATION


def _cmd_describe(args: argparse.Namespace, out: IO[str]) -> int:
    try:
        b = parse_triadic(args.value)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    info: dict[str, object] = {
        "value": str(b),
        "base3": b.to_base3_string(),
        "decimal(display-only)": b.to_decimal(12),
    }
    if b.numerator:
        info["log3_floor"] = log3_floor(b)
        info["digits"] = [[pos, d] for pos, d in digits_base3(b).pairs()]
    for k in args.scale or []:
        info[f"window[{k}]"] = floor_scale(b, k)
    if args.format == "json":
        formats.dump_json(info, out)
    else:
        em = formats.Emitter(out, "csv", ("field", "value"))
        em.rows({"field": k, "value": json.dumps(v) if isinstance(v, list) else v} for k, v in info.items())
        em.close()
    return EXIT_OK


_COMMANDS = {
    "orbit": _cmd_orbit,
    "prefix-count": _cmd_prefix,
    "coverage": _cmd_coverage,
    "approx-records": _cmd_records,
    "approx-steer": _cmd_steer,
    "verify": _cmd_verify,
    "describe": _cmd_describe,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with _open_output(args.output) as out:
            return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionGuardError as exc:
        print(f"{parser.prog}: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except KeyboardInterrupt:
        print(f"{parser.prog}: interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())

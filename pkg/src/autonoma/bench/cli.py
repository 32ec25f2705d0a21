"""The `bench` command line: run workloads and verify the retry analytics.

    bench run --n 500 --seed 42 --fail 0.1 --retries 2 --shape chain-3 \
              --format json|table [--stall 0.05] [--latency uniform:5:50] \
              [--workers 4]
    bench verify [--n 500] [--seed 42]

`verify` exits nonzero when any grid cell deviates from its analytic
expectation beyond the 99% binomial interval.
"""

from __future__ import annotations

import argparse
import sys
import time

from ..supervisor import ExecutionPolicy
from .faults import FaultModel
from .report import report_metrics
from .runner import run_benchmark
from .verify import run_verify
from .workload import generate_workload


def _parse_latency(raw: str) -> tuple[str, int, int]:
    parts = raw.split(":")
    if parts[0] == "fixed" and len(parts) == 2:
        ms = int(parts[1])
        return "fixed", ms, ms
    if parts[0] == "uniform" and len(parts) == 3:
        return "uniform", int(parts[1]), int(parts[2])
    raise argparse.ArgumentTypeError("latency must be fixed:<ms> or uniform:<lo>:<hi>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a synthetic workload and print metrics")
    run.add_argument("--n", type=int, default=500)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--fail", type=float, default=0.0, help="per-attempt failure probability")
    run.add_argument("--stall", type=float, default=0.0, help="per-attempt stall probability")
    run.add_argument("--retries", type=int, default=2)
    run.add_argument("--shape", default="single",
                     help="single | chain-<k> | diamond | random | mixed")
    run.add_argument("--format", choices=("table", "json"), default="table")
    run.add_argument("--latency", type=_parse_latency, default=("fixed", 10, 10))
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--no-filter-fuzz", action="store_true",
                     help="skip the 10k-address security filter row")

    verify = sub.add_parser("verify", help="check measured vs analytic completion")
    verify.add_argument("--n", type=int, default=500)
    verify.add_argument("--seed", type=int, default=42)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "run":
        kind, lo, hi = args.latency
        model = FaultModel(
            per_attempt_failure_prob=args.fail,
            stall_prob=args.stall,
            latency_kind=kind,
            latency_lo_ms=lo,
            latency_hi_ms=hi,
            seed=args.seed,
        )
        policy = ExecutionPolicy(retry_limit=args.retries)
        started = time.monotonic()
        workload = generate_workload(args.seed, args.n, args.shape)
        metrics, _ = run_benchmark(
            workload, model, policy,
            workers=args.workers,
            with_filter_fuzz=not args.no_filter_fuzz,
        )
        elapsed = time.monotonic() - started
        print(report_metrics(metrics, args.format))
        if args.format == "table":
            print(f"wall time: {elapsed:.2f} s for {args.n} workflows")
        return 0

    ok, results = run_verify(n=args.n, seed=args.seed)
    for cell in results:
        print(cell.describe())
    print("verify:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

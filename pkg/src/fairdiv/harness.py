"""Command-line harness: instance generation, solving, verification, benchmarks.

Subcommands: gen, solve, verify, bench, serve.  Exit codes: 0 success,
1 verification failure, 2 usage error.  Benchmarks emit one CSV row per
trial; everything except runtime_ms is a pure function of (seed, config).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .geometry import as_ratio, ratio_str
from .preferences import (
    KIND_CONVEX3,
    KIND_LPS_LOWER,
    KIND_LPS_UPPER,
    KINDS,
    Oracle,
    generate_profile,
    profile_from_json,
    profile_to_json,
    validate_covering,
)
from .solvers import (
    FairDivisionCertificate,
    solve_cake,
    solve_convex3,
    solve_rent,
)
from .verifier import check_eps_fair, grid_search_fair

log = logging.getLogger("fairdiv")

CSV_COLUMNS = [
    "kind", "d", "n", "epsilon", "seed",
    "q_binary", "q_minimal", "q_selection", "bound",
    "baseline", "verified", "runtime_ms",
]


@dataclass
class ExperimentRecord:
    kind: str
    d: int
    n: int
    epsilon: str
    seed: int
    q_binary: int
    q_minimal: int
    q_selection: int
    bound: int
    baseline: Optional[int]
    verified: bool
    runtime_ms: int
    error: Optional[str] = None

    def to_csv_row(self) -> list:
        return [
            self.kind, self.d, self.n, self.epsilon, self.seed,
            self.q_binary, self.q_minimal, self.q_selection, self.bound,
            "" if self.baseline is None else self.baseline,
            str(self.verified).lower(), self.runtime_ms,
        ]

    @staticmethod
    def from_csv_row(row: list) -> "ExperimentRecord":
        return ExperimentRecord(
            kind=row[0], d=int(row[1]), n=int(row[2]), epsilon=row[3], seed=int(row[4]),
            q_binary=int(row[5]), q_minimal=int(row[6]), q_selection=int(row[7]),
            bound=int(row[8]), baseline=int(row[9]) if row[9] != "" else None,
            verified=row[10] == "true", runtime_ms=int(row[11]),
        )


def _solve_for(kind: str, profile, epsilon: Fraction) -> FairDivisionCertificate:
    if kind == KIND_LPS_LOWER:
        return solve_cake(Oracle(profile), epsilon)
    if kind == KIND_LPS_UPPER:
        return solve_rent(Oracle(profile), epsilon)
    if kind == KIND_CONVEX3:
        return solve_convex3(Oracle(profile), epsilon)
    raise ValueError(f"unknown kind {kind!r}")


def run_experiment(kind: str, d: int, n_list: list[int], trials: int, seed: int,
                   with_baseline: bool = False) -> list[ExperimentRecord]:
    """Seeded sweep over grid resolutions; every record is verified.

    Instance seeds are seed * 100003 + trial, so the same instances are
    re-solved at every n in the sweep.  Solver errors become records with an
    error field rather than aborting the sweep.
    """
    if kind == KIND_CONVEX3 and d != 3:
        raise ValueError("convex3 requires d = 3")
    records = []
    for n in sorted(n_list):
        eps = Fraction(1, n)
        for trial in range(trials):
            instance_seed = seed * 100003 + trial
            profile = generate_profile(kind, d, instance_seed)
            started = time.perf_counter()
            try:
                cert = _solve_for(kind, profile, eps)
                runtime_ms = int((time.perf_counter() - started) * 1000)
                mesh = eps / 10 if kind == KIND_CONVEX3 else None
                verdict = check_eps_fair(profile, cert.point, eps, cert.sigma, mesh=mesh)
                baseline = grid_search_fair(profile, eps).evaluations if with_baseline else None
                records.append(ExperimentRecord(
                    kind=kind, d=d, n=n, epsilon=ratio_str(eps), seed=instance_seed,
                    q_binary=cert.binary_queries, q_minimal=cert.minimal_queries,
                    q_selection=cert.selection_queries, bound=cert.bound,
                    baseline=baseline, verified=verdict.status == "fair",
                    runtime_ms=runtime_ms,
                ))
            except Exception as exc:
                runtime_ms = int((time.perf_counter() - started) * 1000)
                log.error("trial failed (kind=%s d=%d n=%d seed=%d): %s",
                          kind, d, n, instance_seed, exc)
                records.append(ExperimentRecord(
                    kind=kind, d=d, n=n, epsilon=ratio_str(eps), seed=instance_seed,
                    q_binary=0, q_minimal=0, q_selection=0, bound=0,
                    baseline=None, verified=False, runtime_ms=runtime_ms,
                    error=str(exc),
                ))
    return records


def write_csv(records: list[ExperimentRecord], path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.to_csv_row())


def read_csv(path: str) -> list[ExperimentRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV columns {header}")
        return [ExperimentRecord.from_csv_row(row) for row in reader]


def _setup_logging():
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("FAIRDIV_LOG", "error").lower(), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parse_epsilon(text: str) -> Fraction:
    eps = as_ratio(text)
    if eps <= 0:
        raise argparse.ArgumentTypeError("epsilon must be a positive rational like 1/64")
    return eps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv",
                                     description="fair-division solvers with query accounting")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a preference-profile instance")
    p_gen.add_argument("--kind", choices=KINDS, required=True)
    p_gen.add_argument("--d", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("--kind", choices=KINDS, required=True)
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--epsilon", type=_parse_epsilon, required=True,
                         help='rational string such as "1/64"')
    p_solve.add_argument("--out", default=None, help="certificate JSON path")

    p_verify = sub.add_parser("verify", help="check a certificate against an instance")
    p_verify.add_argument("--instance", required=True)
    p_verify.add_argument("--certificate", required=True)

    p_bench = sub.add_parser("bench", help="benchmark query counts against the bounds")
    p_bench.add_argument("--kind", choices=KINDS, required=True)
    p_bench.add_argument("--d", type=int, required=True)
    p_bench.add_argument("--n-list", default="16,64,256",
                         help="comma-separated grid resolutions")
    p_bench.add_argument("--trials", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--baseline", action="store_true",
                         help="also run the grid-search baseline")

    p_serve = sub.add_parser("serve", help="start the interactive session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8400)
    p_serve.add_argument("--total-rent", default=None,
                         help="default total rent for sessions that omit it")
    p_serve.add_argument("--log-dir", default=None, help="append-only session logs")
    return parser


def cli(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "gen":
        profile = generate_profile(args.kind, args.d, args.seed)
        report = validate_covering(profile, n_check=32 if args.kind == KIND_CONVEX3 else 64)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(profile_to_json(profile), fh, indent=2)
            fh.write("\n")
        log.info("wrote %s (covering=%s)", args.out, report.covering)
        return 0

    if args.command == "solve":
        with open(args.instance, encoding="utf-8") as fh:
            profile = profile_from_json(json.load(fh))
        if profile.kind != args.kind:
            print(f"instance kind {profile.kind} does not match --kind {args.kind}",
                  file=sys.stderr)
            return 2
        cert = _solve_for(profile.kind, profile, args.epsilon)
        mesh = args.epsilon / 10 if profile.kind == KIND_CONVEX3 else None
        verdict = check_eps_fair(profile, cert.point, args.epsilon, cert.sigma, mesh=mesh)
        cert.verified = verdict.status == "fair"
        payload = cert.to_json()
        text = json.dumps(payload, indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        print(text)
        return 0 if cert.verified else 1

    if args.command == "verify":
        with open(args.instance, encoding="utf-8") as fh:
            profile = profile_from_json(json.load(fh))
        with open(args.certificate, encoding="utf-8") as fh:
            cert = FairDivisionCertificate.from_json(json.load(fh))
        mesh = cert.epsilon / 10 if profile.kind == KIND_CONVEX3 else None
        verdict = check_eps_fair(profile, cert.point, cert.epsilon, cert.sigma, mesh=mesh)
        print(json.dumps(verdict.to_json(), indent=2))
        return 0 if verdict.fair else 1

    if args.command == "bench":
        try:
            n_list = [int(v) for v in args.n_list.split(",") if v.strip()]
        except ValueError:
            print(f"bad --n-list {args.n_list!r}", file=sys.stderr)
            return 2
        records = run_experiment(args.kind, args.d, n_list, args.trials, args.seed,
                                 with_baseline=args.baseline)
        write_csv(records, args.out)
        failures = [r for r in records if not r.verified]
        print(f"wrote {len(records)} records to {args.out}; "
              f"{len(records) - len(failures)} verified", file=sys.stderr)
        return 0 if not failures else 1

    if args.command == "serve":
        import uvicorn

        from .session import SessionStore, create_app

        store = SessionStore(log_dir=None if args.log_dir is None else Path(args.log_dir))
        app = create_app(store=store, default_total_rent=args.total_rent)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return 0

    parser.error(f"unknown command {args.command}")
    return 2


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Sweep query counts against the three theoretical bounds and emit CSVs.

Usage:
    python scripts/bench_bounds.py --out-dir results [--trials 50] [--baseline]

Produces one CSV per solver family plus a conformance summary on stdout.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from fairdiv.harness import run_experiment, write_csv

SWEEPS = [
    ("lps_lower", 2, [2, 8, 64, 1024]),
    ("lps_lower", 3, [2, 8, 64, 1024]),
    ("lps_lower", 4, [2, 8, 64, 1024]),
    ("lps_upper", 2, [2, 8, 64, 1024]),
    ("lps_upper", 3, [2, 8, 64, 1024]),
    ("lps_upper", 4, [2, 8, 64, 1024]),
    ("convex3", 3, [8, 64, 256]),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--baseline", action="store_true")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"{'kind':<10} {'d':>2} {'n':>5} {'max used':>9} {'bound':>6} {'verified':>9}")
    for kind, d, n_list in SWEEPS:
        records = run_experiment(kind, d, n_list, args.trials, args.seed,
                                 with_baseline=args.baseline)
        path = out_dir / f"bench_{kind}_d{d}.csv"
        write_csv(records, str(path))
        for n in n_list:
            rows = [r for r in records if r.n == n]
            used = max(r.q_binary + r.q_minimal - r.q_selection for r in rows)
            bound = rows[0].bound
            ok = all(r.verified for r in rows)
            print(f"{kind:<10} {d:>2} {n:>5} {used:>9} {bound:>6} {str(ok):>9}")
    print(f"CSVs written to {out_dir}/")


if __name__ == "__main__":
    main()

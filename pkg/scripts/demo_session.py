#!/usr/bin/env python3
"""Play one simulated rental-harmony session and print the transcript.

Usage:
    python scripts/demo_session.py [--d 3] [--rent 3000] [--epsilon 1/64] [--seed 7]
"""
from __future__ import annotations

import argparse

from fairdiv.session import create_session


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=3)
    parser.add_argument("--rent", default=3000)
    parser.add_argument("--epsilon", default="1/64")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    session = create_session(args.d, args.rent, args.epsilon,
                             mode="simulated", seed=args.seed)
    state = session.state()
    print(f"session {session.id}: {len(state['history'])} answers "
          f"(cap {state['max_answers']})")
    for step, entry in enumerate(state["history"], start=1):
        prices = ", ".join(f"room {p['room']}: {p['amount']}" for p in entry["prices"])
        kind = "selection" if entry["selection"] else "locate"
        print(f"  {step:>3}. [{kind}] tenant {entry['agent']} at ({prices}) "
              f"-> room {entry['room']}")
    print("assignment:")
    for row in state["assignment"]:
        print(f"  tenant {row['tenant']} takes room {row['room']} at {row['rent']}")
    print(f"verified by ground truth: {state['verified']}")


if __name__ == "__main__":
    main()

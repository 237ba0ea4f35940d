#!/usr/bin/env python3
"""Run the paired self-imitation vs REINFORCE experiment and dump JSON.

Ten paired seeds on the 8-token, horizon-8 Markov-chain environment, 2000
updates per arm; see seqot.sil_rl.experiments for the protocol. Takes a few
minutes on one core.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from seqot.sil_rl import paired_comparison


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--seeds", type=int, default=10, help="number of paired seeds (0..N-1)")
    parser.add_argument("--out", default=None, help="write the summary JSON here instead of stdout")
    args = parser.parse_args()

    started = time.perf_counter()
    summary = paired_comparison(steps=args.steps, seeds=range(args.seeds))
    summary["runtime_seconds"] = round(time.perf_counter() - started, 1)
    rendered = json.dumps(summary, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    print(
        f"self-imitation >= REINFORCE in {summary['wins']}/{summary['total']} pairs",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())

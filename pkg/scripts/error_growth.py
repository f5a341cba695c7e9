#!/usr/bin/env python3
"""Worst-case relative decode error versus system size at fixed redundancy,
for the inner-split pair (matdot vs orthomatdot) or the outer-split pair
(polynomial vs orthopoly).  Five seeded input realizations per point,
sampled survivor subsets, Gaussian inputs.
"""

import argparse
import sys

from chebcoded.sim_harness import error_growth_plan, sweep, write_records

PAIRS = {
    "inner": ("matdot", "orthomatdot"),
    "outer": ("polynomial", "orthopoly"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pair", choices=tuple(PAIRS), default="inner")
    parser.add_argument("--workers", type=int, nargs="+", default=[20, 40, 60, 80])
    parser.add_argument("--redundancy", type=int, default=3)
    parser.add_argument("--dims", type=int, default=120)
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args(argv)

    plan = error_growth_plan(
        schemes=PAIRS[args.pair],
        workers=tuple(args.workers),
        delta=args.redundancy,
        dims=(args.dims, args.dims, args.dims),
        samples=args.samples,
        seed=args.seed,
    )
    write_records(sweep(plan, threads=args.threads), args.out, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())

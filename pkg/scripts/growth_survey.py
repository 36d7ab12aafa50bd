"""Grow random seeds until they reach a segment and summarise the traces.

    python3 scripts/growth_survey.py --branch eps --param 0.05 --seeds 50
"""

import argparse
import random
import statistics

from conemix.growth_engine import grow_until_segment, random_seed
from conemix.map_family import BWD, FWD, Params


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--branch", choices=("eta", "eps"), default="eps")
    parser.add_argument("--param", type=float, default=0.05)
    parser.add_argument("--seeds", type=int, default=50)
    parser.add_argument("--rng", type=int, default=0)
    args = parser.parse_args()
    params = Params(args.branch, args.param)
    rng = random.Random(args.rng)
    for direction in (BWD, FWD):
        steps, factors, terminals = [], [], {}
        for _ in range(args.seeds):
            trace = grow_until_segment(random_seed(rng, direction, params), direction, params)
            steps.append(len(trace.steps))
            factors += [s.factor for s in trace.steps]
            terminals[trace.terminal] = terminals.get(trace.terminal, 0) + 1
        print(f"{direction}: delta={trace.delta:.4f} steps mean={statistics.mean(steps):.2f} max={max(steps)} "
              f"min factor={min(factors, default=float('nan')):.4f} terminals={terminals}")


if __name__ == "__main__":
    main()

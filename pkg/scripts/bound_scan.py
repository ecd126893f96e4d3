"""Log-space union bound over m, its crossing point, and the exact m=32 tail."""

import argparse
import math

from rwlab.analysis import (
    bound_scan,
    crossing_point,
    exact_split_tail,
    hoeffding_tail_bound,
    monte_carlo_split_tail,
    pair_hit_probability,
)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--m-max", type=int, default=2 ** 15)
    p.add_argument("--mc-trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    scan = bound_scan(args.m_max)
    star = crossing_point(scan)
    peak = max(scan, key=lambda t: t.total_log)
    print(f"scan 32..{args.m_max}: peak total_log={peak.total_log:.3f} at m={peak.m}, crossing m*={star}")
    for t in scan:
        if t.m in (32, 64, 128, 256, 512) or t.m == star or t.m == scan[-1].m:
            print(f"  m={t.m:>6} total_log={t.total_log:14.4f}")

    exact = exact_split_tail(32)
    print(f"m=32 exact tail={exact} ({float(exact):.6f}) vs exp(-1/4)={math.exp(-0.25):.6f}")
    print(f"per-pair hit probability={pair_hit_probability(32)}")
    for m in (32, 64, 128, 256):
        est = monte_carlo_split_tail(m, args.mc_trials, seed=args.seed)
        print(f"  m={m:>4} mc={est.estimate:.5f} [{est.ci_low:.5f}, {est.ci_high:.5f}] "
              f"hoeffding={hoeffding_tail_bound(m):.5f}")


if __name__ == "__main__":
    main()

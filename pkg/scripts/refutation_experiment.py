"""Refutation rate of budget-capped strategies on adversary instances.

    python3 scripts/refutation_experiment.py --n 33 65 97 129 --trials 100

Set RWLAB_THREADS to spread (n, trial) cells over worker processes.
"""

import argparse
import time

from rwlab.experiment import STRATEGIES, ExperimentConfig, run_experiment, summarize


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, nargs="+", default=[33, 65, 97, 129])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=["contiguous", "even-paz"])
    args = p.parse_args()

    cfg = ExperimentConfig(n_values=tuple(args.n), trials=args.trials, seed=args.seed,
                           strategies=tuple(args.strategies))
    t0 = time.perf_counter()
    rows = summarize(run_experiment(cfg))
    print(f"{'n':>5} {'m':>5} {'budget':>6}  {'strategy':<16} {'refuted':>8} {'rate':>6} {'queries':>8}")
    for r in rows:
        print(f"{r.n:>5} {r.m:>5} {r.budget:>6}  {r.strategy:<16} {r.refuted:>4}/{r.trials:<3} "
              f"{r.rate:>6.3f} {r.mean_queries:>8.1f}")
    print(f"seed={cfg.seed} elapsed={time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()

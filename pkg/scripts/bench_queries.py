"""Query counts of the proportional protocols for uniform agents over a doubling sweep."""

import argparse

from rwlab.experiment import bench, doubling


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n-max", type=int, default=1024)
    p.add_argument("--algorithms", nargs="+", default=["even-paz", "last-diminisher"])
    args = p.parse_args()

    rows = bench(args.algorithms, doubling(2, args.n_max))
    print(f"{'algorithm':<16} {'n':>6} {'queries':>9} {'q/(n lg n)':>11} {'q/n^2':>8}")
    for r in rows:
        print(f"{r.algorithm:<16} {r.n:>6} {r.queries:>9} {r.per_n_log_n:>11.4f} {r.per_n_squared:>8.4f}")
    for name in args.algorithms:
        mine = [r for r in rows if r.algorithm == name]
        print(f"{name}: max q/(n lg n)={max(r.per_n_log_n for r in mine):.4f} "
              f"max q/n^2={max(r.per_n_squared for r in mine):.4f}")


if __name__ == "__main__":
    main()

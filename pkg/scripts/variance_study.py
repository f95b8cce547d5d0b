"""Spread of the TP/G-difference estimate with repeated versus independent deals.

    python scripts/variance_study.py --a name=noisy,noise=0.05 --b name=noisy,noise=0.15
"""
import argparse

import numpy as np

from skatlab.tournament import run_tournament


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", default="name=noisy,noise=0.05")
    ap.add_argument("--b", default="name=noisy,noise=0.15")
    ap.add_argument("--repeats", type=int, default=50)
    ap.add_argument("--matches", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = {}
    for dup in (True, False):
        diffs = [run_tournament(args.a, args.b, args.matches, seed=args.seed + r,
                                duplicate=dup).tpg_diff for r in range(args.repeats)]
        rows["identical" if dup else "independent"] = np.array(diffs)
    print(f"{args.a} vs {args.b}, {args.repeats} x {args.matches} matches")
    for name, d in rows.items():
        print(f"{name:<12} mean {d.mean():+8.3f}  variance {d.var(ddof=1):8.3f}")
    ratio = rows["identical"].var(ddof=1) / rows["independent"].var(ddof=1)
    print(f"variance ratio identical/independent {ratio:.3f}")


if __name__ == "__main__":
    main()

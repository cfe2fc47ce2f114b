"""Rounds until no isolated vertex: list strategy against the adaptive comparator."""

import argparse
from pathlib import Path

from semirandom import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[2**10, 2**12, 2**14, 2**16])
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    a = p.parse_args()
    res = ex.isolated_vertex_experiment(a.n, a.trials, a.seed)
    a.out.mkdir(exist_ok=True)
    ex.emit(res, "json", a.out / "isolated.json")
    ex.emit(res, "svg", a.out / "isolated.svg", y="nonadaptive_median_ratio")
    for pt in res.points:
        print(f"n={pt['n']:>6}  non-adaptive median/n {pt['nonadaptive_median_ratio']:.3f}  "
              f"adaptive median/n {pt['adaptive_median_ratio']:.3f}")


if __name__ == "__main__":
    main()

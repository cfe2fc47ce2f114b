"""Offline minimum rounds for star forests, compared with 0.1 n ln(delta)."""

import argparse
from pathlib import Path

from semirandom import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--delta", type=int, nargs="+", default=[4, 8, 16, 32])
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    a = p.parse_args()
    res = ex.star_forest_threshold_experiment(a.delta, a.n, a.trials, a.seed)
    a.out.mkdir(exist_ok=True)
    ex.emit(res, "json", a.out / "star_forest.json")
    ex.emit(res, "svg", a.out / "star_forest.svg", y="median_ratio")
    for pt in res.points:
        print(f"delta={pt['delta']:>3}  above threshold {pt['fraction_above']:.2f}  "
              f"median/(n ln delta) {pt['median_ratio']:.3f}")


if __name__ == "__main__":
    main()

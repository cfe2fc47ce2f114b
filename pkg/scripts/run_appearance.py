"""How many vertices are offered at most d times within the appearance budget."""

import argparse
from pathlib import Path

from semirandom import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, nargs="+", default=[5, 10, 20, 40])
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    a = p.parse_args()
    a.out.mkdir(exist_ok=True)
    for d in a.d:
        res = ex.appearance_count_experiment(d, a.alpha, a.n, a.trials, a.seed)
        ex.emit(res, "json", a.out / f"appearance_d{d}.json")
        pt = res.points[0]
        print(f"d={d:>3}  trials under alpha*n {pt['fraction_below']:.3f}  "
              f"under-offered median {pt['under_median']}  p95 {pt['under_p95']}")


if __name__ == "__main__":
    main()

"""Success rate and rounds of the spanning Builder as n grows (random regular targets)."""

import argparse
from pathlib import Path

from semirandom import experiments as ex
from semirandom.graph_core import TargetSpec


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--delta", type=int, default=8)
    p.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000, 2000])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-per-n", type=float, default=None, help="default 10 * delta")
    p.add_argument("--out", type=Path, default=Path("results"))
    a = p.parse_args()
    per_n = a.budget_per_n or 10 * a.delta
    config = ex.TrialConfig(TargetSpec("random_regular", a.n[0], delta=a.delta), ex.StrategyConfig("spanning"))
    res = ex.sweep(config, "n", a.n, a.trials, a.seed, budget_per_n=per_n)
    a.out.mkdir(exist_ok=True)
    stem = a.out / f"spanning_d{a.delta}"
    ex.emit(res, "json", stem.with_suffix(".json"))
    ex.emit(res, "csv", stem.with_suffix(".csv"))
    ex.emit(res, "svg", stem.with_suffix(".svg"), y="success_rate")
    for pt in res.points:
        med = pt["median"]
        print(f"n={pt['n']:>6}  success {pt['success_rate']:.2f}  median rounds/n "
              f"{med / pt['n'] if med else float('nan'):.2f}")


if __name__ == "__main__":
    main()

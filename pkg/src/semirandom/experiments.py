"""Seeded Monte Carlo trials, sweeps and the three empirical studies."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.stats import binomtest

from .adaptive import (
    GreedyForestBuilder,
    HighDegreeBuilder,
    OfflineBuilder,
    PhaseSchedule,
    SetupError,
    fallback_vertex,
    forest_strategy,
    offline_min_rounds,
    spanning_strategy,
)
from .graph_core import Graph, TargetSpec, balanced_orientation, generate
from .nonadaptive import NonAdaptiveBuilder, hamilton_lists, isolated_lists, kr_factor_lists, recommended_budget
from .process_engine import RunResult, derive_seed, draw_sequence, run
from .verify import count_isolated, extract_hamilton, extract_kr_factor, is_embedding

STRATEGIES = ("spanning", "high_delta", "forest", "greedy_forest", "offline", "hamilton", "kr_factor")
LIST_STRATEGIES = ("hamilton", "kr_factor")


@dataclass
class StrategyConfig:
    strategy: str = "spanning"
    alpha: float | None = None
    epsilon: float | None = None
    degeneracy: int | None = None
    ell0: int | None = None
    ell1: int | None = None
    max_phase2_iterations: int = 40
    r: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    def to_dict(self) -> dict:
        d = {"strategy": self.strategy, "alpha": self.alpha, "epsilon": self.epsilon,
             "degeneracy": self.degeneracy, "r": self.r,
             "budgets": {"ell0": self.ell0, "ell1": self.ell1,
                         "max_phase2_iterations": self.max_phase2_iterations}}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StrategyConfig":
        b = d.get("budgets") or {}
        return cls(d.get("strategy", "spanning"), d.get("alpha"), d.get("epsilon"), d.get("degeneracy"),
                   b.get("ell0"), b.get("ell1"), b.get("max_phase2_iterations", 40), d.get("r"))


@dataclass
class TrialConfig:
    """One experimental condition.

    ``target_seed=None`` draws a fresh target per trial (keyed off the trial
    seed); otherwise every trial shares the same target.
    """

    target: TargetSpec
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    budget: int | None = None
    target_seed: int | None = 0

    def to_dict(self) -> dict:
        return {"target": self.target.to_dict(), "strategy": self.strategy.to_dict(),
                "budget": self.budget, "target_seed": self.target_seed}

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        return cls(TargetSpec.from_dict(d["target"]), StrategyConfig.from_dict(d["strategy"]),
                   d.get("budget"), d.get("target_seed", 0))


@dataclass
class TrialStats:
    seed: int
    success: bool
    rounds_to_success: int | None
    per_phase_rounds: dict[str, int]
    final_isolated: int
    wall_time: float
    rounds_used: int = 0
    error: str | None = None


@dataclass
class Trial:
    """Everything a single run produced (kept out of the stats for memory)."""

    stats: TrialStats
    target: Graph
    result: RunResult | None
    certificate: dict | None
    builder: Any = None


# ---------------------------------------------------------------------------
# single trials


def make_builder(h: Graph, sc: StrategyConfig, n: int, budget: int, seed: int):
    """Builder for ``sc`` plus an explicit offer list where one is needed."""
    name = sc.strategy
    if name == "spanning":
        sched = PhaseSchedule.for_target(h, sc.degeneracy, sc.alpha, sc.ell0, sc.ell1, sc.max_phase2_iterations)
        return spanning_strategy(h, sched, sc.degeneracy), None
    if name == "high_delta":
        return HighDegreeBuilder(h, 0.5 if sc.epsilon is None else sc.epsilon), None
    if name == "forest":
        sched = None
        if sc.ell0 is not None or sc.ell1 is not None:
            alpha = sc.alpha
            sched = PhaseSchedule.for_target(h, 1, alpha, sc.ell0, sc.ell1, sc.max_phase2_iterations)
        return forest_strategy(h, sc.alpha, sched), None
    if name == "greedy_forest":
        return GreedyForestBuilder(h), None
    if name == "offline":
        seq = draw_sequence(n, budget, seed)
        return OfflineBuilder(h, seq), seq.tolist()
    if name == "hamilton":
        return NonAdaptiveBuilder(hamilton_lists(n)[0]), None
    if name == "kr_factor":
        return NonAdaptiveBuilder(kr_factor_lists(n, list_r(h, sc))[0]), None
    raise ValueError(name)


def list_r(h: Graph, sc: StrategyConfig) -> int:
    return sc.r if sc.r is not None else h.max_degree() + 1


def default_budget(h: Graph, sc: StrategyConfig) -> int:
    n, delta = h.n, max(h.max_degree(), 1)
    name = sc.strategy
    if name == "high_delta":
        eps = 0.5 if sc.epsilon is None else sc.epsilon
        return math.ceil((1 + eps) * h.max_degree() * n / 2)
    if name == "forest":
        return 12 * n
    if name == "greedy_forest":
        return math.ceil(2 * n * math.log(max(n, 2)))
    if name == "hamilton":
        return recommended_budget("hamilton", n)
    if name == "kr_factor":
        return recommended_budget("kr_factor", n, list_r(h, sc))
    return 10 * delta * n


def target_for(config: TrialConfig, seed: int) -> Graph:
    ts = config.target_seed if config.target_seed is not None else derive_seed(seed, 1)
    return generate(config.target, ts)


def run_trial(config: TrialConfig, seed: int, *, record: bool = False, keep: bool = False) -> Trial:
    """Run one seeded trial and certify its outcome independently."""
    t0 = time.perf_counter()
    h = target_for(config, seed)
    n = h.n
    sc = config.strategy
    budget = config.budget if config.budget is not None else default_budget(h, sc)
    error = None
    res = None
    cert = None
    builder = None
    try:
        builder, offers = make_builder(h, sc, n, budget, seed)
        res = run(builder, n, budget, seed, offers=offers, record=record,
                  config={"target": config.target.to_dict(), **sc.to_dict()})
        cert = certify(h, sc, builder, res)
        error = getattr(builder, "gave_up", None)
    except SetupError as exc:
        error = str(exc)
    success = cert is not None
    stats = TrialStats(
        seed=seed,
        success=success,
        rounds_to_success=(res.first_success_round if sc.strategy not in LIST_STRATEGIES else res.rounds_used)
        if success else None,
        per_phase_rounds=dict(res.phase_rounds) if res else {},
        final_isolated=count_isolated(res.graph) if res else n,
        wall_time=time.perf_counter() - t0,
        rounds_used=res.rounds_used if res else 0,
        error=error,
    )
    return Trial(stats, h, res if keep or record else None, cert, builder if keep else None)


def certify(h: Graph, sc: StrategyConfig, builder, res: RunResult) -> dict | None:
    """Certificate for a successful run, checked by the verify module, else None."""
    if sc.strategy == "hamilton":
        c = extract_hamilton(res.graph, builder.family.partition.blocks)
        return c.to_dict() if c else None
    if sc.strategy == "kr_factor":
        c = extract_kr_factor(res.graph, builder.family.partition.blocks, list_r(h, sc))
        return c.to_dict() if c else None
    if not res.success:
        return None
    phi = builder.embedding()
    if not is_embedding(res.graph, phi, h):
        return None
    return {"type": "embedding", "phi": phi}


def _trial_stats(args) -> TrialStats:
    config, seed = args
    return run_trial(config, seed).stats


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get("SEMIRAND_WORKERS", "1")))


def run_trials(config: TrialConfig, trials: int, base_seed: int, workers: int | None = None) -> list[TrialStats]:
    """Trial ``i`` uses ``derive_seed(base_seed, i)``; results come back in index order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(config, derive_seed(base_seed, i)) for i in range(trials)]
    w = worker_count(workers)
    if w == 1:
        return [_trial_stats(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(_trial_stats, jobs))


# ---------------------------------------------------------------------------
# aggregation


def binomial_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=level)
    return float(ci.low), float(ci.high)


def summarize(values: Sequence[float]) -> dict:
    if not values:
        return {"median": None, "mean": None, "p95": None}
    arr = np.asarray(values, dtype=float)
    return {"median": float(np.median(arr)), "mean": float(arr.mean()),
            "p95": float(np.quantile(arr, 0.95))}


def aggregate(stats: Sequence[TrialStats]) -> dict:
    k = sum(s.success for s in stats)
    lo, hi = binomial_interval(k, len(stats))
    rounds = [s.rounds_to_success for s in stats if s.success]
    return {"trials": len(stats), "successes": k, "success_rate": k / len(stats),
            "ci_low": lo, "ci_high": hi, **summarize(rounds)}


@dataclass
class SweepResult:
    axis: str
    values: list
    points: list[dict]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.points):
            raise ValueError("one point per axis value")

    def to_dict(self) -> dict:
        return {"axis": self.axis, "values": list(self.values), "points": self.points, "meta": self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepResult":
        return cls(d["axis"], d["values"], d["points"], d.get("meta", {}))


def sweep(config: TrialConfig, axis: str, values: Sequence, trials: int, base_seed: int,
          workers: int | None = None, budget_per_n: float | None = None) -> SweepResult:
    """Vary ``n``, ``delta`` or ``r`` of the target (or ``budget``) and aggregate each point.

    ``budget_per_n`` rescales the budget to ``ceil(budget_per_n * n)`` at every point.
    """
    points = []
    for j, v in enumerate(values):
        if axis in ("n", "delta", "r"):
            spec = TargetSpec(**{**config.target.to_dict(), axis: v})
            budget = math.ceil(budget_per_n * spec.n) if budget_per_n else config.budget
            cfg = TrialConfig(spec, config.strategy, budget, config.target_seed)
        elif axis == "budget":
            cfg = TrialConfig(config.target, config.strategy, int(v), config.target_seed)
        else:
            raise ValueError(f"cannot sweep over {axis!r}")
        stats = run_trials(cfg, trials, derive_seed(base_seed, j), workers)
        points.append({axis: v, **aggregate(stats)})
    return SweepResult(axis, list(values), points, {"config": config.to_dict(), "base_seed": base_seed})


# ---------------------------------------------------------------------------
# isolated vertices


class IsolatedCoverBuilder:
    """Adaptive comparator: join the offered vertex to the lowest isolated vertex."""

    phase = "cover"

    def __init__(self, n: int):
        self.iso = bytearray(b"\x01" * n)
        self.isolated = n
        self.low = 0

    def _lowest_other(self, w: int) -> int:
        iso = self.iso
        while self.low < len(iso) and not iso[self.low]:
            self.low += 1
        v = self.low
        if v == w:
            v += 1
            while v < len(iso) and not iso[v]:
                v += 1
        return v if v < len(iso) else -1

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        u = self._lowest_other(offered)
        if u < 0:
            u = fallback_vertex(offered, g)
        for v in (offered, u):
            if self.iso[v]:
                self.iso[v] = 0
                self.isolated -= 1
        return u

    def is_done(self, g: Graph) -> bool:
        return self.isolated == 0


def rounds_until_no_isolated(builder, n: int, seed: int, cap: int) -> int | None:
    res = run(builder, n, cap, seed, record=False)
    return res.first_success_round


def isolated_vertex_experiment(n_values: Sequence[int], trials: int, base_seed: int,
                               cap_factor: float = 60.0) -> SweepResult:
    if list(n_values) != sorted(n_values):
        raise ValueError("n_values must be ascending")
    points = []
    for j, n in enumerate(n_values):
        cap = math.ceil(cap_factor * n)
        non, ada = [], []
        for i in range(trials):
            seed = derive_seed(base_seed, j, i)
            fam, _ = isolated_lists(n)
            non.append(rounds_until_no_isolated(NonAdaptiveBuilder(fam, "isolated"), n, seed, cap))
            ada.append(rounds_until_no_isolated(IsolatedCoverBuilder(n), n, seed, cap))
        done_non = [x for x in non if x is not None]
        points.append({
            "n": n,
            "trials": trials,
            "nonadaptive_rounds": non,
            "adaptive_rounds": ada,
            "nonadaptive_median_ratio": statistics.median(done_non) / n if done_non else None,
            "adaptive_median_ratio": statistics.median(ada) / n,
            "adaptive_max_ratio": max(ada) / n,
            "nonadaptive_unfinished": len(non) - len(done_non),
        })
    return SweepResult("n", list(n_values), points, {"base_seed": base_seed, "cap_factor": cap_factor})


# ---------------------------------------------------------------------------
# star forests, offline


def offline_rounds_for(h: Graph, n: int, seed: int, orientation=None, start: int | None = None) -> int:
    """Offline minimum on the stream of ``seed``, lengthening the draw until feasible."""
    length = start or 4 * n
    while True:
        m = offline_min_rounds(h, draw_sequence(n, length, seed), orientation)
        if m is not None:
            return m
        length *= 2


def star_forest_threshold_experiment(delta_values: Sequence[int], n: int, trials: int,
                                     base_seed: int, factor: float = 0.1) -> SweepResult:
    if any(d < 2 for d in delta_values):
        raise ValueError("delta must be >= 2 (ln 1 = 0)")
    if n < (max(delta_values) + 1) ** 2:
        raise ValueError("need n >= (delta+1)^2")
    points = []
    for j, delta in enumerate(delta_values):
        h = generate(TargetSpec("star_forest", n, delta=delta))
        orientation, _ = balanced_orientation(h)
        threshold = factor * n * math.log(delta)
        ms = []
        for i in range(trials):
            m = offline_rounds_for(h, n, derive_seed(base_seed, j, i), orientation)
            if m < h.edge_count:
                raise AssertionError(f"offline minimum {m} below the edge count {h.edge_count}")
            ms.append(m)
        above = sum(m > threshold for m in ms)
        points.append({"delta": delta, "trials": trials, "rounds": ms, "threshold": threshold,
                       "fraction_above": above / trials,
                       "median_ratio": statistics.median(ms) / (n * math.log(delta))})
    return SweepResult("delta", list(delta_values), points, {"n": n, "base_seed": base_seed})


# ---------------------------------------------------------------------------
# appearance counts


def appearance_budget_rounds(d: int, alpha: float, n: int) -> int:
    return math.ceil((d + math.sqrt(6 * d * math.log(1 / alpha))) * n)


def appearance_count_experiment(d: int, alpha: float, n: int, trials: int, base_seed: int) -> SweepResult:
    if d < 1 or not 0 < alpha < 0.1:
        raise ValueError("need d >= 1 and alpha in (0, 0.1)")
    length = appearance_budget_rounds(d, alpha, n)
    under = []
    for i in range(trials):
        counts = np.bincount(draw_sequence(n, length, derive_seed(base_seed, i)), minlength=n)
        under.append(int(np.count_nonzero(counts <= d)))
    good = sum(u < alpha * n for u in under)
    point = {"d": d, "alpha": alpha, "n": n, "rounds": length, "trials": trials, "under_offered": under,
             "fraction_below": good / trials, **{f"under_{k}": v for k, v in summarize(under).items()}}
    return SweepResult("d", [d], [point], {"base_seed": base_seed})


# ---------------------------------------------------------------------------
# output


def _scalar_columns(points: list[dict]) -> list[str]:
    cols: list[str] = []
    for p in points:
        for k, v in p.items():
            if k not in cols and not isinstance(v, (list, dict)):
                cols.append(k)
    return cols


def to_csv(result: SweepResult) -> str:
    cols = _scalar_columns(result.points)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for p in result.points:
        w.writerow(["" if p.get(c) is None else p.get(c) for c in cols])
    return buf.getvalue()


def to_svg(result: SweepResult, y: str | Sequence[str] | None = None) -> str:
    """Minimal self-contained line plot, viewBox 960x540."""
    cols = [c for c in _scalar_columns(result.points) if c != result.axis]
    keys = [y] if isinstance(y, str) else list(y or [])
    if not keys:
        keys = [next(c for c in cols if any(isinstance(p.get(c), (int, float)) for p in result.points))]
    W, H, L, R, T, B = 960, 540, 80, 30, 40, 60
    xs = [float(v) for v in result.values]
    series = {k: [p.get(k) for p in result.points] for k in keys}
    ys = [v for vals in series.values() for v in vals if v is not None]
    x0, x1 = min(xs), max(xs)
    y0, y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(v):
        return H - B - (v - y0) / (y1 - y0) * (H - T - B)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{H - B}" stroke="black"/>',
           f'<line x1="{L}" y1="{T}" x2="{L}" y2="{H - B}" stroke="black"/>']
    for x in xs:
        out.append(f'<line x1="{px(x):.1f}" y1="{H - B}" x2="{px(x):.1f}" y2="{H - B + 5}" stroke="black"/>')
        out.append(f'<text x="{px(x):.1f}" y="{H - B + 20}" font-size="12" text-anchor="middle">{x:g}</text>')
    for i in range(5):
        v = y0 + (y1 - y0) * i / 4
        out.append(f'<line x1="{L - 5}" y1="{py(v):.1f}" x2="{L}" y2="{py(v):.1f}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{py(v) + 4:.1f}" font-size="12" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{(L + W - R) / 2}" y="{H - 15}" font-size="14" text-anchor="middle">{result.axis}</text>')
    for j, (k, vals) in enumerate(series.items()):
        pts = " ".join(f"{px(x):.1f},{py(v):.1f}" for x, v in zip(xs, vals) if v is not None)
        c = colors[j % len(colors)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{L + 10}" y="{T + 16 * j}" font-size="13" fill="{c}">{k}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(result: SweepResult, fmt: str, path, y: str | Sequence[str] | None = None) -> Path:
    if not result.points:
        raise ValueError("nothing to emit: empty sweep")
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    elif fmt in ("svg", "svg_lineplot"):
        text = to_svg(result, y)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    p = Path(path)
    p.write_text(text, encoding="utf-8")
    return p


def stats_to_dict(stats: Sequence[TrialStats], with_time: bool = False) -> list[dict]:
    out = []
    for s in stats:
        d = asdict(s)
        if not with_time:
            d.pop("wall_time")
        out.append(d)
    return out

import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from scipy.stats import poisson

from semirandom import experiments as ex
from semirandom.graph_core import TargetSpec
from semirandom.process_engine import derive_seed


def cfg(kind="cycle", n=60, strategy="spanning", budget=None, **kw):
    return ex.TrialConfig(TargetSpec(kind, n, **kw), ex.StrategyConfig(strategy), budget)


def test_edgeless_target_single_trial():
    stats = ex.run_trials(cfg("path", 1), 1, base_seed=0)
    assert len(stats) == 1 and stats[0].success and stats[0].rounds_to_success == 0


def test_run_trials_deterministic_and_index_keyed():
    c = cfg("random_regular", 80, delta=4)
    a = ex.run_trials(c, 4, 5)
    b = ex.run_trials(c, 4, 5)
    assert ex.stats_to_dict(a) == ex.stats_to_dict(b)
    assert [s.seed for s in a] == [derive_seed(5, i) for i in range(4)]
    # trial i does not depend on how many trials run
    assert ex.stats_to_dict(ex.run_trials(c, 2, 5)) == ex.stats_to_dict(a[:2])


def test_parallel_matches_serial():
    c = cfg("cycle", 50)
    assert ex.stats_to_dict(ex.run_trials(c, 3, 1, workers=2)) == ex.stats_to_dict(ex.run_trials(c, 3, 1, workers=1))


def test_stats_invariants():
    for s in ex.run_trials(cfg("random_regular", 100, delta=6), 5, 2):
        assert sum(s.per_phase_rounds.values()) == s.rounds_used
        if s.success:
            assert s.rounds_to_success <= 10 * 6 * 100


def test_setup_failure_is_recorded_not_raised():
    c = ex.TrialConfig(TargetSpec("random_regular", 100, delta=8), ex.StrategyConfig("spanning", ell0=100))
    (s,) = ex.run_trials(c, 1, 0)
    assert not s.success and s.error


@pytest.mark.parametrize("strategy,kind,extra", [
    ("high_delta", "random_regular", {"delta": 6}),
    ("forest", "star_forest", {"delta": 4}),
    ("greedy_forest", "random_forest", {"delta": 3}),
    ("offline", "random_regular", {"delta": 4}),
    ("hamilton", "cycle", {}),
    ("kr_factor", "kr_factor", {"r": 3}),
])
def test_every_strategy_runs_and_certifies(strategy, kind, extra):
    c = ex.TrialConfig(TargetSpec(kind, 120, **extra), ex.StrategyConfig(strategy, epsilon=1.0),
                       budget=None if strategy != "high_delta" else 40 * 120)
    t = ex.run_trial(c, 3, keep=True)
    assert t.stats.success, t.stats
    assert t.certificate is not None


def test_binomial_interval():
    lo, hi = ex.binomial_interval(90, 100)
    assert lo < 0.9 < hi and 0.8 < lo and hi < 0.96
    assert ex.binomial_interval(0, 10)[0] == 0.0


def test_aggregate_quantiles_from_full_list():
    stats = [ex.TrialStats(i, True, r, {}, 0, 0.0) for i, r in enumerate([10, 20, 30, 40])]
    stats.append(ex.TrialStats(9, False, None, {}, 0, 0.0))
    a = ex.aggregate(stats)
    assert a["successes"] == 4 and a["trials"] == 5 and a["median"] == 25 and a["mean"] == 25
    assert a["p95"] == pytest.approx(np.quantile([10, 20, 30, 40], 0.95))


def test_sweep_points_and_budget_scaling():
    res = ex.sweep(cfg("cycle", 30), "n", [30, 40], 2, 0, budget_per_n=50)
    assert res.values == [30, 40] and [p["trials"] for p in res.points] == [2, 2]
    with pytest.raises(ValueError):
        ex.sweep(cfg(), "colour", [1], 1, 0)


# -- isolated vertices


def test_isolated_two_vertices_one_round():
    res = ex.isolated_vertex_experiment([2], 3, 0)
    p = res.points[0]
    assert p["nonadaptive_rounds"] == [1, 1, 1] and p["adaptive_rounds"] == [1, 1, 1]


def test_adaptive_comparator_never_exceeds_n():
    res = ex.isolated_vertex_experiment([16, 100, 512], 5, 1)
    for p in res.points:
        assert max(p["adaptive_rounds"]) <= p["n"]
        assert p["nonadaptive_unfinished"] == 0


def test_isolated_requires_ascending():
    with pytest.raises(ValueError):
        ex.isolated_vertex_experiment([100, 10], 1, 0)


# -- star forests


def test_star_forest_structural_bound_and_guards():
    res = ex.star_forest_threshold_experiment([3, 5], 400, 4, 0)
    for p, d in zip(res.points, [3, 5]):
        edges = (400 // (d + 1)) * d
        assert min(p["rounds"]) >= edges >= 400 - 400 / (d + 1) - d
    with pytest.raises(ValueError):
        ex.star_forest_threshold_experiment([1], 400, 1, 0)
    with pytest.raises(ValueError):
        ex.star_forest_threshold_experiment([30], 400, 1, 0)


# -- appearance counts


def test_appearance_budget_value():
    assert ex.appearance_budget_rounds(20, 0.05, 1) == math.ceil(20 + math.sqrt(120 * math.log(20)))
    assert 38.9 < (20 + math.sqrt(120 * math.log(20))) < 39.0


def test_appearance_tiny_n_and_domain():
    res = ex.appearance_count_experiment(3, 0.05, 1, 5, 0)
    assert set(res.points[0]["under_offered"]) <= {0, 1}
    with pytest.raises(ValueError):
        ex.appearance_count_experiment(3, 0.5, 10, 1, 0)


def test_appearance_mean_matches_poisson_oracle():
    # under-offered count per trial ~ n * P(Bin(l, 1/n) <= d), close to Poisson
    d, alpha, n = 5, 0.05, 2000
    res = ex.appearance_count_experiment(d, alpha, n, 40, 3)
    length = res.points[0]["rounds"]
    expect = n * poisson.cdf(d, length / n)
    mean = res.points[0]["under_mean"]
    assert abs(mean - expect) < 0.15 * expect + 3


# -- emit


def three_points():
    return ex.SweepResult("n", [10, 20, 30], [{"n": v, "success_rate": v / 40, "rounds": [1, 2]} for v in (10, 20, 30)])


def test_emit_csv(tmp_path):
    p = ex.emit(three_points(), "csv", tmp_path / "a.csv")
    lines = p.read_text().splitlines()
    assert len(lines) == 4 and lines[0] == "n,success_rate"


def test_emit_json_round_trip(tmp_path):
    r = three_points()
    p = ex.emit(r, "json", tmp_path / "a.json")
    assert ex.SweepResult.from_dict(json.loads(p.read_text())) == r


def test_emit_svg(tmp_path):
    p = ex.emit(three_points(), "svg", tmp_path / "a.svg", y="success_rate")
    root = ET.fromstring(p.read_text())
    assert root.get("viewBox") == "0 0 960 540"
    assert root.findall("{http://www.w3.org/2000/svg}polyline")


def test_emit_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        ex.emit(ex.SweepResult("n", [], []), "csv", tmp_path / "x.csv")


def test_strategy_config_round_trip():
    s = ex.StrategyConfig("forest", alpha=0.1, ell0=5)
    assert ex.StrategyConfig.from_dict(s.to_dict()) == s
    c = cfg("random_regular", 20, delta=3)
    assert ex.TrialConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c
    with pytest.raises(ValueError):
        ex.StrategyConfig("telepathy")

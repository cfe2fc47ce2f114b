"""``semirand`` command line.

Exit codes: 0 success, 1 trial or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .graph_core import KINDS, GraphError, TargetSpec, generate, read_edge_list, write_edge_list
from .process_engine import Transcript, replay
from .verify import FactorCertificate, HamiltonCertificate, is_embedding


def parse_budget(text: str, n: int) -> int:
    """``"12x"`` means ``12 * n``; a plain integer is absolute."""
    t = text.strip().lower()
    try:
        value = math.ceil(float(t[:-1]) * n) if t.endswith("x") else int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def _target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", choices=KINDS, required=True, help="target graph family")
    p.add_argument("--n", type=int, default=0, help="number of vertices")
    p.add_argument("--delta", type=int, help="degree parameter (regular, star/random forest)")
    p.add_argument("--r", type=int, help="clique size for kr_factor")
    p.add_argument("--path", help="edge-list file for --target from_file")
    p.add_argument("--target-seed", type=int, default=0, help="seed for random targets")


def _strategy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=ex.STRATEGIES, default="spanning")
    p.add_argument("--alpha", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--degeneracy", type=int)
    p.add_argument("--ell0", type=int)
    p.add_argument("--ell1", type=int)
    p.add_argument("--max-phase2-iterations", type=int, default=40)
    p.add_argument("--list-r", type=int, help="clique size for the kr_factor list strategy")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semirand", description="Semi-random graph process simulator.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("generate", help="write a target graph as an edge list")
    _target_args(p)
    p.add_argument("--out", required=True, help="output edge-list path")

    p = sub.add_parser("run", help="play one seeded trial")
    _target_args(p)
    _strategy_args(p)
    p.add_argument("--budget", help="rounds, absolute or 'Nx' for N*n (default per strategy)")
    p.add_argument("--seed", type=int, help="offer-stream seed (drawn from entropy if omitted)")
    p.add_argument("--out", help="result JSON path (stdout if omitted)")
    p.add_argument("--transcript", help="write the JSONL transcript here")

    p = sub.add_parser("sweep", help="run an experiment")
    p.add_argument("--experiment", choices=("trials", "isolated", "star_forest", "appearance"), default="trials")
    _target_args_optional(p)
    _strategy_args(p)
    p.add_argument("--budget", help="rounds, absolute or 'Nx'")
    p.add_argument("--axis", choices=("n", "delta", "r", "budget"), default="n")
    p.add_argument("--values", type=float, nargs="+", help="axis values")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, help="base seed (drawn from entropy if omitted)")
    p.add_argument("--d", type=int, default=20, help="appearance threshold (appearance experiment)")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.add_argument("--y", help="aggregate plotted by --format svg")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--workers", type=int, help="worker processes (default SEMIRAND_WORKERS or 1)")
    p.add_argument("--large", action="store_true", help="allow n >= 2**16")

    p = sub.add_parser("offline", help="offline minimum number of rounds")
    _target_args(p)
    p.add_argument("--seed", type=int, help="offer-stream seed (drawn from entropy if omitted)")
    p.add_argument("--length", help="offer sequence length, absolute or 'Nx' (default 10x)")

    p = sub.add_parser("verify", help="re-check a certificate against a graph")
    p.add_argument("--graph", required=True, help="edge-list file of Builder's graph")
    p.add_argument("--certificate", required=True, help="certificate or run-result JSON")
    p.add_argument("--target-graph", help="target edge list (embedding certificates)")

    p = sub.add_parser("replay", help="rebuild a run from its transcript")
    p.add_argument("--transcript", required=True)
    p.add_argument("--result", help="run-result JSON whose certificate is re-checked")
    p.add_argument("--no-rerun", action="store_true", help="skip re-running the strategy")
    p.add_argument("--graph-out", help="write the rebuilt graph as an edge list")
    return parser


def _target_args_optional(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", choices=KINDS, default="cycle")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--delta", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--path")
    p.add_argument("--target-seed", type=int, default=0)


def _spec(a) -> TargetSpec:
    return TargetSpec(a.target, a.n, a.delta, a.r, a.path)


def _strategy(a) -> ex.StrategyConfig:
    return ex.StrategyConfig(a.strategy, a.alpha, a.epsilon, a.degeneracy, a.ell0, a.ell1,
                             a.max_phase2_iterations, a.list_r)


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    seed = int(np.random.SeedSequence().entropy % (1 << 63))
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def result_json(config: ex.TrialConfig, trial: ex.Trial, budget: int) -> dict:
    res = trial.result
    return {
        "config": config.to_dict(),
        "seed": trial.stats.seed,
        "budget": budget,
        "success": trial.stats.success,
        "rounds_used": trial.stats.rounds_used,
        "first_success_round": res.first_success_round if res else None,
        "phase_rounds": trial.stats.per_phase_rounds,
        "edges": res.graph.edge_count if res else 0,
        "final_isolated": trial.stats.final_isolated,
        "error": trial.stats.error,
        "certificate": trial.certificate,
        "wall_time": trial.stats.wall_time,
    }


def cmd_generate(a) -> int:
    write_edge_list(generate(_spec(a), a.target_seed), a.out)
    return 0


def execute_run(spec: TargetSpec, sc: ex.StrategyConfig, budget_text: str | None, seed: int,
                target_seed: int = 0) -> tuple[dict, ex.Trial]:
    h = generate(spec, target_seed)
    budget = parse_budget(budget_text, h.n) if budget_text else ex.default_budget(h, sc)
    config = ex.TrialConfig(spec, sc, budget, target_seed)
    trial = ex.run_trial(config, seed, record=True)
    trial.result.transcript.config.update({"budget": budget, "target_seed": target_seed})
    return result_json(config, trial, budget), trial


def cmd_run(a) -> int:
    seed = _seed(a.seed)
    out, trial = execute_run(_spec(a), _strategy(a), a.budget, seed, a.target_seed)
    if a.transcript:
        trial.result.transcript.save(a.transcript)
    _write(json.dumps(out, sort_keys=True, indent=2) + "\n", a.out)
    return 0 if out["success"] else 1


def cmd_sweep(a) -> int:
    seed = _seed(a.seed)
    biggest = max([a.n, *(a.values or [])]) if a.experiment != "star_forest" else a.n
    if biggest >= 2 ** 16 and not a.large:
        print("n >= 2**16 needs --large", file=sys.stderr)
        return 2
    values = [int(v) for v in a.values] if a.values else None
    if a.experiment == "isolated":
        result = ex.isolated_vertex_experiment(values or [2 ** 10, 2 ** 12], a.trials, seed)
    elif a.experiment == "star_forest":
        result = ex.star_forest_threshold_experiment(values or [a.delta or 16], a.n, a.trials, seed)
    elif a.experiment == "appearance":
        result = ex.appearance_count_experiment(a.d, a.alpha or 0.05, a.n, a.trials, seed)
    else:
        if not values:
            print("--values is required for a trials sweep", file=sys.stderr)
            return 2
        factor = None
        budget = None
        if a.budget and a.budget.lower().endswith("x"):
            factor = float(a.budget[:-1])
        elif a.budget:
            budget = parse_budget(a.budget, 1)
        config = ex.TrialConfig(_spec(a), _strategy(a), budget, a.target_seed)
        result = ex.sweep(config, a.axis, values, a.trials, seed, a.workers, budget_per_n=factor)
    if a.out:
        ex.emit(result, a.format, a.out, a.y)
    elif a.format == "json":
        sys.stdout.write(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    elif a.format == "csv":
        sys.stdout.write(ex.to_csv(result))
    else:
        sys.stdout.write(ex.to_svg(result, a.y))
    return 0


def cmd_offline(a) -> int:
    seed = _seed(a.seed)
    h = generate(_spec(a), a.target_seed)
    length = parse_budget(a.length or "10x", h.n)
    m = ex.offline_min_rounds(h, ex.draw_sequence(h.n, length, seed))
    print(json.dumps({"offline_min_rounds": m, "length": length, "n": h.n, "seed": seed}, sort_keys=True))
    return 0 if m is not None else 1


def check_certificate(g, cert: dict, target=None) -> bool:
    kind = cert.get("type")
    if kind == "hamilton":
        return HamiltonCertificate(list(cert["cycle"])).check(g)
    if kind == "kr_factor":
        parts = [list(p) for p in cert["parts"]]
        return bool(parts) and FactorCertificate(parts).check(g, len(parts[0]))
    if kind == "embedding":
        if target is None:
            raise ValueError("embedding certificates need the target graph")
        return is_embedding(g, cert["phi"], target)
    raise ValueError(f"unknown certificate type {kind!r}")


def _load_certificate(path: str) -> tuple[dict | None, dict]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "certificate" in data and "type" not in data:
        return data["certificate"], data
    return data, {}


def cmd_verify(a) -> int:
    g = read_edge_list(a.graph)
    cert, result = _load_certificate(a.certificate)
    if cert is None:
        print("no certificate to verify", file=sys.stderr)
        return 1
    target = None
    if a.target_graph:
        target = read_edge_list(a.target_graph)
    elif cert.get("type") == "embedding" and result.get("config"):
        c = ex.TrialConfig.from_dict(result["config"])
        target = generate(c.target, c.target_seed if c.target_seed is not None else 0)
    ok = check_certificate(g, cert, target)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_replay(a) -> int:
    t = Transcript.load(a.transcript)
    rebuilt = replay(t).graph
    cfg = t.config
    ok = True
    if not a.no_rerun and "target" in cfg:
        spec = TargetSpec.from_dict(cfg["target"])
        sc = ex.StrategyConfig.from_dict(cfg)
        h = generate(spec, cfg.get("target_seed", 0))
        builder, _ = ex.make_builder(h, sc, t.n, cfg.get("budget", len(t)), t.seed)
        try:
            ok = replay(t, builder).graph == rebuilt
        except ValueError as exc:
            print(f"replay diverged: {exc}", file=sys.stderr)
            ok = False
    if a.result:
        cert, result = _load_certificate(a.result)
        if cert is not None:
            target = None
            if cert.get("type") == "embedding":
                spec = TargetSpec.from_dict(cfg["target"])
                target = generate(spec, cfg.get("target_seed", 0))
            ok = ok and check_certificate(rebuilt, cert, target)
        if result:
            ok = ok and rebuilt.edge_count == result.get("edges")
    if a.graph_out:
        write_edge_list(rebuilt, a.graph_out)
    print(json.dumps({"rounds": len(t), "edges": rebuilt.edge_count, "consistent": ok}, sort_keys=True))
    return 0 if ok else 1


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "sweep": cmd_sweep, "offline": cmd_offline,
            "verify": cmd_verify, "replay": cmd_replay}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if a.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return COMMANDS[a.command](a)
    except (GraphError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"semirand: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``dpefe {run,sweep,bench-complexity,validate-grid}``."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import harness
from .gridworld import GridParseError, load_grid_file
from .model import GenerativeModel
from .oracles import bfs_distances
from .planner import PlanConfig, plan_backward


def _summary(records) -> str:
    rows = harness.aggregate(records)
    last = rows[-1]
    reached = sum(r.reached_goal for r in records)
    return (f"{len(records)} episodes, {reached} reached the goal; "
            f"final-episode median score {last[1]:.3f} (IQR {last[2]:.3f}..{last[3]:.3f})")


def cmd_run(args) -> int:
    cfg = harness.apply_env_seed(harness.load_config(args.config))
    out = args.out if args.out else cfg.out
    if args.out and not args.out.endswith(".csv"):
        out = f"{args.out.rstrip('/')}/{cfg.agent}.csv"
    records = harness.run_experiment(cfg, out)
    print(f"wrote {out}: {_summary(records)}")
    return 0


def cmd_sweep(args) -> int:
    cfg = harness.apply_env_seed(harness.load_config(args.config))
    values = [v for v in args.values.split(",") if v.strip()]
    rows = harness.sweep_hyperparameter(cfg, args.param, values, args.out or cfg.out)
    print("value,mean_final_score,median_final_score,q25,q75")
    for v, mean, med, q25, q75 in rows:
        print(f"{v},{mean:.4f},{med:.4f},{q25:.4f},{q75:.4f}")
    return 0


def cmd_bench(args) -> int:
    S, U, T = args.states, args.actions, args.horizon
    print("mode,evaluations,log10")
    for mode in ("dpefe", "aif_t1", "caif", "si"):
        n = harness.count_efe_evaluations(mode, S, U, T)
        print(f"{mode},{n},{harness.log10_int(n):.2f}")
    # instrumented counts from real planner runs on a random model
    rng = np.random.default_rng(0)
    A = rng.dirichlet(np.ones(S), size=S).T
    B = np.stack([rng.dirichlet(np.ones(S), size=S).T for _ in range(U)])
    model = GenerativeModel.from_matrices(A, B)
    model.set_goal_preference(0)
    for mode, horizon in (("dpefe", T), ("aif_t1", 2)):
        t0 = time.perf_counter()
        table = plan_backward(model, PlanConfig(horizon=horizon))
        ms = (time.perf_counter() - t0) * 1000
        expected = harness.count_efe_evaluations(mode, S, U, T)
        status = "ok" if table.evaluations == expected else "MISMATCH"
        print(f"# instrumented {mode}: {table.evaluations} ({status}, {ms:.1f} ms)")
    return 0


def cmd_validate(args) -> int:
    try:
        grid = load_grid_file(args.map)
    except (GridParseError, OSError) as err:
        print(f"invalid: {err}", file=sys.stderr)
        return 1
    dist = bfs_distances(grid, grid.goal_cell)
    valid = grid.valid_cells
    unreachable = [int(c) for c in valid if dist[c] < 0]
    print(f"{grid.width}x{grid.height}: {grid.num_cells} cells, {len(valid)} valid, "
          f"start {grid.coords(grid.start_cell)}, goal {grid.coords(grid.goal_cell)}, "
          f"timeout {grid.timeout}")
    print(f"start-to-goal distance {dist[grid.start_cell]}, "
          f"longest distance to goal {dist[valid].max()}")
    if unreachable:
        print(f"warning: {len(unreachable)} valid cells cannot reach the goal")
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpefe", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output CSV path or directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="repeat an experiment over values of one parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench-complexity", help="EFE evaluation counts per scheme")
    p.add_argument("--states", type=int, default=100)
    p.add_argument("--actions", type=int, default=4)
    p.add_argument("--horizon", type=int, default=30)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate-grid", help="parse a map and check connectivity")
    p.add_argument("map")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except harness.ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

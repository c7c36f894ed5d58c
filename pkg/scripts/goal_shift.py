"""Goal-shift adaptation: score per goal block for DPEFE and Dyna-Q.

For each block of ``goal_period`` episodes the median score over episodes
3..period (pooled over seeds) is printed, with its ratio to the previous block.

    python scripts/goal_shift.py --config configs/grid400_goal_shift.cfg --seeds 0-2
"""

import argparse
from pathlib import Path

import numpy as np

from dpefe.harness import load_config, parse_seeds, run_experiment


def block_medians(records, period: int, episodes: int) -> list:
    out = []
    for start in range(1, episodes + 1, period):
        window = [r.score for r in records if start + 2 <= r.episode < start + period]
        out.append(float(np.median(window)))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--agents", default="dpefe,dyna_q")
    ap.add_argument("--seeds")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/goal_shift")
    args = ap.parse_args()

    cfg = load_config(args.config).with_overrides(workers=args.workers)
    if args.seeds:
        cfg = cfg.with_overrides(seeds=parse_seeds(args.seeds))
    if not cfg.goal_period:
        ap.error("the config needs goal_period > 0")
    print("agent,block,median,ratio_to_previous")
    for agent in args.agents.split(","):
        recs = run_experiment(cfg.with_overrides(agent=agent), Path(args.out) / f"{agent}.csv")
        meds = block_medians(recs, cfg.goal_period, cfg.episodes)
        for i, m in enumerate(meds):
            ratio = f"{m / meds[i - 1]:.3f}" if i and meds[i - 1] else ""
            print(f"{agent},{i + 1},{m:.3f},{ratio}", flush=True)


if __name__ == "__main__":
    main()

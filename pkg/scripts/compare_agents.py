"""Run several agents on one configuration and summarise their learning curves.

Every agent shares the config file's settings apart from ``agent`` and
``out``. Per-agent CSVs (raw, aggregate, gnuplot .dat) go under --out.

    python scripts/compare_agents.py --config configs/grid100_noisy_dpefe.cfg \
        --agents dpefe,q_learning,random --seeds 0-9 --out results/noisy
"""

import argparse
from pathlib import Path

import numpy as np

from dpefe.harness import AGENT_KINDS, load_config, parse_seeds, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--agents", default=",".join(AGENT_KINDS))
    ap.add_argument("--seeds", help="override the seed list, e.g. 0-9")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--last", type=int, default=10, help="episodes in the final window")
    ap.add_argument("--out", default="results/compare")
    args = ap.parse_args()

    base = load_config(args.config).with_overrides(workers=args.workers)
    if args.seeds:
        base = base.with_overrides(seeds=parse_seeds(args.seeds))
    out = Path(args.out)
    print("agent,first_median,final_median,final_q25,final_q75")
    for agent in args.agents.split(","):
        recs = run_experiment(base.with_overrides(agent=agent), out / f"{agent}.csv")
        first = [r.score for r in recs if r.episode == 1]
        final = [r.score for r in recs if r.episode > base.episodes - args.last]
        q25, med, q75 = np.percentile(final, [25, 50, 75])
        print(f"{agent},{np.median(first):.3f},{med:.3f},{q25:.3f},{q75:.3f}", flush=True)


if __name__ == "__main__":
    main()

"""Sensitivity of the one-step agent to the preference learning-rate constant e.

    python scripts/e_sweep.py --values 1e3,1e4,1e5 --seeds 0-19
"""

import argparse

import numpy as np

from dpefe.harness import ExperimentConfig, final_scores, parse_seeds, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="grid100")
    ap.add_argument("--values", default="1e3,1e4,1e5")
    ap.add_argument("--episodes", type=int, default=50)
    ap.add_argument("--seeds", default="0-19")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/e_sweep")
    args = ap.parse_args()

    base = ExperimentConfig(grid=args.grid, agent="aif_t1", episodes=args.episodes,
                            seeds=parse_seeds(args.seeds), workers=args.workers)
    print("e,mean_final,median_final,iqr_final")
    means = []
    for raw in args.values.split(","):
        e = float(raw)
        recs = run_experiment(base.with_overrides(e=e), f"{args.out}/e={raw}.csv")
        finals = np.array(list(final_scores(recs).values()))
        q25, q75 = np.percentile(finals, [25, 75])
        means.append(finals.mean())
        print(f"{raw},{finals.mean():.3f},{np.median(finals):.3f},{q75 - q25:.3f}", flush=True)
    print(f"# spread of means: {max(means) - min(means):.3f}")


if __name__ == "__main__":
    main()

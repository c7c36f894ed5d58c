"""EFE evaluation counts per scheme, plus measured DPEFE planning time.

    python scripts/complexity.py --horizons 2,10,30,80
"""

import argparse
import time

import numpy as np

from dpefe.harness import count_efe_evaluations, log10_int
from dpefe.model import GenerativeModel
from dpefe.planner import PlanConfig, plan_backward


def plan_ms(S: int, U: int, T: int, repeats: int = 3) -> float:
    rng = np.random.default_rng(0)
    B = np.stack([rng.dirichlet(np.ones(S), size=S).T for _ in range(U)])
    model = GenerativeModel.from_matrices(np.eye(S), B).set_goal_preference(0)
    cfg = PlanConfig(horizon=T)
    plan_backward(model, cfg)
    t0 = time.perf_counter()
    for _ in range(repeats):
        plan_backward(model, cfg)
    return (time.perf_counter() - t0) / repeats * 1000


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", default="100,400")
    ap.add_argument("--actions", type=int, default=4)
    ap.add_argument("--horizons", default="2,10,30,80")
    ap.add_argument("--no-timing", action="store_true")
    args = ap.parse_args()

    U = args.actions
    print("S,U,T,dpefe,aif_t1,log10_caif,log10_si,dpefe_ms")
    for S in map(int, args.states.split(",")):
        for T in map(int, args.horizons.split(",")):
            row = [S, U, T, count_efe_evaluations("dpefe", S, U, T),
                   count_efe_evaluations("aif_t1", S, U),
                   f"{log10_int(count_efe_evaluations('caif', S, U, T)):.2f}",
                   f"{log10_int(count_efe_evaluations('si', S, U, T)):.2f}",
                   "" if args.no_timing else f"{plan_ms(S, U, T):.2f}"]
            print(",".join(map(str, row)), flush=True)


if __name__ == "__main__":
    main()

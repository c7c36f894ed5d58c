"""Multi-seed experiment runner.

A trial is one seed: a fresh agent runs ``episodes`` consecutive episodes
on its own copy of the grid. Trials are independent, so they may run in a
process pool; output is always written in seed order.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents import AifT1Agent, DpefeAgent, DynaQAgent, QLearningAgent, RandomAgent
from .gridworld import (GridWorld, emit_observation, load_grid_file, randomize_goal, reset,
                        start_distribution, step)
from .model import GenerativeModel
from .planner import PlanConfig

AGENT_KINDS = ("dpefe", "aif_t1", "q_learning", "dyna_q", "random")
CSV_HEADER = ["seed", "episode", "steps", "score", "reached_goal", "ms", "efe_evals"]
DEFAULT_HORIZONS = {100: 80, 400: 160, 900: 240}
# independent generator streams spawned from each trial seed, in this order
STREAMS = ("env", "action", "explore", "goal")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    grid: str = "grid100"
    agent: str = "dpefe"
    horizon: int = 0  # 0 picks a default from the grid size
    episodes: int = 10
    seeds: tuple = (0,)
    transition_noise: float = 0.0
    observation_noise: float = 0.0
    global_observation_noise: bool = False
    goal_period: int = 0  # move the goal every this many episodes; 0 keeps it fixed
    randomize_start: bool = True
    goal_reward: float = 10.0
    step_reward: float = -0.01
    timeout: int = 0  # 0 picks the grid default
    # active inference
    gamma_select: float = 512.0
    gamma_plan: float = 1.0
    include_ambiguity: bool = False
    b_prior: float = 0.01
    a_prior: float = 1e-4
    a_identity: float = 1.0
    true_model: bool = False
    goal_known: bool = False
    replan: str = "step"
    e: float = 1e4
    reset_eta: bool = False
    # tabular baselines
    alpha: float = 0.1
    gamma: float = 0.95
    epsilon: float = 0.1
    planning_steps: int = 10
    # output
    out: str = "results/run.csv"
    workers: int = 1
    record_ms: bool = False
    heatmap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.episodes < 1:
            raise ConfigError("episodes must be >= 1")
        if self.agent not in AGENT_KINDS:
            raise ConfigError(f"agent must be one of {AGENT_KINDS}, got {self.agent!r}")
        if self.horizon != 0 and self.horizon < 2:
            raise ConfigError("horizon must be >= 2")
        if self.replan not in ("step", "episode"):
            raise ConfigError("replan must be 'step' or 'episode'")
        if self.goal_period < 0 or self.workers < 1:
            raise ConfigError("goal_period must be >= 0 and workers >= 1")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        unknown = set(kw) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        return dataclasses.replace(self, **kw)


def parse_seeds(text: str) -> tuple:
    """``"0-4"`` -> (0..4); ``"1,5,9"`` -> (1, 5, 9); ranges and lists may be mixed."""
    seeds = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return tuple(seeds)


def _coerce(name: str, raw: str):
    ftype = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}.get(name)
    if ftype is None:
        raise ConfigError(f"unknown config key {name!r}")
    raw = raw.strip()
    if name == "seeds":
        return parse_seeds(raw)
    if ftype == "bool":
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    try:
        if ftype == "int":
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        if ftype == "float":
            return float(raw)
    except ValueError as err:
        raise ConfigError(f"{name}: {err}") from None
    return raw


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        values[key] = _coerce(key, raw)
    return (base or ExperimentConfig()).with_overrides(**values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def apply_env_seed(config: ExperimentConfig) -> ExperimentConfig:
    """``EFE_SEED`` replaces the seed list with that single seed."""
    env = os.environ.get("EFE_SEED")
    if env is None or not env.strip():
        return config
    return config.with_overrides(seeds=(int(env),))


# -- building blocks ---------------------------------------------------------


@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    episode: int
    steps: int
    score: float
    reached_goal: bool
    ms: float
    efe_evals: int

    def row(self) -> list:
        return [self.seed, self.episode, self.steps, repr(self.score), int(self.reached_goal),
                f"{self.ms:.3f}", self.efe_evals]


def episode_score(grid: GridWorld, steps: int, reached: bool) -> float:
    return grid.goal_reward * reached + grid.step_reward * steps


def trial_streams(seed: int) -> dict:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(STREAMS, children)}


def make_grid(config: ExperimentConfig) -> GridWorld:
    params = dict(
        transition_noise=config.transition_noise,
        observation_noise=config.observation_noise,
        global_observation_noise=config.global_observation_noise,
        goal_reward=config.goal_reward,
        step_reward=config.step_reward,
    )
    if config.timeout:
        params["timeout"] = config.timeout
    return load_grid_file(config.grid, **params)


def planning_horizon(config: ExperimentConfig, grid: GridWorld) -> int:
    if config.horizon:
        return config.horizon
    return DEFAULT_HORIZONS.get(grid.num_cells, 80)


def make_agent(config: ExperimentConfig, grid: GridWorld, streams: dict):
    S, U = grid.num_cells, 4
    kind = config.agent
    if kind == "random":
        return RandomAgent(S, U, streams["action"])
    if kind in ("q_learning", "dyna_q"):
        kw = dict(alpha=config.alpha, gamma=config.gamma, epsilon=config.epsilon)
        if kind == "q_learning":
            return QLearningAgent(S, U, streams["explore"], **kw)
        return DynaQAgent(S, U, streams["explore"], planning_steps=config.planning_steps,
                          planning_rng=streams["action"], **kw)
    if config.true_model:
        model = GenerativeModel.from_matrices(*grid.true_model())
    else:
        model = GenerativeModel.flat(S, S, U, prior_count=config.b_prior,
                                     a_prior_count=config.a_prior, a_identity=config.a_identity)
    model.D = start_distribution(grid, config.randomize_start)
    if kind == "aif_t1":
        return AifT1Agent(model, streams["action"], e=config.e,
                          gamma_select=config.gamma_select, learn=not config.true_model,
                          reset_eta=config.reset_eta)
    plan = PlanConfig(horizon=planning_horizon(config, grid), gamma_plan=config.gamma_plan,
                      gamma_select=config.gamma_select,
                      include_ambiguity=config.include_ambiguity)
    return DpefeAgent(model, plan, streams["action"], learn=not config.true_model,
                      replan=config.replan,
                      goal_obs=grid.goal_cell if config.goal_known else None)


def run_agent_episode(agent, grid: GridWorld, rng: np.random.Generator, seed: int = 0,
                      episode: int = 1, randomize_start: bool = True,
                      record_ms: bool = False, start: int | None = None) -> EpisodeRecord:
    """One episode of the perceive, plan, act and learn loop.

    ``rng`` drives the environment only (start cell, noise); agents carry
    their own generators.
    """
    if agent.num_states != grid.num_cells:
        raise ConfigError(f"agent has {agent.num_states} states but the grid has "
                          f"{grid.num_cells} cells")
    t0 = time.perf_counter()
    state = reset(grid, rng, randomize_start) if start is None else start
    agent.begin_episode(emit_observation(state, grid, rng))
    steps, reached = 0, False
    while True:
        action = agent.act()
        res = step(state, action, grid, rng, t=steps + 1)
        steps += 1
        reached = res.done_reason == "goal"
        agent.observe(action, res.observation, res.reward, res.done, reached)
        state = res.next_state
        if reached:
            agent.goal_reached(grid.goal_cell)
        if res.done:
            break
    ms = (time.perf_counter() - t0) * 1000 if record_ms else 0.0
    return EpisodeRecord(seed, episode, steps, episode_score(grid, steps, reached), reached,
                         ms, agent.efe_evals)


def run_trial(config: ExperimentConfig, seed: int, heatmaps: list | None = None) -> list:
    grid = make_grid(config)
    streams = trial_streams(seed)
    agent = make_agent(config, grid, streams)
    records = []
    for ep in range(1, config.episodes + 1):
        if config.goal_period and ep > 1 and (ep - 1) % config.goal_period == 0:
            grid = randomize_goal(grid, streams["goal"])
            if hasattr(agent, "model"):
                agent.model.D = start_distribution(grid, config.randomize_start)
            if config.goal_known:
                agent.goal_changed(grid.goal_cell)
        records.append(run_agent_episode(agent, grid, streams["env"], seed, ep,
                                         config.randomize_start, config.record_ms))
        if heatmaps is not None and hasattr(agent, "prefs"):
            heatmaps.append((seed, ep, agent.prefs.c.copy()))
    return records


def _trial_job(args):
    config, seed = args
    heat = [] if config.heatmap else None
    return run_trial(config, seed, heat), heat


def iter_trials(config: ExperimentConfig):
    """Yield ``(records, heatmaps)`` per seed, in seed-list order."""
    jobs = [(config, s) for s in config.seeds]
    if config.workers == 1 or len(jobs) == 1:
        yield from map(_trial_job, jobs)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        yield from pool.map(_trial_job, jobs)


# -- aggregation and output --------------------------------------------------


def aggregate(records) -> list:
    """Per-episode ``(episode, median, q25, q75, n)`` of the score across seeds."""
    by_ep: dict[int, list] = {}
    for r in records:
        by_ep.setdefault(r.episode, []).append(r.score)
    rows = []
    for ep in sorted(by_ep):
        scores = np.asarray(by_ep[ep])
        q25, med, q75 = np.percentile(scores, [25, 50, 75])
        rows.append((ep, float(med), float(q25), float(q75), len(scores)))
    return rows


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def aggregate_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["episode", "median", "q25", "q75", "n"])
    for ep, med, q25, q75, n in aggregate(records):
        w.writerow([ep, repr(med), repr(q25), repr(q75), n])
    return buf.getvalue()


def aggregate_dat(records) -> str:
    """Whitespace-separated aggregate for gnuplot."""
    lines = ["# episode median q25 q75 n"]
    lines += [f"{ep} {med!r} {q25!r} {q75!r} {n}" for ep, med, q25, q75, n in aggregate(records)]
    return "\n".join(lines) + "\n"


def sibling(path: Path, suffix: str, ext: str | None = None) -> Path:
    return path.with_name(path.stem + suffix + (ext if ext is not None else path.suffix))


def run_experiment(config: ExperimentConfig, out: str | os.PathLike | None = None) -> list:
    """Run every seed and write the records plus aggregate files.

    Rows are flushed after each finished seed, so an interrupted run keeps
    the seeds completed so far.
    """
    path = Path(out if out is not None else config.out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = open(path, "w", newline="")
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err}") from err
    records, heat = [], []
    width = make_grid(config).width
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for recs, h in iter_trials(config):
            for r in recs:
                w.writerow(r.row())
            fh.flush()
            records.extend(recs)
            heat.extend(h or [])
    sibling(path, "_agg").write_text(aggregate_csv(records))
    sibling(path, "_agg", ".dat").write_text(aggregate_dat(records))
    if config.heatmap and heat:
        buf = io.StringIO()
        hw = csv.writer(buf, lineterminator="\n")
        hw.writerow(["seed", "episode", "cell_row", "cell_col", "c_value"])
        for seed, ep, c in heat:
            for idx, value in enumerate(c):
                hw.writerow([seed, ep, *divmod(idx, width), repr(float(value))])
        sibling(path, "_heatmap").write_text(buf.getvalue())
    return records


# -- sweeps -------------------------------------------------------------------


def final_scores(records, last: int = 10) -> dict:
    """Per-seed mean score over the final ``last`` episodes."""
    by_seed: dict[int, list] = {}
    for r in records:
        by_seed.setdefault(r.seed, []).append((r.episode, r.score))
    out = {}
    for seed, rows in by_seed.items():
        rows.sort()
        out[seed] = float(np.mean([s for _, s in rows[-last:]]))
    return out


def sweep_hyperparameter(config: ExperimentConfig, name: str, values,
                         out: str | os.PathLike | None = None, last: int = 10) -> list:
    """One full experiment per value; returns ``(value, mean, median, q25, q75)`` rows."""
    if name not in {f.name for f in dataclasses.fields(config)}:
        raise ConfigError(f"unknown parameter {name!r}")
    base = Path(out if out is not None else config.out)
    rows = []
    for v in values:
        cfg = config.with_overrides(**{name: _coerce(name, str(v)) if isinstance(v, str) else v})
        run_path = base.with_name(f"{base.stem}_{name}={v}{base.suffix}")
        finals = np.array(list(final_scores(run_experiment(cfg, run_path), last).values()))
        q25, med, q75 = np.percentile(finals, [25, 50, 75])
        rows.append((v, float(finals.mean()), float(med), float(q25), float(q75)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "mean_final_score", "median_final_score", "q25", "q75"])
    for row in rows:
        w.writerow([row[0], *(repr(x) for x in row[1:])])
    base.parent.mkdir(parents=True, exist_ok=True)
    sibling(base, f"_sweep_{name}").write_text(buf.getvalue())
    return rows


# -- complexity ---------------------------------------------------------------


def count_efe_evaluations(mode: str, S: int, U: int, T: int = 1) -> int:
    """Closed-form number of EFE evaluations (exact Python integer)."""
    if min(S, U, T) < 1:
        raise ValueError("S, U and T must be positive")
    if mode == "dpefe":
        if T < 2:
            raise ValueError("dpefe needs T >= 2")
        return S * U * (T - 1)
    if mode == "aif_t1":
        return S * U
    if mode == "si":
        return (S * U) ** T
    if mode == "caif":
        return S * U**T
    raise ValueError(f"unknown mode {mode!r}")


def log10_int(n: int) -> float:
    """``log10`` of an arbitrarily large positive integer."""
    digits = len(str(n))
    if digits < 300:
        return math.log10(n)
    lead = int(str(n)[:17])
    return math.log10(lead) + digits - 17

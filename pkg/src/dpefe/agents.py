"""Agents sharing one observe/act interface for the experiment loop.

Each episode calls ``begin_episode(obs)``, then alternates ``act()`` and
``observe(action, obs, reward, done, reached)``. Goal bookkeeping arrives
through ``goal_reached`` and ``goal_changed``.
"""

from __future__ import annotations

import numpy as np

from .baselines import DynaModel, QTable, dyna_planning_sweep, epsilon_greedy, q_update
from .categorical import one_hot
from .inference import infer_state
from .model import GenerativeModel
from .planner import EfeTable, PlanConfig, action_distribution, plan_backward, sample_action
from .preference import PreferenceWeights, log_preference, preference_distribution, update_preference


class Agent:
    kind = "agent"
    num_states: int
    num_actions: int

    def __init__(self):
        self.efe_evals = 0

    def begin_episode(self, obs: int) -> None:
        self.efe_evals = 0

    def act(self) -> int:
        raise NotImplementedError

    def observe(self, action: int, obs: int, reward: float, done: bool, reached: bool) -> None:
        pass

    def goal_reached(self, goal_obs: int) -> None:
        pass

    def goal_changed(self, goal_obs: int) -> None:
        pass


class RandomAgent(Agent):
    kind = "random"

    def __init__(self, num_states: int, num_actions: int, rng: np.random.Generator):
        super().__init__()
        self.num_states, self.num_actions, self.rng = num_states, num_actions, rng

    def act(self) -> int:
        return int(self.rng.integers(self.num_actions))


class QLearningAgent(Agent):
    """Tabular Q-learning on the (possibly noisy) observation index."""

    kind = "q_learning"

    def __init__(self, num_states: int, num_actions: int, rng: np.random.Generator,
                 alpha: float = 0.1, gamma: float = 0.95, epsilon: float = 0.1):
        super().__init__()
        self.num_states, self.num_actions, self.rng = num_states, num_actions, rng
        self.table = QTable.zeros(num_states, num_actions, alpha=alpha, gamma=gamma,
                                  epsilon=epsilon)
        self.s = None

    def begin_episode(self, obs: int) -> None:
        super().begin_episode(obs)
        self.s = obs

    def act(self) -> int:
        return epsilon_greedy(self.table, self.s, self.rng)

    def observe(self, action, obs, reward, done, reached) -> None:
        q_update(self.table, self.s, action, reward, obs, terminal=reached)
        self.s = obs


class DynaQAgent(QLearningAgent):
    kind = "dyna_q"

    def __init__(self, num_states: int, num_actions: int, rng: np.random.Generator,
                 alpha: float = 0.1, gamma: float = 0.95, epsilon: float = 0.1,
                 planning_steps: int = 10, planning_rng: np.random.Generator | None = None):
        super().__init__(num_states, num_actions, rng, alpha, gamma, epsilon)
        self.memory = DynaModel(planning_steps)
        self.planning_rng = planning_rng if planning_rng is not None else rng

    def observe(self, action, obs, reward, done, reached) -> None:
        self.memory.remember(self.s, action, reward, obs, reached)
        super().observe(action, obs, reward, done, reached)
        dyna_planning_sweep(self.table, self.memory, self.planning_rng)


class ActiveInferenceAgent(Agent):
    """Belief filtering, Dirichlet learning and EFE-based action selection.

    ``replan="step"`` refreshes the model and replans after every
    observation; ``"episode"`` does both only at episode start.
    """

    def __init__(self, model: GenerativeModel, plan: PlanConfig, rng: np.random.Generator,
                 learn: bool = True, replan: str = "step"):
        super().__init__()
        if replan not in ("step", "episode"):
            raise ValueError(f"unknown replan mode {replan!r}")
        self.model = model
        self.plan = plan
        self.rng = rng
        self.learn = learn
        self.replan = replan
        self.num_states = model.num_states
        self.num_actions = model.num_actions
        self.belief = None
        self.t = 1
        self._table: EfeTable | None = None
        self._table_version = -1
        self.plans = 0

    def table(self) -> EfeTable:
        if self._table is None or (self.replan == "step" and self._table_version != self.model.version):
            self._table = plan_backward(self.model, self.plan, self.absorbing_state())
            self._table_version = self.model.version
            self.efe_evals += self._table.evaluations
            self.plans += 1
        return self._table

    def absorbing_state(self) -> int | None:
        return None

    def begin_episode(self, obs: int) -> None:
        super().begin_episode(obs)
        if self.replan == "episode":
            self.model.refresh()
            self._table = None
        self.t = 1
        self.belief = infer_state(self.model.D, obs, self.model.A).belief
        if self.learn:
            self.model.learn_likelihood(obs, self.belief)
            if self.replan == "step":
                self.model.refresh()

    def plan_step(self) -> int:
        """Row of the EFE table used at the current step (rolling past the horizon)."""
        return self.t if self.t <= self.plan.horizon - 1 else 1

    def action_probabilities(self) -> np.ndarray:
        return action_distribution(self.table(), self.plan_step(), self.belief,
                                   self.plan.gamma_select)

    def act(self) -> int:
        return sample_action(self.action_probabilities(), self.rng)

    def observe(self, action, obs, reward, done, reached) -> None:
        prior = self.model.predict_next_state(self.belief, action)
        post = infer_state(prior, obs, self.model.A).belief
        if self.learn:
            self.model.learn_transition(one_hot(action, self.num_actions), post, self.belief)
            self.model.learn_likelihood(obs, post)
            if self.replan == "step":
                self.model.refresh()
        self.belief = post
        self.t += 1


class DpefeAgent(ActiveInferenceAgent):
    """Long-horizon planner with a sparse preference set at the goal."""

    kind = "dpefe"

    def __init__(self, model: GenerativeModel, plan: PlanConfig, rng: np.random.Generator,
                 learn: bool = True, replan: str = "step", goal_obs: int | None = None):
        super().__init__(model, plan, rng, learn, replan)
        self.goal_obs = None
        if goal_obs is not None:
            self._set_goal(goal_obs)

    def _set_goal(self, goal_obs: int) -> None:
        if goal_obs != self.goal_obs:
            self.goal_obs = goal_obs
            self.model.set_goal_preference(goal_obs)
            self._table = None

    def absorbing_state(self) -> int | None:
        # the episode ends at the goal, so nothing learned about leaving it matters
        return self.goal_obs

    def goal_reached(self, goal_obs: int) -> None:
        self._set_goal(goal_obs)

    def goal_changed(self, goal_obs: int) -> None:
        self._set_goal(goal_obs)


class AifT1Agent(ActiveInferenceAgent):
    """One-step lookahead with a preference distribution learned from reward."""

    kind = "aif_t1"

    def __init__(self, model: GenerativeModel, rng: np.random.Generator, e: float = 1e4,
                 gamma_select: float = 512.0, learn: bool = True, reset_eta: bool = False):
        super().__init__(model, PlanConfig(horizon=2, gamma_select=gamma_select), rng, learn)
        self.prefs = PreferenceWeights.uniform(model.num_obs, e)
        self.reset_eta = reset_eta
        self._prev_obs = None
        self._prev_reward = None

    def _install_preference(self) -> None:
        self.model.set_preference(preference_distribution(self.prefs), log_preference(self.prefs))

    def begin_episode(self, obs: int) -> None:
        if self.reset_eta:
            self.prefs = PreferenceWeights(self.prefs.c, self.prefs.e, 0)
        self._install_preference()
        super().begin_episode(obs)
        self._prev_obs = obs
        self._prev_reward = None  # the first observation carries no reward

    def observe(self, action, obs, reward, done, reached) -> None:
        super().observe(action, obs, reward, done, reached)
        if self._prev_reward is not None:
            self.prefs = update_preference(self.prefs, self._prev_obs, self._prev_reward, obs)
        if reached:
            self.prefs = update_preference(self.prefs, obs, reward, None)
        self._prev_obs, self._prev_reward = obs, reward
        self._install_preference()

    def goal_reached(self, goal_obs: int) -> None:
        # sparse goal preference for the remainder of the episode; the
        # learned preference is reinstated at the next episode start
        self.model.set_goal_preference(goal_obs)

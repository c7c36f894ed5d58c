"""Tabular reinforcement-learning baselines: Q-learning and Dyna-Q."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class QTable:
    q: np.ndarray
    alpha: float = 0.1
    gamma: float = 0.95
    epsilon: float = 0.1

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=np.float64)
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must lie in [0, 1)")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")

    @classmethod
    def zeros(cls, num_states: int, num_actions: int, **kw) -> "QTable":
        return cls(np.zeros((num_states, num_actions)), **kw)

    def greedy(self, s: int) -> int:
        return int(np.argmax(self.q[s]))


def q_update(table: QTable, s: int, a: int, r: float, s_next: int,
             terminal: bool = False) -> QTable:
    """One temporal-difference backup, in place. Terminal successors do not bootstrap."""
    target = r if terminal else r + table.gamma * table.q[s_next].max()
    table.q[s, a] += table.alpha * (target - table.q[s, a])
    return table


@dataclass
class DynaModel:
    """Last-seen outcome of every visited (state, action) pair."""

    planning_steps: int = 10
    memory: dict = field(default_factory=dict)
    _keys: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.planning_steps < 0:
            raise ValueError("planning_steps must be >= 0")

    def __len__(self) -> int:
        return len(self._keys)

    def remember(self, s: int, a: int, r: float, s_next: int, terminal: bool = False) -> None:
        key = (int(s), int(a))
        if key not in self.memory:
            self._keys.append(key)
        self.memory[key] = (int(s_next), float(r), bool(terminal))


def dyna_planning_sweep(table: QTable, model: DynaModel, rng: np.random.Generator) -> QTable:
    """Replay ``planning_steps`` remembered transitions drawn uniformly."""
    if not model._keys:
        return table
    picks = rng.integers(len(model._keys), size=model.planning_steps)
    for k in picks:
        s, a = model._keys[k]
        s_next, r, terminal = model.memory[(s, a)]
        q_update(table, s, a, r, s_next, terminal)
    return table


def epsilon_greedy(table: QTable, s: int, rng: np.random.Generator) -> int:
    row = table.q[s]
    if rng.random() < table.epsilon:
        return int(rng.integers(row.shape[0]))
    best = np.flatnonzero(row == row.max())
    if best.shape[0] == 1:
        return int(best[0])
    return int(best[rng.integers(best.shape[0])])

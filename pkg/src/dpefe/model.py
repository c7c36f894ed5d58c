"""POMDP generative model with Dirichlet-count learning.

Conventions: ``A[o, s] = P(o | s)``, ``B[u, s_next, s] = P(s_next | s, u)``;
both are column-stochastic. ``a`` and ``b`` hold the matching Dirichlet
concentration parameters and ``A``/``B`` are their means after ``refresh``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .categorical import EPS, dirichlet_mean, is_column_stochastic, is_distribution, one_hot

# counts standing in for "known" matrices when a true model is injected
INJECTED_CONCENTRATION = 1e6


@dataclass
class GenerativeModel:
    a: np.ndarray
    b: np.ndarray
    C: np.ndarray
    D: np.ndarray
    log_C: np.ndarray = field(default=None)
    A: np.ndarray = field(default=None)
    B: np.ndarray = field(default=None)
    version: int = 0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.b.ndim != 3 or self.b.shape[1] != self.b.shape[2]:
            raise ValueError("b must have shape (actions, states, states)")
        if self.a.shape[1] != self.b.shape[1]:
            raise ValueError("a and b disagree on the number of states")
        self.set_preference(np.asarray(self.C, dtype=np.float64), self.log_C)
        self.D = np.asarray(self.D, dtype=np.float64)
        if not is_distribution(self.D) or self.D.shape != (self.num_states,):
            raise ValueError("D must be a distribution over states")
        if self.A is None or self.B is None:
            self.refresh()

    @property
    def num_obs(self) -> int:
        return self.a.shape[0]

    @property
    def num_states(self) -> int:
        return self.a.shape[1]

    @property
    def num_actions(self) -> int:
        return self.b.shape[0]

    @classmethod
    def flat(
        cls,
        num_states: int,
        num_obs: int,
        num_actions: int,
        prior_count: float = 1.0,
        a_identity: float = 0.0,
        C=None,
        D=None,
        a_prior_count: float | None = None,
    ) -> "GenerativeModel":
        """Uninformed model: every count equals ``prior_count + EPS``.

        ``a_prior_count`` overrides the flat count of ``a`` alone.
        ``a_identity`` adds that many pseudo-counts on the diagonal of
        ``a`` (requires ``num_obs == num_states``); it encodes the prior
        belief that observations report the state they came from.
        """
        a_flat = prior_count if a_prior_count is None else a_prior_count
        a = np.full((num_obs, num_states), a_flat + EPS)
        if a_identity:
            if num_obs != num_states:
                raise ValueError("identity likelihood prior needs num_obs == num_states")
            a += a_identity * np.eye(num_states)
        b = np.full((num_actions, num_states, num_states), prior_count + EPS)
        if C is None:
            C = np.full(num_obs, 1.0 / num_obs)
        if D is None:
            D = np.full(num_states, 1.0 / num_states)
        return cls(a=a, b=b, C=C, D=D)

    @classmethod
    def from_matrices(cls, A, B, C=None, D=None, concentration: float = INJECTED_CONCENTRATION):
        """Model whose counts reproduce the given (true) A and B."""
        A = np.asarray(A, dtype=np.float64)
        B = np.asarray(B, dtype=np.float64)
        if not is_column_stochastic(A) or not is_column_stochastic(B):
            raise ValueError("A and B must be column-stochastic")
        if C is None:
            C = np.full(A.shape[0], 1.0 / A.shape[0])
        if D is None:
            D = np.full(A.shape[1], 1.0 / A.shape[1])
        return cls(a=A * concentration + EPS, b=B * concentration + EPS, C=C, D=D)

    def copy(self) -> "GenerativeModel":
        return GenerativeModel(
            a=self.a.copy(), b=self.b.copy(), C=self.C.copy(), D=self.D.copy(),
            log_C=self.log_C.copy(), A=self.A.copy(), B=self.B.copy(), version=self.version,
        )

    # -- prediction ---------------------------------------------------------

    def predict_next_state(self, belief, action: int) -> np.ndarray:
        if not 0 <= action < self.num_actions:
            raise IndexError(f"action {action} out of range")
        return self.B[action] @ np.asarray(belief, dtype=np.float64)

    def predict_observation(self, state_belief) -> np.ndarray:
        return self.A @ np.asarray(state_belief, dtype=np.float64)

    # -- learning -----------------------------------------------------------

    def learn_transition(self, action_dist, post_t, post_prev) -> np.ndarray:
        return learn_transition(self.b, action_dist, post_t, post_prev)

    def learn_likelihood(self, obs: int, post) -> np.ndarray:
        return learn_likelihood(self.a, obs, post)

    def refresh(self) -> "GenerativeModel":
        self.A = dirichlet_mean(self.a)
        self.B = dirichlet_mean(self.b)
        self.version += 1
        return self

    # -- preferences --------------------------------------------------------

    def set_preference(self, C, log_C=None) -> None:
        """Install a preference distribution over observations.

        ``log_C`` may be supplied when it is known exactly (e.g. from a
        log-softmax), so that entries which underflow in ``C`` keep their
        ordering inside the planner.
        """
        C = np.asarray(C, dtype=np.float64)
        if C.shape != (self.num_obs,) or not is_distribution(C):
            raise ValueError("C must be a distribution over observations")
        self.C = C
        self.log_C = np.log(C + EPS) if log_C is None else np.asarray(log_C, dtype=np.float64)
        self.version += 1

    def set_goal_preference(self, goal_obs: int) -> "GenerativeModel":
        C = one_hot(goal_obs, self.num_obs) + EPS
        self.set_preference(C / C.sum())
        return self

    # -- serialisation ------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()

        def block(name, m):
            buf.write(name + "\n")
            for row in np.atleast_2d(m):
                buf.write(",".join(repr(float(x)) for x in row) + "\n")

        block("A", self.A)
        for u in range(self.num_actions):
            block(f"B[{u}]", self.B[u])
        block("C", self.C)
        block("D", self.D)
        return buf.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "GenerativeModel":
        blocks: dict[str, list[list[float]]] = {}
        current = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line[0].isalpha():
                current = line
                blocks[current] = []
            else:
                if current is None:
                    raise ValueError("data row before any block header")
                blocks[current].append([float(x) for x in line.split(",")])
        n_actions = sum(1 for k in blocks if k.startswith("B["))
        A = np.array(blocks["A"])
        B = np.stack([np.array(blocks[f"B[{u}]"]) for u in range(n_actions)])
        C = np.array(blocks["C"][0])
        D = np.array(blocks["D"][0])
        return cls.from_matrices(A, B, C, D)

    @classmethod
    def load(cls, path) -> "GenerativeModel":
        return cls.from_csv(Path(path).read_text())


def learn_transition(b: np.ndarray, action_dist, post_t, post_prev) -> np.ndarray:
    """In-place ``b_u += Q(u) * outer(post_t, post_prev)`` for every action."""
    action_dist = np.asarray(action_dist, dtype=np.float64)
    outer = np.outer(post_t, post_prev)
    for u in np.flatnonzero(action_dist):
        b[u] += action_dist[u] * outer
    return b


def learn_likelihood(a: np.ndarray, obs: int, post) -> np.ndarray:
    """In-place ``a[obs, :] += post``."""
    if not 0 <= obs < a.shape[0]:
        raise IndexError(f"observation {obs} out of range")
    a[obs] += post
    return a

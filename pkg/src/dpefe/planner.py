"""Backward-induction evaluation of expected free energy over a finite horizon.

The table is computed over (state, action) pairs. Beliefs enter only at
action-selection time, where the current posterior weights the rows of
the table for the current plan step.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np

from .categorical import EPS, entropy, is_column_stochastic


@dataclass(frozen=True)
class PlanConfig:
    horizon: int = 80
    gamma_plan: float = 1.0
    gamma_select: float = 512.0
    include_ambiguity: bool = False

    def __post_init__(self):
        if self.horizon < 2:
            raise ValueError("planning horizon T must be >= 2")
        if not (self.gamma_plan > 0 and self.gamma_select > 0):
            raise ValueError("precisions must be positive")


@dataclass
class EfeTable:
    """EFE values ``G[t - 1, s, u]`` for plan steps ``t = 1 .. T-1``."""

    G: np.ndarray
    evaluations: int
    gamma_plan: float = 1.0

    @cached_property
    def policy(self) -> np.ndarray:
        """Inner action distributions ``softmax(-gamma_plan * G[t, s])``."""
        return _softmin_rows(self.G, self.gamma_plan)

    @property
    def horizon(self) -> int:
        return self.G.shape[0] + 1

    def level(self, t: int) -> np.ndarray:
        if not 1 <= t <= self.G.shape[0]:
            raise IndexError(f"plan step {t} outside 1..{self.G.shape[0]}")
        return self.G[t - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "state", "action", "G"])
        T1, S, U = self.G.shape
        for i in range(T1):
            for s in range(S):
                for u in range(U):
                    w.writerow([i + 1, s, u, repr(float(self.G[i, s, u]))])
        return buf.getvalue()


def _softmin_rows(G: np.ndarray, precision: float) -> np.ndarray:
    z = -precision * G
    z -= z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@numba.njit(cache=True)
def _expected_values(G, precision, out):
    """``out[s] = sum_u softmax(-precision * G[s])[u] * G[s, u]``."""
    S, U = G.shape
    for s in range(S):
        lo = G[s, 0]
        for u in range(1, U):
            if G[s, u] < lo:
                lo = G[s, u]
        z = 0.0
        acc = 0.0
        for u in range(U):
            w = np.exp(-precision * (G[s, u] - lo))
            z += w
            acc += w * G[s, u]
        out[s] = acc / z
    return out


def immediate_efe(model, include_ambiguity: bool = False,
                  absorbing: int | None = None) -> np.ndarray:
    """One-step EFE ``K[s, u] = KL(A B_u e_s || C)`` (+ expected ambiguity).

    An ``absorbing`` state is treated as a self-loop under every action.
    """
    P = np.matmul(model.A, model.B)  # (U, O, S): predicted outcomes per (u, s)
    neg_h = np.einsum("uos,uos->us", P, np.log(P + EPS))
    cross = np.einsum("o,uos->us", model.log_C, P)
    K = neg_h - cross
    if include_ambiguity:
        K = K + np.einsum("k,uks->us", entropy(model.A, axis=0), model.B)
    K = np.ascontiguousarray(K.T)
    if absorbing is not None:
        p = model.A[:, absorbing]
        K[absorbing] = p @ np.log(p + EPS) - model.log_C @ p
        if include_ambiguity:
            K[absorbing] += entropy(p)
    return K


def check_model(model) -> None:
    if not is_column_stochastic(model.A) or not is_column_stochastic(model.B):
        raise ValueError("model matrices are not column-stochastic")


def plan_backward(model, config: PlanConfig, absorbing: int | None = None) -> EfeTable:
    """Backward pass over the horizon.

    ``absorbing`` names a state the episode ends in (the goal); the plan
    treats it as a self-loop regardless of what was learned about it.
    """
    check_model(model)
    S, U, T = model.num_states, model.num_actions, config.horizon
    if absorbing is not None and not 0 <= absorbing < S:
        raise IndexError(f"absorbing state {absorbing} out of range")
    K = immediate_efe(model, config.include_ambiguity, absorbing)
    # row (u, s) holds B_u[:, s], so M @ V is the expected next-step value
    M3 = np.ascontiguousarray(model.B.transpose(0, 2, 1))
    if absorbing is not None:
        M3[:, absorbing, :] = 0.0
        M3[:, absorbing, absorbing] = 1.0
    M = M3.reshape(U * S, S)

    G = np.empty((T - 1, S, U))
    G[-1] = K
    KT = K.T.ravel()  # (u, s) order to match the rows of M
    V = np.empty(S)
    for i in range(T - 3, -1, -1):
        _expected_values(G[i + 1], config.gamma_plan, V)
        G[i] = (KT + M @ V).reshape(U, S).T
    return EfeTable(G=G, evaluations=S * U * (T - 1), gamma_plan=config.gamma_plan)


def action_distribution(table: EfeTable, t: int, belief, gamma_select: float) -> np.ndarray:
    g = np.asarray(belief, dtype=np.float64) @ table.level(t)
    return _softmin_rows(g, gamma_select)


def sample_action(dist, rng: np.random.Generator) -> int:
    cdf = np.cumsum(dist)
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(k, len(cdf) - 1)

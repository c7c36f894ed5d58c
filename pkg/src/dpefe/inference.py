"""Single-step Bayesian filtering over hidden states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import EPS, softmax


@dataclass(frozen=True)
class BeliefState:
    belief: np.ndarray
    step: int = 1


def infer_state(prior, obs: int, A, step: int = 1) -> BeliefState:
    """Posterior over states after seeing ``obs``: softmax(log prior + log A[obs])."""
    A = np.asarray(A)
    if not 0 <= obs < A.shape[0]:
        raise IndexError(f"observation {obs} out of range")
    prior = np.asarray(prior, dtype=np.float64)
    prior = prior / prior.sum()
    logits = np.log(prior + EPS) + np.log(A[obs] + EPS)
    return BeliefState(softmax(logits), step)


def initial_belief(D, obs: int, A) -> BeliefState:
    return infer_state(D, obs, A, step=1)

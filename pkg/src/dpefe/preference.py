"""Online learning of a preference distribution from reward samples.

Desirabilities ``c`` are updated with a Z-learning style rule and turned into
a preference distribution over observations with a softmax.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .categorical import log_softmax, softmax

EXP_CLAMP = 1e300


@dataclass(frozen=True)
class PreferenceWeights:
    c: np.ndarray
    e: float = 1e4
    t: int = 0
    clamped: bool = field(default=False, compare=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64)
        if c.ndim != 1 or not np.all(c > 0):
            raise ValueError("desirabilities must be a positive vector")
        if not self.e > 0:
            raise ValueError("e must be positive")
        if self.t < 0:
            raise ValueError("step count must be non-negative")
        object.__setattr__(self, "c", c)

    @classmethod
    def uniform(cls, num_obs: int, e: float = 1e4) -> "PreferenceWeights":
        return cls(np.ones(num_obs), e=e)

    @property
    def eta(self) -> float:
        return learning_rate(self.e, self.t)


def learning_rate(e: float, t: int) -> float:
    """Decaying step size ``e / (e + t)``."""
    return e / (e + t)


def update_preference(w: PreferenceWeights, obs_t: int, reward: float,
                      obs_next: int | None) -> PreferenceWeights:
    """Return weights with ``c[obs_t]`` moved toward ``exp(reward) * c[obs_next]``.

    ``obs_next=None`` marks a terminal transition; the successor then has
    unit desirability.
    """
    n = w.c.shape[0]
    if not 0 <= obs_t < n or (obs_next is not None and not 0 <= obs_next < n):
        raise IndexError("observation index out of range")
    if not np.isfinite(reward):
        raise ValueError("reward must be finite")
    with np.errstate(over="ignore"):
        gain = float(np.exp(reward))
    clamped = w.clamped
    if not gain <= EXP_CLAMP:
        warnings.warn(f"exp({reward}) overflows; clamped to {EXP_CLAMP:g}", RuntimeWarning,
                      stacklevel=2)
        gain = EXP_CLAMP
        clamped = True
    succ = 1.0 if obs_next is None else w.c[obs_next]
    eta = w.eta
    c = w.c.copy()
    c[obs_t] = (1.0 - eta) * c[obs_t] + eta * gain * succ
    # a product of large factors can still overflow; keep entries finite and positive
    c[obs_t] = min(max(c[obs_t], np.finfo(float).tiny), np.finfo(float).max)
    return replace(w, c=c, t=w.t + 1, clamped=clamped)


def preference_distribution(w: PreferenceWeights) -> np.ndarray:
    return softmax(w.c)


def log_preference(w: PreferenceWeights) -> np.ndarray:
    """Exact ``log softmax(c)``; finite even where the distribution underflows."""
    return log_softmax(w.c)


def heatmap_rows(w: PreferenceWeights, width: int, episode: int | None = None):
    """Yield ``(episode, row, col, c)`` for every cell of a ``width``-wide grid."""
    for idx, value in enumerate(w.c):
        r, col = divmod(idx, width)
        yield episode, r, col, float(value)


def heatmap_csv(snapshots, width: int) -> str:
    """CSV of desirabilities per episode from ``(episode, weights)`` pairs."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["episode", "cell_row", "cell_col", "c_value"])
    for episode, w in snapshots:
        for ep, r, col, value in heatmap_rows(w, width, episode):
            wr.writerow([ep, r, col, repr(value)])
    return buf.getvalue()

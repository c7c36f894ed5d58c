"""Categorical-distribution arithmetic shared by every other module.

All functions are pure and work in float64. ``EPS`` is the single
stabilisation constant: it is added inside every logarithm and used as
the floor for Dirichlet concentration parameters.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-16


def _as_vector(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def softmax(values, precision: float = 1.0, axis: int = -1) -> np.ndarray:
    """Return ``exp(precision * values)`` normalised along ``axis``.

    The maximum is subtracted before exponentiation, so the result is
    invariant to adding a constant to all values.
    """
    v = _as_vector(values)
    if not precision > 0:
        raise ValueError("precision must be positive")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite logit")
    z = precision * v
    z = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(values, precision: float = 1.0) -> np.ndarray:
    """Exact ``log(softmax(values, precision))`` without underflow to -inf."""
    v = _as_vector(values)
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite logit")
    z = precision * v
    m = np.max(z)
    return z - (m + np.log(np.sum(np.exp(z - m))))


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats; ``q`` is smoothed by EPS inside the logarithm."""
    p = _as_vector(p)
    q = _as_vector(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    pm = p[mask]
    kl = float(np.sum(pm * (np.log(pm + EPS) - np.log(q[mask] + EPS))))
    # smoothing can push identical distributions a hair below zero
    return max(kl, 0.0)


def entropy(p, axis: int = 0) -> np.ndarray | float:
    """Shannon entropy in nats with ``0 log 0 = 0``.

    For a matrix, entropies are taken along ``axis`` (columns by default,
    matching the column-stochastic convention used for A and B).
    """
    p = _as_vector(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(p), 0.0)
    if p.ndim == 1:
        return float(np.sum(terms))
    return np.sum(terms, axis=axis)


def dirichlet_mean(counts) -> np.ndarray:
    """Column-normalise Dirichlet concentration parameters.

    Works on a single matrix ``(outcomes, conditions)`` or a stack
    ``(k, outcomes, conditions)``; normalisation is always over the
    outcome axis.
    """
    c = _as_vector(counts)
    if np.any(c <= 0):
        raise ValueError("Dirichlet counts must be positive")
    return c / np.sum(c, axis=-2, keepdims=True)


def one_hot(index: int, dim: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise IndexError(f"index {index} out of range for dimension {dim}")
    v = np.zeros(dim)
    v[index] = 1.0
    return v


def is_distribution(p, atol: float = 1e-9) -> bool:
    p = _as_vector(p)
    return bool(np.all(p >= 0) and abs(np.sum(p) - 1.0) <= atol)


def is_column_stochastic(m, atol: float = 1e-9) -> bool:
    m = _as_vector(m)
    return bool(np.all(m >= 0) and np.allclose(np.sum(m, axis=-2), 1.0, atol=atol, rtol=0))

"""Brute-force references used only by the test-suite and benchmarks.

Nothing here is on an agent's runtime path. The exhaustive searches are
exponential in the horizon and refuse to run past an ``OracleBudget``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .categorical import EPS, entropy, softmax
from .gridworld import MOVES, GridWorld


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 8
    max_actions: int = 4
    max_horizon: int = 6
    max_ops: int = 10**7

    def check(self, S: int, U: int, T: int, ops: int) -> None:
        if S > self.max_states or U > self.max_actions or T > self.max_horizon:
            raise BudgetExceeded(f"instance (S={S}, U={U}, T={T}) exceeds {self}")
        if ops > self.max_ops:
            raise BudgetExceeded(f"{ops} evaluations exceed the budget of {self.max_ops}")


# -- shortest paths ----------------------------------------------------------


@dataclass(frozen=True)
class ShortestPath:
    length: int | None  # None when unreachable
    first_moves: frozenset

    @property
    def reachable(self) -> bool:
        return self.length is not None


def bfs_distances(grid: GridWorld, goal: int) -> np.ndarray:
    """Steps from every cell to ``goal`` (-1 when unreachable or a wall)."""
    dist = np.full(grid.num_cells, -1, dtype=np.int64)
    dist[goal] = 0
    queue = deque([goal])
    while queue:
        cell = queue.popleft()
        # moves are reversible on a grid, so neighbours of a cell are its predecessors
        for nb in grid.neighbours(cell):
            if dist[nb] < 0:
                dist[nb] = dist[cell] + 1
                queue.append(nb)
    return dist


def optimal_first_moves(grid: GridWorld, start: int, dist: np.ndarray) -> frozenset:
    if dist[start] <= 0:
        return frozenset()
    return frozenset(a for a in range(len(MOVES)) if dist[grid.move(start, a)] == dist[start] - 1)


def bfs_shortest_path(grid: GridWorld, start: int, goal: int) -> ShortestPath:
    if not (grid.valid_mask[start] and grid.valid_mask[goal]):
        raise ValueError("start and goal must be valid cells")
    dist = bfs_distances(grid, goal)
    if dist[start] < 0:
        return ShortestPath(None, frozenset())
    return ShortestPath(int(dist[start]), optimal_first_moves(grid, start, dist))


def flood_fill_length(grid: GridWorld, start: int, goal: int) -> int | None:
    """Shortest-path length by frontier expansion over (row, col) pairs.

    Written independently of ``GridWorld.move`` to cross-check the BFS.
    """
    free = {divmod(int(i), grid.width) for i in np.flatnonzero(grid.valid_mask)}
    target = divmod(goal, grid.width)
    frontier = {divmod(start, grid.width)}
    seen = set(frontier)
    steps = 0
    while frontier:
        if target in frontier:
            return steps
        nxt = set()
        for r, c in frontier:
            for cand in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                if cand in free and cand not in seen:
                    nxt.add(cand)
        seen |= nxt
        frontier = nxt
        steps += 1
    return None


# -- exhaustive expected free energy ------------------------------------------


def _risk(po: np.ndarray, log_C: np.ndarray) -> float:
    return float(np.sum(po * np.log(po + EPS)) - po @ log_C)


def si_tree_efe(model, C, T: int, budget: OracleBudget | None = None, belief=None,
                include_ambiguity: bool = True, gamma_plan: float = 1.0) -> np.ndarray:
    """EFE of each first action by full forward tree search.

    The tree alternates T-1 actions with every possible observation; each
    node scores risk, optional expected ambiguity and the expected EFE of
    the next node under ``softmax(-gamma_plan * G)``. Returns shape (U,).
    """
    A, B = model.A, model.B
    S, U = model.num_states, model.num_actions
    if T < 2:
        raise ValueError("T must be >= 2")
    (budget or OracleBudget()).check(S, U, T, (S * U) ** T)
    log_C = np.log(np.asarray(C, dtype=np.float64) + EPS)
    H = entropy(A, axis=0)
    q0 = model.D if belief is None else np.asarray(belief, dtype=np.float64)

    def node(q, remaining):
        G = np.empty(U)
        for u in range(U):
            qs = B[u] @ q
            po = A @ qs
            g = _risk(po, log_C)
            if include_ambiguity:
                g += float(H @ qs)
            if remaining > 1:
                for o in range(A.shape[0]):
                    if po[o] == 0.0:
                        continue
                    post = A[o] * qs
                    post = post / post.sum()
                    Gn = node(post, remaining - 1)
                    g += po[o] * float(softmax(-Gn, gamma_plan) @ Gn)
            G[u] = g
        return G

    return node(q0, T - 1)


def caif_policy_efe(model, C, T: int, budget: OracleBudget | None = None, belief=None,
                    include_ambiguity: bool = False):
    """EFE of every open-loop action sequence of length T.

    Returns ``(policies, G)`` with ``policies`` of shape (U**T, T) in
    lexicographic order.
    """
    A, B = model.A, model.B
    S, U = model.num_states, model.num_actions
    if T < 1:
        raise ValueError("T must be >= 1")
    (budget or OracleBudget()).check(S, U, T, S * U**T)
    log_C = np.log(np.asarray(C, dtype=np.float64) + EPS)
    H = entropy(A, axis=0)
    q0 = model.D if belief is None else np.asarray(belief, dtype=np.float64)
    policies = np.array(list(itertools.product(range(U), repeat=T)), dtype=np.int64)
    G = np.zeros(len(policies))
    for k, pi in enumerate(policies):
        q = q0
        for u in pi:
            q = B[u] @ q
            G[k] += _risk(A @ q, log_C)
            if include_ambiguity:
                G[k] += float(H @ q)
    return policies, G


# -- variational free energy ----------------------------------------------------


def variational_free_energy(Q, prior, likelihood_row) -> float:
    """``sum_s Q(s) [log Q(s) - log P(o|s) - log P(s)]`` with EPS smoothing."""
    Q = np.asarray(Q, dtype=np.float64)
    prior = np.asarray(prior, dtype=np.float64)
    lik = np.asarray(likelihood_row, dtype=np.float64)
    return float(np.sum(Q * (np.log(Q + EPS) - np.log(lik + EPS) - np.log(prior + EPS))))


def negative_log_evidence(prior, likelihood_row) -> float:
    return float(-np.log(np.dot(prior, likelihood_row)))


# -- value iteration ----------------------------------------------------------


@dataclass(frozen=True)
class ValueIterationResult:
    V: np.ndarray
    Q: np.ndarray  # (S, U)
    policy: np.ndarray
    iterations: int


def value_iteration(P, R, gamma: float, tol: float = 1e-10, terminal=None,
                    max_iter: int = 100_000) -> ValueIterationResult:
    """Optimal values for ``P[u, s', s]`` and rewards ``R[u, s', s]``.

    ``R`` may also be given per (s, u). Terminal states have value zero.
    """
    P = np.asarray(P, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    U, S, _ = P.shape
    if R.shape == (S, U):
        r_exp = R
    else:
        r_exp = np.einsum("uts,uts->su", P, R)
    alive = np.ones(S) if terminal is None else 1.0 - np.asarray(terminal, dtype=np.float64)
    V = np.zeros(S)
    for it in range(1, max_iter + 1):
        Q = r_exp + gamma * np.einsum("uts,t->su", P, V * alive)
        V_new = Q.max(axis=1)
        delta = np.max(np.abs(V_new - V))
        V = V_new
        if delta < tol:
            break
    Q = r_exp + gamma * np.einsum("uts,t->su", P, V * alive)
    return ValueIterationResult(V=V, Q=Q, policy=Q.argmax(axis=1), iterations=it)


def grid_mdp(grid: GridWorld):
    """``(P, R, terminal)`` of a grid world with the goal absorbing."""
    _, P = grid.true_model()
    n = grid.num_cells
    R = np.full((4, n, n), grid.step_reward)
    R[:, grid.goal_cell, :] = grid.goal_reward
    terminal = np.zeros(n, dtype=bool)
    terminal[grid.goal_cell] = True
    return P, R, terminal

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpefe.categorical import EPS, one_hot
from dpefe.gridworld import EAST, load_grid, load_grid_file
from dpefe.inference import infer_state
from dpefe.model import GenerativeModel
from dpefe.oracles import (
    BudgetExceeded,
    OracleBudget,
    bfs_distances,
    bfs_shortest_path,
    caif_policy_efe,
    flood_fill_length,
    grid_mdp,
    negative_log_evidence,
    optimal_first_moves,
    si_tree_efe,
    value_iteration,
    variational_free_energy,
)
from dpefe.planner import PlanConfig, immediate_efe, plan_backward


def det_model(S, U, rng, absorbing_goal=None):
    B = np.zeros((U, S, S))
    for u in range(U):
        B[u, rng.integers(S, size=S), np.arange(S)] = 1.0
    if absorbing_goal is not None:
        B[:, :, absorbing_goal] = 0.0
        B[:, absorbing_goal, absorbing_goal] = 1.0
    return GenerativeModel.from_matrices(np.eye(S), B)


def chain(n, U=2):
    """Action 1 moves right, action 0 stays; the last state absorbs."""
    B = np.zeros((U, n, n))
    for s in range(n):
        B[0, s, s] = 1.0
        B[1, min(s + 1, n - 1), s] = 1.0
    return GenerativeModel.from_matrices(np.eye(n), B)


class TestShortestPath:
    def test_start_is_goal(self):
        g = load_grid("SG")
        assert bfs_shortest_path(g, 0, 0).length == 0

    def test_corridor(self):
        g = load_grid("S...G")
        sp = bfs_shortest_path(g, 0, 4)
        assert sp.length == 4 and sp.first_moves == {EAST}

    def test_unreachable(self):
        g = load_grid("S#G")
        sp = bfs_shortest_path(g, 0, 2)
        assert not sp.reachable and sp.length is None
        assert flood_fill_length(g, 0, 2) is None

    def test_rejects_wall(self):
        with pytest.raises(ValueError):
            bfs_shortest_path(load_grid("S#G"), 1, 2)

    @pytest.mark.parametrize("name", ["grid100", "grid400", "grid900"])
    def test_cross_check_with_flood_fill(self, name):
        g = load_grid_file(name)
        rng = np.random.default_rng(0)
        cells = rng.choice(g.valid_cells, size=(25, 2))
        for s, t in [(g.start_cell, g.goal_cell), *cells]:
            assert bfs_shortest_path(g, int(s), int(t)).length == flood_fill_length(g, int(s), int(t))

    def test_grid100_start_goal_length(self):
        g = load_grid_file("grid100")
        assert bfs_shortest_path(g, g.start_cell, g.goal_cell).length == 16

    def test_first_moves_are_exactly_the_descending_moves(self):
        g = load_grid("S..\n...\n..G")
        sp = bfs_shortest_path(g, 0, 8)
        assert sp.length == 4 and sp.first_moves == {1, 2}  # South, East


class TestBudget:
    def test_refuses_large_tree(self):
        m = det_model(6, 3, np.random.default_rng(0))
        with pytest.raises(BudgetExceeded):
            si_tree_efe(m, one_hot(0, 6), 7, OracleBudget(max_horizon=10))
        with pytest.raises(BudgetExceeded):
            si_tree_efe(m, one_hot(0, 6), 3, OracleBudget(max_states=5))

    def test_refuses_large_policy_space(self):
        m = det_model(3, 4, np.random.default_rng(0))
        with pytest.raises(BudgetExceeded):
            caif_policy_efe(m, one_hot(0, 3), 12, OracleBudget(max_horizon=20))


class TestSiTree:
    def test_two_step_is_immediate_efe(self):
        rng = np.random.default_rng(1)
        A = rng.dirichlet(np.ones(4), size=3).T
        B = np.stack([rng.dirichlet(np.ones(3), size=3).T for _ in range(2)])
        m = GenerativeModel.from_matrices(A, B)
        m.set_preference(rng.dirichlet(np.ones(4)))
        for s in range(3):
            G = si_tree_efe(m, m.C, 2, belief=one_hot(s, 3))
            np.testing.assert_allclose(G, immediate_efe(m, include_ambiguity=True)[s], atol=1e-9)

    def test_uniform_preference_ties(self):
        m = det_model(4, 3, np.random.default_rng(2))
        G = si_tree_efe(m, np.full(4, 0.25), 3, belief=one_hot(0, 4), include_ambiguity=False)
        assert np.ptp(G) < 1e-9

    def test_matches_dpefe_greedy_action(self):
        # 4 states, 2 actions, T = 3 with the goal absorbing
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(40):
            m = det_model(4, 2, rng, absorbing_goal=3)
            C = one_hot(3, 4) + EPS
            C /= C.sum()
            m.set_preference(C)
            table = plan_backward(m, PlanConfig(horizon=3))
            for s in range(3):
                G = si_tree_efe(m, C, 3, belief=one_hot(s, 4), include_ambiguity=False)
                if np.sort(G)[1] - G.min() > 1e-6:
                    assert np.argmin(G) == np.argmin(table.level(1)[s])
                    np.testing.assert_allclose(G, table.level(1)[s], rtol=1e-9, atol=1e-9)
                    checked += 1
        assert checked > 20


class TestCaif:
    def test_single_step_matches_tree_base_case(self):
        rng = np.random.default_rng(4)
        A = rng.dirichlet(np.ones(3), size=3).T
        B = np.stack([rng.dirichlet(np.ones(3), size=3).T for _ in range(3)])
        m = GenerativeModel.from_matrices(A, B)
        C = rng.dirichlet(np.ones(3))
        q = rng.dirichlet(np.ones(3))
        pol, G = caif_policy_efe(m, C, 1, belief=q, include_ambiguity=True)
        assert pol.shape == (3, 1)
        np.testing.assert_allclose(G, si_tree_efe(m, C, 2, belief=q), atol=1e-12)

    def test_absorbed_goal_symmetry(self):
        m = chain(3)
        C = one_hot(2, 3)
        pol, G = caif_policy_efe(m, C, 3, belief=one_hot(1, 3))
        g = dict(zip(map(tuple, pol), G))
        # both reach the goal on the first step; what follows is irrelevant
        assert g[(1, 0, 0)] == pytest.approx(g[(1, 1, 0)], abs=1e-9)
        assert g[(1, 0, 1)] == pytest.approx(g[(1, 1, 1)], abs=1e-9)

    def test_best_policy_first_move(self):
        m = chain(3)
        pol, G = caif_policy_efe(m, one_hot(2, 3), 3, belief=one_hot(0, 3))
        assert len(pol) == 8
        assert pol[np.argmin(G)][0] == 1

    def test_agrees_with_tree_on_deterministic_mdps(self):
        rng = np.random.default_rng(5)
        agree = 0
        for _ in range(30):
            m = det_model(4, 2, rng, absorbing_goal=0)
            C = one_hot(0, 4)
            s0 = one_hot(int(rng.integers(1, 4)), 4)
            _, Gc = caif_policy_efe(m, C, 3, belief=s0)
            first = Gc.reshape(2, -1).min(axis=1)
            Gs = si_tree_efe(m, C, 4, belief=s0, include_ambiguity=False)
            if np.sort(first)[1] - first.min() > 1e-3 and np.sort(Gs)[1] - Gs.min() > 1e-3:
                assert np.argmin(first) == np.argmin(Gs)
                agree += 1
        assert agree > 5


class TestFreeEnergy:
    def test_tight_at_posterior(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            prior = rng.dirichlet(np.ones(5))
            lik = rng.random(5)
            Q = infer_state(prior, 0, lik[None, :]).belief
            assert variational_free_energy(Q, prior, lik) == pytest.approx(
                negative_log_evidence(prior, lik), abs=1e-9)

    def test_uniform_likelihood(self):
        prior = np.array([0.1, 0.2, 0.7])
        assert variational_free_energy(prior, prior, np.full(3, 0.3)) == pytest.approx(
            -math.log(0.3), abs=1e-12)

    @settings(max_examples=200)
    @given(st.integers(0, 2**31))
    def test_jensen_bound(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 8))
        prior, lik = rng.dirichlet(np.ones(n)), rng.random(n)
        Qs = infer_state(prior, 0, lik[None, :]).belief
        F_star = variational_free_energy(Qs, prior, lik)
        for _ in range(5):
            assert variational_free_energy(rng.dirichlet(np.ones(n)), prior, lik) >= F_star - 1e-12


class TestValueIteration:
    def test_zero_rewards(self):
        P = np.stack([np.eye(3), np.roll(np.eye(3), 1, 0)])
        vi = value_iteration(P, np.zeros((2, 3, 3)), 0.9)
        assert not vi.V.any()

    def test_geometric_chain(self):
        n, R, g = 5, 10.0, 0.9
        P = chain(n).B
        Rw = np.zeros((2, n, n))
        Rw[:, n - 1, :] = R
        vi = value_iteration(P, Rw, g, terminal=one_hot(n - 1, n).astype(bool))
        for s in range(n - 1):
            d = n - 1 - s
            assert vi.V[s] == pytest.approx(g ** (d - 1) * R, rel=1e-9)

    def test_rewards_per_state_action(self):
        P = np.stack([np.eye(2)])
        vi = value_iteration(P, np.array([[1.0], [0.0]]), 0.5)
        np.testing.assert_allclose(vi.V, [2.0, 0.0], atol=1e-9)

    def test_grid100_greedy_moves_are_bfs_moves(self):
        grid = load_grid_file("grid100")
        vi = value_iteration(*grid_mdp(grid)[:2], 0.95, terminal=grid_mdp(grid)[2])
        dist = bfs_distances(grid, grid.goal_cell)
        for s in grid.valid_cells:
            if s == grid.goal_cell:
                continue
            best = set(np.flatnonzero(vi.Q[s] >= vi.Q[s].max() - 1e-9))
            assert best == optimal_first_moves(grid, s, dist)

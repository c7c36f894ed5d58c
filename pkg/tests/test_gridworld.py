import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpefe.categorical import is_column_stochastic
from dpefe.gridworld import (
    EAST,
    NORTH,
    SOUTH,
    WEST,
    GridParseError,
    GridWorld,
    emit_observation,
    load_grid,
    load_grid_file,
    randomize_goal,
    reset,
    start_distribution,
    step,
)
from dpefe.oracles import bfs_shortest_path

OPEN_3X3 = "...\n.S.\n..G\n"


class TestParse:
    def test_two_cells(self):
        g = load_grid("SG")
        assert (g.width, g.height, g.num_cells) == (2, 1, 2)
        assert g.valid_mask.all()
        assert bfs_shortest_path(g, g.start_cell, g.goal_cell).length == 1

    def test_wall_blocks(self):
        g = load_grid("S#G")
        assert not bfs_shortest_path(g, g.start_cell, g.goal_cell).reachable

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("S.\n.G.", "line 2: ragged"),
            ("S.\n..", "missing G"),
            ("..\n.G", "missing S"),
            ("SS\n.G", "line 1, column 2: duplicate S"),
            ("SG\nG.", "line 2, column 1: duplicate G"),
            ("S.\nxG", "line 2, column 1: illegal character 'x'"),
            ("", "empty"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(GridParseError, match=fragment):
            load_grid(text)

    @pytest.mark.parametrize("name, cells, valid, timeout",
                             [("grid100", 100, 50, 10000), ("grid400", 400, 204, 20000),
                              ("grid900", 900, 497, 40000)])
    def test_bundled(self, name, cells, valid, timeout):
        g = load_grid_file(name)
        assert g.num_cells == cells and len(g.valid_cells) == valid and g.timeout == timeout

    def test_round_trip(self):
        g = load_grid_file("grid100")
        assert load_grid(g.to_text()).to_text() == g.to_text()

    def test_row_major_indices(self):
        g = load_grid("S.#\n..G")
        assert g.cell(1, 2) == g.goal_cell == 5 and g.coords(2) == (0, 2)
        assert not g.valid_mask[2]


class TestStep:
    def test_deterministic_move(self):
        g = load_grid(OPEN_3X3)
        rng = np.random.default_rng(0)
        r = step(4, EAST, g, rng)
        assert (r.next_state, r.observation, r.reward, r.done) == (5, 5, g.step_reward, False)

    def test_wall_and_boundary(self):
        g = load_grid("S#G")
        rng = np.random.default_rng(0)
        assert step(0, EAST, g, rng).next_state == 0
        assert step(0, WEST, g, rng).next_state == 0
        assert step(0, NORTH, g, rng).next_state == 0

    def test_goal_reward_and_done(self):
        g = load_grid("SG")
        r = step(0, EAST, g, np.random.default_rng(0))
        assert r.done and r.done_reason == "goal" and r.reward == g.goal_reward

    def test_timeout(self):
        g = load_grid("S..G", timeout=3)
        rng = np.random.default_rng(0)
        assert not step(0, WEST, g, rng, t=2).done
        r = step(0, WEST, g, rng, t=3)
        assert r.done and r.done_reason == "timeout"

    def test_invalid_cell(self):
        g = load_grid("S#G")
        with pytest.raises(ValueError):
            step(1, EAST, g, np.random.default_rng(0))

    def test_transition_noise_frequency(self):
        g = load_grid(OPEN_3X3, transition_noise=0.25)
        rng = np.random.default_rng(1)
        hits = sum(step(4, NORTH, g, rng).next_state == 1 for _ in range(100_000))
        assert hits / 1e5 == pytest.approx(0.75 + 0.25 / 4, abs=0.01)

    def test_observation_noise_support(self):
        g = load_grid("S..\n.#.\n..G", observation_noise=1.0)
        rng = np.random.default_rng(2)
        seen = {emit_observation(0, g, rng) for _ in range(2000)}
        assert seen == {0, 1, 3}
        g2 = g.with_params(global_observation_noise=True)
        seen = {emit_observation(0, g2, rng) for _ in range(5000)}
        assert seen == set(g.valid_cells.tolist())

    def test_true_model_is_stochastic(self):
        g = load_grid_file("grid100", transition_noise=0.25, observation_noise=0.25)
        A, B = g.true_model()
        assert is_column_stochastic(A) and is_column_stochastic(B)

    def test_true_model_matches_sampling(self):
        g = load_grid(OPEN_3X3, transition_noise=0.25, observation_noise=0.25)
        A, B = g.true_model()
        rng = np.random.default_rng(3)
        counts = np.zeros(9)
        obs = np.zeros(9)
        for _ in range(40_000):
            r = step(4, SOUTH, g, rng)
            counts[r.next_state] += 1
            if r.next_state == 7:
                obs[r.observation] += 1
        np.testing.assert_allclose(counts / counts.sum(), B[SOUTH, :, 4], atol=0.01)
        np.testing.assert_allclose(obs / obs.sum(), A[:, 7], atol=0.015)

    def test_zero_noise_is_deterministic(self):
        g = load_grid_file("grid100")
        for s in g.valid_cells:
            for a in range(4):
                r1 = step(int(s), a, g, np.random.default_rng(1))
                r2 = step(int(s), a, g, np.random.default_rng(2))
                assert r1 == r2

    def test_walls_never_occupied(self):
        g = load_grid_file("grid100", transition_noise=0.25, observation_noise=0.25)
        rng = np.random.default_rng(4)
        actions = rng.integers(4, size=1_000_000)
        s = g.start_cell
        valid = g.valid_mask
        for t, a in enumerate(actions):
            s = step(s, int(a), g, rng).next_state
            if not valid[s]:
                pytest.fail(f"entered wall at step {t}")


class TestReset:
    def test_fixed_start(self):
        g = load_grid_file("grid100")
        rng = np.random.default_rng(0)
        assert all(reset(g, rng, randomize_start=False) == g.start_cell for _ in range(50))

    def test_single_candidate(self):
        g = load_grid("SG")
        rng = np.random.default_rng(0)
        assert all(reset(g, rng) == 0 for _ in range(50))

    def test_uniform(self):
        g = load_grid_file("grid100")
        rng = np.random.default_rng(1)
        draws = np.array([reset(g, rng) for _ in range(100_000)])
        freq = np.bincount(draws, minlength=100) / len(draws)
        cands = [c for c in g.valid_cells if c != g.goal_cell]
        assert freq[g.goal_cell] == 0 and freq[~g.valid_mask].sum() == 0
        np.testing.assert_allclose(freq[cands], 1 / 49, atol=0.005)

    def test_start_distribution_matches_reset(self):
        g = load_grid("S.#\n..G")
        D = start_distribution(g)
        rng = np.random.default_rng(2)
        freq = np.bincount([reset(g, rng) for _ in range(30_000)], minlength=6) / 30_000
        np.testing.assert_allclose(freq, D, atol=0.01)
        assert D[g.goal_cell] == 0 and D[2] == 0
        np.testing.assert_array_equal(start_distribution(g, False), np.eye(6)[0])


class TestRandomizeGoal:
    def test_two_cells_alternate(self):
        g = load_grid("SG")
        rng = np.random.default_rng(0)
        g2 = randomize_goal(g, rng)
        assert g2.goal_cell == 0 and randomize_goal(g2, rng).goal_cell == 1

    def test_never_repeats_and_uniform(self):
        g = load_grid_file("grid100")
        rng = np.random.default_rng(1)
        draws = np.array([randomize_goal(g, rng).goal_cell for _ in range(100_000)])
        assert (draws != g.goal_cell).all()
        freq = np.bincount(draws, minlength=100) / len(draws)
        cands = [c for c in g.valid_cells if c != g.goal_cell]
        np.testing.assert_allclose(freq[cands], 1 / 49, atol=0.005)

    def test_needs_two_cells(self):
        g = GridWorld(2, 1, np.array([True, False]), start_cell=0, goal_cell=0)
        with pytest.raises(ValueError):
            randomize_goal(g, np.random.default_rng(0))


@settings(max_examples=60)
@given(st.integers(0, 2**31), st.floats(0, 1), st.floats(0, 1))
def test_next_state_always_valid(seed, tn, on):
    g = load_grid_file("grid100", transition_noise=tn, observation_noise=on)
    rng = np.random.default_rng(seed)
    s = reset(g, rng)
    for _ in range(200):
        r = step(s, int(rng.integers(4)), g, rng)
        assert g.valid_mask[r.next_state] and g.valid_mask[r.observation]
        assert (r.done_reason == "goal") == (r.next_state == g.goal_cell)
        s = r.next_state

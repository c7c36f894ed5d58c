import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpefe.categorical import one_hot
from dpefe.inference import infer_state, initial_belief


def test_identity_likelihood_gives_one_hot():
    post = infer_state([0.3, 0.3, 0.4], 1, np.eye(3)).belief
    np.testing.assert_allclose(post, one_hot(1, 3), atol=1e-12)


def test_uniform_likelihood_returns_prior():
    prior = np.array([0.2, 0.5, 0.3])
    np.testing.assert_allclose(infer_state(prior, 0, np.full((2, 3), 0.5)).belief, prior,
                               atol=1e-12)


def test_hand_bayes_rule():
    A = np.array([[0.9, 0.2], [0.1, 0.8]])
    post = infer_state([0.5, 0.5], 0, A).belief
    np.testing.assert_allclose(post, [0.45 / 0.55, 0.10 / 0.55], rtol=1e-12)
    assert post[0] == pytest.approx(0.81818181818181818182, rel=1e-12)


def test_obs_out_of_range():
    with pytest.raises(IndexError):
        infer_state([0.5, 0.5], 2, np.eye(2))


def test_step_is_carried():
    assert infer_state([1.0], 0, np.ones((1, 1)), step=7).step == 7


def test_initial_belief():
    D = one_hot(2, 4)
    b = initial_belief(D, 2, np.eye(4))
    assert b.step == 1
    np.testing.assert_allclose(b.belief, D, atol=1e-12)
    np.testing.assert_allclose(initial_belief(np.full(4, 0.25), 3, np.eye(4)).belief,
                               one_hot(3, 4), atol=1e-12)


def test_fixed_point_under_repeat_observation():
    A = np.eye(3)
    q1 = infer_state(np.ones(3) / 3, 2, A).belief
    q2 = infer_state(q1, 2, A).belief
    np.testing.assert_allclose(q1, q2, atol=1e-12)


@settings(max_examples=200)
@given(st.integers(0, 2**31), st.floats(1e-3, 1e3))
def test_prior_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    A = rng.dirichlet(np.ones(4), size=5).T
    prior = rng.dirichlet(np.ones(5))
    o = int(rng.integers(4))
    np.testing.assert_allclose(infer_state(prior * scale, o, A).belief,
                               infer_state(prior, o, A).belief, atol=1e-12)


@settings(max_examples=200)
@given(st.integers(0, 2**31))
def test_posterior_is_distribution(seed):
    rng = np.random.default_rng(seed)
    A = rng.dirichlet(np.ones(6) * 0.3, size=5).T
    post = infer_state(rng.dirichlet(np.ones(5) * 0.3), int(rng.integers(6)), A).belief
    assert (post >= 0).all() and abs(post.sum() - 1) < 1e-9

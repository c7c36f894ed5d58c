"""Active inference with dynamic-programming evaluation of expected free energy."""

from .categorical import EPS, dirichlet_mean, entropy, kl_divergence, one_hot, softmax
from .inference import BeliefState, infer_state
from .model import GenerativeModel
from .planner import EfeTable, PlanConfig, action_distribution, plan_backward, sample_action
from .preference import PreferenceWeights, preference_distribution, update_preference

__all__ = [
    "EPS",
    "BeliefState",
    "EfeTable",
    "GenerativeModel",
    "PlanConfig",
    "PreferenceWeights",
    "action_distribution",
    "dirichlet_mean",
    "entropy",
    "infer_state",
    "kl_divergence",
    "one_hot",
    "plan_backward",
    "preference_distribution",
    "sample_action",
    "softmax",
    "update_preference",
]

__version__ = "0.1.0"

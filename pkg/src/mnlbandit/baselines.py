"""Baseline policies: pure exploit-on-optimism, and an adversarial-bandit reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .family import FeasibleFamily
from .model import Assortment
from .policy import OPTIMISTIC, PolicyState, Selection, optimistic_assortment


def ee_select(state: PolicyState, family: FeasibleFamily, revenues: Sequence[float]) -> Selection:
    """Always offer the optimistic assortment; no randomization, no draws.

    This is the exploit-only counterpart of the exploring policy: identical
    index machinery, but the complement is never offered, so estimation for
    this baseline reads the raw per-epoch count means rather than the
    propensity-weighted average.
    """
    star, _ = optimistic_assortment(state, family, revenues)
    probs = np.ones(state.n_items)
    state.last_star = star
    state.last_selection_probs = probs
    state.last_chunks = None
    return Selection(star, probs, OPTIMISTIC, star)


@dataclass(frozen=True)
class EXP3EGConfig:
    """Schedule knobs for the exponential-weights baseline.

    ``delta`` scales the uniform-exploration mixture and ``alpha_exp`` its
    polynomial decay; the published experiments state (alpha, delta) =
    (0.5, 0.05) without the full schedule, so the standard anytime forms
    gamma_t = min(1, delta * M * t^-alpha_exp) and
    eta_t = sqrt(log(M) / (M * t)) are used, with M the number of arms.
    """

    delta: float = 0.05
    alpha_exp: float = 0.5

    def __post_init__(self):
        if not 0 < self.delta:
            raise ValueError("delta must be positive")
        if not 0 <= self.alpha_exp <= 1:
            raise ValueError("alpha_exp must lie in [0, 1]")


class EXP3EGState:
    """Exponential weights over the enumerated assortments, one arm per set.

    Each arm is offered for a single time step (no epochs).  Rewards are
    normalized by the best single-item revenue so importance-weighted updates
    stay on a unit scale; weights are renormalized after every update, which
    leaves the sampling distribution unchanged but prevents overflow.
    """

    def __init__(self, family: FeasibleFamily, revenues: Sequence[float], config: EXP3EGConfig = EXP3EGConfig()):
        self.arms = family.assortments()
        self.arm_rank = {a: k for k, a in enumerate(self.arms)}
        self.weights = np.ones(len(self.arms))
        self.step = 1
        self.config = config
        self.reward_scale = float(np.max(np.asarray(revenues, dtype=float)))
        if self.reward_scale <= 0:
            raise ValueError("revenues must include a positive value")

    @property
    def n_arms(self) -> int:
        return len(self.arms)


def exploration_mix(state: EXP3EGState) -> float:
    """Uniform-mixture weight gamma_t at the current step, clipped to [0, 1]."""
    raw = state.config.delta * state.n_arms * state.step ** (-state.config.alpha_exp)
    return min(1.0, max(0.0, raw))


def learning_rate(state: EXP3EGState) -> float:
    return math.sqrt(math.log(state.n_arms) / (state.n_arms * state.step))


def exp3eg_probs(state: EXP3EGState) -> np.ndarray:
    """Sampling distribution: normalized weights mixed with the uniform."""
    gamma = exploration_mix(state)
    base = state.weights / state.weights.sum()
    return (1.0 - gamma) * base + gamma / state.n_arms


def exp3eg_select(state: EXP3EGState, rng: np.random.Generator) -> Assortment:
    """Draw one arm for one time step; consumes exactly one uniform draw."""
    probs = exp3eg_probs(state)
    thresholds = np.cumsum(probs)
    k = int(np.searchsorted(thresholds, rng.random(), side="right"))
    if k >= state.n_arms:
        k = state.n_arms - 1
    return state.arms[k]


def exp3eg_update(state: EXP3EGState, offered: Assortment, realized_reward: float) -> None:
    """Importance-weighted multiplicative update for the arm just played.

    The estimator reward / (scale * P(arm)) is unbiased for the arm's
    normalized expected reward under the sampling distribution in effect when
    the arm was drawn; the distribution is recomputed here, which is valid
    because the state does not change between select and update.
    """
    if realized_reward < 0:
        raise ValueError("rewards are revenues and cannot be negative")
    k = state.arm_rank.get(tuple(offered))
    if k is None:
        raise ValueError(f"offered set {offered!r} is not an enumerated arm")
    probs = exp3eg_probs(state)
    x_hat = realized_reward / (state.reward_scale * probs[k])
    state.weights[k] *= math.exp(learning_rate(state) * x_hat)
    state.weights /= state.weights.max()
    state.step += 1

"""Two-state Markov chain over {learner, profiteer}.

Transition matrix (rows = current state, learner first):

    B = | 1 - p   p     |
        | q       1 - q |

Stationary distribution: pi_learner = q / (p + q), pi_profiteer = p / (p + q).
Categories never depend on payoffs, so the expected population split is
n * pi regardless of the game being played.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agents import Category
from .errors import InvalidParameterError, UndefinedStationaryError


@dataclass(frozen=True)
class TransitionParams:
    p: float = 0.5   # learner -> profiteer
    q: float = 0.5   # profiteer -> learner

    def __post_init__(self):
        for name in ("p", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {value}")

    @property
    def is_dynamic(self) -> bool:
        return self.p + self.q > 0.0


@dataclass(frozen=True)
class StationaryDist:
    pi_learner: float
    pi_profiteer: float


def transition_matrix(tp: TransitionParams) -> np.ndarray:
    return np.array([[1.0 - tp.p, tp.p], [tp.q, 1.0 - tp.q]])


def step_category(c: Category, tp: TransitionParams, rng: np.random.Generator) -> Category:
    """Advance one agent's category by one step."""
    u = rng.random()
    if c == Category.LEARNER:
        return Category.PROFITEER if u < tp.p else Category.LEARNER
    return Category.LEARNER if u < tp.q else Category.PROFITEER


def step_categories(categories: np.ndarray, tp: TransitionParams, u: np.ndarray) -> np.ndarray:
    """Batch form of ``step_category`` given one uniform per agent."""
    learner = categories == Category.LEARNER
    switch = np.where(learner, u < tp.p, u < tp.q)
    return np.where(switch, 1 - categories, categories).astype(categories.dtype)


def stationary(tp: TransitionParams) -> StationaryDist:
    total = tp.p + tp.q
    if total <= 0.0:
        raise UndefinedStationaryError("p = q = 0: the chain never mixes, stationary distribution undefined")
    return StationaryDist(pi_learner=tp.q / total, pi_profiteer=tp.p / total)


def expected_counts(tp: TransitionParams, n: int) -> tuple[float, float]:
    """Expected (learners, profiteers) in a population of ``n``."""
    pi = stationary(tp)
    learners = n * pi.pi_learner
    return learners, n - learners


def occupation_frequency(
    tp: TransitionParams,
    steps: int,
    rng: np.random.Generator,
    start: Category = Category.LEARNER,
) -> float:
    """Fraction of ``steps`` a single simulated chain spends as a learner."""
    if steps < 1:
        raise InvalidParameterError(f"steps must be >= 1, got {steps}")
    u = rng.random(steps)
    c = start
    learner_steps = 0
    for k in range(steps):
        if c == Category.LEARNER:
            c = Category.PROFITEER if u[k] < tp.p else Category.LEARNER
        else:
            c = Category.LEARNER if u[k] < tp.q else Category.PROFITEER
        learner_steps += c == Category.LEARNER
    return learner_steps / steps

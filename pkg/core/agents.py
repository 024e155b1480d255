"""Strategy-update rules: Fermi imitation (profiteers) and epsilon-greedy Q-learning (learners).

A learner's state is the number of cooperating neighbours (its own strategy
is not counted) and its actions are {cooperate, defect}; the Q-table has one
row per possible state up to the network's maximum degree. The reward fed
to the Q update is the memory-discounted utility.

Random draws follow a fixed protocol so the per-agent functions here and the
batch kernels in ``engine`` consume uniforms the same way:

* neighbour pick: ``slot = floor(u * degree)``
* Fermi adoption: adopt when ``u < fermi_prob``
* epsilon-greedy: explore when ``u_explore < epsilon``; a random or tied
  choice is cooperate when its uniform is < 0.5
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import InvalidParameterError, InvalidStateError
from .game import MemoryParams, PayoffHistory, Strategy, memory_payoff
from .topology import Network


class Category(IntEnum):
    LEARNER = 0
    PROFITEER = 1


@dataclass(frozen=True)
class FermiParams:
    kappa: float = 0.1   # imitation noise

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise InvalidParameterError(f"kappa must be > 0, got {self.kappa}")


@dataclass(frozen=True)
class QLearnParams:
    alpha: float = 0.8    # learning rate
    gamma: float = 0.2    # discount factor
    epsilon: float = 0.1  # exploration rate
    q_init: float = 0.0   # initial value of every Q-table cell

    def __post_init__(self):
        for name in ("alpha", "gamma", "epsilon"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {value}")
        if not np.isfinite(self.q_init):
            raise InvalidParameterError(f"q_init must be finite, got {self.q_init}")


@dataclass
class AgentState:
    """Per-agent view: strategy, role, payoff memory and learning state."""
    strategy: Strategy
    category: Category
    hist: PayoffHistory
    qtable: np.ndarray                # (max_degree + 1, 2), columns = (C, D)
    last_state: int | None = None
    last_action: Strategy | None = None

    def __post_init__(self):
        if (self.last_state is None) != (self.last_action is None):
            raise InvalidStateError("last_state and last_action must be set together")


def new_qtable(max_degree: int, q_init: float = 0.0) -> np.ndarray:
    return np.full((max_degree + 1, 2), float(q_init))


# ---------------------------------------------------------------------------
# Fermi imitation
# ---------------------------------------------------------------------------

def fermi_prob(u_i, u_j, fp: FermiParams):
    """Probability that ``i`` copies ``j``: 1 / (1 + exp((u_i - u_j) / kappa)).

    Accepts scalars or arrays; the logistic saturates to exactly 0 or 1
    instead of overflowing.
    """
    return expit((np.asarray(u_j, dtype=float) - u_i) / fp.kappa)


def fermi_update(
    i: int,
    net: Network,
    agents: Sequence[AgentState],
    mp: MemoryParams,
    fp: FermiParams,
    rng: np.random.Generator,
) -> Strategy:
    """Pick a random neighbour j and adopt its strategy with the Fermi probability."""
    nbrs = net.adjacency[i]
    if not nbrs:
        raise InvalidStateError(f"node {i} has no neighbours to imitate")
    slot = min(int(rng.random() * len(nbrs)), len(nbrs) - 1)
    j = nbrs[slot]
    u_i = memory_payoff(agents[i].hist, mp)
    u_j = memory_payoff(agents[j].hist, mp)
    if rng.random() < float(fermi_prob(u_i, u_j, fp)):
        return agents[j].strategy
    return agents[i].strategy


# ---------------------------------------------------------------------------
# Q-learning
# ---------------------------------------------------------------------------

def state_index(i: int, net: Network, strategies: Sequence[int]) -> int:
    """Number of cooperating neighbours of ``i``."""
    return sum(1 for j in net.adjacency[i] if strategies[j] == Strategy.COOPERATE)


def cooperating_neighbors(net: Network, strategies: np.ndarray) -> np.ndarray:
    """``state_index`` for every node."""
    coop = strategies[net.neighbor_table] == Strategy.COOPERATE
    return np.sum(coop & net.neighbor_mask, axis=1)


def greedy_action(row, u_tie):
    """Column with the larger Q value; an exact tie is cooperate when ``u_tie < 0.5``.

    ``row`` is one Q-table row of shape (2,) or a stack of rows of shape
    (k, 2) with ``u_tie`` of length k; the stacked form returns an array.
    """
    row = np.asarray(row, dtype=float)
    q_c, q_d = row[..., 0], row[..., 1]
    tie = np.where(np.asarray(u_tie) < 0.5, int(Strategy.COOPERATE), int(Strategy.DEFECT))
    action = np.where(q_c > q_d, int(Strategy.COOPERATE), np.where(q_d > q_c, int(Strategy.DEFECT), tie))
    if action.ndim == 0:
        return Strategy(int(action))
    return action


def q_select(
    qt: np.ndarray,
    s: int,
    qp: QLearnParams,
    rng: np.random.Generator,
) -> Strategy:
    """Epsilon-greedy action for state ``s``; exact ties are broken uniformly."""
    if not 0 <= s < qt.shape[0]:
        raise InvalidParameterError(f"state {s} outside Q-table rows [0, {qt.shape[0]})")
    u_explore, u_action, u_tie = rng.random(3)
    if u_explore < qp.epsilon:
        return Strategy.COOPERATE if u_action < 0.5 else Strategy.DEFECT
    return greedy_action(qt[s], u_tie)


def q_update(
    qt: np.ndarray,
    s_t,
    a_t,
    reward,
    s_next,
    qp: QLearnParams,
    agents: np.ndarray | None = None,
) -> np.ndarray:
    """One tabular Q-learning step on cell (s_t, a_t); updates ``qt`` in place.

    With stacked tables ``qt`` of shape (n, rows, 2), ``agents`` selects the
    tables to update and ``s_t``, ``a_t``, ``reward`` and ``s_next`` are
    arrays aligned with it.
    """
    rows = qt.shape[-2]
    for s in (np.asarray(s_t), np.asarray(s_next)):
        if np.any((s < 0) | (s >= rows)):
            raise InvalidParameterError(f"state index outside Q-table rows [0, {rows})")
    if agents is None:
        cell = (int(s_t), int(a_t))
        nxt = qt[int(s_next)]
    else:
        cell = (agents, np.asarray(s_t), np.asarray(a_t, dtype=np.int64))
        nxt = qt[agents, np.asarray(s_next)]
    old = qt[cell]
    best = np.maximum(nxt[..., 0], nxt[..., 1])
    qt[cell] = old + qp.alpha * (reward + qp.gamma * best - old)
    return qt

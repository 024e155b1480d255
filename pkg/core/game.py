"""Snowdrift game payoffs and the memory-discounted utility.

Payoff matrix (row = own strategy, column = opponent), index 0 = cooperate:

    | 1       1 - r |
    | 1 + r   0     |

An agent's utility is the geometrically discounted sum of its last M round
payoffs, newest round weighted 1. Before M rounds have been played the
window is simply shorter.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidStateError
from .topology import Network


class Strategy(IntEnum):
    """Values double as row/column indices of the payoff matrix."""
    COOPERATE = 0
    DEFECT = 1

    @property
    def symbol(self) -> str:
        return "C" if self is Strategy.COOPERATE else "D"


@dataclass(frozen=True)
class PayoffParams:
    r: float = 0.5     # cost-to-benefit ratio

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise InvalidParameterError(f"r must lie in [0, 1], got {self.r}")

    def matrix(self) -> np.ndarray:
        return np.array([[1.0, 1.0 - self.r], [1.0 + self.r, 0.0]])


@dataclass(frozen=True)
class MemoryParams:
    m: int = 5         # memory length (rounds)
    beta: float = 0.5  # decay factor per round of age

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameterError(f"memory length M must be >= 1, got {self.m}")
        if not 0.0 <= self.beta <= 1.0:
            raise InvalidParameterError(f"beta must lie in [0, 1], got {self.beta}")

    def weights(self, length: int) -> list[float]:
        """Discount weights newest-first for a window of ``length`` rounds.

        Plain floats so batch and per-agent evaluation round identically.
        """
        return [self.beta ** a for a in range(min(self.m, length))]


@dataclass
class PayoffHistory:
    """Bounded chronological record of raw round payoffs, newest last."""
    m: int
    values: deque = field(default_factory=deque)

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameterError(f"history capacity must be >= 1, got {self.m}")
        self.values = deque(self.values, maxlen=self.m)

    def __len__(self) -> int:
        return len(self.values)


def pair_payoff(mine: Strategy, theirs: Strategy, pp: PayoffParams) -> float:
    """Payoff of one pairwise snowdrift encounter."""
    if mine == Strategy.COOPERATE:
        return 1.0 if theirs == Strategy.COOPERATE else 1.0 - pp.r
    return 1.0 + pp.r if theirs == Strategy.COOPERATE else 0.0


def round_payoff(
    net: Network,
    i: int,
    strategies: Sequence[int],
    pp: PayoffParams,
) -> float:
    """Total payoff of node ``i`` against all of its neighbours."""
    mine = Strategy(strategies[i])
    total = 0.0
    for j in net.adjacency[i]:
        total += pair_payoff(mine, Strategy(strategies[j]), pp)
    return total


def round_payoffs(net: Network, strategies: np.ndarray, pp: PayoffParams) -> np.ndarray:
    """Round payoff of every node at once.

    Neighbour slots are accumulated in list order, matching ``round_payoff``.
    """
    A = pp.matrix()
    s = strategies.astype(np.int64, copy=False)
    table = net.neighbor_table
    mask = net.neighbor_mask
    total = np.zeros(net.n)
    for k in range(net.max_degree):
        total += np.where(mask[:, k], A[s, s[table[:, k]]], 0.0)
    return total


def push_round(hist: PayoffHistory, pi: float) -> PayoffHistory:
    """Append a round payoff, evicting the oldest entry when full."""
    hist.values.append(float(pi))
    return hist


def memory_payoff(hist: PayoffHistory, mp: MemoryParams) -> float:
    """Discounted utility over the newest ``min(M, len(hist))`` rounds.

    Accumulates oldest-to-newest with a single accumulator.
    """
    if len(hist) == 0:
        raise InvalidStateError("memory payoff of an empty history")
    w = mp.weights(len(hist))
    window = list(hist.values)[-len(w):]
    total = 0.0
    for a in range(len(w) - 1, -1, -1):
        total += w[a] * window[len(window) - 1 - a]
    return total

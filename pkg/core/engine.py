"""Simulation engine: one trajectory, snapshots, and seeded ensembles.

Every step runs five phases, each reading the snapshot taken at the start of
the phase:

1. PLAY      every agent plays all neighbours; the round payoff is pushed
             into its memory (profiteers included).
2. UTILITY   memory-discounted utility U for every agent.
3. STRATEGY  profiteers imitate a random neighbour (Fermi rule on U);
             learners reward their stored (state, action) pair with U, then
             pick the next action epsilon-greedily from the current
             cooperating-neighbour count. All new strategies are applied at
             once.
4. CATEGORY  each agent steps its learner/profiteer chain.
5. t += 1 and metrics are recorded.

Random stream protocol (one generator per run, ascending node order): init
draws n uniforms for strategies then n for categories; each step draws, in
order, n uniforms each for neighbour pick, Fermi adoption, exploration,
random action, tie-break, and category switch. Every agent consumes its
uniforms whether or not its category uses them.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .agents import (
    AgentState,
    Category,
    FermiParams,
    QLearnParams,
    cooperating_neighbors,
    fermi_prob,
    greedy_action,
    q_update,
)
from .categories import TransitionParams, step_categories
from .errors import InvalidParameterError, InvalidStateError
from .game import MemoryParams, PayoffHistory, PayoffParams, Strategy, round_payoffs
from .stats import tail_mean
from .topology import Network, gen_small_world, gen_square_lattice

logger = logging.getLogger(__name__)

C = int(Strategy.COOPERATE)
D = int(Strategy.DEFECT)

# Second entropy word separating the network stream from the simulation stream
NETWORK_STREAM = 1


@dataclass(frozen=True)
class Params:
    """Every model constant of one simulation."""
    payoff: PayoffParams = field(default_factory=PayoffParams)
    memory: MemoryParams = field(default_factory=MemoryParams)
    fermi: FermiParams = field(default_factory=FermiParams)
    qlearn: QLearnParams = field(default_factory=QLearnParams)
    transition: TransitionParams = field(default_factory=TransitionParams)


@dataclass(frozen=True)
class NetworkSpec:
    """Recipe for a network; small-world instances are drawn per seed."""
    kind: str = "lattice"       # "lattice" | "ws"
    side: int = 50              # lattice side
    n: int = 2500               # small-world node count
    ring_degree: int = 4
    rewire_prob: float = 0.2

    def __post_init__(self):
        if self.kind not in ("lattice", "ws"):
            raise InvalidParameterError(f"network kind must be 'lattice' or 'ws', got {self.kind!r}")

    @property
    def size(self) -> int:
        return self.side * self.side if self.kind == "lattice" else self.n

    @property
    def is_random(self) -> bool:
        return self.kind == "ws"

    def build(self, seed: int = 0) -> Network:
        if self.kind == "lattice":
            return gen_square_lattice(self.side)
        return gen_small_world(self.n, self.ring_degree, self.rewire_prob, network_rng(seed))


def network_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), NETWORK_STREAM])


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass
class AgentArrays:
    """Struct-of-arrays storage for all agents of one trajectory."""
    strategy: np.ndarray        # (n,) int8, Strategy values
    category: np.ndarray        # (n,) int8, Category values
    hist: np.ndarray            # (n, M) ring buffer of round payoffs
    hist_len: int               # rounds stored (same for every agent)
    hist_pos: int               # next write column
    qtable: np.ndarray          # (n, max_degree + 1, 2)
    last_state: np.ndarray      # (n,) int64, -1 when absent
    last_action: np.ndarray     # (n,) int8, -1 when absent

    def push(self, pi: np.ndarray) -> None:
        self.hist[:, self.hist_pos] = pi
        self.hist_pos = (self.hist_pos + 1) % self.hist.shape[1]
        self.hist_len = min(self.hist_len + 1, self.hist.shape[1])

    def column(self, age: int) -> int:
        """Ring column holding the round ``age`` steps before the newest."""
        return (self.hist_pos - 1 - age) % self.hist.shape[1]

    def utilities(self, mp: MemoryParams) -> np.ndarray:
        if self.hist_len == 0:
            raise InvalidStateError("memory payoff of an empty history")
        w = mp.weights(self.hist_len)
        total = np.zeros(self.hist.shape[0])
        for a in range(len(w) - 1, -1, -1):
            total += w[a] * self.hist[:, self.column(a)]
        return total

    def chronological(self, i: int) -> list[float]:
        return [float(self.hist[i, self.column(a)]) for a in range(self.hist_len - 1, -1, -1)]


@dataclass
class SimState:
    """One trajectory: network, agents, round counter and random stream."""
    net: Network
    agents: AgentArrays
    t: int
    rng: np.random.Generator

    def agent(self, i: int) -> AgentState:
        """Copy of node ``i``'s state as an ``AgentState``."""
        a = self.agents
        has_pair = a.last_state[i] >= 0
        return AgentState(
            strategy=Strategy(int(a.strategy[i])),
            category=Category(int(a.category[i])),
            hist=PayoffHistory(m=a.hist.shape[1], values=a.chronological(i)),
            qtable=a.qtable[i].copy(),
            last_state=int(a.last_state[i]) if has_pair else None,
            last_action=Strategy(int(a.last_action[i])) if has_pair else None,
        )

    @property
    def cooperators(self) -> int:
        return int(np.count_nonzero(self.agents.strategy == C))

    @property
    def learners(self) -> int:
        return int(np.count_nonzero(self.agents.category == Category.LEARNER))


def init(net: Network, params: Params, seed: int) -> SimState:
    """Coin-toss strategies and categories, empty memories, constant Q-tables."""
    if net.n and int(net.degrees.min()) == 0:
        raise InvalidStateError("every node needs at least one neighbour")
    rng = np.random.default_rng(seed)
    n = net.n
    strategy = np.where(rng.random(n) < 0.5, C, D).astype(np.int8)
    category = np.where(rng.random(n) < 0.5, Category.LEARNER, Category.PROFITEER).astype(np.int8)
    agents = AgentArrays(
        strategy=strategy,
        category=category,
        hist=np.zeros((n, params.memory.m)),
        hist_len=0,
        hist_pos=0,
        qtable=np.full((n, net.max_degree + 1, 2), float(params.qlearn.q_init)),
        last_state=np.full(n, -1, dtype=np.int64),
        last_action=np.full(n, -1, dtype=np.int8),
    )
    return SimState(net=net, agents=agents, t=0, rng=rng)


def step(state: SimState, params: Params) -> SimState:
    """Advance ``state`` by one round in place and return it."""
    net, ag, rng = state.net, state.agents, state.rng
    n = net.n
    s = ag.strategy

    # 1. PLAY
    ag.push(round_payoffs(net, s, params.payoff))

    # 2. UTILITY
    u = ag.utilities(params.memory)

    # 3. STRATEGY
    u_nbr = rng.random(n)
    u_adopt = rng.random(n)
    u_explore = rng.random(n)
    u_action = rng.random(n)
    u_tie = rng.random(n)

    learner = ag.category == Category.LEARNER
    profiteer = ~learner
    nodes = np.arange(n)
    new = s.copy()

    slot = np.minimum((u_nbr * net.degrees).astype(np.int64), net.degrees - 1)
    j = net.neighbor_table[nodes, slot]
    adopt = profiteer & (u_adopt < fermi_prob(u, u[j], params.fermi))
    new[adopt] = s[j[adopt]]

    qp = params.qlearn
    state_now = cooperating_neighbors(net, s)
    idx = np.flatnonzero(learner & (ag.last_state >= 0))
    if idx.size:
        q_update(ag.qtable, ag.last_state[idx], ag.last_action[idx], u[idx], state_now[idx], qp, agents=idx)

    greedy = greedy_action(ag.qtable[nodes, state_now], u_tie)
    action = np.where(u_explore < qp.epsilon, np.where(u_action < 0.5, C, D), greedy)
    new[learner] = action[learner]

    ag.last_state = np.where(learner, state_now, -1)
    ag.last_action = np.where(learner, action, -1).astype(np.int8)
    ag.strategy = new

    # 4. CATEGORY
    ag.category = step_categories(ag.category, params.transition, rng.random(n))

    # 5. clock
    state.t += 1
    return state


# ---------------------------------------------------------------------------
# Metrics and snapshots
# ---------------------------------------------------------------------------

@dataclass
class MetricsSeries:
    """One record per step, taken after the step completes."""
    n: int
    t: np.ndarray
    cooperators: np.ndarray
    learner_count: np.ndarray
    cooperating_learners: np.ndarray

    @property
    def f_c(self) -> np.ndarray:
        return self.cooperators / self.n

    @property
    def profiteer_count(self) -> np.ndarray:
        return self.n - self.learner_count

    @property
    def f_c_learner(self) -> np.ndarray:
        return _safe_ratio(self.cooperating_learners, self.learner_count)

    @property
    def f_c_profiteer(self) -> np.ndarray:
        return _safe_ratio(self.cooperators - self.cooperating_learners, self.profiteer_count)

    def __len__(self) -> int:
        return len(self.t)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "f_c": self.f_c, "learner_count": self.learner_count})

    def category_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.t,
            "f_c_learner": self.f_c_learner,
            "f_c_profiteer": self.f_c_profiteer,
            "profiteer_count": self.profiteer_count,
        })


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(len(num))
    np.divide(num, den, out=out, where=den > 0)
    return out


@dataclass(frozen=True)
class Snapshot:
    t: int
    strategies: np.ndarray      # row-major copy
    side: int | None = None     # lattice side, None for small-world networks

    def render(self) -> str:
        """Text form: ``t=<t> side=<side>`` then ``side`` rows of C/D."""
        if self.side is None:
            raise InvalidStateError("snapshots can only be rendered for square lattices")
        grid = self.strategies.reshape(self.side, self.side)
        rows = ["".join("C" if v == C else "D" for v in line) for line in grid]
        return f"t={self.t} side={self.side}\n" + "".join(r + "\n" for r in rows)


def take_snapshot(state: SimState) -> Snapshot:
    return Snapshot(t=state.t, strategies=state.agents.strategy.copy(), side=state.net.side)


def run(
    net: Network,
    params: Params,
    seed: int,
    steps: int,
    snapshot_times: Iterable[int] = (),
) -> tuple[MetricsSeries, list[Snapshot]]:
    """Initialise and advance ``steps`` rounds, capturing requested snapshots.

    A snapshot time of 0 captures the initial coin-toss configuration.
    """
    if steps < 1:
        raise InvalidParameterError(f"steps must be >= 1, got {steps}")
    wanted = set(snapshot_times)
    t0 = time.time()
    state = init(net, params, seed)
    snapshots: list[Snapshot] = [take_snapshot(state)] if 0 in wanted else []

    coop = np.empty(steps, dtype=np.int64)
    learners = np.empty(steps, dtype=np.int64)
    coop_learners = np.empty(steps, dtype=np.int64)
    for k in range(steps):
        step(state, params)
        ag = state.agents
        is_c = ag.strategy == C
        is_l = ag.category == Category.LEARNER
        coop[k] = np.count_nonzero(is_c)
        learners[k] = np.count_nonzero(is_l)
        coop_learners[k] = np.count_nonzero(is_c & is_l)
        if state.t in wanted:
            snapshots.append(take_snapshot(state))

    logger.debug("run seed=%s n=%d steps=%d finished in %.2fs", seed, net.n, steps, time.time() - t0)
    series = MetricsSeries(
        n=net.n,
        t=np.arange(1, steps + 1),
        cooperators=coop,
        learner_count=learners,
        cooperating_learners=coop_learners,
    )
    return series, snapshots


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

@dataclass
class EnsembleSummary:
    """Tail averages per seed and across seeds."""
    seeds: list[int]
    n: int
    steps: int
    tail: int
    f_c_tails: np.ndarray           # per-run tail mean of f_c
    learner_tails: np.ndarray       # per-run tail mean of learner_count
    notes: list[str] = field(default_factory=list)

    @property
    def mean_f_c(self) -> float:
        return float(np.mean(self.f_c_tails))

    @property
    def mean_learner_count(self) -> float:
        return float(np.mean(self.learner_tails))

    @property
    def sem_f_c(self) -> float:
        """Standard error of ``mean_f_c`` across seeds (0 for a single seed)."""
        k = len(self.f_c_tails)
        return float(np.std(self.f_c_tails, ddof=1) / np.sqrt(k)) if k > 1 else 0.0

    def to_frame(self) -> pd.DataFrame:
        rows = pd.DataFrame({
            "seed": [str(s) for s in self.seeds],
            "mean_f_c": self.f_c_tails,
            "mean_learner_count": self.learner_tails,
        })
        grand = pd.DataFrame({
            "seed": ["mean"],
            "mean_f_c": [self.mean_f_c],
            "mean_learner_count": [self.mean_learner_count],
        })
        return pd.concat([rows, grand], ignore_index=True)


def _tail_means(series: MetricsSeries, tail: int) -> tuple[float, float]:
    return tail_mean(series.f_c, tail), tail_mean(series.learner_count, tail)


def _ensemble_member(
    net_spec: NetworkSpec,
    net: Network | None,
    params: Params,
    seed: int,
    steps: int,
    tail: int,
) -> tuple[float, float]:
    if net is None:
        net = net_spec.build(seed)
    series, _ = run(net, params, seed, steps)
    return _tail_means(series, tail)


def run_ensemble(
    net_spec: NetworkSpec,
    params: Params,
    seeds: Sequence[int],
    steps: int,
    tail: int,
    workers: int = 1,
) -> EnsembleSummary:
    """Independent runs, one per seed, averaged over the last ``tail`` steps.

    Lattices are built once and shared; small-world networks are redrawn per
    seed from a stream separate from the simulation stream. Results are
    ordered by seed position regardless of completion order.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidParameterError("seed list is empty")
    if steps < 1:
        raise InvalidParameterError(f"steps must be >= 1, got {steps}")
    if not 1 <= tail <= steps:
        raise InvalidParameterError(f"tail must lie in [1, steps={steps}], got {tail}")

    shared = None if net_spec.is_random else net_spec.build()
    jobs = [(net_spec, shared, params, s, steps, tail) for s in seeds]
    t0 = time.time()
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_ensemble_member, *zip(*jobs)))
    else:
        results = []
        for k, job in enumerate(jobs, start=1):
            results.append(_ensemble_member(*job))
            logger.info("ensemble member %d/%d (seed %d) done", k, len(jobs), job[3])

    logger.debug("ensemble of %d runs finished in %.2fs", len(seeds), time.time() - t0)
    return EnsembleSummary(
        seeds=seeds,
        n=net_spec.size,
        steps=steps,
        tail=tail,
        f_c_tails=np.array([r[0] for r in results]),
        learner_tails=np.array([r[1] for r in results]),
    )

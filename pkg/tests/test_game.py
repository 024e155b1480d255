from __future__ import annotations

import numpy as np
import pytest

from core.errors import InvalidParameterError, InvalidStateError
from core.game import (
    MemoryParams,
    PayoffHistory,
    PayoffParams,
    Strategy,
    memory_payoff,
    pair_payoff,
    push_round,
    round_payoff,
    round_payoffs,
)
from core.topology import Network, SmallWorld, gen_square_lattice

C, D = Strategy.COOPERATE, Strategy.DEFECT


def _hist(values, m=5) -> PayoffHistory:
    return PayoffHistory(m=m, values=list(values))


# --- pairwise payoffs --------------------------------------------------------

@pytest.mark.parametrize(
    "mine, theirs, expected",
    [(C, C, 1.0), (C, D, 0.5), (D, C, 1.5), (D, D, 0.0)],
)
def test_pair_payoff_at_r_half(mine, theirs, expected):
    assert pair_payoff(mine, theirs, PayoffParams(r=0.5)) == expected


@pytest.mark.parametrize("r", [0.0, 0.3, 0.7, 1.0])
def test_pair_payoff_matches_matrix(r):
    pp = PayoffParams(r=r)
    A = pp.matrix()
    for a in (C, D):
        for b in (C, D):
            assert pair_payoff(a, b, pp) == A[a, b]


@pytest.mark.parametrize("r", [-0.01, 1.01])
def test_payoff_params_reject_out_of_range(r):
    with pytest.raises(InvalidParameterError):
        PayoffParams(r=r)


def test_strategy_symbols():
    assert C.symbol == "C"
    assert D.symbol == "D"


# --- round payoffs -----------------------------------------------------------

def test_round_payoff_mixed_neighbourhood():
    net = gen_square_lattice(3)
    s = [D] * 9
    s[1] = s[3] = C          # neighbours of 4 are 1, 3, 5, 7
    pp = PayoffParams(r=0.6)
    s[4] = C
    assert round_payoff(net, 4, s, pp) == pytest.approx(2.8)
    s[4] = D
    assert round_payoff(net, 4, s, pp) == pytest.approx(3.2)


def test_round_payoff_uniform_neighbourhoods():
    net = gen_square_lattice(3)
    assert round_payoff(net, 4, [D] * 9, PayoffParams(r=0.6)) == 0.0
    s = [C] * 9
    s[4] = D
    assert round_payoff(net, 4, s, PayoffParams(r=0.5)) == pytest.approx(6.0)


def test_pair_payoff_examples():
    assert pair_payoff(C, D, PayoffParams(r=0.6)) == pytest.approx(0.4)
    assert pair_payoff(D, D, PayoffParams(r=0.9)) == 0.0
    assert pair_payoff(D, C, PayoffParams(r=0.0)) == 1.0


def test_round_payoff_is_order_independent():
    adjacency = ((1, 2, 3), (0,), (0,), (0,))
    permuted = ((3, 1, 2), (0,), (0,), (0,))
    kind = SmallWorld(2, 0.0)
    s = [C, D, C, D]
    pp = PayoffParams(r=0.35)
    a = round_payoff(Network(4, kind, adjacency), 0, s, pp)
    b = round_payoff(Network(4, kind, permuted), 0, s, pp)
    assert a == pytest.approx(b)


def test_batch_round_payoffs_equal_scalar():
    rng = np.random.default_rng(3)
    net = gen_square_lattice(6)
    pp = PayoffParams(r=0.27)
    s = (rng.random(net.n) < 0.5).astype(np.int8)
    batch = round_payoffs(net, s, pp)
    for i in range(net.n):
        assert batch[i] == round_payoff(net, i, s.tolist(), pp)


def test_batch_round_payoffs_with_uneven_degrees():
    net = Network(n=3, kind=SmallWorld(2, 0.0), adjacency=((1, 2), (0,), (0,)))
    s = np.array([C, D, C], dtype=np.int8)
    pp = PayoffParams(r=0.5)
    assert round_payoffs(net, s, pp).tolist() == [0.5 + 1.0, 1.5, 1.0]


# --- memory ------------------------------------------------------------------

def test_memory_payoff_three_rounds():
    assert memory_payoff(_hist([2, 4, 6]), MemoryParams(m=3, beta=0.5)) == pytest.approx(8.5)


def test_memory_payoff_short_history_uses_available_rounds():
    assert memory_payoff(_hist([2, 4, 6]), MemoryParams(m=5, beta=0.5)) == pytest.approx(8.5)
    assert memory_payoff(_hist([3.5]), MemoryParams(m=5, beta=0.3)) == 3.5


def test_memory_payoff_window_truncates():
    assert memory_payoff(_hist([9, 2, 4, 6], m=4), MemoryParams(m=3, beta=0.5)) == pytest.approx(8.5)


def test_memory_payoff_examples():
    h = _hist([1, 3])
    assert memory_payoff(h, MemoryParams(m=5, beta=1.0)) == pytest.approx(4.0)
    assert memory_payoff(h, MemoryParams(m=5, beta=0.0)) == pytest.approx(3.0)
    assert memory_payoff(_hist([5, 7]), MemoryParams(m=1, beta=0.5)) == pytest.approx(7.0)


def test_memory_payoff_with_m1_is_last_payoff():
    assert memory_payoff(_hist([4, 2, 8.5]), MemoryParams(m=1, beta=0.9)) == 8.5


def test_memory_payoff_empty_history():
    with pytest.raises(InvalidStateError):
        memory_payoff(_hist([]), MemoryParams())


def test_memory_payoff_matches_direct_formula():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        m = int(rng.integers(1, 21))
        beta = float(rng.random())
        length = int(rng.integers(1, 21))
        values = (rng.random(length) * 8.0).tolist()
        hist = _hist(values, m=max(m, length))
        newest_first = values[::-1][: min(m, length)]
        expected = sum(beta ** a * v for a, v in enumerate(newest_first))
        got = memory_payoff(hist, MemoryParams(m=m, beta=beta))
        assert abs(got - expected) <= 1e-12


def test_beta_one_is_plain_sum_and_beta_zero_is_last():
    values = [0.5, 1.5, 2.25, 3.0]
    assert memory_payoff(_hist(values), MemoryParams(m=5, beta=1.0)) == pytest.approx(sum(values))
    assert memory_payoff(_hist(values), MemoryParams(m=5, beta=0.0)) == 3.0


def test_push_round_evicts_oldest():
    h = PayoffHistory(m=3)
    for pi in (1, 2, 3, 4):
        push_round(h, pi)
    assert list(h.values) == [2.0, 3.0, 4.0]
    assert len(h) == 3


@pytest.mark.parametrize("kwargs", [{"m": 0}, {"beta": -0.1}, {"beta": 1.5}])
def test_memory_params_reject_out_of_range(kwargs):
    with pytest.raises(InvalidParameterError):
        MemoryParams(**kwargs)


def test_weights_are_newest_first():
    assert MemoryParams(m=3, beta=0.5).weights(10) == [1.0, 0.5, 0.25]
    assert MemoryParams(m=3, beta=0.5).weights(2) == [1.0, 0.5]


def test_push_round_fills_then_slides():
    h = PayoffHistory(m=2)
    push_round(h, 1.0)
    assert len(h) == 1
    push_round(h, 2.0)
    push_round(h, 3.0)
    assert list(h.values) == [2.0, 3.0]

    values = [float(v) for v in range(10)]
    h = PayoffHistory(m=10)
    for v in values:
        push_round(h, v)
    assert list(h.values) == values[-10:]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from hdqn import rng
from hdqn.replay import ControllerTransition, MetaTransition, ReplayBuffer


def test_push_grows_to_capacity_then_evicts_oldest():
    buf = ReplayBuffer(2)
    buf.push("a")
    assert len(buf) == 1
    buf.push("b")
    buf.push("c")
    assert len(buf) == 2
    assert buf.oldest_first() == ["b", "c"]


@given(capacity=st.integers(1, 10), n=st.integers(0, 35))
@settings(max_examples=200)
def test_fifo_order_property(capacity, n):
    buf = ReplayBuffer(capacity)
    for i in range(n):
        buf.push(i)
    expected = list(range(n))[-capacity:]
    assert buf.oldest_first() == expected
    assert len(buf) == min(n, capacity)


def test_capacity_must_be_positive():
    with pytest.raises(ValueError):
        ReplayBuffer(0)


def test_sample_with_replacement_from_singleton():
    buf = ReplayBuffer(5)
    buf.push("only")
    assert buf.sample(3, rng.stream(0, rng.REPLAY_D1)) == ["only"] * 3


def test_sample_is_deterministic_given_seed():
    buf = ReplayBuffer(10)
    for i in range(10):
        buf.push(i)
    a = buf.sample(32, rng.stream(4, rng.REPLAY_D1))
    b = buf.sample(32, rng.stream(4, rng.REPLAY_D1))
    assert a == b


def test_sample_leaves_buffer_unchanged():
    buf = ReplayBuffer(4)
    for i in range(6):
        buf.push(i)
    before = buf.oldest_first()
    buf.sample(16, rng.stream(1, rng.REPLAY_D2))
    assert buf.oldest_first() == before


def test_sample_errors():
    buf = ReplayBuffer(4)
    with pytest.raises(ValueError):
        buf.sample(1, rng.stream(0, rng.REPLAY_D1))
    buf.push("x")
    with pytest.raises(ValueError):
        buf.sample(0, rng.stream(0, rng.REPLAY_D1))


def test_sampling_uniformity_chi_square():
    """100k draws from a 10-element buffer look uniform at p > 0.01."""
    buf = ReplayBuffer(10)
    for i in range(10):
        buf.push(i)
    draws = buf.sample(100_000, rng.stream(0, rng.REPLAY_D1))
    counts = np.bincount(draws, minlength=10)
    assert counts.sum() == 100_000
    p = stats.chisquare(counts).pvalue
    assert p > 0.01, f"uniformity rejected: p={p}"


def test_transition_field_orders_match_training_batch_contract():
    # Training code unpacks these tuples positionally; field order is law.
    assert ControllerTransition._fields == (
        "state",
        "goal",
        "action",
        "intrinsic_reward",
        "next_state",
        "episode_or_goal_terminal",
    )
    assert MetaTransition._fields == (
        "state0",
        "goal",
        "cumulative_extrinsic",
        "state_next",
        "terminal",
    )


def test_disjoint_buffers_share_nothing():
    d1 = ReplayBuffer(3)
    d2 = ReplayBuffer(3)
    d1.push(ControllerTransition(0, 1, 0, 1.0, 2, False))
    assert len(d2) == 0
    d2.push(MetaTransition(0, 1, 0.5, 2, True))
    assert len(d1) == 1
    assert d1.oldest_first() != d2.oldest_first()

"""Bounded FIFO experience memories with uniform minibatch sampling.

Two disjoint memories exist at runtime: one holding per-step controller
transitions, one holding per-option meta transitions. Both use the same
ring-buffer type; they never share storage. Sampling is uniform with
replacement and leaves the buffer unchanged.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np


class ControllerTransition(NamedTuple):
    """One primitive step, as seen by the low level."""

    state: int
    goal: int
    action: int
    intrinsic_reward: float
    next_state: int
    episode_or_goal_terminal: bool


class MetaTransition(NamedTuple):
    """One completed option, as seen by the meta level.

    cumulative_extrinsic is the undiscounted sum of environment rewards
    collected while the option ran.
    """

    state0: int
    goal: int
    cumulative_extrinsic: float
    state_next: int
    terminal: bool


class ReplayBuffer:
    """Ring buffer: pushes are O(1) and the oldest item is evicted first."""

    __slots__ = ("capacity", "_items", "_next")

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._items: list = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, item) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._next] = item
            self._next += 1
            if self._next == self.capacity:
                self._next = 0

    def sample(self, k: int, rng: np.random.Generator) -> list:
        """k uniform draws with replacement. The buffer must be non-empty."""
        items = self._items
        if not items:
            raise ValueError("sample() on an empty replay buffer")
        if k <= 0:
            raise ValueError(f"minibatch size must be positive, got {k}")
        return [items[i] for i in rng.integers(0, len(items), size=k)]

    def oldest_first(self) -> list:
        """Contents in insertion order; for tests and diagnostics."""
        if len(self._items) < self.capacity:
            return list(self._items)
        return self._items[self._next :] + self._items[: self._next]

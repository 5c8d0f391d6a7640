"""Environment contract shared by the tasks and both agents."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np


class StepOutcome(NamedTuple):
    """Result of one primitive step."""

    next_state: int
    extrinsic_reward: float
    terminal: bool


class Environment:
    """Discrete episodic environment with enumerated states and actions.

    State ids are integers in [0, n_states), action ids in
    [0, n_actions). An instance holds the state of one episode at a
    time: call reset() before the first step and after every terminal
    step. Stepping a terminal or unreset episode is a caller bug and
    raises. Instances are not thread-safe; parallel runs use
    independently seeded copies.
    """

    n_states: int
    n_actions: int

    def reset(self, rng: np.random.Generator) -> int:
        """Start a new episode and return the initial state id."""
        raise NotImplementedError

    def step(self, action: int, rng: np.random.Generator) -> StepOutcome:
        """Apply one primitive action to the live episode."""
        raise NotImplementedError

    def _require_active(self) -> None:
        if getattr(self, "_done", True):
            raise RuntimeError(
                "step() on a finished or unreset episode; call reset() first"
            )

    def _check_action(self, action: int) -> None:
        if not 0 <= action < self.n_actions:
            raise ValueError(
                f"action {action} out of range for {self.n_actions} actions"
            )

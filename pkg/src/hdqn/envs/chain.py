"""Six-position random walk whose terminal payoff depends on history.

Positions run 1..6 and the observed state id is position - 1. Episodes
start at position 2 and end on entering position 1. Moving left always
steps down one position. Moving right steps up with probability 0.5 and
otherwise slips down; a successful right move at position 6 stays at 6.
Entering the terminal position pays 1.0 if position 6 was visited
earlier in the episode and 0.01 otherwise; every other step pays 0.

The visited flag is deliberately absent from the observed state id, so
the payoff is not a function of the observation an agent conditions on.
"""
from __future__ import annotations

import numpy as np

from hdqn.envs.base import Environment, StepOutcome

LEFT = 0
RIGHT = 1


class ChainEnv(Environment):
    n_positions = 6
    n_states = 6
    n_actions = 2
    start_position = 2
    terminal_position = 1
    top_position = 6
    big_reward = 1.0
    small_reward = 0.01
    right_success = 0.5

    def __init__(self) -> None:
        self._position = self.start_position
        self._visited_top = False
        self._done = True

    @property
    def position(self) -> int:
        return self._position

    @property
    def visited_top(self) -> bool:
        """Diagnostic only: hidden from the observed state."""
        return self._visited_top

    @staticmethod
    def state_of(position: int) -> int:
        return position - 1

    @staticmethod
    def position_of(state: int) -> int:
        return state + 1

    def reset(self, rng: np.random.Generator) -> int:
        self._position = self.start_position
        self._visited_top = False
        self._done = False
        return self.state_of(self._position)

    def step(self, action: int, rng: np.random.Generator) -> StepOutcome:
        self._require_active()
        self._check_action(action)
        pos = self._position
        if action == RIGHT and rng.random() < self.right_success:
            pos = min(pos + 1, self.top_position)
        else:
            pos -= 1
        self._position = pos
        if pos == self.top_position:
            self._visited_top = True
        if pos == self.terminal_position:
            self._done = True
            reward = self.big_reward if self._visited_top else self.small_reward
            return StepOutcome(self.state_of(pos), reward, True)
        return StepOutcome(self.state_of(pos), 0.0, False)

"""Flat epsilon-greedy Q-learning over the observed state, no goals.

The comparison baseline: one table over (state, action), online backups
on every step (no replay), exploration annealed on a primitive-step
clock. On the chain task this agent sees only the position, so the
history-dependent payoff is invisible to it by design.
"""
from __future__ import annotations

import numpy as np

from hdqn import rng
from hdqn.agents.exploration import EpsilonSchedule, eps_greedy
from hdqn.agents.trace import EpisodeTrace
from hdqn.values import TabularQ


class FlatQAgent:
    def __init__(
        self,
        n_states: int,
        n_actions: int,
        *,
        seed: int = 0,
        learning_rate: float = 0.00025,
        gamma: float = 0.99,
        eps: EpsilonSchedule | None = None,
    ):
        self.n_states = n_states
        self.n_actions = n_actions
        self.seed = seed
        self.gamma = gamma
        self.eps = eps if eps is not None else EpsilonSchedule()
        self.q = TabularQ(n_states, n_actions, learning_rate=learning_rate)
        self._act_gen = rng.stream(seed, rng.CONTROLLER)
        self.primitive_steps = 0

    def run_episode(
        self, env, env_gen: np.random.Generator, count_visits: bool = False
    ) -> EpisodeTrace:
        q = self.q
        gamma = self.gamma
        act_gen = self._act_gen
        n_actions = self.n_actions
        s = env.reset(env_gen)
        visits = [0] * self.n_states if count_visits else None
        trace = EpisodeTrace(state_visits=visits)
        done = False
        while not done:
            epsilon = self.eps.value(self.primitive_steps)
            a = eps_greedy(q.values(s), n_actions, epsilon, act_gen)
            s_next, r, done = env.step(a, env_gen)
            self.primitive_steps += 1
            q.backup(s, None, a, r, s_next, done, gamma)
            trace.total_reward += r
            trace.steps += 1
            if visits is not None:
                visits[s_next] += 1
            s = s_next
        return trace

    def eval_episode(
        self,
        env,
        epsilon: float,
        env_gen: np.random.Generator,
        pick_gen: np.random.Generator,
        count_visits: bool = False,
    ) -> EpisodeTrace:
        """Frozen-policy rollout; no learning."""
        s = env.reset(env_gen)
        visits = [0] * self.n_states if count_visits else None
        trace = EpisodeTrace(state_visits=visits)
        done = False
        while not done:
            a = eps_greedy(self.q.values(s), self.n_actions, epsilon, pick_gen)
            s, r, done = env.step(a, env_gen)
            trace.total_reward += r
            trace.steps += 1
            if visits is not None:
                visits[s] += 1
        return trace

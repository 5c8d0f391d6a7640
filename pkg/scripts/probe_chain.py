"""Diagnostic: watch the two-level agent learn the chain task."""
import sys
import time

import numpy as np

from hdqn import rng
from hdqn.agents import EpsilonSchedule, HierarchicalAgent
from hdqn.critic import Critic
from hdqn.envs.chain import ChainEnv

lr = float(sys.argv[1]) if len(sys.argv) > 1 else 0.00025
episodes = int(sys.argv[2]) if len(sys.argv) > 2 else 20_000
horizon = int(sys.argv[3]) if len(sys.argv) > 3 else 50_000
seed = int(sys.argv[4]) if len(sys.argv) > 4 else 0

env = ChainEnv()
critic = Critic(env)
agent = HierarchicalAgent(
    env.n_states, env.n_actions, critic.n_goals,
    seed=seed, learning_rate=lr,
    eps1=EpsilonSchedule(horizon=horizon),
    eps2=EpsilonSchedule(horizon=horizon),
)
env_gen = rng.stream(seed, rng.ENV)

t0 = time.time()
rewards = []
s6_visits = []
for ep in range(episodes):
    tr = agent.run_episode(env, critic, "joint", env_gen, count_visits=True)
    rewards.append(tr.total_reward)
    s6_visits.append(tr.state_visits[5])
    if (ep + 1) % 1000 == 0:
        block = slice(ep - 999, ep + 1)
        rates = [round(agent.tracker.success_rate(g), 2) for g in range(6)]
        eps1s = [round(agent.controller_epsilon(g), 2) for g in range(6)]
        print(
            f"ep {ep+1:6d}  r_mean {np.mean(rewards[block]):.4f}  "
            f"s6/ep {np.mean(s6_visits[block]):.3f}  "
            f"eps2 {agent.eps2.value(agent.joint_steps):.2f}  "
            f"eps1 {eps1s}  succ {rates}  "
            f"q2(s2) {[round(v, 3) for v in agent.q2.values(1)]}"
        )
print(f"{time.time()-t0:.1f}s  steps={agent.primitive_steps}")
print("q2 table:")
for s in range(6):
    print(" ", s, [round(v, 3) for v in agent.q2.values(s)])
print("q1 right-vs-left for goal s6:")
for s in range(6):
    v = agent.q1.values(s, 5)
    print(" ", s, [round(x, 3) for x in v])

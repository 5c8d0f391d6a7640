"""Diagnostic: watch the two-level agent learn the key-door task."""
import sys
import time

import numpy as np

from hdqn import rng
from hdqn.agents import EpsilonSchedule, HierarchicalAgent
from hdqn.critic import Critic, goal_set
from hdqn.envs.keydoor import KeyDoorEnv

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
pretrain_steps = int(sys.argv[2]) if len(sys.argv) > 2 else 200_000
joint_episodes = int(sys.argv[3]) if len(sys.argv) > 3 else 5_000
lr = float(sys.argv[4]) if len(sys.argv) > 4 else 0.00025

env = KeyDoorEnv()
critic = Critic(env)
names = [g.name for g in goal_set(env)]
agent = HierarchicalAgent(
    env.n_states, env.n_actions, critic.n_goals,
    seed=seed, learning_rate=lr,
    d1_capacity=1_000_000, d2_capacity=50_000,
    d1_warmup=1000, d2_warmup=1000,
    eps1=EpsilonSchedule(horizon=400_000),
    eps2=EpsilonSchedule(horizon=100_000),
)
env_gen = rng.stream(seed, rng.ENV)

t0 = time.time()
n_pre = 0
while agent.primitive_steps < pretrain_steps:
    agent.run_episode(env, critic, "pretrain", env_gen)
    n_pre += 1
print(f"pretrain: {n_pre} episodes, {agent.primitive_steps} steps, "
      f"{time.time()-t0:.0f}s, succ {[round(agent.tracker.success_rate(g), 2) for g in range(4)]}")

rewards = []
key_succ = []
picks = []
for ep in range(joint_episodes):
    tr = agent.run_episode(env, critic, "joint", env_gen)
    rewards.append(tr.total_reward)
    for g, ok in zip(tr.goal_picks, tr.goal_successes):
        picks.append(g)
        if names[g] == "key":
            key_succ.append(ok)
    if (ep + 1) % 500 == 0:
        block = slice(max(0, ep - 499), ep + 1)
        frac = np.bincount(picks[-2000:], minlength=4) / max(1, len(picks[-2000:]))
        print(
            f"ep {ep+1:5d}  r_mean {np.mean(rewards[block]):7.2f}  "
            f"eps2 {agent.eps2.value(agent.joint_steps):.2f}  "
            f"succ {[round(agent.tracker.success_rate(g), 2) for g in range(4)]}  "
            f"picks {[round(f, 2) for f in frac]}  "
            f"({time.time()-t0:.0f}s)"
        )

print("goal names:", names)
evals = [
    agent.eval_episode(env, critic, 0.1, rng.stream(1000 + i, rng.ENV), rng.stream(1000 + i, rng.EVAL))
    for i in range(100)
]
rs = [e.total_reward for e in evals]
print(f"eval eps=0.1: mean {np.mean(rs):.1f}  frac400 {np.mean([r == 400 for r in rs]):.2f}  "
      f"total {time.time()-t0:.0f}s  steps {agent.primitive_steps}")

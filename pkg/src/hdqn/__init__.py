"""Two-level Q-learning with goal-conditioned intrinsic rewards.

A meta level picks goals to maximise environment reward over
option-scale transitions; a low level picks primitive actions to reach
the current goal and is paid by an internal critic that checks goal
predicates. Both levels learn from their own replay memory. The package
also ships the two benchmark tasks (a six-position stochastic chain and
a key-door gridworld), a flat Q-learning baseline, exact solvers used
for verification, and a multi-seed experiment harness with a CLI.
"""

__version__ = "0.1.0"

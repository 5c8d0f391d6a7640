from hdqn.agents.exploration import EpsilonSchedule, GoalSuccessTracker, eps_greedy
from hdqn.agents.flat import FlatQAgent
from hdqn.agents.hierarchical import HierarchicalAgent
from hdqn.agents.trace import EpisodeTrace

__all__ = [
    "EpisodeTrace",
    "EpsilonSchedule",
    "FlatQAgent",
    "GoalSuccessTracker",
    "HierarchicalAgent",
    "eps_greedy",
]

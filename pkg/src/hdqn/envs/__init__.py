from hdqn.envs.base import Environment, StepOutcome
from hdqn.envs.chain import ChainEnv
from hdqn.envs.keydoor import KeyDoorEnv

__all__ = ["Environment", "StepOutcome", "ChainEnv", "KeyDoorEnv"]

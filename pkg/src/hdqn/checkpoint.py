"""Agent checkpoints: both value functions plus exploration state.

Binary container, little-endian. Layout:

    magic "HACK"[4] version u32 agent_kind u8
    env block: name, key-door layout text, step limit
    counters: primitive_steps, joint_steps, meta_decisions,
              completed_options (u64 each)
    gamma f8
    schedules: (start f8, floor f8, horizon u64) for the low level and,
               for the two-level agent, the meta level
    tracker: n_goals u32, window u32, floor f8, then per goal a u32
             count and that many outcome bytes (flat agent: n_goals 0)
    value blobs: u64 length + serialized value function, low level then
                 (two-level agent only) meta level

Checkpoints hold everything a frozen-policy evaluation needs; replay
contents are deliberately not persisted.
"""
from __future__ import annotations

import struct

from hdqn.agents.exploration import EpsilonSchedule
from hdqn.agents.flat import FlatQAgent
from hdqn.agents.hierarchical import HierarchicalAgent
from hdqn.envs.chain import ChainEnv
from hdqn.envs.keydoor import KeyDoorEnv
from hdqn.errors import ConfigError
from hdqn.values import dump_value_function, load_value_function

_MAGIC = b"HACK"
_VERSION = 1
_KINDS = {"flat": 0, "hdqn": 1}
_KIND_NAMES = {v: k for k, v in _KINDS.items()}


class _Writer:
    def __init__(self):
        self.parts = []

    def raw(self, data: bytes):
        self.parts.append(data)

    def pack(self, fmt: str, *values):
        self.parts.append(struct.pack("<" + fmt, *values))

    def text(self, s: str):
        data = s.encode("utf-8")
        self.pack("I", len(data))
        self.raw(data)

    def blob(self, data: bytes):
        self.pack("Q", len(data))
        self.raw(data)

    def bytes(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def pack(self, fmt: str):
        fmt = "<" + fmt
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise ConfigError("checkpoint truncated")
        values = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return values if len(values) > 1 else values[0]

    def raw(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise ConfigError("checkpoint truncated")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def text(self) -> str:
        return self.raw(self.pack("I")).decode("utf-8")

    def blob(self) -> bytes:
        return self.raw(self.pack("Q"))


def _schedule_tuple(sched: EpsilonSchedule):
    return sched.start, sched.floor, sched.horizon


def dump_agent(agent, env) -> bytes:
    w = _Writer()
    w.raw(_MAGIC)
    if isinstance(agent, HierarchicalAgent):
        kind = "hdqn"
    elif isinstance(agent, FlatQAgent):
        kind = "flat"
    else:
        raise TypeError(f"cannot checkpoint {type(agent).__name__}")
    w.pack("IB", _VERSION, _KINDS[kind])

    if isinstance(env, ChainEnv):
        w.text("chain")
        w.text("")
        w.pack("I", 0)
    elif isinstance(env, KeyDoorEnv):
        w.text("keydoor")
        w.text(env.layout_text)
        w.pack("I", env.step_limit)
    else:
        raise TypeError(f"cannot checkpoint environment {type(env).__name__}")

    if kind == "hdqn":
        w.pack(
            "QQQQ",
            agent.primitive_steps,
            agent.joint_steps,
            agent.meta_decisions,
            agent.completed_options,
        )
        w.pack("d", agent.gamma)
        w.pack("ddQ", *_schedule_tuple(agent.eps1))
        w.pack("ddQ", *_schedule_tuple(agent.eps2))
        tracker = agent.tracker
        w.pack("IId", tracker.n_goals, tracker.window, tracker.floor)
        for outcomes in tracker.dump():
            w.pack("I", len(outcomes))
            w.raw(bytes(int(o) for o in outcomes))
        w.blob(dump_value_function(agent.q1))
        w.blob(dump_value_function(agent.q2))
    else:
        w.pack("QQQQ", agent.primitive_steps, 0, 0, 0)
        w.pack("d", agent.gamma)
        w.pack("ddQ", *_schedule_tuple(agent.eps))
        w.pack("ddQ", *_schedule_tuple(agent.eps))
        w.pack("IId", 0, 1, 0.1)
        w.blob(dump_value_function(agent.q))
    return w.bytes()


def load_agent(data: bytes):
    """Rebuild (agent, env, agent_kind) from checkpoint bytes."""
    r = _Reader(data)
    if r.raw(4) != _MAGIC:
        raise ConfigError("not a checkpoint file (bad magic)")
    version, kind_id = r.pack("IB")
    if version != _VERSION:
        raise ConfigError(f"unsupported checkpoint version {version}")
    if kind_id not in _KIND_NAMES:
        raise ConfigError(f"unknown agent kind {kind_id}")
    kind = _KIND_NAMES[kind_id]

    env_name = r.text()
    layout = r.text()
    step_limit = r.pack("I")
    if env_name == "chain":
        env = ChainEnv()
    elif env_name == "keydoor":
        env = KeyDoorEnv(layout or None, step_limit=step_limit)
    else:
        raise ConfigError(f"unknown environment {env_name!r} in checkpoint")

    primitive_steps, joint_steps, meta_decisions, completed_options = r.pack("QQQQ")
    gamma = r.pack("d")
    s1, f1, h1 = r.pack("ddQ")
    s2, f2, h2 = r.pack("ddQ")
    n_goals, window, floor = r.pack("IId")
    windows = []
    for _ in range(n_goals):
        count = r.pack("I")
        windows.append([bool(b) for b in r.raw(count)])

    try:
        q_low = load_value_function(r.blob())
    except ValueError as exc:
        raise ConfigError(f"bad value function in checkpoint: {exc}") from None

    if kind == "flat":
        if env_name != "chain":
            raise ConfigError("flat-agent checkpoint must target the chain environment")
        agent = FlatQAgent(
            q_low.n_states,
            q_low.n_choices,
            learning_rate=q_low.learning_rate,
            gamma=gamma,
            eps=EpsilonSchedule(s1, f1, h1),
        )
        agent.q = q_low
        agent.primitive_steps = primitive_steps
        return agent, env, kind

    q_meta = load_value_function(r.blob())
    if q_low.n_goals != q_meta.n_choices:
        raise ConfigError(
            "checkpoint mismatch: low level conditions on "
            f"{q_low.n_goals} goals but meta level picks over {q_meta.n_choices}"
        )
    agent = HierarchicalAgent(
        q_low.n_states,
        q_low.n_choices,
        q_meta.n_choices,
        backend=q_low.kind,
        learning_rate=q_low.learning_rate,
        gamma=gamma,
        eps1=EpsilonSchedule(s1, f1, h1),
        eps2=EpsilonSchedule(s2, f2, h2),
        eps1_floor=floor,
        tracker_window=window,
        hidden=getattr(q_low, "hidden", 64) or 64,
    )
    agent.q1 = q_low
    agent.q2 = q_meta
    try:
        agent.tracker.load(windows)
    except ValueError as exc:
        raise ConfigError(f"bad tracker section in checkpoint: {exc}") from None
    agent.primitive_steps = primitive_steps
    agent.joint_steps = joint_steps
    agent.meta_decisions = meta_decisions
    agent.completed_options = completed_options
    return agent, env, kind


def save_agent(path, agent, env) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_agent(agent, env))


def read_agent(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read checkpoint {path!r}: {exc}") from None
    return load_agent(data)

"""Gridworld fetch-the-key-then-open-the-door task with a patrolling hazard.

A single room. The agent spawns at the top, the key sits in the bottom-left
corner behind a skull that patrols a segment of the bottom row, and the
door is at the top-right. Entering the key's cell pays +100 and picks the
key up; entering the door's cell while holding the key pays +300 and ends
the episode. Sharing a cell with the skull ends the episode with no
reward, as does exceeding the step limit. All dynamics are deterministic:
the only stochasticity in training comes from exploration.

The observed state id factors the agent cell, the skull's offset along
its patrol segment, the skull's heading, and the key flag. The step
counter is not observed.

Layout grammar (config key ``layout``, rows joined by ``/``):

    ``#`` wall, ``.`` floor, ``A`` agent spawn, ``K`` key, ``D`` door,
    ``L`` ladder landmark (exactly two; the leftmost is ladder_bl, the
    other ladder_br), ``S`` skull patrol cell (one contiguous horizontal
    run; the skull starts on its leftmost cell heading right).

Rows must be equal length and each of A/K/D must appear exactly once.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from hdqn.envs.base import Environment, StepOutcome
from hdqn.errors import ConfigError

UP = 0
DOWN = 1
LEFT = 2
RIGHT = 3

# (dx, dy) per action id; y grows downward.
_MOVES = ((0, -1), (0, 1), (-1, 0), (1, 0))

DIR_RIGHT = 0
DIR_LEFT = 1

DEFAULT_LAYOUT = "\n".join(
    [
        "############",
        "#....A....D#",
        "#..........#",
        "#..........#",
        "#..........#",
        "#..........#",
        "#L........L#",
        "#K.SSSSSS..#",
        "############",
    ]
)


class Entity(NamedTuple):
    kind: str
    position: tuple[int, int]
    alive: bool


class Layout(NamedTuple):
    width: int
    height: int
    walls: frozenset
    spawn: tuple[int, int]
    key: tuple[int, int]
    door: tuple[int, int]
    ladder_bl: tuple[int, int]
    ladder_br: tuple[int, int]
    patrol: tuple  # patrol cells, left to right, all on one row


def parse_layout(text: str) -> Layout:
    """Parse an ASCII map into a validated Layout.

    Accepts rows separated by newlines or by '/' (the single-line config
    form). Raises ConfigError on any violation of the grammar.
    """
    rows = [r for r in text.replace("/", "\n").splitlines() if r.strip()]
    if not rows:
        raise ConfigError("layout: empty map")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ConfigError("layout: rows must all have the same length")
    height = len(rows)

    walls = set()
    marks: dict[str, list[tuple[int, int]]] = {c: [] for c in "AKDLS"}
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                walls.add((x, y))
            elif ch == ".":
                pass
            elif ch in marks:
                marks[ch].append((x, y))
            else:
                raise ConfigError(f"layout: unknown character {ch!r} at ({x},{y})")

    for ch, want in (("A", 1), ("K", 1), ("D", 1)):
        if len(marks[ch]) != want:
            raise ConfigError(
                f"layout: expected exactly {want} {ch!r}, found {len(marks[ch])}"
            )
    if len(marks["L"]) != 2:
        raise ConfigError(f"layout: expected exactly 2 'L', found {len(marks['L'])}")
    if not marks["S"]:
        raise ConfigError("layout: no skull patrol cells 'S'")

    patrol = sorted(marks["S"])
    ys = {c[1] for c in patrol}
    if len(ys) != 1:
        raise ConfigError("layout: patrol cells must lie on a single row")
    xs = [c[0] for c in patrol]
    if xs != list(range(xs[0], xs[0] + len(xs))):
        raise ConfigError("layout: patrol cells must be contiguous")

    # Leftmost ladder is ladder_bl; ties on x broken toward the lower row.
    ladders = sorted(marks["L"], key=lambda c: (c[0], -c[1]))
    return Layout(
        width=width,
        height=height,
        walls=frozenset(walls),
        spawn=marks["A"][0],
        key=marks["K"][0],
        door=marks["D"][0],
        ladder_bl=ladders[0],
        ladder_br=ladders[1],
        patrol=tuple(patrol),
    )


def render_layout(layout: Layout) -> str:
    """Inverse of parse_layout: an ASCII map that parses back to `layout`."""
    grid = [["." for _ in range(layout.width)] for _ in range(layout.height)]
    for x, y in layout.walls:
        grid[y][x] = "#"
    for x, y in layout.patrol:
        grid[y][x] = "S"
    for mark, (x, y) in (
        ("A", layout.spawn),
        ("K", layout.key),
        ("D", layout.door),
        ("L", layout.ladder_bl),
        ("L", layout.ladder_br),
    ):
        grid[y][x] = mark
    return "\n".join("".join(row) for row in grid)


class KeyDoorEnv(Environment):
    n_actions = 4
    key_reward = 100.0
    door_reward = 300.0

    def __init__(self, layout: str | Layout | None = None, step_limit: int = 500):
        if layout is None:
            layout = DEFAULT_LAYOUT
        if not isinstance(layout, Layout):
            layout = parse_layout(layout)
        if step_limit <= 0:
            raise ConfigError(f"step_limit must be positive, got {step_limit}")
        self.layout = layout
        self.layout_text = render_layout(layout)
        self.step_limit = step_limit
        self.patrol_len = len(layout.patrol)
        # State id = ((agent_cell_index * P + skull_offset) * 2 + dir) * 2 + has_key.
        self.n_states = layout.width * layout.height * self.patrol_len * 2 * 2
        self._agent = layout.spawn
        self._skull_off = 0
        self._skull_dir = DIR_RIGHT
        self._has_key = False
        self._steps = 0
        self._done = True

    # -- state encoding ------------------------------------------------

    def _cell_index(self, cell: tuple[int, int]) -> int:
        return cell[1] * self.layout.width + cell[0]

    def encode(
        self,
        agent: tuple[int, int],
        skull_off: int,
        skull_dir: int,
        has_key: bool,
    ) -> int:
        idx = self._cell_index(agent)
        return ((idx * self.patrol_len + skull_off) * 2 + skull_dir) * 2 + int(has_key)

    def decode(self, state: int) -> tuple[tuple[int, int], int, int, bool]:
        state, has_key = divmod(state, 2)
        state, skull_dir = divmod(state, 2)
        idx, skull_off = divmod(state, self.patrol_len)
        x, y = idx % self.layout.width, idx // self.layout.width
        return (x, y), skull_off, skull_dir, bool(has_key)

    def agent_cell_index(self, state: int) -> int:
        """Agent's flat cell index; cheap enough for per-step goal checks."""
        return state // (self.patrol_len * 4)

    def entities(self, state: int) -> list[Entity]:
        """Entity configuration for a state id; pure function of the id."""
        agent, skull_off, _, has_key = self.decode(state)
        lay = self.layout
        return [
            Entity("agent", agent, True),
            Entity("key", lay.key, not has_key),
            Entity("door", lay.door, True),
            Entity("skull", lay.patrol[skull_off], True),
            Entity("ladder_bl", lay.ladder_bl, True),
            Entity("ladder_br", lay.ladder_br, True),
        ]

    # -- dynamics ------------------------------------------------------

    @property
    def steps_elapsed(self) -> int:
        return self._steps

    def reset(self, rng: np.random.Generator) -> int:
        self._agent = self.layout.spawn
        self._skull_off = 0
        self._skull_dir = DIR_RIGHT
        self._has_key = False
        self._steps = 0
        self._done = False
        return self.encode(self._agent, 0, DIR_RIGHT, False)

    def _advance_skull(self) -> None:
        if self.patrol_len == 1:
            return
        off = self._skull_off + (1 if self._skull_dir == DIR_RIGHT else -1)
        self._skull_off = off
        if off == self.patrol_len - 1:
            self._skull_dir = DIR_LEFT
        elif off == 0:
            self._skull_dir = DIR_RIGHT

    def step(self, action: int, rng: np.random.Generator) -> StepOutcome:
        self._require_active()
        self._check_action(action)
        lay = self.layout
        dx, dy = _MOVES[action]
        nx, ny = self._agent[0] + dx, self._agent[1] + dy
        if 0 <= nx < lay.width and 0 <= ny < lay.height and (nx, ny) not in lay.walls:
            self._agent = (nx, ny)
        # Skull moves after the agent; death is checked on the resulting
        # configuration only, so swapping cells mid-step is survivable.
        self._advance_skull()
        self._steps += 1

        reward = 0.0
        terminal = False
        if self._agent == lay.patrol[self._skull_off]:
            terminal = True
        else:
            if self._agent == lay.key and not self._has_key:
                self._has_key = True
                reward += self.key_reward
            if self._agent == lay.door and self._has_key:
                reward += self.door_reward
                terminal = True
        if not terminal and self._steps >= self.step_limit:
            terminal = True
        if terminal:
            self._done = True
        next_state = self.encode(
            self._agent, self._skull_off, self._skull_dir, self._has_key
        )
        return StepOutcome(next_state, reward, terminal)

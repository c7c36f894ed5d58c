"""Noisy grid-world navigation tasks.

Cells are indexed row-major over the whole rectangle, walls included, and
the observation space is the same index set. Maps are ASCII: ``#`` wall,
``.`` free, ``S`` start, ``G`` goal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

NORTH, SOUTH, EAST, WEST = range(4)
ACTION_NAMES = ("North", "South", "East", "West")
MOVES = ((-1, 0), (1, 0), (0, 1), (0, -1))

# episode step limits for the bundled maps, keyed by cell count
DEFAULT_TIMEOUTS = {100: 10000, 400: 20000, 900: 40000}


class GridParseError(ValueError):
    pass


@dataclass(frozen=True)
class GridWorld:
    width: int
    height: int
    valid_mask: np.ndarray  # flat, row-major
    start_cell: int
    goal_cell: int
    transition_noise: float = 0.0
    observation_noise: float = 0.0
    goal_reward: float = 10.0
    step_reward: float = -0.01
    timeout: int = 10000
    global_observation_noise: bool = False

    def __post_init__(self):
        if not (self.valid_mask[self.start_cell] and self.valid_mask[self.goal_cell]):
            raise ValueError("start and goal must be valid cells")

    @property
    def num_cells(self) -> int:
        return self.width * self.height

    @property
    def valid_cells(self) -> np.ndarray:
        return np.flatnonzero(self.valid_mask)

    def cell(self, row: int, col: int) -> int:
        return row * self.width + col

    def coords(self, cell: int) -> tuple[int, int]:
        return divmod(int(cell), self.width)

    def move(self, cell: int, action: int) -> int:
        """Deterministic effect of ``action``; blocked moves stay put."""
        r, c = divmod(int(cell), self.width)
        dr, dc = MOVES[action]
        r2, c2 = r + dr, c + dc
        if 0 <= r2 < self.height and 0 <= c2 < self.width:
            nxt = r2 * self.width + c2
            if self.valid_mask[nxt]:
                return nxt
        return int(cell)

    def neighbours(self, cell: int) -> list[int]:
        return sorted({self.move(cell, a) for a in range(4)} - {int(cell)})

    def observation_support(self, cell: int) -> np.ndarray:
        if self.global_observation_noise:
            return self.valid_cells
        return np.array(sorted({int(cell), *self.neighbours(cell)}))

    def with_params(self, **kw) -> "GridWorld":
        return replace(self, **kw)

    def true_model(self) -> tuple[np.ndarray, np.ndarray]:
        """The generating A (obs x states) and B (actions x states x states).

        Wall states are absorbing self-loops observed as themselves; they
        are never occupied.
        """
        n = self.num_cells
        A = np.zeros((n, n))
        B = np.zeros((4, n, n))
        for s in range(n):
            if not self.valid_mask[s]:
                A[s, s] = 1.0
                B[:, s, s] = 1.0
                continue
            support = self.observation_support(s)
            A[s, s] += 1.0 - self.observation_noise
            A[support, s] += self.observation_noise / len(support)
            for u in range(4):
                B[u, self.move(s, u), s] += 1.0 - self.transition_noise
                for v in range(4):
                    B[u, self.move(s, v), s] += self.transition_noise / 4
        return A, B

    def to_text(self) -> str:
        rows = []
        for r in range(self.height):
            line = []
            for c in range(self.width):
                i = self.cell(r, c)
                if i == self.start_cell:
                    line.append("S")
                elif i == self.goal_cell:
                    line.append("G")
                else:
                    line.append("." if self.valid_mask[i] else "#")
            rows.append("".join(line))
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class StepResult:
    next_state: int
    observation: int
    reward: float
    done: bool
    done_reason: str | None  # "goal", "timeout" or None


def load_grid(text_map: str, **params) -> GridWorld:
    lines = [ln.rstrip("\r") for ln in text_map.strip("\n").split("\n")]
    if not lines or not lines[0]:
        raise GridParseError("empty map")
    width = len(lines[0])
    valid = []
    start = goal = None
    for r, line in enumerate(lines, start=1):
        if len(line) != width:
            raise GridParseError(f"line {r}: ragged row (length {len(line)}, expected {width})")
        for c, ch in enumerate(line, start=1):
            idx = (r - 1) * width + (c - 1)
            if ch == "#":
                valid.append(False)
            elif ch in ".SG":
                valid.append(True)
                if ch == "S":
                    if start is not None:
                        raise GridParseError(f"line {r}, column {c}: duplicate S")
                    start = idx
                elif ch == "G":
                    if goal is not None:
                        raise GridParseError(f"line {r}, column {c}: duplicate G")
                    goal = idx
            else:
                raise GridParseError(f"line {r}, column {c}: illegal character {ch!r}")
    if start is None:
        raise GridParseError("missing S")
    if goal is None:
        raise GridParseError("missing G")
    cells = width * len(lines)
    params.setdefault("timeout", DEFAULT_TIMEOUTS.get(cells, 100 * cells))
    return GridWorld(width, len(lines), np.array(valid), start, goal, **params)


def bundled_grid_path(name: str) -> Path:
    return Path(str(resources.files("dpefe") / "grids" / f"{name}.txt"))


def load_grid_file(path_or_name, **params) -> GridWorld:
    p = Path(path_or_name)
    if not p.exists():
        p = bundled_grid_path(str(path_or_name))
    return load_grid(p.read_text(), **params)


def step(env_state: int, action: int, grid: GridWorld, rng: np.random.Generator,
         t: int = 1) -> StepResult:
    """Advance one step from ``env_state``; ``t`` is the 1-based step count."""
    if not (0 <= env_state < grid.num_cells and grid.valid_mask[env_state]):
        raise ValueError(f"invalid cell {env_state}")
    if grid.transition_noise and rng.random() < grid.transition_noise:
        action = int(rng.integers(4))
    nxt = grid.move(env_state, action)
    obs = emit_observation(nxt, grid, rng)
    if nxt == grid.goal_cell:
        return StepResult(nxt, obs, grid.goal_reward, True, "goal")
    done = t >= grid.timeout
    return StepResult(nxt, obs, grid.step_reward, done, "timeout" if done else None)


def emit_observation(cell: int, grid: GridWorld, rng: np.random.Generator) -> int:
    """Sensor reading for ``cell``: itself, or with probability
    ``observation_noise`` a uniform draw from ``observation_support``."""
    if grid.observation_noise and rng.random() < grid.observation_noise:
        support = grid.observation_support(cell)
        return int(support[rng.integers(len(support))])
    return int(cell)


def reset(grid: GridWorld, rng: np.random.Generator, randomize_start: bool = True) -> int:
    if not randomize_start and grid.start_cell != grid.goal_cell:
        return grid.start_cell
    cands = grid.valid_cells[grid.valid_cells != grid.goal_cell]
    return int(cands[rng.integers(len(cands))])


def start_distribution(grid: GridWorld, randomize_start: bool = True) -> np.ndarray:
    """Distribution of the cell returned by ``reset``."""
    D = np.zeros(grid.num_cells)
    if not randomize_start and grid.start_cell != grid.goal_cell:
        D[grid.start_cell] = 1.0
    else:
        cands = grid.valid_cells[grid.valid_cells != grid.goal_cell]
        D[cands] = 1.0 / len(cands)
    return D


def randomize_goal(grid: GridWorld, rng: np.random.Generator) -> GridWorld:
    cands = grid.valid_cells[grid.valid_cells != grid.goal_cell]
    if len(cands) == 0:
        raise ValueError("need at least two valid cells")
    return replace(grid, goal_cell=int(cands[rng.integers(len(cands))]))

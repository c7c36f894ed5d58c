"""Regenerate the bundled maze maps.

Each map is carved from a solid block by growing a corridor tree (a wall
cell may be opened only if it touches exactly one open cell), with a small
chance of opening a second connection so a few loops exist. The seed is
searched until the valid-cell count matches the target exactly. The goal
is placed at the dead end farthest from a central start, then the start is
moved to the open cell farthest from the goal.

    python scripts/make_grids.py [--out src/dpefe/grids]
"""

import argparse
from collections import deque
from pathlib import Path

import numpy as np

TARGETS = {"grid100": (10, 10, 50), "grid400": (20, 20, 204), "grid900": (30, 30, 497)}


def open_neighbours(open_, r, c):
    h, w = open_.shape
    return sum(
        open_[r + dr, c + dc]
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
        if 0 <= r + dr < h and 0 <= c + dc < w
    )


def carve(h, w, n_valid, rng, loop_prob=0.04):
    open_ = np.zeros((h, w), dtype=bool)
    open_[h // 2, w // 2] = True
    count = 1
    stall = 0
    while count < n_valid and stall < 50 * h * w:
        r, c = rng.integers(h), rng.integers(w)
        if open_[r, c]:
            stall += 1
            continue
        k = open_neighbours(open_, r, c)
        if k == 1 or (k == 2 and rng.random() < loop_prob):
            open_[r, c] = True
            count += 1
            stall = 0
        else:
            stall += 1
    return open_ if count == n_valid else None


def bfs(open_, src):
    h, w = open_.shape
    dist = -np.ones((h, w), dtype=int)
    dist[src] = 0
    q = deque([src])
    while q:
        r, c = q.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w and open_[r2, c2] and dist[r2, c2] < 0:
                dist[r2, c2] = dist[r, c] + 1
                q.append((r2, c2))
    return dist


def make(h, w, n_valid, seed0=0):
    seed = seed0
    while True:
        open_ = carve(h, w, n_valid, np.random.default_rng(seed))
        if open_ is not None:
            break
        seed += 1
    centre = (h // 2, w // 2)
    d = bfs(open_, centre)
    dead_ends = [
        (r, c) for r in range(h) for c in range(w)
        if open_[r, c] and open_neighbours(open_, r, c) == 1
    ]
    goal = max(dead_ends, key=lambda rc: (d[rc], rc))
    dg = bfs(open_, goal)
    start = tuple(int(x) for x in np.unravel_index(np.argmax(dg), dg.shape))
    rows = []
    for r in range(h):
        line = ""
        for c in range(w):
            if (r, c) == start:
                line += "S"
            elif (r, c) == goal:
                line += "G"
            else:
                line += "." if open_[r, c] else "#"
        rows.append(line)
    return "\n".join(rows) + "\n", seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/dpefe/grids"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (h, w, n) in TARGETS.items():
        text, seed = make(h, w, n)
        (out / f"{name}.txt").write_text(text)
        print(f"{name}: seed {seed}")
        print(text)


if __name__ == "__main__":
    main()

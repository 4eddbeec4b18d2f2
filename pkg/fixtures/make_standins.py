"""Regenerate the stand-in benchmark maps (the real MovingAI maps are not vendored).

    python3 fixtures/make_standins.py [OUT_DIR]
"""

import sys
from pathlib import Path

import numpy as np


def write(path: Path, grid: np.ndarray) -> None:
    h, w = grid.shape
    rows = ["".join("." if c else "@" for c in r) for r in grid]
    path.write_text(f"type octile\nheight {h}\nwidth {w}\nmap\n" + "\n".join(rows) + "\n")


def random_32(seed: int = 20) -> np.ndarray:
    # 32x32 with about 20% of cells blocked at random
    return np.random.default_rng(seed).random((32, 32)) >= 0.2


def rooms_49(seed: int = 312) -> np.ndarray:
    # 6x6 rooms of 7x7 cells joined by one-cell doors, plus 4% scattered blocks
    rng = np.random.default_rng(seed)
    g = np.zeros((49, 49), bool)
    for r in range(6):
        for c in range(6):
            g[1 + 8 * r:8 + 8 * r, 1 + 8 * c:8 + 8 * c] = True
            if c < 5:
                g[1 + 8 * r + rng.integers(7), 8 + 8 * c] = True
            if r < 5:
                g[8 + 8 * r, 1 + 8 * c + rng.integers(7)] = True
    g[rng.random(g.shape) < 0.04] = False
    return g


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    write(out / "standin-random-32-32-20.map", random_32())
    write(out / "standin-rooms-49.map", rooms_49())

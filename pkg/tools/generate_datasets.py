#!/usr/bin/env python3
"""Regenerate the CSV files bundled under src/cgtree/data/.

The tic-tac-toe endgame corpus is reconstructed exactly by enumerating every
legal finished game (x moves first, play stops at a three-in-a-row or a full
board) and recording the distinct final boards; the classic corpus has 958
boards, 626 of them wins for x.  Each of the nine squares is encoded with two
binary indicator features (is_x, is_o), giving 18 numeric features, and the
target is positive/negative for "x wins".

The five companion datasets are seeded synthetic classification problems with
structure that greedy induction handles imperfectly, sized so that training to
full convergence stays fast.
"""

import csv
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "cgtree" / "data"

LINES = [
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
]


def winner(board):
    for a, b, c in LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def tictactoe_endgames():
    finals = set()

    def play(board, mover):
        for pos in range(9):
            if board[pos] != "b":
                continue
            board[pos] = mover
            if winner(board) or "b" not in board:
                finals.add(tuple(board))
            else:
                play(board, "o" if mover == "x" else "x")
            board[pos] = "b"

    play(["b"] * 9, "x")
    rows = []
    for board in sorted(finals):
        feats = []
        for cell in board:
            feats.extend([1 if cell == "x" else 0, 1 if cell == "o" else 0])
        label = "positive" if winner(list(board)) == "x" else "negative"
        rows.append(feats + [label])
    return rows


def write_csv(name, header, rows):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def synth_xor_noise(rng, n=600):
    """Two noisy XOR blocks plus distractor features; greedy root splits are
    near-useless here."""
    rows = []
    for _ in range(n):
        a = rng.random()
        b = rng.random()
        c = rng.random()
        d = rng.random()
        label = (a > 0.5) ^ (b > 0.5)
        if rng.random() < 0.08:
            label = not label
        rows.append([round(a, 4), round(b, 4), round(c, 4), round(d, 4),
                     "hi" if label else "lo"])
    return ["f0", "f1", "f2", "f3", "label"], rows


def synth_rings(rng, n=540):
    """Three concentric label bands over a 2-d radius plus two noise features."""
    rows = []
    for _ in range(n):
        x = rng.uniform(-1, 1)
        y = rng.uniform(-1, 1)
        r = math.hypot(x, y)
        label = "core" if r < 0.4 else ("mid" if r < 0.8 else "rim")
        if rng.random() < 0.05:
            label = rng.choice(["core", "mid", "rim"])
        rows.append([round(x, 4), round(y, 4), round(rng.random(), 4),
                     round(rng.random(), 4), label])
    return ["x", "y", "n0", "n1", "label"], rows


def synth_stairs(rng, n=520):
    """A staircase decision boundary: alternating class bands along x+y."""
    rows = []
    for _ in range(n):
        x = rng.uniform(0, 4)
        y = rng.uniform(0, 4)
        band = int(x) + int(y)
        label = "odd" if band % 2 else "even"
        if rng.random() < 0.06:
            label = "odd" if label == "even" else "even"
        rows.append([round(x, 4), round(y, 4), round(rng.uniform(0, 4), 4), label])
    return ["x", "y", "z", "label"], rows


def synth_corners(rng, n=480):
    """Four Gaussian blobs labelled by diagonal pairs (a 2-d XOR layout)."""
    rows = []
    centers = [(-1, -1, "a"), (1, 1, "a"), (-1, 1, "b"), (1, -1, "b")]
    for _ in range(n):
        cx, cy, label = centers[rng.randrange(4)]
        rows.append([
            round(cx + rng.gauss(0, 0.55), 4),
            round(cy + rng.gauss(0, 0.55), 4),
            round(rng.gauss(0, 1), 4),
            label,
        ])
    return ["x", "y", "noise", "label"], rows


def synth_grid(rng, n=640):
    """Binary features with a parity-of-three target plus irrelevant bits."""
    rows = []
    for _ in range(n):
        bits = [rng.randrange(2) for _ in range(6)]
        label = "one" if (bits[0] + bits[1] + bits[2]) % 2 else "zero"
        if rng.random() < 0.05:
            label = "one" if label == "zero" else "zero"
        rows.append(bits + [label])
    return [f"b{i}" for i in range(6)] + ["label"], rows


def main():
    rows = tictactoe_endgames()
    assert len(rows) == 958, f"expected 958 endgame boards, got {len(rows)}"
    positives = sum(1 for r in rows if r[-1] == "positive")
    assert positives == 626, f"expected 626 x-wins, got {positives}"
    header = [f"sq{i}_{tag}" for i in range(9) for tag in ("x", "o")] + ["outcome"]
    write_csv("tictactoe.csv", header, rows)

    for name, maker, seed in [
        ("xor_noise.csv", synth_xor_noise, 101),
        ("rings.csv", synth_rings, 202),
        ("stairs.csv", synth_stairs, 303),
        ("corners.csv", synth_corners, 404),
        ("grid_parity.csv", synth_grid, 505),
    ]:
        header, rows = maker(random.Random(seed))
        write_csv(name, header, rows)


if __name__ == "__main__":
    main()

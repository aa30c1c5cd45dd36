#!/usr/bin/env python3
"""Writes corpus/nested_1000.txt: a spine with 50 nested loops, then toggles
of individual back edges and forward shortcuts."""

import random
import sys

N = 400
DEPTH = 50
EVENTS = 1000


def main(path):
    rng = random.Random(20240601)
    lines = [f"n {N}", "root 0", "# spine"]
    for v in range(N - 1):
        lines.append(f"+ {v} {v + 1}")
    latch = {h: N - h for h in range(1, DEPTH + 1)}
    lines.append("# nested loops, innermost first")
    for h in range(DEPTH, 0, -1):
        lines.append(f"+ {latch[h]} {h}")
    live = set(latch)
    shortcuts = set()
    lines.append("# toggles")
    count = (N - 1) + DEPTH
    while count < EVENTS:
        if rng.random() < 0.8:
            h = rng.randint(1, DEPTH)
            op = "-" if h in live else "+"
            live.symmetric_difference_update({h})
            lines.append(f"{op} {latch[h]} {h}")
        else:
            u = rng.randint(DEPTH + 1, N - DEPTH - 10)
            edge = (u, u + rng.randint(2, 8))
            op = "-" if edge in shortcuts else "+"
            shortcuts.symmetric_difference_update({edge})
            lines.append(f"{op} {edge[0]} {edge[1]}")
        count += 1
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "corpus/nested_1000.txt")

"""Matplotlib rendering of reachability graphs.

Nodes are placed in rows by breadth-first distance from the initial state.
Deadlocked states are drawn black, accepting end states grey.
"""

from __future__ import annotations

from collections import deque

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import FancyArrowPatch  # noqa: E402

from .compose import ReachabilityGraph  # noqa: E402
from .formula import render_formula  # noqa: E402

__all__ = ["layered_layout", "plot_reachability_graph"]

FONT_SIZE = 7


def layered_layout(g: ReachabilityGraph) -> dict[int, tuple[float, float]]:
    depth = {g.initial: 0}
    queue = deque([g.initial])
    while queue:
        v = queue.popleft()
        for w in g.successors(v):
            if w not in depth:
                depth[w] = depth[v] + 1
                queue.append(w)
    rows = {}
    for i in range(len(g.nodes)):
        rows.setdefault(depth.get(i, max(depth.values()) + 1), []).append(i)
    pos = {}
    for d, members in rows.items():
        width = len(members)
        for k, i in enumerate(members):
            pos[i] = (k - (width - 1) / 2.0, -float(d))
    return pos


def plot_reachability_graph(g: ReachabilityGraph, path, deadlocks=(), accepting=(),
                            title: str | None = None, show_guards: bool = True):
    """Write a figure of ``g`` to ``path`` (format from the extension)."""
    pos = layered_layout(g)
    deadlocks, accepting = set(deadlocks), set(accepting)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    # one column must fit the longest composite name at FONT_SIZE
    longest = max((len(n.name) for n in g.nodes), default=0)
    column = max(2.6, 0.07 * longest + 0.6)
    width = max(6.0, column * (max(xs) - min(xs) + 1))
    height = max(4.0, 1.3 * (max(ys) - min(ys) + 1))
    fig, ax = plt.subplots(figsize=(width, height))

    for e in g.edges:
        if e.source == e.target:
            continue
        (x0, y0), (x1, y1) = pos[e.source], pos[e.target]
        bend = 0.25 if y1 >= y0 else 0.0
        arrow = FancyArrowPatch((x0, y0), (x1, y1), arrowstyle="-|>", mutation_scale=10,
                                connectionstyle=f"arc3,rad={bend}", shrinkA=14, shrinkB=14,
                                color="0.35", lw=0.8)
        ax.add_patch(arrow)
        if show_guards:
            ax.text((x0 + x1) / 2, (y0 + y1) / 2, render_formula(e.guard),
                    fontsize=FONT_SIZE - 1, color="0.25", ha="center", va="center",
                    bbox=dict(boxstyle="round,pad=0.1", fc="white", ec="none", alpha=0.8))

    for i, n in enumerate(g.nodes):
        x, y = pos[i]
        if i in deadlocks:
            fc, tc = "black", "white"
        elif i in accepting:
            fc, tc = "0.75", "black"
        else:
            fc, tc = "white", "black"
        label = n.name
        if n.outputs:
            label += "\n" + ",".join(sorted(n.outputs))
        ax.text(x, y, label, fontsize=FONT_SIZE, ha="center", va="center", color=tc,
                bbox=dict(boxstyle="square,pad=0.3", fc=fc, ec="black",
                          lw=1.6 if i == g.initial else 0.8))

    ax.set_xlim(min(xs) - 1, max(xs) + 1)
    ax.set_ylim(min(ys) - 0.8, max(ys) + 0.8)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=FONT_SIZE + 3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

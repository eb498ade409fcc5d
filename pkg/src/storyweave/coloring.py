"""Per-timestamp conflict graphs and exact minimum coloring.

Interactions sharing a character cannot sit in the same layer, so the
interactions of one timestamp form a conflict graph whose chromatic number
is the fewest layers that timestamp needs.  Coloring is solved exactly with
the in-package 0/1 solver; an optional cap bounds the size of every color
class, trading more layers for shorter ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import bip
from .core import InteractionId, StorylineInstance, TimeId


@dataclass(frozen=True)
class ConflictGraph:
    time: TimeId
    nodes: tuple[InteractionId, ...]
    edges: tuple[tuple[InteractionId, InteractionId], ...]


@dataclass(frozen=True)
class Coloring:
    assignment: dict[InteractionId, int]
    num_colors: int

    def classes(self) -> list[list[InteractionId]]:
        out: list[list[InteractionId]] = [[] for _ in range(self.num_colors)]
        for node in sorted(self.assignment):
            out[self.assignment[node]].append(node)
        return out


def build_conflict_graph(inst: StorylineInstance, time: TimeId) -> ConflictGraph:
    """Nodes are the timestamp's interactions, edges join those sharing a character."""
    items = inst.interactions_at(time)
    edges = tuple(
        (a.id, b.id)
        for a, b in itertools.combinations(items, 2)
        if a.characters & b.characters
    )
    return ConflictGraph(time, tuple(it.id for it in items), edges)


def min_coloring(g: ConflictGraph, cap: int | None = None) -> Coloring:
    """Exact minimum proper coloring, optionally capping every class at ``cap``.

    Built as a 0/1 program: one assignment variable per node and candidate
    color, one usage variable per color, with usage forced monotone (color c
    is available only when color c-1 is used) to break the color-permutation
    symmetry.  ``cap`` = 1 is always feasible with one class per node, so
    the node count bounds the palette.
    """
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1")
    nodes = g.nodes
    n = len(nodes)
    if n == 0:
        return Coloring({}, 0)

    palette = range(n)
    mb = bip.ModelBuilder()
    used = [mb.new_var(f"used_k{c}") for c in palette]
    assign = {
        (v, c): mb.new_var(f"assign_n{v}_k{c}") for v in nodes for c in palette
    }

    for v in nodes:
        mb.add([(1, assign[(v, c)]) for c in palette], "=", 1)
    for a, b in g.edges:
        for c in palette:
            mb.add([(1, assign[(a, c)]), (1, assign[(b, c)])], "<=", 1)
    for v in nodes:
        for c in palette:
            mb.add([(1, assign[(v, c)]), (-1, used[c])], "<=", 0)
    for c in range(1, n):
        mb.add([(1, used[c]), (-1, used[c - 1])], "<=", 0)
    if cap is not None:
        for c in palette:
            mb.add([(1, assign[(v, c)]) for v in nodes], "<=", cap)
    mb.minimize([(1, u) for u in used])

    result = bip.solve(mb.build(), timeout=float("inf"))
    assert result.status == bip.OPTIMAL and result.assignment is not None
    coloring = {
        v: c for (v, c), var in assign.items() if result.value(var) == 1
    }
    return Coloring(coloring, result.objective_value or 0)


def layer_budget(
    inst: StorylineInstance, minimize: bool, cap: int | None = None
) -> dict[TimeId, int]:
    """Layer slots granted to each timestamp.

    With ``minimize`` the budget is the (capped) chromatic number of the
    conflict graph; otherwise it is simply the interaction count, one
    potential layer per interaction.
    """
    budgets: dict[TimeId, int] = {}
    for t in range(inst.num_timestamps):
        if minimize:
            budgets[t] = min_coloring(build_conflict_graph(inst, t), cap).num_colors
        else:
            budgets[t] = len(inst.interactions_at(t))
    return budgets

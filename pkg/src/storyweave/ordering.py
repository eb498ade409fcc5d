"""Horizontal ordering of the layers inside one slice.

Given the provisional layers of a timestamp (sets of character groups), we
score every layer pair with an estimate of the crossings they would force
if drawn next to each other, then pick the layer sequence as a
minimum-weight Hamiltonian path on the complete weighted graph.

Two estimators are available: partition similarity (Rand index over shared
character pairs, converted to a distance) and a direct count of four
character patterns that make a crossing unavoidable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import CharId, TimeId

# A layer is handled here as a collection of character groups, one frozenset
# per interaction; groups within one layer are pairwise disjoint.
LayerGroups = Sequence[frozenset[CharId]]

HEURISTICS = ("rand", "pattern")

MAX_EXACT_PATH_NODES = 18


@dataclass(frozen=True)
class RandCounts:
    """Pair classification behind the Rand index.

    The counting universe is every unordered pair of characters appearing
    in both layers; each such pair is together (inside one group) or apart
    in each layer, giving four buckets.
    """

    together_both: int
    apart_both: int
    apart_then_together: int
    together_then_apart: int

    @property
    def universe(self) -> int:
        return (
            self.together_both
            + self.apart_both
            + self.apart_then_together
            + self.together_then_apart
        )


@dataclass(frozen=True)
class SliceGraph:
    time: TimeId
    layers: tuple[tuple[frozenset[CharId], ...], ...]
    weights: tuple[tuple[Fraction | int, ...], ...]


def _together_pairs(layer: LayerGroups) -> set[frozenset[CharId]]:
    pairs: set[frozenset[CharId]] = set()
    for group in layer:
        for a, b in itertools.combinations(sorted(group), 2):
            pairs.add(frozenset((a, b)))
    return pairs


def rand_counts(a: LayerGroups, b: LayerGroups) -> RandCounts:
    chars_a = set().union(*a) if a else set()
    chars_b = set().union(*b) if b else set()
    shared = chars_a & chars_b
    together_a = _together_pairs(a)
    together_b = _together_pairs(b)
    n1 = n2 = n3 = n4 = 0
    for u, v in itertools.combinations(sorted(shared), 2):
        pair = frozenset((u, v))
        in_a = pair in together_a
        in_b = pair in together_b
        if in_a and in_b:
            n1 += 1
        elif not in_a and not in_b:
            n2 += 1
        elif not in_a:
            n3 += 1
        else:
            n4 += 1
    return RandCounts(n1, n2, n3, n4)


def rand_index(a: LayerGroups, b: LayerGroups) -> Fraction:
    """Partition similarity of two layers over their shared character pairs.

    (pairs classified the same way in both layers) / (all shared pairs);
    an empty universe scores 1, as layers without shared pairs cannot force
    a crossing.
    """
    c = rand_counts(a, b)
    if c.universe == 0:
        return Fraction(1)
    return Fraction(c.together_both + c.apart_both, c.universe)


def _quad_splits(layer: LayerGroups) -> dict[frozenset[CharId], set[frozenset[frozenset[CharId]]]]:
    """For each 4-character set: the 2+2 splits realized by two distinct groups."""
    out: dict[frozenset[CharId], set[frozenset[frozenset[CharId]]]] = {}
    for g1, g2 in itertools.combinations(layer, 2):
        for a, b in itertools.combinations(sorted(g1), 2):
            for c, d in itertools.combinations(sorted(g2), 2):
                quad = frozenset((a, b, c, d))
                if len(quad) != 4:
                    continue
                split = frozenset((frozenset((a, b)), frozenset((c, d))))
                out.setdefault(quad, set()).add(split)
    return out


def pattern_count(a: LayerGroups, b: LayerGroups) -> int:
    """Number of unavoidable-crossing patterns between two layers.

    A pattern is four characters split 2+2 by two groups of one layer and
    split differently by two groups of the other; whatever the orders, one
    of the four curves must cross another.  Each (character set, split,
    split) realization counts once.
    """
    splits_a = _quad_splits(a)
    splits_b = _quad_splits(b)
    total = 0
    for quad, sa in splits_a.items():
        sb = splits_b.get(quad)
        if sb:
            total += len(sa) * len(sb) - len(sa & sb)
    return total


def build_slice_graph(
    layers: Sequence[LayerGroups], heuristic: str, time: TimeId = 0
) -> SliceGraph:
    """Complete weighted graph over one slice's layers.

    ``pattern`` weights edges by :func:`pattern_count`; ``rand`` by
    1 - :func:`rand_index`, turning similarity into a distance so that the
    path solver can minimize.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    n = len(layers)
    weights = [[Fraction(0) if heuristic == "rand" else 0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        w = layer_weight(layers[i], layers[j], heuristic)
        weights[i][j] = w
        weights[j][i] = w
    return SliceGraph(
        time,
        tuple(tuple(layer) for layer in layers),
        tuple(tuple(row) for row in weights),
    )


def layer_weight(a: LayerGroups, b: LayerGroups, heuristic: str) -> Fraction | int:
    if heuristic == "pattern":
        return pattern_count(a, b)
    if heuristic == "rand":
        return Fraction(1) - rand_index(a, b)
    raise ValueError(f"unknown heuristic {heuristic!r}")


def min_path_order(g: SliceGraph) -> list[int]:
    """Minimum-weight Hamiltonian path over the slice graph, exactly.

    Subset dynamic programming, limited to :data:`MAX_EXACT_PATH_NODES`
    nodes.  Among all optimal paths the lexicographically smallest index
    sequence is returned, which also fixes the orientation of the path.
    """
    n = len(g.layers)
    if n == 0:
        raise ValueError("slice has no layers")
    if n > MAX_EXACT_PATH_NODES:
        raise ValueError(
            f"slice too large for exact path ordering ({n} > {MAX_EXACT_PATH_NODES} layers)"
        )
    if n == 1:
        return [0]
    w = g.weights

    # best[mask][v]: cheapest path visiting exactly ``mask`` and ending at v.
    full = (1 << n) - 1
    best: list[list] = [[None] * n for _ in range(full + 1)]
    for v in range(n):
        best[1 << v][v] = 0
    for mask in range(1, full + 1):
        row = best[mask]
        for v in range(n):
            cur = row[v]
            if cur is None or not (mask >> v) & 1:
                continue
            for u in range(n):
                if (mask >> u) & 1:
                    continue
                nxt = cur + w[v][u]
                cell = best[mask | (1 << u)]
                if cell[u] is None or nxt < cell[u]:
                    cell[u] = nxt

    opt = min(c for c in best[full] if c is not None)

    # A path over ``mask`` starting at v costs best[mask][v] read backwards,
    # so the lexicographically smallest optimum can be built front to back.
    path: list[int] = []
    mask = full
    budget = opt
    prev: int | None = None
    for _ in range(n):
        for v in range(n):
            if not (mask >> v) & 1:
                continue
            step = 0 if prev is None else w[prev][v]
            if best[mask][v] is not None and step + best[mask][v] == budget:
                path.append(v)
                budget -= step
                mask ^= 1 << v
                prev = v
                break
        else:
            raise AssertionError("path reconstruction failed")
    return path

"""Heuristic layout pipeline.

Three stages: (i) assign each timestamp's interactions to layers through
exact conflict-graph coloring, (ii) order the layers of every slice along a
minimum-weight Hamiltonian path under the chosen crossing estimate, then
(iii) optimize the character order of every layer with the fixed-layer
model.  The two variants differ only in the stage (ii) edge weights:
partition similarity ("rand") or unavoidable-pattern counts ("pattern").
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass

from . import bip, coloring, formulations, ordering
from .core import (
    CharId,
    CombinatorialStoryline,
    InteractionId,
    LayoutReport,
    StorylineInstance,
    TimeId,
    count_crossings,
    validate_storyline,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    heuristic: str = "rand"  # "rand" or "pattern"
    cap: int | None = None
    timeout: float = 3600.0
    seed: int = 0
    exhaustive_orientation: bool = False

    def __post_init__(self) -> None:
        if self.heuristic not in ordering.HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @property
    def algorithm(self) -> str:
        return "ps" if self.heuristic == "rand" else "pp"


def orient_slice_paths(
    slices: list[list[tuple[frozenset[CharId], ...]]],
    heuristic: str,
    exhaustive: bool = False,
) -> list[list[tuple[frozenset[CharId], ...]]]:
    """Pick a left-to-right direction for each slice's layer path.

    The path solver returns an undirected path per slice; stitching is
    greedy: keep the orientation whose first layer scores the smaller
    weight against the previous slice's last layer, ties keeping the
    canonical direction.  With ``exhaustive`` every orientation combination
    is tried instead and the total boundary weight minimized (canonical
    directions win ties via enumeration order).
    """
    if len(slices) <= 1:
        return [list(s) for s in slices]

    if exhaustive:
        if len(slices) > 20:
            raise ValueError("exhaustive orientation is limited to 20 slices")
        best: list[list[tuple[frozenset[CharId], ...]]] | None = None
        best_cost = None
        for flips in itertools.product((False, True), repeat=len(slices)):
            arranged = [
                list(reversed(s)) if flip else list(s)
                for s, flip in zip(slices, flips)
            ]
            cost = sum(
                ordering.layer_weight(a[-1], b[0], heuristic)
                for a, b in itertools.pairwise(arranged)
            )
            if best_cost is None or cost < best_cost:
                best, best_cost = arranged, cost
        assert best is not None
        return best

    out = [list(slices[0])]
    for s in slices[1:]:
        prev_last = out[-1][-1]
        keep = ordering.layer_weight(prev_last, s[0], heuristic)
        flip = ordering.layer_weight(prev_last, s[-1], heuristic)
        out.append(list(reversed(s)) if flip < keep else list(s))
    return out


def run_pipeline(
    inst: StorylineInstance, cfg: PipelineConfig
) -> tuple[CombinatorialStoryline, LayoutReport]:
    """Run coloring, slice ordering and fixed-layer crossing minimization.

    The crossing-minimization stage receives whatever remains of
    ``cfg.timeout`` after the first two stages, with a one second floor; a
    timeout there surfaces as a ``feasible-timeout`` report built from the
    solver's incumbent.
    """
    t0 = time.monotonic()

    # Stage (i): one color class per layer, per timestamp.
    classes_at: dict[TimeId, list[list[InteractionId]]] = {}
    for t in range(inst.num_timestamps):
        graph = coloring.build_conflict_graph(inst, t)
        if not graph.nodes:
            continue
        classes_at[t] = coloring.min_coloring(graph, cfg.cap).classes()
    t_color = time.monotonic()

    # Stage (ii): order each slice's layers along a cheapest path.
    def groups_of(ids: list[InteractionId]) -> tuple[frozenset[CharId], ...]:
        return tuple(inst.interactions[iid].characters for iid in ids)

    slice_times = sorted(classes_at)
    slices: list[list[tuple[frozenset[CharId], ...]]] = []
    slice_ids: list[list[list[InteractionId]]] = []
    for t in slice_times:
        layers = classes_at[t]
        graph = ordering.build_slice_graph([groups_of(ids) for ids in layers], cfg.heuristic, t)
        path = ordering.min_path_order(graph)
        slices.append([groups_of(layers[i]) for i in path])
        slice_ids.append([layers[i] for i in path])
    oriented = orient_slice_paths(slices, cfg.heuristic, cfg.exhaustive_orientation)
    # Layers with equal contents are interchangeable, so matching by content
    # against the canonical direction recovers each slice's flip decision.
    oriented_ids = [
        list(reversed(ids)) if done != canonical else ids
        for canonical, done, ids in zip(slices, oriented, slice_ids)
    ]
    t_order = time.monotonic()

    # Stage (iii): fixed layers, optimal character orders.
    budgets = {t: len(classes_at[t]) for t in slice_times}
    assignment: dict[InteractionId, int] = {}
    slot_base = 0
    for layers_ids in oriented_ids:
        for pos, ids in enumerate(layers_ids):
            for iid in ids:
                assignment[iid] = slot_base + pos
        slot_base += len(layers_ids)
    program, cat = formulations.build_model(
        inst, formulations.FIXED_LAYER, budgets, fixed_assignment=assignment
    )
    remaining = max(1.0, cfg.timeout - (time.monotonic() - t0))
    result = bip.solve(program, timeout=remaining, seed=cfg.seed)
    if result.assignment is None:
        raise RuntimeError("fixed-layer stage found no ordering within the time limit")
    story = formulations.decode(inst, formulations.FIXED_LAYER, cat, result)
    t_solve = time.monotonic()

    problems = validate_storyline(inst, story)
    if problems:
        raise RuntimeError("pipeline produced an illegal storyline: " + "; ".join(problems))
    gap = None
    if result.status == bip.FEASIBLE_TIMEOUT and (result.objective_value or 0) > 0:
        gap = bip.gap_percent(result.objective_value, result.best_lower_bound or 0)
    report = LayoutReport(
        algorithm=cfg.algorithm,
        crossings=count_crossings(story).total,
        layers=len(story.layers),
        runtime=t_solve - t0,
        status=result.status,
        gap_percent=gap,
        stage_seconds={
            "coloring": t_color - t0,
            "ordering": t_order - t_color,
            "crossing": t_solve - t_order,
        },
    )
    return story, report

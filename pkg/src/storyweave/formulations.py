"""Exact 0/1 models for crossing-minimal storylines.

Every timestamp gets a fixed budget of ordered layer slots.  Binary
variables then choose where each interaction goes (placement), how the
characters of every slot are ordered (one before/after variable per
character pair), and which co-present pairs flip between consecutive slots
(crossing indicators, the minimization objective).  Four model kinds are
built from the same machinery:

* ``ilp1``    one slot per interaction; a character is treated as present
              in every slot between its first and last interaction
              timestamp, inclusive.
* ``ilp1ml``  like ``ilp1`` but with the slot budget shrunk to the
              chromatic number of each timestamp's conflict graph.
* ``ilp2``    adds per-(character, slot) activity variables so a character
              can drop out of slots before its first or after its last
              placed interaction; crossings only count between co-active
              pairs.
* ``ilp2ml``  ``ilp2`` with minimized slot budgets.

A fifth kind, ``fixed``, keeps layer contents constant (the pipeline's
final stage): placement comes from the caller and only orderings are
optimized.

Solver assignments are decoded back into storylines; empty slots are
dropped and the reported crossing number is always recomputed with the
counting oracle rather than read off the objective.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Mapping

from . import bip, coloring
from .core import (
    CharId,
    CombinatorialStoryline,
    InteractionId,
    Layer,
    LayoutReport,
    StorylineInstance,
    TimeId,
    count_crossings,
    validate_storyline,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerSlot:
    """One reserved column: ``position`` within the slice of ``time``.

    Global slot order is lexicographic in (time, position).
    """

    time: TimeId
    position: int


@dataclass(frozen=True)
class ModelKind:
    family: str  # "ilp1", "ilp2" or "fixed"
    minimize_layers: bool = False

    @property
    def name(self) -> str:
        if self.family == "fixed":
            return "fixed"
        return self.family + ("ml" if self.minimize_layers else "")


ILP1 = ModelKind("ilp1", False)
ILP1ML = ModelKind("ilp1", True)
ILP2 = ModelKind("ilp2", False)
ILP2ML = ModelKind("ilp2", True)
FIXED_LAYER = ModelKind("fixed", False)

EXACT_KINDS: dict[str, ModelKind] = {
    "ilp1": ILP1,
    "ilp1ml": ILP1ML,
    "ilp2": ILP2,
    "ilp2ml": ILP2ML,
}


@dataclass
class VariableCatalog:
    """Bookkeeping from model building, needed to decode a solution."""

    kind: ModelKind
    slots: tuple[LayerSlot, ...]
    potential: tuple[frozenset[CharId], ...]
    placement: dict[tuple[int, InteractionId], bip.VarId] = field(default_factory=dict)
    order: dict[tuple[int, CharId, CharId], bip.VarId] = field(default_factory=dict)
    crossing: dict[tuple[int, CharId, CharId], bip.VarId] = field(default_factory=dict)
    active: dict[tuple[CharId, int], bip.VarId] = field(default_factory=dict)
    fixed_assignment: dict[InteractionId, int] | None = None


def potential_characters(inst: StorylineInstance, time: TimeId) -> frozenset[CharId]:
    """Characters whose first-to-last interaction span covers ``time``."""
    spans = inst.char_spans()
    return frozenset(c for c, (lo, hi) in spans.items() if lo <= time <= hi)


def build_slots(
    inst: StorylineInstance, budgets: Mapping[TimeId, int]
) -> tuple[LayerSlot, ...]:
    slots: list[LayerSlot] = []
    for t in range(inst.num_timestamps):
        for k in range(budgets.get(t, 0)):
            slots.append(LayerSlot(t, k))
    return tuple(slots)


def build_model(
    inst: StorylineInstance,
    kind: ModelKind,
    budgets: Mapping[TimeId, int],
    fixed_assignment: Mapping[InteractionId, int] | None = None,
    symmetry_breaking: bool = True,
    asymmetric_activity_link: bool = False,
) -> tuple[bip.BinaryProgram, VariableCatalog]:
    """Assemble the program for ``kind`` under the given slot budgets.

    ``fixed_assignment`` (interaction id to global slot index) is required
    for the ``fixed`` kind and rejected otherwise.  ``symmetry_breaking``
    forbids a slot from holding interactions while an earlier slot of the
    same slice is empty; any storyline reachable without the restriction is
    still reachable with it, at equal cost, by shifting its occupied slots
    to the front of the slice.  ``asymmetric_activity_link`` switches the
    second activity-guarded crossing constraint to a sign variant kept for
    comparison runs; the default symmetric form is the one used everywhere.
    """
    if kind.family == "fixed":
        if fixed_assignment is None:
            raise ValueError("fixed-layer models need an interaction-to-slot assignment")
    elif fixed_assignment is not None:
        raise ValueError("only fixed-layer models accept a fixed assignment")
    if asymmetric_activity_link and kind.family != "ilp2":
        raise ValueError("the activity link variant only applies to ilp2 models")

    spans = inst.char_spans()
    slots = build_slots(inst, budgets)
    potential = tuple(
        frozenset(c for c, (lo, hi) in spans.items() if lo <= s.time <= hi)
        for s in slots
    )
    cat = VariableCatalog(kind=kind, slots=slots, potential=potential)
    if fixed_assignment is not None:
        cat.fixed_assignment = dict(fixed_assignment)
        placed_at: dict[int, list[InteractionId]] = {si: [] for si in range(len(slots))}
        for iid, si in sorted(cat.fixed_assignment.items()):
            if not (0 <= si < len(slots)):
                raise ValueError(f"interaction {iid} assigned to unknown slot {si}")
            if inst.interactions[iid].time != slots[si].time:
                raise ValueError(f"interaction {iid} assigned to a slot of another timestamp")
            placed_at[si].append(iid)

    mb = bip.ModelBuilder()
    slots_at: dict[TimeId, list[int]] = {}
    for si, s in enumerate(slots):
        slots_at.setdefault(s.time, []).append(si)

    # Placement variables and constraints (free-assignment kinds only).
    if kind.family != "fixed":
        for si, s in enumerate(slots):
            for it in inst.interactions_at(s.time):
                cat.placement[(si, it.id)] = mb.new_var(f"y_s{si}_i{it.id}")
        for it in inst.interactions:
            row = [(1, cat.placement[(si, it.id)]) for si in slots_at.get(it.time, [])]
            if not row:
                raise ValueError(
                    f"timestamp {it.time} has interactions but a zero slot budget"
                )
            mb.add(row, "=", 1)
        for t, sis in slots_at.items():
            items = inst.interactions_at(t)
            for a, b in itertools.combinations(items, 2):
                if a.characters & b.characters:
                    for si in sis:
                        mb.add(
                            [(1, cat.placement[(si, a.id)]), (1, cat.placement[(si, b.id)])],
                            "<=",
                            1,
                        )
            if symmetry_breaking:
                for earlier, later in itertools.pairwise(sis):
                    fill = [(-1, cat.placement[(earlier, it.id)]) for it in items]
                    for it in items:
                        mb.add([(1, cat.placement[(later, it.id)])] + fill, "<=", 0)

    # Ordering variables: one per slot and character pair, smaller index first.
    for si in range(len(slots)):
        for ci, cj in itertools.combinations(sorted(potential[si]), 2):
            cat.order[(si, ci, cj)] = mb.new_var(f"x_s{si}_c{ci}_c{cj}")

    # Crossing indicators per gap between consecutive slots.
    for gi in range(len(slots) - 1):
        for ci, cj in itertools.combinations(sorted(potential[gi] & potential[gi + 1]), 2):
            cat.crossing[(gi, ci, cj)] = mb.new_var(f"z_g{gi}_c{ci}_c{cj}")

    if kind.family == "ilp2":
        for si in range(len(slots)):
            for c in sorted(potential[si]):
                cat.active[(c, si)] = mb.new_var(f"a_c{c}_s{si}")

    # Orders must be transitive, hence total.
    for si in range(len(slots)):
        for u, v, w in itertools.combinations(sorted(potential[si]), 3):
            row = [
                (1, cat.order[(si, u, v)]),
                (1, cat.order[(si, v, w)]),
                (-1, cat.order[(si, u, w)]),
            ]
            mb.add(row, "<=", 1)
            mb.add(row, ">=", 0)

    # Interaction blocks: characters outside a placed interaction must end
    # up entirely before or entirely after its characters.
    for si, s in enumerate(slots):
        if kind.family == "fixed":
            present = [inst.interactions[iid] for iid in placed_at[si]]
        else:
            present = list(inst.interactions_at(s.time))
        for it in present:
            if kind.family == "fixed":
                guard: list[tuple[int, bip.VarId]] = []
                bound = 0
            else:
                guard = [(1, cat.placement[(si, it.id)])]
                bound = 1
            members = sorted(it.characters)
            outside = sorted(potential[si] - it.characters)
            for ci, cj in itertools.combinations(members, 2):
                for ck in outside:
                    if cj < ck:
                        left = cat.order[(si, ci, ck)]
                        right = cat.order[(si, cj, ck)]
                        mb.add([(1, left), (-1, right)] + guard, "<=", bound)
                        mb.add([(1, right), (-1, left)] + guard, "<=", bound)
                    elif ck < ci:
                        left = cat.order[(si, ck, ci)]
                        right = cat.order[(si, ck, cj)]
                        mb.add([(1, left), (-1, right)] + guard, "<=", bound)
                        mb.add([(1, right), (-1, left)] + guard, "<=", bound)
                    else:
                        left = cat.order[(si, ci, ck)]
                        right = cat.order[(si, ck, cj)]
                        mb.add([(1, left), (1, right)] + guard, "<=", 1 + bound)
                        neg_guard = [(-coef, var) for coef, var in guard]
                        mb.add([(1, left), (1, right)] + neg_guard, ">=", 1 - bound)

    # Activity: forced where an interaction is placed, contiguous otherwise.
    if kind.family == "ilp2":
        for si, s in enumerate(slots):
            for it in inst.interactions_at(s.time):
                for c in it.characters:
                    mb.add(
                        [(1, cat.active[(c, si)]), (-1, cat.placement[(si, it.id)])],
                        ">=",
                        0,
                    )
        by_char: dict[CharId, list[int]] = {}
        for si in range(len(slots)):
            for c in potential[si]:
                by_char.setdefault(c, []).append(si)
        for c, sis in sorted(by_char.items()):
            for s1, s2, s3 in itertools.combinations(sis, 3):
                mb.add(
                    [
                        (1, cat.active[(c, s2)]),
                        (-1, cat.active[(c, s1)]),
                        (-1, cat.active[(c, s3)]),
                    ],
                    ">=",
                    -1,
                )

    # Crossing linking: z is forced to 1 when the pair order flips between
    # the two slots (and, for ilp2, only while both characters are active
    # on both sides).
    for (gi, ci, cj), z in cat.crossing.items():
        xl = cat.order[(gi, ci, cj)]
        xr = cat.order[(gi + 1, ci, cj)]
        if kind.family == "ilp2":
            acts = [
                cat.active[(ci, gi)],
                cat.active[(ci, gi + 1)],
                cat.active[(cj, gi)],
                cat.active[(cj, gi + 1)],
            ]
            first = [(1, z), (-1, xl), (1, xr)] + [(-1, a) for a in acts]
            mb.add(first, ">=", -4)
            if asymmetric_activity_link:
                second = [
                    (1, z),
                    (1, xl),
                    (-1, xr),
                    (-1, acts[0]),
                    (1, acts[1]),
                    (-1, acts[2]),
                    (-1, acts[3]),
                ]
            else:
                second = [(1, z), (1, xl), (-1, xr)] + [(-1, a) for a in acts]
            mb.add(second, ">=", -4)
        else:
            mb.add([(1, z), (-1, xl), (1, xr)], ">=", 0)
            mb.add([(1, z), (1, xl), (-1, xr)], ">=", 0)

    mb.minimize([(1, z) for z in cat.crossing.values()])
    return mb.build(), cat


def decode(
    inst: StorylineInstance,
    kind: ModelKind,
    cat: VariableCatalog,
    result: bip.SolveResult,
) -> CombinatorialStoryline:
    """Turn a solver assignment into a storyline.

    Slot orders come from the pairwise ordering variables (transitivity
    makes them total), activity from the slot's character span or the
    activity variables, and slots that received no interaction are dropped.
    The result is validated; crossing numbers must be recomputed by the
    caller with the oracle, never taken from the objective.
    """
    if result.assignment is None:
        raise ValueError(f"cannot decode a result with status {result.status!r}")

    placed_at: dict[int, list[InteractionId]] = {si: [] for si in range(len(cat.slots))}
    if cat.fixed_assignment is not None:
        for iid, si in cat.fixed_assignment.items():
            placed_at[si].append(iid)
    else:
        for (si, iid), var in cat.placement.items():
            if result.value(var) == 1:
                placed_at[si].append(iid)

    layers: list[Layer] = []
    for si, slot in enumerate(cat.slots):
        ids = sorted(placed_at[si])
        if not ids:
            continue
        chars = sorted(cat.potential[si])
        wins = {c: 0 for c in chars}
        for ci, cj in itertools.combinations(chars, 2):
            if result.value(cat.order[(si, ci, cj)]) == 1:
                wins[ci] += 1
            else:
                wins[cj] += 1
        full_order = sorted(chars, key=lambda c: (-wins[c], c))
        if sorted(wins.values()) != list(range(len(chars))):
            raise RuntimeError(
                f"ordering variables of slot {si} do not form a total order"
            )
        if kind.family == "ilp2":
            active = frozenset(
                c for c in chars if result.value(cat.active[(c, si)]) == 1
            )
        else:
            active = frozenset(chars)
        order = tuple(c for c in full_order if c in active)
        layers.append(
            Layer(time=slot.time, interactions=tuple(ids), order=order, active=active)
        )

    story = CombinatorialStoryline(tuple(layers))
    problems = validate_storyline(inst, story)
    if problems:
        raise RuntimeError("decoded storyline is illegal: " + "; ".join(problems))
    return story


def solve_exact(
    inst: StorylineInstance,
    kind: ModelKind,
    timeout: float = 3600.0,
    seed: int = 0,
    cap: int | None = None,
    symmetry_breaking: bool = True,
) -> tuple[CombinatorialStoryline | None, LayoutReport]:
    """Build, solve and decode one of the exact models.

    ``cap`` limits color class sizes when budgets are minimized and is
    rejected for the one-slot-per-interaction kinds, whose budgets do not
    come from coloring.  On timeout the best incumbent (if any) is decoded
    and reported with the solver's optimality gap.
    """
    if kind.family == "fixed":
        raise ValueError("use the pipeline for fixed-layer solves")
    if cap is not None and not kind.minimize_layers:
        raise ValueError("cap only applies to minimized layer budgets")
    t0 = time.monotonic()
    budgets = coloring.layer_budget(inst, minimize=kind.minimize_layers, cap=cap)
    program, cat = build_model(inst, kind, budgets, symmetry_breaking=symmetry_breaking)
    log.info(
        "%s model: %d vars, %d constraints",
        kind.name,
        len(program.variables),
        len(program.constraints),
    )
    remaining = max(1.0, timeout - (time.monotonic() - t0))
    result = bip.solve(program, timeout=remaining, seed=seed)
    elapsed = time.monotonic() - t0

    gap = None
    if result.status == bip.FEASIBLE_TIMEOUT and result.objective_value is not None:
        if result.objective_value > 0:
            gap = bip.gap_percent(result.objective_value, result.best_lower_bound or 0)
        else:
            gap = 0.0
    if result.assignment is None:
        return None, LayoutReport(
            algorithm=kind.name,
            crossings=None,
            layers=None,
            runtime=elapsed,
            status=result.status,
            gap_percent=100.0 if result.status == bip.FEASIBLE_TIMEOUT else None,
        )
    story = decode(inst, kind, cat, result)
    report = LayoutReport(
        algorithm=kind.name,
        crossings=count_crossings(story).total,
        layers=len(story.layers),
        runtime=elapsed,
        status=result.status,
        gap_percent=gap,
    )
    return story, report

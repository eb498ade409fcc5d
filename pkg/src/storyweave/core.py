"""Combinatorial model of time-interval storylines.

An instance is a cast of characters, a totally ordered list of timestamps,
and interactions (each a group of characters meeting at one timestamp).  A
layout distributes the interactions of every timestamp over one or more
vertical layers and totally orders the characters present in each layer.
The run of layers belonging to one timestamp is called a slice; horizontal
order inside a slice carries no temporal meaning.

A pair of characters present in two consecutive layers whose relative order
flips between them is a crossing, the quantity every solver in this package
minimizes.  This module holds the instance/storyline containers, their
validation, the crossing-counting oracle used to score every algorithm, and
an exhaustive optimum finder for small instances.

Characters and timestamps are dense integer indices into the instance name
lists.  All containers are immutable and all functions are pure, so shared
use across threads is safe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

CharId = int
TimeId = int
InteractionId = int

ActivityMode = Literal["span", "minimal"]

DEFAULT_SEARCH_GUARD = 10_000_000


class InstanceError(ValueError):
    """Invalid raw instance data; ``violations`` lists every problem found."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("invalid instance: " + "; ".join(violations))
        self.violations = list(violations)


class SearchSpaceError(ValueError):
    """Exhaustive enumeration would exceed its safety bound."""


@dataclass(frozen=True)
class Interaction:
    """A character group pinned to one timestamp. Ids follow input order."""

    id: InteractionId
    characters: frozenset[CharId]
    time: TimeId


@dataclass(frozen=True)
class StorylineInstance:
    characters: tuple[str, ...]
    timestamps: tuple[str, ...]
    interactions: tuple[Interaction, ...]

    @property
    def num_characters(self) -> int:
        return len(self.characters)

    @property
    def num_timestamps(self) -> int:
        return len(self.timestamps)

    @property
    def num_interactions(self) -> int:
        return len(self.interactions)

    def interactions_at(self, time: TimeId) -> tuple[Interaction, ...]:
        return tuple(it for it in self.interactions if it.time == time)

    def char_spans(self) -> dict[CharId, tuple[TimeId, TimeId]]:
        """First and last timestamp (inclusive) at which each character interacts."""
        spans: dict[CharId, tuple[TimeId, TimeId]] = {}
        for it in self.interactions:
            for c in it.characters:
                lo, hi = spans.get(c, (it.time, it.time))
                spans[c] = (min(lo, it.time), max(hi, it.time))
        return spans


@dataclass(frozen=True)
class Layer:
    """One column of the drawing.

    ``order`` is the top-to-bottom permutation of ``active``; the characters
    of each contained interaction must occupy consecutive positions in it.
    """

    time: TimeId
    interactions: tuple[InteractionId, ...]
    order: tuple[CharId, ...]
    active: frozenset[CharId]


@dataclass(frozen=True)
class CombinatorialStoryline:
    """Ordered layers; the discrete layout before coordinates are assigned."""

    layers: tuple[Layer, ...]


@dataclass(frozen=True)
class CrossingCount:
    total: int
    per_gap: tuple[int, ...]


@dataclass(frozen=True)
class LayoutReport:
    """Summary row for one algorithm run on one instance."""

    algorithm: str
    crossings: int | None
    layers: int | None
    runtime: float
    status: str
    gap_percent: float | None = None
    stage_seconds: Mapping[str, float] | None = None


def validate_instance(raw: Mapping) -> StorylineInstance:
    """Normalize a decoded instance document into a StorylineInstance.

    The document must carry ``characters`` (unique non-empty names),
    ``timestamps`` (unique labels, list order is the time order) and
    ``interactions`` (each a mapping with a non-empty duplicate-free
    ``characters`` name list and a known ``time`` label).  Every character
    must take part in at least one interaction.  All violations are
    collected and raised together as :class:`InstanceError`, each tagged
    with the path of the offending element.
    """
    bad: list[str] = []
    if not isinstance(raw, Mapping):
        raise InstanceError(["document must be a mapping"])

    chars = raw.get("characters")
    times = raw.get("timestamps")
    inters = raw.get("interactions")
    if not isinstance(chars, (list, tuple)):
        bad.append("characters: missing or not a list")
        chars = []
    if not isinstance(times, (list, tuple)):
        bad.append("timestamps: missing or not a list")
        times = []
    if not isinstance(inters, (list, tuple)):
        bad.append("interactions: missing or not a list")
        inters = []

    char_index: dict[str, int] = {}
    for i, name in enumerate(chars):
        if not isinstance(name, str) or not name:
            bad.append(f"characters[{i}]: name must be a non-empty string")
            continue
        if name in char_index:
            bad.append(f"characters[{i}]: duplicate name {name!r}")
            continue
        char_index[name] = i

    time_index: dict[str, int] = {}
    for i, label in enumerate(times):
        if not isinstance(label, str) or not label:
            bad.append(f"timestamps[{i}]: label must be a non-empty string")
            continue
        if label in time_index:
            bad.append(f"timestamps[{i}]: duplicate label {label!r}")
            continue
        time_index[label] = i

    normalized: list[Interaction] = []
    used: set[CharId] = set()
    for j, item in enumerate(inters):
        path = f"interactions[{j}]"
        if not isinstance(item, Mapping):
            bad.append(f"{path}: must be a mapping")
            continue
        members = item.get("characters")
        label = item.get("time")
        ok = True
        if not isinstance(members, (list, tuple)) or not members:
            bad.append(f"{path}.characters: empty interaction")
            ok = False
            members = []
        ids: list[CharId] = []
        for name in members:
            if not isinstance(name, str) or name not in char_index:
                bad.append(f"{path}.characters: unknown character {name!r}")
                ok = False
            elif char_index[name] in ids:
                bad.append(f"{path}.characters: duplicate character {name!r}")
                ok = False
            else:
                ids.append(char_index[name])
        if not isinstance(label, str) or label not in time_index:
            bad.append(f"{path}.time: unknown timestamp {label!r}")
            ok = False
        if ok:
            normalized.append(
                Interaction(len(normalized), frozenset(ids), time_index[label])
            )
            used.update(ids)

    if not bad:
        for name, i in char_index.items():
            if i not in used:
                bad.append(f"characters[{i}]: isolated character {name!r}")

    if bad:
        raise InstanceError(bad)
    return StorylineInstance(
        characters=tuple(chars),
        timestamps=tuple(times),
        interactions=tuple(normalized),
    )


def validate_storyline(
    inst: StorylineInstance, s: CombinatorialStoryline
) -> list[str]:
    """Check every storyline invariant against ``inst``.

    Returns an empty list when the storyline is legal, otherwise one message
    per violation.  Never raises.
    """
    out: list[str] = []
    placed: dict[InteractionId, int] = {}
    prev_time: TimeId | None = None

    for li, layer in enumerate(s.layers):
        path = f"layers[{li}]"
        if not (0 <= layer.time < inst.num_timestamps):
            out.append(f"{path}: unknown timestamp index {layer.time}")
            continue
        if prev_time is not None and layer.time < prev_time:
            out.append(f"{path}: layer timestamps decrease")
        prev_time = layer.time

        if not layer.interactions:
            out.append(f"{path}: empty layer")
        if len(set(layer.order)) != len(layer.order) or set(layer.order) != layer.active:
            out.append(f"{path}: order is not a permutation of the active set")
            continue
        pos = {c: k for k, c in enumerate(layer.order)}

        charsets: list[tuple[InteractionId, frozenset[CharId]]] = []
        for iid in layer.interactions:
            if not (0 <= iid < inst.num_interactions):
                out.append(f"{path}: unknown interaction id {iid}")
                continue
            it = inst.interactions[iid]
            if it.time != layer.time:
                out.append(f"{path}: interaction {iid} not at the layer timestamp")
            if iid in placed:
                out.append(f"{path}: interaction {iid} placed twice")
            placed[iid] = li
            charsets.append((iid, it.characters))

        for (ia, ca), (ib, cb) in itertools.combinations(charsets, 2):
            if ca & cb:
                out.append(
                    f"{path}: layer interactions intersect ({ia} and {ib})"
                )
        for iid, cs in charsets:
            missing = [c for c in cs if c not in layer.active]
            if missing:
                out.append(
                    f"{path}: interaction {iid} characters missing from active set"
                )
                continue
            spots = sorted(pos[c] for c in cs)
            if spots[-1] - spots[0] + 1 != len(spots):
                out.append(f"{path}: interaction {iid} not consecutive in order")

    for it in inst.interactions:
        if it.id not in placed:
            out.append(f"interaction {it.id} not placed in any layer")

    # Activity of every character must form a contiguous run of layers.
    active_at: dict[CharId, list[int]] = {}
    for li, layer in enumerate(s.layers):
        for c in layer.active:
            active_at.setdefault(c, []).append(li)
    for c, idxs in sorted(active_at.items()):
        if idxs[-1] - idxs[0] + 1 != len(idxs):
            name = inst.characters[c] if c < inst.num_characters else str(c)
            out.append(f"character {name!r}: activity not contiguous")

    return out


def _inversions(seq: Sequence[int]) -> int:
    """Number of pairs i<j with seq[i] > seq[j] (merge-sort count)."""
    n = len(seq)
    if n < 2:
        return 0
    buf = list(seq)
    tmp = [0] * n
    total = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[i] <= buf[j]:
                    tmp[k] = buf[i]
                    i += 1
                else:
                    tmp[k] = buf[j]
                    total += mid - i
                    j += 1
                k += 1
            tmp[k:hi] = buf[i:mid] if i < mid else buf[j:hi]
            buf[lo:hi] = tmp[lo:hi]
        width *= 2
    return total


def gap_crossings(left: Layer, right: Layer) -> int:
    """Crossings between two consecutive layers.

    Counts unordered character pairs present in both layers whose relative
    order differs between the two orderings; pairs not co-present contribute
    nothing.
    """
    common = left.active & right.active
    if len(common) < 2:
        return 0
    rank: dict[CharId, int] = {}
    r = 0
    for c in left.order:
        if c in common:
            rank[c] = r
            r += 1
    seq = [rank[c] for c in right.order if c in common]
    return _inversions(seq)


def count_crossings(s: CombinatorialStoryline) -> CrossingCount:
    """Total and per-gap crossing counts of a legal storyline."""
    gaps = tuple(
        gap_crossings(a, b) for a, b in itertools.pairwise(s.layers)
    )
    return CrossingCount(total=sum(gaps), per_gap=gaps)


# ---------------------------------------------------------------------------
# Exhaustive optimum for small instances
# ---------------------------------------------------------------------------


def _conflict_free_partitions(
    items: Sequence[Interaction],
) -> list[tuple[tuple[Interaction, ...], ...]]:
    """All set partitions of ``items`` whose blocks are pairwise character-disjoint."""
    results: list[tuple[tuple[Interaction, ...], ...]] = []
    blocks: list[list[Interaction]] = []
    block_chars: list[set[CharId]] = []

    def rec(k: int) -> None:
        if k == len(items):
            results.append(tuple(tuple(b) for b in blocks))
            return
        it = items[k]
        for b, chars in zip(blocks, block_chars):
            if not (chars & it.characters):
                b.append(it)
                chars |= it.characters
                rec(k + 1)
                b.pop()
                chars -= it.characters
        blocks.append([it])
        block_chars.append(set(it.characters))
        rec(k + 1)
        blocks.pop()
        block_chars.pop()

    rec(0)
    return results


def _slice_plans(
    items: Sequence[Interaction], max_layers: int
) -> list[tuple[tuple[Interaction, ...], ...]]:
    """Ordered, conflict-free layer assignments of one timestamp's interactions."""
    plans: list[tuple[tuple[Interaction, ...], ...]] = []
    for part in _conflict_free_partitions(items):
        if len(part) > max_layers:
            continue
        plans.extend(itertools.permutations(part))
    return plans


def _layer_groups(layer: Sequence[Interaction]) -> list[tuple[CharId, ...]]:
    return [tuple(sorted(it.characters)) for it in layer]


def _order_count(groups: Sequence[tuple[CharId, ...]], active: frozenset[CharId]) -> int:
    in_group = set(itertools.chain.from_iterable(groups))
    items = len(groups) + len(active - in_group)
    count = math.factorial(items)
    for g in groups:
        count *= math.factorial(len(g))
    return count


def _layer_orders(
    groups: Sequence[tuple[CharId, ...]], active: frozenset[CharId]
) -> Iterable[tuple[CharId, ...]]:
    """Every ordering of ``active`` keeping each group's characters consecutive."""
    in_group = set(itertools.chain.from_iterable(groups))
    items: list[tuple[CharId, ...]] = list(groups)
    items += [(c,) for c in sorted(active - in_group)]
    for arrangement in itertools.permutations(items):
        for parts in itertools.product(
            *(itertools.permutations(grp) for grp in arrangement)
        ):
            yield tuple(c for grp in parts for c in grp)


def _pair_bit(n: int) -> dict[tuple[CharId, CharId], int]:
    bits: dict[tuple[CharId, CharId], int] = {}
    for k, (u, v) in enumerate(itertools.combinations(range(n), 2)):
        bits[(u, v)] = 1 << k
    return bits


def _order_mask(order: Sequence[CharId], bit: Mapping[tuple[CharId, CharId], int]) -> int:
    # bit set iff the smaller-indexed character of the pair comes first
    mask = 0
    for i, u in enumerate(order):
        for v in order[i + 1 :]:
            if u < v:
                mask |= bit[(u, v)]
    return mask


def _active_sets(
    layers: Sequence[tuple[TimeId, list[tuple[CharId, ...]]]],
    spans: Mapping[CharId, tuple[TimeId, TimeId]],
    activity: ActivityMode,
) -> list[frozenset[CharId]]:
    if activity == "span":
        return [
            frozenset(c for c, (lo, hi) in spans.items() if lo <= t <= hi)
            for t, _groups in layers
        ]
    first: dict[CharId, int] = {}
    last: dict[CharId, int] = {}
    for li, (_t, groups) in enumerate(layers):
        for g in groups:
            for c in g:
                first.setdefault(c, li)
                last[c] = li
    return [
        frozenset(c for c in spans if first[c] <= li <= last[c])
        for li in range(len(layers))
    ]


def brute_force_optimum(
    inst: StorylineInstance,
    activity: ActivityMode = "span",
    budgets: Mapping[TimeId, int] | None = None,
    guard: int = DEFAULT_SEARCH_GUARD,
) -> int:
    """Minimum crossing count over every legal storyline, by exhaustion.

    Enumerates all assignments of interactions to at most ``budgets[t]``
    layers per timestamp (default: one potential layer per interaction),
    all layer orders within each slice, and all character orderings per
    layer; character activity follows ``activity``: ``span`` makes a
    character present in every layer of every timestamp between its first
    and last interaction, ``minimal`` trims presence to the tightest layer
    range covering its interactions.  Crossing totals decompose over
    consecutive layer pairs, so orderings are scanned with a min-plus sweep
    instead of materializing full combinations; the candidate count is still
    bounded by ``guard`` and exceeding it raises :class:`SearchSpaceError`.
    """
    if activity not in ("span", "minimal"):
        raise ValueError(f"unknown activity mode {activity!r}")
    times = sorted({it.time for it in inst.interactions})
    if not times:
        return 0
    spans = inst.char_spans()
    bit = _pair_bit(inst.num_characters)

    per_time: list[list[tuple[tuple[Interaction, ...], ...]]] = []
    for t in times:
        items = inst.interactions_at(t)
        limit = len(items) if budgets is None else budgets[t]
        plans = _slice_plans(items, limit)
        if not plans:
            raise ValueError(
                f"layer budget {limit} is below the chromatic number at timestamp {t}"
            )
        per_time.append(plans)

    n_sequences = math.prod(len(p) for p in per_time)
    if n_sequences > guard:
        raise SearchSpaceError(
            f"search space too large: {n_sequences} layer sequences exceed guard {guard}"
        )

    def sequence_layers(combo) -> list[tuple[TimeId, list[tuple[CharId, ...]]]]:
        out: list[tuple[TimeId, list[tuple[CharId, ...]]]] = []
        for t, plan in zip(times, combo):
            for layer in plan:
                out.append((t, _layer_groups(layer)))
        return out

    total_candidates = 0
    for combo in itertools.product(*per_time):
        layers = sequence_layers(combo)
        actives = _active_sets(layers, spans, activity)
        cand = 1
        for (_t, groups), act in zip(layers, actives):
            cand *= _order_count(groups, act)
        total_candidates += cand
        if total_candidates > guard:
            raise SearchSpaceError(
                f"search space too large: more than {guard} candidate storylines"
            )

    best: int | None = None
    for combo in itertools.product(*per_time):
        layers = sequence_layers(combo)
        actives = _active_sets(layers, spans, activity)
        masks_per_layer: list[list[int]] = []
        for (_t, groups), act in zip(layers, actives):
            masks_per_layer.append(
                [_order_mask(o, bit) for o in _layer_orders(groups, act)]
            )
        costs = [0] * len(masks_per_layer[0])
        for gi in range(len(layers) - 1):
            common = actives[gi] & actives[gi + 1]
            gate = 0
            for u, v in itertools.combinations(sorted(common), 2):
                gate |= bit[(u, v)]
            left = masks_per_layer[gi]
            right = masks_per_layer[gi + 1]
            nxt = []
            for m2 in right:
                nxt.append(
                    min(c + ((m1 ^ m2) & gate).bit_count() for c, m1 in zip(costs, left))
                )
            costs = nxt
        seq_best = min(costs)
        if best is None or seq_best < best:
            best = seq_best
            if best == 0:
                break
    assert best is not None
    return best

"""Build a storyline instance in code, lay it out by hand, and score it.

The core vocabulary: an instance (characters, ordered timestamps,
interactions), a combinatorial storyline (layers with character orders),
the validator that checks layout legality, and the crossing oracle that
every algorithm in this package is scored by.
"""

import storyweave as sw

# Two writers keep meeting while a third drifts in and out.
inst = sw.validate_instance(
    {
        "characters": ["ann", "bo", "cleo"],
        "timestamps": ["monday", "tuesday", "wednesday"],
        "interactions": [
            {"characters": ["ann", "bo"], "time": "monday"},
            {"characters": ["bo", "cleo"], "time": "tuesday"},
            {"characters": ["ann", "cleo"], "time": "wednesday"},
        ],
    }
)
print(f"characters={inst.num_characters} interactions={inst.num_interactions} "
      f"timestamps={inst.num_timestamps}")

# A hand-made layout: one layer per interaction, and every curve drawn
# across the whole week (activity may be wider than strictly needed).
ann, bo, cleo = 0, 1, 2
everyone = frozenset({ann, bo, cleo})
by_hand = sw.CombinatorialStoryline(
    (
        sw.Layer(time=0, interactions=(0,), order=(ann, bo, cleo), active=everyone),
        sw.Layer(time=1, interactions=(1,), order=(ann, bo, cleo), active=everyone),
        sw.Layer(time=2, interactions=(2,), order=(bo, ann, cleo), active=everyone),
    )
)
print("violations:", sw.validate_storyline(inst, by_hand))

counted = sw.count_crossings(by_hand)
print(f"hand layout: {counted.total} crossing(s), per gap {list(counted.per_gap)}")
# The crossing is self-inflicted: drawing bo through wednesday forces the
# ann/bo swap there.  Curves only need to span their own interactions.

# An illegal variant: cleo wedged inside the ann/bo meeting.
broken = sw.CombinatorialStoryline(
    (
        sw.Layer(time=0, interactions=(0,), order=(ann, cleo, bo), active=everyone),
        by_hand.layers[1],
        by_hand.layers[2],
    )
)
for problem in sw.validate_storyline(inst, broken):
    print("as expected:", problem)

# The exhaustive reference tries every legal layout.  "span" draws each
# curve through every layer between its first and last interaction
# timestamps; "minimal" starts it at its first and ends it at its last
# interaction layer.  Here both reach zero: bo's curve simply ends on
# tuesday, before ann and cleo have to swap.
print("best possible (span activity):", sw.brute_force_optimum(inst, "span"))
print("best possible (minimal activity):", sw.brute_force_optimum(inst, "minimal"))

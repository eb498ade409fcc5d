import itertools
import random
from fractions import Fraction

import pytest

import storyweave as sw
from storyweave.ordering import MAX_EXACT_PATH_NODES, layer_weight
from helpers import brute_best_path


def groups(*specs):
    return [frozenset(spec) for spec in specs]


WORKED_LEFT = groups({0, 1}, {2, 3})   # {a,b}, {c,d}
WORKED_RIGHT = groups({0, 2}, {1, 3})  # {a,c}, {b,d}


def random_layer(rng, chars=6, max_groups=3):
    pool = list(range(chars))
    rng.shuffle(pool)
    out = []
    for _ in range(rng.randint(1, max_groups)):
        if not pool:
            break
        size = rng.randint(1, min(3, len(pool)))
        out.append(frozenset(pool[:size]))
        pool = pool[size:]
    return out


class TestRandIndex:
    def test_identical_partitions(self):
        assert sw.rand_index(WORKED_LEFT, WORKED_LEFT) == 1

    def test_worked_pair_is_one_third(self):
        # Six pairs over {a,b,c,d}: ad and bc are apart on both sides, ac
        # and bd only together on the right, ab and cd only on the left.
        counts = sw.rand_counts(WORKED_LEFT, WORKED_RIGHT)
        assert (
            counts.together_both,
            counts.apart_both,
            counts.apart_then_together,
            counts.together_then_apart,
        ) == (0, 2, 2, 2)
        assert sw.rand_index(WORKED_LEFT, WORKED_RIGHT) == Fraction(1, 3)

    def test_single_identical_group(self):
        assert sw.rand_index(groups({0, 1}), groups({0, 1})) == 1

    def test_empty_universe_scores_one(self):
        assert sw.rand_index(groups({0, 1}), groups({2, 3})) == 1
        # one shared character is still an empty pair universe
        assert sw.rand_index(groups({0, 1}), groups({1, 2})) == 1

    def test_symmetric_and_bounded(self):
        rng = random.Random(0)
        for _ in range(300):
            a = random_layer(rng)
            b = random_layer(rng)
            r = sw.rand_index(a, b)
            assert r == sw.rand_index(b, a)
            assert 0 <= r <= 1


class TestPatternCount:
    def test_worked_pair(self):
        assert sw.pattern_count(WORKED_LEFT, WORKED_RIGHT) == 1

    def test_same_layer_has_no_pattern(self):
        rng = random.Random(1)
        for _ in range(100):
            a = random_layer(rng)
            assert sw.pattern_count(a, a) == 0

    def test_single_pair_twice(self):
        assert sw.pattern_count(groups({0, 1}), groups({0, 1})) == 0

    def test_symmetric(self):
        rng = random.Random(2)
        for _ in range(200):
            a = random_layer(rng)
            b = random_layer(rng)
            assert sw.pattern_count(a, b) == sw.pattern_count(b, a)

    def test_bounded_by_shared_pairs_squared(self):
        rng = random.Random(3)
        for _ in range(100):
            a = random_layer(rng)
            b = random_layer(rng)
            shared = len(
                set().union(*a) & set().union(*b)
            )
            bound = (shared * (shared - 1) // 2) ** 2
            assert sw.pattern_count(a, b) <= bound

    def test_larger_groups_realize_multiple_splits(self):
        left = groups({0, 1}, {2, 3})
        right = groups({0, 2, 4}, {1, 3})
        # splits of {0,1,2,3}: left gives 01|23; right gives 02|13 only
        assert sw.pattern_count(left, right) == 1


class TestSliceGraph:
    def test_identical_layers_zero_distance(self):
        g = sw.build_slice_graph([WORKED_LEFT, list(WORKED_LEFT)], "rand")
        assert g.weights[0][1] == 0

    def test_worked_pair_pattern_weight(self):
        g = sw.build_slice_graph([WORKED_LEFT, WORKED_RIGHT], "pattern")
        assert g.weights[0][1] == 1

    def test_single_layer(self):
        g = sw.build_slice_graph([WORKED_LEFT], "rand")
        assert len(g.layers) == 1

    def test_rejects_unknown_heuristic(self):
        with pytest.raises(ValueError, match="heuristic"):
            sw.build_slice_graph([WORKED_LEFT], "cosine")

    def test_rand_weight_is_distance(self):
        w = layer_weight(WORKED_LEFT, WORKED_RIGHT, "rand")
        assert w == Fraction(2, 3)


def weight_graph(matrix):
    n = len(matrix)
    layers = tuple((frozenset({i}),) for i in range(n))
    return sw.SliceGraph(0, layers, tuple(tuple(row) for row in matrix))


class TestMinPathOrder:
    def test_three_nodes(self):
        g = weight_graph([[0, 5, 1], [5, 0, 1], [1, 1, 0]])
        order = sw.min_path_order(g)
        assert order == [0, 2, 1]  # cost 2, lexicographically smallest optimum

    def test_single_node(self):
        assert sw.min_path_order(weight_graph([[0]])) == [0]

    def test_two_nodes(self):
        assert sw.min_path_order(weight_graph([[0, 7], [7, 0]])) == [0, 1]

    def test_matches_enumeration(self):
        rng = random.Random(4)
        for k in range(150):
            n = rng.randint(1, 8)
            matrix = [[0] * n for _ in range(n)]
            for i, j in itertools.combinations(range(n), 2):
                matrix[i][j] = matrix[j][i] = rng.randint(0, 9)
            expected_cost, expected_path = brute_best_path(matrix)
            order = sw.min_path_order(weight_graph(matrix))
            cost = sum(matrix[a][b] for a, b in itertools.pairwise(order))
            assert cost == expected_cost, f"matrix {k}"
            assert order == expected_path, f"matrix {k}"

    def test_fraction_weights(self):
        half = Fraction(1, 2)
        g = weight_graph([[0, half, 1], [half, 0, half], [1, half, 0]])
        order = sw.min_path_order(g)
        assert order == [0, 1, 2]

    def test_reversal_has_equal_cost(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(2, 7)
            matrix = [[0] * n for _ in range(n)]
            for i, j in itertools.combinations(range(n), 2):
                matrix[i][j] = matrix[j][i] = rng.randint(0, 9)
            order = sw.min_path_order(weight_graph(matrix))
            fwd = sum(matrix[a][b] for a, b in itertools.pairwise(order))
            rev = sum(matrix[a][b] for a, b in itertools.pairwise(order[::-1]))
            assert fwd == rev

    def test_too_many_nodes(self):
        n = MAX_EXACT_PATH_NODES + 1
        g = weight_graph([[0] * n for _ in range(n)])
        with pytest.raises(ValueError, match="slice too large"):
            sw.min_path_order(g)

    def test_empty_slice_rejected(self):
        with pytest.raises(ValueError, match="no layers"):
            sw.min_path_order(weight_graph([]))

"""
Tests for one-dimensional packings with a finite set of allowed distances.
"""

import itertools
import random
import sys
from fractions import Fraction

import networkx as nx
import pytest
import sympy

sys.path.insert(0, '.')

from magicpack.core.packing1d import (
    AccumulationDescription,
    DistanceSet,
    DominoGraph,
    GeometricTail,
    PeriodicPacking,
    build_domino_graph,
    fejer_kissing_bound,
    fejer_sharpness,
    greedy,
    is_admissible,
    kalbe,
    kalbe_rows,
    max_density_bruteforce,
    max_density_cycle,
    optimal_packing,
    parse_distance_set,
    primitive_period,
    reduce_to_finite,
    reduction_constant,
    word_norm,
)
from magicpack.exceptions import (
    AccumulationError, AcyclicGraphError, GraphSizeError, ValidationError
)

F = Fraction


class TestDistanceSet:
    """Parsing and validating distance sets."""

    def test_parse(self):
        """"1,3/2,5/2" parses into sorted Fractions."""
        K = parse_distance_set("5/2, 1, 3/2")
        assert K.values == (F(1), F(3, 2), F(5, 2))
        assert K.sup == F(5, 2)
        assert K.block_length == 3
        assert str(K) == "1,3/2,5/2"

    def test_requires_one(self):
        """A set without 1 is rejected."""
        with pytest.raises(ValidationError):
            parse_distance_set("2,3")

    def test_rejects_small_and_malformed(self):
        """Values below 1 and non-rationals are rejected."""
        with pytest.raises(ValidationError):
            parse_distance_set("1/2,1")
        with pytest.raises(ValidationError):
            parse_distance_set("1,x")
        with pytest.raises(ValidationError):
            parse_distance_set("  ,  ")

    def test_admits(self):
        """Distances above sup K are always admissible."""
        K = DistanceSet.of([1, 2])
        assert K.admits(F(2))
        assert K.admits(F(5, 2))
        assert not K.admits(F(3, 2))

    def test_scaled(self):
        """Scaling multiplies every distance."""
        K = DistanceSet.of([1, 2]).scaled(3)
        assert K.values == (F(3), F(6))
        with pytest.raises(ValidationError):
            DistanceSet.of([1, 2]).scaled(F(1, 2))


class TestWords:
    """Admissibility and periods of words."""

    def test_admissible_word(self):
        """1 1 7/2 repeats admissibly for {1, 2, 7/2}."""
        K = DistanceSet.of([1, 2, F(7, 2)])
        assert is_admissible((F(1), F(1), F(7, 2)), K, periods=3)
        assert not is_admissible((F(1), F(1), F(1)), K)
        assert not is_admissible((), K)

    def test_primitive_period(self):
        """Repeated blocks collapse and rotate to the least form."""
        word = (F(7, 2), F(1), F(1), F(7, 2), F(1), F(1))
        assert primitive_period(word) == (F(1), F(1), F(7, 2))

    def test_periodic_packing_from_word(self):
        """Density is letters over norm."""
        packing = PeriodicPacking.from_word([1, F(5, 2)])
        assert packing.density == F(4, 7)
        assert packing.to_dict()["period"] == "1 5/2"


class TestDominoGraph:
    """Graph construction and the ratio search."""

    def test_graph_for_one_two(self):
        """Every two-letter word over {1, 2} is a block."""
        G = build_domino_graph(DistanceSet.of([1, 2]), max_vertices=100)
        assert G.block_length == 2
        assert G.vertex_count == 4
        assert all(len(v) == 2 for v in G.graph.nodes)

    def test_vertex_cap(self):
        """Large sets hit the configured vertex cap."""
        K = parse_distance_set("1,11/10,6/5,13/10,7/5,3/2,8/5,17/10,9/5,19/10,2,21/10,11/5,23/10,12/5,5/2,6")
        with pytest.raises(GraphSizeError):
            build_domino_graph(K, max_vertices=50)

    def test_ratio_search_matches_bruteforce(self):
        """Iterated Bellman-Ford finds the best simple cycle."""
        for text in ("1,2,7/2", "1,3/2,5/2", "1,5/2,4", "1,3"):
            G = build_domino_graph(parse_distance_set(text), max_vertices=5000)
            assert max_density_cycle(G).density == max_density_bruteforce(G).density

    def test_ratio_search_on_random_graphs(self):
        """Fifty random word graphs: the ratio search matches exhaustive cycle enumeration."""
        rng = random.Random(1906)
        letters = (F(1), F(3, 2), F(2), F(5, 2))
        for _ in range(50):
            n = rng.randint(1, 3)
            K = DistanceSet.of(letters[:n + 1])
            words = list(itertools.product(K.values, repeat=K.block_length))
            vertices = rng.sample(words, min(len(words), rng.randint(4, 8)))
            graph = nx.DiGraph()
            for word in vertices:
                graph.add_node(word, norm=word_norm(word))
            p = rng.uniform(0.2, 0.5)
            graph.add_edges_from((u, v) for u in vertices for v in vertices if rng.random() < p)
            loop = rng.choice(vertices)
            graph.add_edge(loop, loop)
            G = DominoGraph(K, graph)
            assert max_density_cycle(G).density == max_density_bruteforce(G).density

    def test_ratio_search_on_random_distance_sets(self):
        """Small random K, capped so that cycle enumeration stays cheap."""
        rng = random.Random(31)
        candidates = sorted({F(p, q) for q in (1, 2, 3, 4) for p in range(q + 1, 3 * q + 1)})
        compared = 0
        for _ in range(400):
            K = DistanceSet.of([1] + rng.sample(candidates, rng.randint(1, 2)))
            try:
                G = build_domino_graph(K, max_vertices=8)
            except GraphSizeError:
                continue
            assert max_density_cycle(G).density == max_density_bruteforce(G).density, str(K)
            compared += 1
        assert compared >= 20

    def test_acyclic_graph(self):
        """A graph without cycles has no periodic packing."""
        G = build_domino_graph(DistanceSet.of([1, 2]), max_vertices=100)
        G.graph.remove_edges_from(list(G.graph.edges))
        with pytest.raises(AcyclicGraphError):
            max_density_cycle(G)


class TestOptimalPacking:
    """Optimal densities for small distance sets."""

    def test_one_two_seven_halves(self):
        """{1, 2, 7/2}: period 1 1 7/2 with density 6/11."""
        packing = optimal_packing("1,2,7/2")
        assert packing.render() == "1 1 7/2"
        assert packing.density == F(6, 11)

    def test_two_distances(self):
        """{1, α} packs with density 2/(1+α) when α > 2."""
        for alpha in (F(5, 2), F(3), F(4)):
            packing = optimal_packing(DistanceSet.of([1, alpha]))
            assert packing.density == 2 / (1 + alpha)

    def test_unit_distance_dense(self):
        """{1, 3/2, 2}: the unit packing has density 1."""
        assert optimal_packing("1,3/2,2").density == 1

    def test_matches_closed_form(self):
        """The graph search agrees with the three-distance closed form."""
        for alpha, beta in ((2, 3), (F(3, 2), F(5, 2)), (F(5, 2), 4), (F(5, 2), F(15, 4)), (F(3, 2), 4)):
            K = DistanceSet.of([1, alpha, beta])
            assert optimal_packing(K).density == kalbe(alpha, beta).density


    @pytest.mark.slow
    def test_closed_form_grid(self):
        """Every row of the closed form, and the preamble, agrees with the graph search."""
        alphas = (F(5, 4), F(3, 2), F(7, 4), F(2), F(9, 4), F(5, 2), F(11, 4), F(3))
        betas = (F(3, 2), F(7, 4), F(2), F(5, 2), F(11, 4), F(3), F(13, 4), F(7, 2), F(15, 4), F(4))
        rows = set()
        pairs = [(a, b) for a in alphas for b in betas if a < b]
        assert len(pairs) == 56
        for alpha, beta in pairs:
            rows.add(kalbe_rows(alpha, beta))
            expected = kalbe(alpha, beta).density
            assert optimal_packing(DistanceSet.of([1, alpha, beta])).density == expected, (alpha, beta)
        assert rows == {"preamble", 1, 2, 3, 4, 5, 6}


class TestClosedForm:
    """Rows of the three-distance closed form."""

    def test_rows(self):
        """Each parameter pair lands on the expected row."""
        assert kalbe_rows(F(3, 2), 2) == "preamble"
        assert kalbe_rows(2, 3) == 1
        assert kalbe_rows(2, 5) == 2
        assert kalbe_rows(F(3, 2), F(5, 2)) == 3
        assert kalbe_rows(F(5, 2), 4) == 4
        assert kalbe_rows(F(5, 2), F(15, 4)) == 5
        assert kalbe_rows(F(3, 2), 4) == 6

    def test_densities(self):
        """Closed-form densities."""
        assert kalbe(F(3, 2), 2).density == 1
        assert kalbe(2, 3).density == 1
        assert kalbe(F(3, 2), F(5, 2)).density == F(4, 5)
        assert kalbe(F(5, 2), 4).density == F(2, 5)
        assert kalbe(F(5, 2), F(15, 4)).density == F(8, 19)
        assert kalbe(F(3, 2), 4).density == F(2, 5)

    def test_invalid_order(self):
        """α must lie strictly between 1 and β."""
        with pytest.raises(ValidationError):
            kalbe_rows(3, 2)


class TestGreedy:
    """Leftmost-feasible placement."""

    def test_greedy_is_optimal_here(self):
        """On {1, 2, 7/2} greedy reaches 6/11 after six centres."""
        result = greedy(DistanceSet.of([1, 2, F(7, 2)]), 6)
        assert result.render() == "1 1 7/2 1 1 7/2"
        assert result.density == F(6, 11)

    def test_greedy_bounded_by_optimum(self):
        """Greedy never beats the optimal periodic packing."""
        K = DistanceSet.of([1, F(3, 2), F(5, 2)])
        result = greedy(K, 30)
        assert result.density <= optimal_packing(K).density

    def test_steps_must_be_positive(self):
        with pytest.raises(ValidationError):
            greedy(DistanceSet.of([1, 2]), 0)


class TestAccumulation:
    """Reduction of sets with accumulation points to finite sets."""

    def setup_method(self):
        self.core = DistanceSet.of([1, 2, 5])
        self.tail = GeometricTail(F(2), F(1, 2), F(1, 2))
        self.desc = AccumulationDescription(self.core, (self.tail,))

    def test_tail_membership(self):
        """2 + 1/16 is the third tail term."""
        assert self.tail.index_of(2 + F(1, 16)) == 3
        assert self.tail.index_of(F(2) + F(3, 16)) is None
        assert self.desc.contains(F(9, 4))
        assert not self.desc.contains(F(3))

    def test_next_above(self):
        """Successors inside K skip the accumulation."""
        assert self.desc.next_above(F(9, 4)) == 5
        assert self.desc.next_above(F(17, 8)) == F(9, 4)

    def test_reduction(self):
        """C = 1 and K̃ = {1, 2, 9/4, 5}."""
        assert reduction_constant(self.desc) == 1
        reduced = reduce_to_finite(self.desc)
        assert reduced.values == (F(1), F(2), F(9, 4), F(5))

    def test_no_tails(self):
        """Without tails the core is returned as is."""
        assert reduce_to_finite(AccumulationDescription(self.core)) == self.core

    def test_alpha_outside_core(self):
        """Accumulation points must belong to the core."""
        desc = AccumulationDescription(self.core, (GeometricTail(F(3), F(1, 2), F(1, 2)),))
        with pytest.raises(AccumulationError) as info:
            reduce_to_finite(desc)
        assert info.value.condition == "core"

    def test_tail_reaching_max(self):
        """A tail may not reach max K."""
        desc = AccumulationDescription(DistanceSet.of([1, 2, 3]), (GeometricTail(F(2), F(2), F(1, 2)),))
        with pytest.raises(AccumulationError) as info:
            desc.validate()
        assert info.value.condition == "iv"

    def test_sum_of_accumulation_points(self):
        """α_i + α_j may not be an accumulation point."""
        tails = (GeometricTail(F(1), F(1, 8), F(1, 2)), GeometricTail(F(2), F(1, 8), F(1, 2)))
        desc = AccumulationDescription(self.core, tails)
        with pytest.raises(AccumulationError) as info:
            desc.validate()
        assert info.value.condition == "i"

    def test_non_geometric_tail(self):
        """c must be positive and ρ in (0, 1)."""
        with pytest.raises(AccumulationError) as info:
            GeometricTail(F(2), F(0), F(1, 2))
        assert info.value.condition == "iii"
        with pytest.raises(AccumulationError):
            GeometricTail(F(2), F(1), F(1))


class TestFejer:
    """The Fejér family in one dimension."""

    def test_sharpness(self):
        """λ = 100 gives N = 16 and ratio 34/11; λ = 7 gives exactly 3."""
        assert fejer_sharpness(100) == (16, F(34, 11))
        assert fejer_sharpness(7) == (1, F(3))

    def test_kissing_bound(self):
        """The kissing bound reproduces the Fejér ratio exactly."""
        assert fejer_kissing_bound(100).exact == sympy.Rational(34, 11)

    def test_small_lambda(self):
        with pytest.raises(ValidationError):
            fejer_sharpness(6)

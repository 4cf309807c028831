from itertools import combinations
import unittest

from hypothesis import given, settings, strategies as st
import networkx as nx

from startail import (
    Graph, ParameterError, StarPacking, count_stars, greedy_star_packing,
    packing_upper_bound, remove_center_incident_edges, sample_gnp,
    sample_edge_mask, star_copies, replicate_seed)
from startail import graphs as graphs_module
from startail.graphs import (
    Star, edge_copy_counts, edge_pairs, is_maximal_packing, sample_degrees)


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.integers(0, (1 << len(pairs)) - 1))
    return Graph.from_bitmask(n, mask)


def triangle():
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


class GraphTest(unittest.TestCase):

    def test_invalid_edges(self):
        with self.assertRaises(ParameterError):
            Graph(3, [(0, 3)])
        with self.assertRaises(ParameterError):
            Graph(3, [(1, 1)])
        with self.assertRaises(ParameterError):
            Graph(3, [(0, 1), (1, 0)])
        with self.assertRaises(ParameterError):
            Graph(-1)

    def test_constructors(self):
        self.assertEqual(Graph.complete(3), triangle())
        self.assertEqual(Graph.star(5).degrees, (5, 1, 1, 1, 1, 1))
        bip = Graph.complete_bipartite(2, 3, 7)
        self.assertEqual(bip.n, 7)
        self.assertEqual(bip.num_edges, 6)
        self.assertEqual(bip.degrees, (3, 3, 2, 2, 2, 0, 0))
        with self.assertRaises(ParameterError):
            Graph.complete_bipartite(3, 3, 5)
        self.assertEqual(Graph.empty(4).num_edges, 0)

    def test_bitmask_order(self):
        self.assertEqual(edge_pairs(4)[:3], ((0, 1), (0, 2), (0, 3)))
        self.assertEqual(Graph.from_bitmask(3, 0b101).edges(), ((0, 1), (1, 2)))
        with self.assertRaises(ParameterError):
            Graph.from_bitmask(3, 8)

    def test_text_format(self):
        graph = Graph(4, [(2, 1), (0, 3)])
        self.assertEqual(graph.to_text(), "4 2\n0 3\n1 2\n")
        self.assertEqual(Graph.from_text(graph.to_text()), graph)
        self.assertEqual(Graph.empty(2).to_text(), "2 0\n")
        with self.assertRaises(ParameterError):
            Graph.from_text("3 2\n0 1\n")
        with self.assertRaises(ParameterError):
            Graph.from_text("x")

    def test_equality(self):
        self.assertEqual(Graph(3, [(0, 1)]), Graph(3, [(1, 0)]))
        self.assertNotEqual(Graph(3, [(0, 1)]), Graph(4, [(0, 1)]))
        self.assertEqual(len({Graph(3, [(0, 1)]), Graph(3, [(1, 0)])}), 1)
        self.assertEqual(repr(Graph(2, [(0, 1)])), "Graph(2, [(0, 1)])")

    @given(graphs())
    def test_matches_networkx(self, graph):
        ref = nx.Graph()
        ref.add_nodes_from(range(graph.n))
        ref.add_edges_from(graph.edges())
        self.assertEqual(graph.num_edges, ref.number_of_edges())
        self.assertEqual(graph.degrees,
                         tuple(deg for _, deg in sorted(ref.degree())))
        for u, v in combinations(range(graph.n), 2):
            self.assertEqual(graph.has_edge(u, v), ref.has_edge(u, v))


class SampleTest(unittest.TestCase):

    def test_trivial_probabilities(self):
        self.assertEqual(sample_gnp(5, 0, 1), Graph.empty(5))
        self.assertEqual(sample_gnp(5, 1, 7), Graph.complete(5))
        for seed in range(5):
            self.assertEqual(sample_gnp(4, 1.0, seed), Graph.complete(4))
            self.assertEqual(sample_gnp(4, 0.0, seed), Graph.empty(4))

    def test_reproducible(self):
        first = sample_gnp(12, 0.3, 12345)
        self.assertEqual(first, sample_gnp(12, 0.3, 12345))
        self.assertEqual(
            sum(sample_edge_mask(12, 0.3, 12345)), first.num_edges)
        self.assertEqual(tuple(sample_degrees(12, 0.3, 12345)), first.degrees)

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            sample_gnp(5, 1.5, 0)
        with self.assertRaises(ParameterError):
            sample_gnp(5, -0.1, 0)
        with self.assertRaises(ParameterError):
            sample_gnp(5, 0.5, -1)
        with self.assertRaises(ParameterError):
            sample_gnp(5, 0.5, 1 << 64)

    def test_replicate_seed(self):
        self.assertEqual(replicate_seed(6, 3), 5)
        self.assertEqual(replicate_seed(0, 7), 7)

    def test_mean_edge_count(self):
        samples = 20000
        total = sum(int(sample_edge_mask(4, 0.5, seed).sum())
                    for seed in range(samples))
        # binomial standard error of the mean of C(4, 2) = 6 coin flips
        stderr = (6 * 0.25 / samples) ** 0.5
        self.assertLess(abs(total / samples - 3), 4 * stderr)


class StarCountTest(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(count_stars(Graph.star(3), 2), 3)
        self.assertEqual(count_stars(Graph.empty(4), 2), 0)
        self.assertEqual(count_stars(triangle(), 2), 3)
        self.assertEqual(count_stars(Graph.complete(5), 3), 5 * 4)

    @given(graphs(), st.integers(1, 4))
    def test_degree_identity(self, graph, r):
        self.assertEqual(
            count_stars(graph, r), sum(1 for _ in star_copies(graph, r)))

    def test_edge_copy_counts(self):
        counts = edge_copy_counts(Graph.star(3), 2)
        self.assertEqual(counts, {(0, 1): 2, (0, 2): 2, (0, 3): 2})

    @given(graphs(), st.integers(1, 4))
    def test_edge_copy_totals(self, graph, r):
        counts = edge_copy_counts(graph, r)
        self.assertIsInstance(counts, dict)
        self.assertEqual(set(counts), set(graph.edges()))
        self.assertEqual(sum(counts.values()), r * count_stars(graph, r))

    def test_module_is_silent(self):
        self.assertFalse(hasattr(graphs_module, "log"))


class PackingTest(unittest.TestCase):

    def test_star(self):
        packing = greedy_star_packing(Graph.star(5), 2)
        self.assertEqual(packing.size, 2)
        self.assertEqual(packing.centers, frozenset({0}))
        self.assertEqual(packing.stars[0], Star(0, frozenset({1, 2})))
        self.assertEqual(packing.stars[1], Star(0, frozenset({3, 4})))
        self.assertEqual(packing_upper_bound(Graph.star(5), 2), 2)

    def test_triangle(self):
        packing = greedy_star_packing(triangle(), 2)
        self.assertEqual(packing.size, 1)
        self.assertEqual(packing.stars[0], Star(0, frozenset({1, 2})))
        self.assertEqual(packing_upper_bound(triangle(), 2), 3)

    def test_empty(self):
        self.assertEqual(greedy_star_packing(Graph.empty(3), 1).size, 0)
        self.assertEqual(packing_upper_bound(Graph.empty(3), 3), 0)
        with self.assertRaises(ParameterError):
            greedy_star_packing(Graph.empty(3), 0)

    @given(graphs(), st.integers(1, 4))
    def test_maximal_and_disjoint(self, graph, k):
        packing = greedy_star_packing(graph, k)
        self.assertTrue(packing.is_edge_disjoint())
        self.assertTrue(is_maximal_packing(graph, packing))
        for star in packing.stars:
            self.assertEqual(len(star.leaves), k)
            for u, v in star.edges():
                self.assertTrue(graph.has_edge(u, v))
        self.assertLessEqual(packing.size, packing_upper_bound(graph, k))


class RemoveCentersTest(unittest.TestCase):

    def test_star(self):
        graph = Graph.star(5)
        result = remove_center_incident_edges(
            graph, greedy_star_packing(graph, 2))
        self.assertEqual(result, Graph.empty(6))

    def test_triangle(self):
        packing = StarPacking(2, (Star(0, frozenset({1, 2})),))
        result = remove_center_incident_edges(triangle(), packing)
        self.assertEqual(result.edges(), ((1, 2),))
        self.assertEqual(result.degrees, (0, 1, 1))

    def test_empty_packing(self):
        graph = triangle()
        self.assertIs(
            remove_center_incident_edges(graph, StarPacking(2, ())), graph)

    def test_missing_edge(self):
        packing = StarPacking(2, (Star(0, frozenset({1, 2})),))
        with self.assertRaises(ParameterError):
            remove_center_incident_edges(Graph(3, [(0, 1)]), packing)

    @settings(max_examples=50)
    @given(graphs(), st.integers(1, 3))
    def test_degrees(self, graph, k):
        packing = greedy_star_packing(graph, k)
        result = remove_center_incident_edges(graph, packing)
        self.assertEqual(result, Graph(graph.n, result.edges()))
        for v in range(graph.n):
            self.assertLessEqual(result.degree(v), graph.degree(v))
        for center in packing.centers:
            self.assertEqual(result.degree(center), 0)

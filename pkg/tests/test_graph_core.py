import numpy as np
import pytest
from conftest import (complete_graph, cycle_graph, path_graph, permute_graph,
                      random_graph, star_graph)

from graphrf.errors import (AttributeShapeError, DuplicateNodeError,
                            NodeIndexError, SelfLoopError, TooLargeError)
from graphrf.graph_core import (AdjacencyMatrix, CsrView, adjacency_matrix,
                                bfs_distances, build_graph, induced_subgraph,
                                isomorphic_bruteforce)


class TestBuildGraph:
    def test_path_shape(self):
        g = path_graph(3)
        assert g.node_count == 3
        assert g.edge_count == 2
        assert [g.degree(i) for i in range(3)] == [1, 2, 1]

    def test_empty_graph(self):
        g = build_graph(0, [])
        assert g.node_count == 0 and g.edge_count == 0
        assert g.node_attrs.shape == (0, 0)

    def test_isolated_nodes(self):
        g = build_graph(4, [(0, 1)])
        assert g.degree(2) == 0
        assert list(g.neighbors(3)) == []

    def test_duplicates_collapse_either_orientation(self):
        g = build_graph(4, [(0, 1), (1, 0), (2, 3), (0, 1)])
        assert g.edge_count == 2
        assert g.has_edge(1, 0) and g.has_edge(3, 2)

    def test_duplicate_keeps_first_attr_row(self):
        ea = np.array([[1.0], [2.0], [3.0]], dtype=np.float32)
        g = build_graph(3, [(1, 0), (0, 1), (1, 2)], edge_attrs=ea)
        idx = g.edge_index()
        assert g.edge_attrs[idx[(0, 1)], 0] == 1.0
        assert g.edge_attrs[idx[(1, 2)], 0] == 3.0

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoopError):
            build_graph(3, [(0, 0)])

    def test_out_of_range_rejected(self):
        with pytest.raises(NodeIndexError):
            build_graph(3, [(0, 3)])
        with pytest.raises(NodeIndexError):
            build_graph(2, [(-1, 0)])

    def test_attr_shape_mismatches(self):
        with pytest.raises(AttributeShapeError):
            build_graph(3, [], node_attrs=np.zeros((2, 1)))
        with pytest.raises(AttributeShapeError):
            build_graph(2, [(0, 1)], edge_attrs=np.zeros((2, 1)))
        with pytest.raises(AttributeShapeError):
            build_graph(2, [], node_labels=[1, 2, 3])

    def test_1d_attrs_promoted_to_column(self):
        g = build_graph(2, [(0, 1)], node_attrs=[1.5, 2.5])
        assert g.node_attrs.shape == (2, 1)
        assert g.attr_dim == 1

    def test_neighbors_sorted(self):
        g = build_graph(5, [(2, 4), (2, 0), (2, 3), (2, 1)])
        assert list(g.neighbors(2)) == [0, 1, 3, 4]

    def test_csr_matches_edge_set(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            n = int(rng.integers(1, 12))
            g = random_graph(rng, n, rng.random())
            want = {tuple(e) for e in g.edges.tolist()}
            got = set()
            for u in range(n):
                for v in g.neighbors(u):
                    got.add((min(u, int(v)), max(u, int(v))))
            assert got == want
            assert int(g.degrees.sum()) == 2 * g.edge_count


class TestBfsDistances:
    def test_path_from_end(self):
        assert bfs_distances(path_graph(4), 0).tolist() == [0, 1, 2, 3]

    def test_unreachable_marked(self):
        g = build_graph(4, [(0, 1)])
        assert bfs_distances(g, 0).tolist() == [0, 1, -1, -1]

    def test_star_center(self):
        d = bfs_distances(star_graph(5), 0)
        assert d.tolist() == [0, 1, 1, 1, 1, 1]

    def test_bad_root(self):
        with pytest.raises(NodeIndexError):
            bfs_distances(path_graph(2), 5)

    def test_triangle_inequality_on_random(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            g = random_graph(rng, 9, 0.3)
            d = bfs_distances(g, 0)
            for u, v in g.edges:
                du, dv = d[u], d[v]
                if du >= 0 and dv >= 0:
                    assert abs(int(du) - int(dv)) <= 1


class TestInducedSubgraph:
    def test_triangle_pair(self):
        sub, mapping = induced_subgraph(complete_graph(3), [2, 0])
        assert sub.node_count == 2 and sub.edge_count == 1
        assert mapping.tolist() == [2, 0]

    def test_order_defines_new_ids(self):
        g = path_graph(3)
        sub, mapping = induced_subgraph(g, [2, 1, 0])
        # old edge (1,2) becomes (1,0), old (0,1) becomes (2,1)
        assert sub.has_edge(0, 1) and sub.has_edge(1, 2)
        assert not sub.has_edge(0, 2)
        assert mapping.tolist() == [2, 1, 0]

    def test_attrs_slice_along(self):
        na = np.arange(8, dtype=np.float32).reshape(4, 2)
        ea = np.array([[5.0], [6.0], [7.0]], dtype=np.float32)
        g = build_graph(4, [(0, 1), (1, 2), (2, 3)], node_attrs=na,
                        edge_attrs=ea)
        sub, _ = induced_subgraph(g, [3, 2, 1])
        assert np.array_equal(sub.node_attrs, na[[3, 2, 1]])
        idx = sub.edge_index()
        assert sub.edge_attrs[idx[(0, 1)], 0] == 7.0  # old (2,3)
        assert sub.edge_attrs[idx[(1, 2)], 0] == 6.0  # old (1,2)

    def test_empty_selection(self):
        sub, mapping = induced_subgraph(path_graph(3), [])
        assert sub.node_count == 0 and len(mapping) == 0

    def test_nonadjacent_pair_loses_edges(self):
        sub, _ = induced_subgraph(cycle_graph(4), [0, 2])
        assert sub.edge_count == 0

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(DuplicateNodeError):
            induced_subgraph(path_graph(3), [0, 0])

    def test_out_of_range_rejected(self):
        with pytest.raises(NodeIndexError):
            induced_subgraph(path_graph(3), [0, 7])

    def test_identity_selection_reproduces_graph(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(1, 10)), 0.4, attr_dim=2)
            sub, mapping = induced_subgraph(g, range(g.node_count))
            assert np.array_equal(sub.edges, g.edges)
            assert np.array_equal(sub.node_attrs, g.node_attrs)
            assert mapping.tolist() == list(range(g.node_count))


class TestAdjacency:
    def test_dense_symmetric_zero_diagonal(self):
        a = adjacency_matrix(cycle_graph(4))
        assert np.array_equal(a, a.T)
        assert not a.diagonal().any()
        assert a.sum() == 8

    def test_bit_string_row_major(self):
        am = AdjacencyMatrix.from_graph(path_graph(3), order=[1, 0, 2])
        # center first: connected to both others
        assert am.bit_string() == "011100100"

    def test_order_permutes(self):
        g = path_graph(3)
        a = AdjacencyMatrix.from_graph(g, order=[0, 1, 2])
        b = AdjacencyMatrix.from_graph(g, order=[2, 1, 0])
        assert a == b  # path is symmetric end to end
        c = AdjacencyMatrix.from_graph(g, order=[1, 0, 2])
        assert a != c


class TestCsrView:
    def test_matches_graph(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 10, 0.4)
        view = CsrView(g.indptr, g.indices)
        assert view.node_count == 10
        for u in range(10):
            assert list(view.neighbors(u)) == list(g.neighbors(u))
            assert view.degree(u) == g.degree(u)


class TestIsomorphicBruteforce:
    def test_relabeled_path_matches(self):
        g = path_graph(4)
        h = permute_graph(g, [3, 1, 0, 2])
        assert isomorphic_bruteforce(g, h)

    def test_path_vs_star(self):
        assert not isomorphic_bruteforce(path_graph(4), star_graph(3))

    def test_cycle_vs_path(self):
        assert not isomorphic_bruteforce(cycle_graph(4), path_graph(4))

    def test_size_guard(self):
        with pytest.raises(TooLargeError):
            isomorphic_bruteforce(path_graph(9), path_graph(9))

    def test_random_relabelings(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(2, 8))
            g = random_graph(rng, n, rng.random())
            h = permute_graph(g, rng.permutation(n))
            assert isomorphic_bruteforce(g, h)

    def test_edge_count_mismatch_fast_path(self):
        g = build_graph(3, [(0, 1)])
        h = build_graph(3, [(0, 1), (1, 2)])
        assert not isomorphic_bruteforce(g, h)

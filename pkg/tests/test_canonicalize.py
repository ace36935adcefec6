import numpy as np
import pytest
from conftest import (complete_graph, cycle_graph, path_graph, permute_graph,
                      random_graph)

from graphrf.canonicalize import (CanonicalForm, PriorColoring,
                                  canonical_form, canonical_oracle)
from graphrf.errors import ShapeMismatchError, TooLargeError
from graphrf.graph_core import build_graph


def random_prior(rng, n, colors=3):
    # sorted so class ids appear in ascending first-position order
    return PriorColoring(np.sort(rng.integers(0, colors, n)))


def class_respecting_perm(rng, prior):
    """Random relabeling that maps each prior class onto itself."""
    n = len(prior)
    perm = np.empty(n, dtype=np.int64)
    for c in np.unique(prior.colors):
        members = np.flatnonzero(prior.colors == c)
        perm[members] = rng.permutation(members)
    return perm


class TestPriorColoring:
    def test_uniform(self):
        p = PriorColoring.uniform(4)
        assert p.colors.tolist() == [0, 0, 0, 0]
        assert len(p) == 4

    def test_from_partition(self):
        p = PriorColoring.from_partition([[2], [0, 1]], 3)
        assert p.colors.tolist() == [1, 1, 0]

    def test_partition_must_cover(self):
        with pytest.raises(ShapeMismatchError):
            PriorColoring.from_partition([[0], [1]], 3)

    def test_colors_must_be_1d(self):
        with pytest.raises(ShapeMismatchError):
            PriorColoring(np.zeros((2, 2)))


class TestCanonicalForm:
    def test_path_uniform(self):
        cf = canonical_form(path_graph(3))
        assert cf.bit_string == "011100100"
        assert cf.permutation.tolist() == [1, 0, 2]

    def test_path_with_pinned_endpoint(self):
        cf = canonical_form(path_graph(3), PriorColoring([0, 1, 1]))
        assert cf.bit_string == "010" + "101" + "010"
        assert cf.permutation[0] == 0

    def test_triangle(self):
        cf = canonical_form(complete_graph(3))
        assert cf.bit_string == "011101110"

    def test_empty_graph_identity(self):
        cf = canonical_form(build_graph(3, []))
        assert cf.permutation.tolist() == [0, 1, 2]
        assert cf.bit_string == "0" * 9

    def test_zero_nodes(self):
        cf = canonical_form(build_graph(0, []))
        assert len(cf.permutation) == 0
        assert cf.bit_string == ""

    def test_cycle_automorphic_relabelings_collapse(self):
        g = cycle_graph(4)
        base = canonical_form(g)
        # dihedral group of the square: 4 rotations x optional reflection
        autos = []
        cyc = [0, 1, 2, 3]
        for r in range(4):
            rot = cyc[r:] + cyc[:r]
            autos += [rot, rot[::-1]]
        assert len(autos) == 8
        for a in autos:
            perm = np.empty(4, dtype=np.int64)
            perm[cyc] = a
            h = permute_graph(g, perm)
            assert canonical_form(h) == base

    def test_size_guard_and_prior_guard(self):
        with pytest.raises(TooLargeError):
            canonical_form(path_graph(6), k_max=5)
        with pytest.raises(ShapeMismatchError):
            canonical_form(path_graph(3), PriorColoring([0, 1]))

    def test_k_max_can_be_raised(self):
        g = cycle_graph(40)
        cf = canonical_form(g, k_max=40)
        assert len(cf.permutation) == 40

    def test_prior_classes_stay_sorted_in_output(self):
        rng = np.random.default_rng(53)
        for _ in range(40):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, rng.random())
            prior = random_prior(rng, n)
            cf = canonical_form(g, prior)
            placed = prior.colors[cf.permutation]
            assert np.all(np.diff(placed) >= 0)


class TestOracleAgreement:
    def test_matches_oracle_uniform(self):
        rng = np.random.default_rng(59)
        for _ in range(150):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, rng.random())
            assert canonical_form(g) == canonical_oracle(g)

    def test_matches_oracle_with_priors(self):
        rng = np.random.default_rng(61)
        for _ in range(150):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, rng.random())
            prior = random_prior(rng, n, colors=int(rng.integers(1, 5)))
            cf = canonical_form(g, prior)
            assert cf == canonical_oracle(g, prior)

    def test_matches_oracle_unsorted_prior(self):
        rng = np.random.default_rng(67)
        for _ in range(60):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, rng.random())
            prior = PriorColoring(rng.integers(0, 3, n))
            assert canonical_form(g, prior) == canonical_oracle(g, prior)

    def test_class_respecting_relabelings_collapse(self):
        rng = np.random.default_rng(71)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            g = random_graph(rng, n, rng.random())
            prior = random_prior(rng, n)
            perm = class_respecting_perm(rng, prior)
            h = permute_graph(g, perm)
            # same prior colors attach to the same positions after perm
            hp = PriorColoring(prior.colors.copy())
            assert canonical_form(g, prior) == canonical_form(h, hp)

    def test_oracle_guards(self):
        with pytest.raises(TooLargeError):
            canonical_oracle(path_graph(9))
        with pytest.raises(TooLargeError):
            canonical_oracle(complete_graph(8), max_orders=100)
        with pytest.raises(ShapeMismatchError):
            canonical_oracle(path_graph(3), PriorColoring([0]))


class TestFormObject:
    def test_equality_is_matrix_equality(self):
        a = canonical_form(path_graph(3))
        b = canonical_form(permute_graph(path_graph(3), [2, 0, 1]))
        assert a == b
        assert a != canonical_form(complete_graph(3))
        assert a.__eq__(object()) is NotImplemented

    def test_permutation_reproduces_matrix(self):
        rng = np.random.default_rng(73)
        from graphrf.graph_core import AdjacencyMatrix
        for _ in range(30):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, rng.random())
            cf = canonical_form(g)
            rebuilt = AdjacencyMatrix.from_graph(g, order=cf.permutation)
            assert rebuilt == cf.matrix

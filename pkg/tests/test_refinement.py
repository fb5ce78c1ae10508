import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cohere as ch
from conftest import complete_graph, cycle_graph, path_graph


class TestNaiveRefine:
    def test_c5_uniform_stays_uniform(self, c5):
        coloring, trace = ch.naive_refine(c5.matrix)
        assert coloring.num_classes == 1
        assert trace.fixed_point

    def test_c5_one_individualized(self, c5):
        coloring, trace = ch.refine_with_individualization(c5.matrix, [0])
        assert coloring.num_classes == 3
        # neighbors of 0 split from non-neighbors, then stable
        assert coloring.of(1) == coloring.of(4)
        assert coloring.of(2) == coloring.of(3)
        assert len(set(trace.class_counts)) == len(trace.class_counts)  # strict growth

    def test_c5_two_individualized(self, c5):
        coloring, _ = ch.refine_with_individualization(c5.matrix, [0, 1])
        assert coloring.is_discrete()

    def test_merging_diagonal_colors_rejected(self, p3):
        stable, _ = ch.wl_refine(p3.matrix)
        with pytest.raises(ValueError, match="diagonal"):
            ch.naive_refine(stable, ch.VertexColoring(np.zeros(3, dtype=int)))

    def test_monotone_class_counts(self, t5):
        _, trace = ch.refine_with_individualization(t5.matrix, [0])
        counts = trace.class_counts
        assert all(a < b for a, b in zip(counts, counts[1:]))

    def test_idempotent(self, t5):
        coloring, _ = ch.refine_with_individualization(t5.matrix, [0])
        again, trace = ch.naive_refine(t5.matrix, coloring)
        assert again == coloring
        assert trace.rounds == 0


class TestIndividualize:
    def test_empty_identity(self, c5):
        start = ch.initial_coloring(c5.matrix)
        assert ch.individualize(start, []) == start

    def test_all_vertices_discrete(self, c5):
        start = ch.initial_coloring(c5.matrix)
        assert ch.individualize(start, range(5)).is_discrete()

    def test_single_vertex_sizes(self):
        start = ch.VertexColoring(np.zeros(5, dtype=int))
        out = ch.individualize(start, [0])
        sizes = np.bincount(out.classes)
        assert sorted(sizes) == [1, 4]


class TestCompletelySplits:
    def test_c5(self, c5):
        assert ch.completely_splits(c5.matrix, [0, 1])
        assert not ch.completely_splits(c5.matrix, [0])

    def test_whole_vertex_set(self, t5):
        assert ch.completely_splits(t5.matrix, range(10))

    @settings(max_examples=20, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_superset_monotone(self, rnd):
        cfg = ch.from_graph(cycle_graph(5))
        base = [0, 1]
        extra = [v for v in range(5) if rnd.random() < 0.5]
        assert ch.completely_splits(cfg.matrix, set(base) | set(extra))


class TestWl:
    def test_c5_already_stable(self, c5):
        out, rounds = ch.wl_refine(c5.matrix)
        assert out == c5.matrix
        assert rounds == 0

    def test_p3_rank5(self, p3):
        out, rounds = ch.wl_refine(p3.matrix)
        assert out.r == 5
        assert rounds >= 1
        diag = np.diagonal(out.cells)
        assert len(set(int(c) for c in diag)) == 2  # middle vs ends
        # the end-to-end pair color is symmetric
        assert out.cells[0, 2] == out.cells[2, 0]
        # end->middle and middle->end differ
        assert out.cells[0, 1] != out.cells[1, 0]
        ch.compute_structure_constants(out)

    def test_k4_stable(self):
        k4 = ch.from_graph(complete_graph(4))
        out, rounds = ch.wl_refine(k4.matrix)
        assert out == k4.matrix and rounds == 0

    def test_idempotent_on_random_graphs(self):
        for seed in range(5):
            g = ch.random_graph(14, 0.5, seed=seed)
            stable, _ = ch.wl_refine(ch.from_graph(g).matrix)
            again, rounds = ch.wl_refine(stable)
            assert again == stable
            assert rounds == 0

    def test_output_coherent_on_random_graphs(self):
        for seed in range(10):
            g = ch.random_graph(12 + seed, 0.4, seed=100 + seed)
            stable, _ = ch.wl_refine(ch.from_graph(g).matrix)
            ch.compute_structure_constants(stable)


class TestEquivariance:
    def _instances(self):
        yield ch.from_graph(cycle_graph(5)).matrix
        yield ch.triangular(5).matrix
        yield ch.lattice(3).matrix
        yield ch.from_graph(ch.random_graph(13, 0.5, seed=3)).matrix

    def test_naive_refine_equivariant(self):
        rng = np.random.Generator(np.random.Philox(11))
        for m in self._instances():
            base, _ = ch.naive_refine(m)
            for _ in range(50):
                perm = rng.permutation(m.n)
                permuted, _ = ch.naive_refine(m.permuted(perm))
                assert np.array_equal(permuted.classes[perm], base.classes)

    def test_wl_equivariant(self):
        rng = np.random.Generator(np.random.Philox(12))
        for m in self._instances():
            base, _ = ch.wl_refine(m)
            for _ in range(50):
                perm = rng.permutation(m.n)
                out, _ = ch.wl_refine(m.permuted(perm))
                assert out == base.permuted(perm)


class TestBaseBound:
    def test_c5_pair(self, c5):
        bound = ch.base_size_bound(c5.matrix, [0, 1])
        assert (bound.size, bound.bound) == (2, 25)

    def test_t5_triple(self, t5):
        bound = ch.base_size_bound(t5.matrix, [0, 1, 2])
        assert (bound.size, bound.bound) == (3, 1000)

    def test_full_set(self):
        k4 = ch.from_graph(complete_graph(4))
        bound = ch.base_size_bound(k4.matrix, range(4))
        assert bound.bound == 256

    def test_non_splitting_rejected(self, c5):
        with pytest.raises(ValueError):
            ch.base_size_bound(c5.matrix, [0])

    def test_arbitrary_precision(self):
        j = ch.johnson(8, 3)
        s = list(range(40))
        if ch.completely_splits(j.matrix, s):
            bound = ch.base_size_bound(j.matrix, s)
            assert bound.bound == 56**40

import itertools

import networkx as nx
import numpy as np
import pytest

import cohere as ch
from cohere.families import certified_isomorphism, graph_of_color
from conftest import complete_graph, cycle_graph, path_graph


class TestFromGraph:
    def test_c5_coherent(self, c5):
        assert ch.validate_configuration(c5.matrix).ok
        ch.compute_structure_constants(c5.matrix)  # SRG(5,2,0,1)

    def test_p3_not_coherent(self, p3):
        with pytest.raises(ch.CoherenceError):
            ch.compute_structure_constants(p3.matrix)

    def test_complete_graph_rank2(self):
        cfg = ch.from_graph(complete_graph(4))
        assert cfg.r == 2

    def test_empty_graph_rank2(self):
        cfg = ch.from_graph(ch.GraphInput.from_pairs(3, []))
        assert cfg.r == 2

    def test_loops_rejected(self):
        with pytest.raises(ValueError, match="loop"):
            ch.GraphInput(n=3, edges=frozenset({(1, 1)}))


class TestTriangular:
    def test_t5_parameters(self, t5):
        sc = t5.ensure_constants()
        assert (t5.n, sc.degree(1), sc.p(1, 1, 1), sc.p(2, 1, 1)) == (10, 6, 3, 4)

    def test_t6_degree(self):
        t6 = ch.triangular(6)
        assert t6.n == 15
        assert t6.ensure_constants().degree(1) == 8

    def test_t4_imprimitive(self):
        t4 = ch.triangular(4)
        assert t4.n == 6
        res = ch.is_primitive(t4)
        assert not res.primitive and res.disconnected_color == 2

    def test_small_m_rejected(self):
        with pytest.raises(ValueError):
            ch.triangular(3)

    def test_matches_line_graph_of_complete(self):
        for m in (5, 7):
            pairs = list(itertools.combinations(range(m), 2))
            lg = nx.line_graph(nx.complete_graph(m))
            index = {e: pairs.index(tuple(sorted(e))) for e in lg.nodes}
            edges = {(index[a], index[b]) for a, b in lg.edges}
            built = ch.from_graph(ch.GraphInput.from_pairs(len(pairs), edges))
            assert built.matrix == ch.triangular(m).matrix


class TestLattice:
    def test_l3_parameters(self):
        l3 = ch.lattice(3)
        sc = l3.ensure_constants()
        assert (l3.n, sc.degree(1), sc.p(1, 1, 1), sc.p(2, 1, 1)) == (9, 4, 1, 2)

    def test_l4_degree(self):
        assert ch.lattice(4).ensure_constants().degree(1) == 6

    def test_l2_is_c4(self):
        l2 = ch.lattice(2)
        assert l2.n == 4 and l2.r == 3
        assert not ch.is_primitive(l2).primitive

    def test_matches_line_graph_of_bipartite(self):
        m = 4
        cells = [(i, j) for i in range(m) for j in range(m)]
        lg = nx.line_graph(nx.complete_bipartite_graph(m, m))
        def key(e):
            a, b = sorted(e)
            return cells.index((a, b - m))
        edges = {(key(a), key(b)) for a, b in lg.edges}
        built = ch.from_graph(ch.GraphInput.from_pairs(len(cells), edges))
        assert built.matrix == ch.lattice(m).matrix


class TestJohnson:
    def test_j73_degrees(self):
        j = ch.johnson(7, 3)
        sc = j.ensure_constants()
        assert j.n == 35
        assert [sc.degree(d) for d in (1, 2, 3)] == [12, 18, 4]

    def test_j52_is_triangular5(self, t5):
        j = ch.johnson(5, 2)
        # canonical bijection between colex 2-subsets and lex pair order
        colex = sorted(itertools.combinations(range(5), 2), key=lambda s: s[::-1])
        lex = list(itertools.combinations(range(5), 2))
        perm = np.array([lex.index(s) for s in colex])
        assert j.matrix.permuted(perm) == t5.matrix

    def test_j63_imprimitive(self):
        j = ch.johnson(6, 3)
        assert j.n == 20
        assert j.ensure_constants().degree(3) == 1
        assert not ch.is_primitive(j).primitive

    def test_parameter_violation(self):
        with pytest.raises(ValueError):
            ch.johnson(5, 3)


class TestHamming:
    def test_h33_degrees(self):
        h = ch.hamming(3, 3)
        sc = h.ensure_constants()
        assert h.n == 27
        assert [sc.degree(d) for d in (1, 2, 3)] == [6, 12, 8]

    def test_h22_is_c4(self):
        h = ch.hamming(2, 2)
        c4 = ch.from_graph(cycle_graph(4))
        sc_h = h.ensure_constants()
        assert h.n == 4 and h.r == 3
        # distance-1 graph of H(2,2) is a 4-cycle
        mapping = certified_isomorphism(
            graph_of_color(h.matrix, 1), graph_of_color(c4.matrix, 1)
        )
        assert mapping is not None

    def test_h34_far_degree(self):
        assert ch.hamming(3, 4).ensure_constants().degree(3) == 27

    def test_parameter_violation(self):
        with pytest.raises(ValueError):
            ch.hamming(0, 3)


class TestComplement:
    def test_t5_complement_is_petersen(self, petersen):
        sc = petersen.ensure_constants()
        assert (petersen.n, sc.degree(1), sc.p(1, 1, 1), sc.p(2, 1, 1)) == (10, 3, 0, 1)

    def test_c5_self_complementary(self, c5):
        comp = ch.complement_configuration(c5)
        mapping = certified_isomorphism(
            graph_of_color(comp.matrix, 1), graph_of_color(c5.matrix, 1)
        )
        assert mapping is not None

    def test_involution(self, t5):
        twice = ch.complement_configuration(ch.complement_configuration(t5))
        assert twice.matrix == t5.matrix

    def test_rank_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ch.complement_configuration(ch.from_graph(complete_graph(4)))


class TestOrbital:
    def test_cyclic_group_on_5(self):
        gens = ch.PermutationList(5, ((1, 2, 3, 4, 0),))
        cfg = ch.orbital_configuration(gens)
        assert cfg.r == 5
        ch.compute_structure_constants(cfg.matrix)

    def test_symmetric_group_on_pairs_gives_triangular(self, t5):
        pairs = list(itertools.combinations(range(5), 2))
        def induced(g):
            return tuple(pairs.index(tuple(sorted((g[a], g[b])))) for a, b in pairs)
        transposition = induced((1, 0, 2, 3, 4))
        cycle = induced((1, 2, 3, 4, 0))
        cfg = ch.orbital_configuration(ch.PermutationList(10, (transposition, cycle)))
        assert cfg.matrix == t5.matrix

    def test_trivial_group_discrete(self):
        cfg = ch.orbital_configuration(ch.PermutationList(3, ((0, 1, 2),)))
        assert cfg.r == 9

    def test_orbital_always_coherent(self):
        rng = np.random.Generator(np.random.Philox(5))
        for n in (4, 6, 8):
            for _ in range(3):
                gens = tuple(
                    tuple(int(x) for x in rng.permutation(n)) for _ in range(2)
                )
                cfg = ch.orbital_configuration(ch.PermutationList(n, gens))
                ch.compute_structure_constants(cfg.matrix)  # must not raise

    def test_non_permutation_rejected(self):
        with pytest.raises(ValueError):
            ch.PermutationList(3, ((0, 0, 2),))


class TestCoherenceSweep:
    def test_families_coherent(self):
        members = [ch.triangular(m) for m in range(4, 13)]
        members += [ch.lattice(m) for m in range(2, 11)]
        members += [ch.johnson(m, 3) for m in range(6, 13)]
        members += [ch.johnson(m, 2) for m in range(4, 13)]
        members += [ch.johnson(8, 4)]
        members += [ch.hamming(d, m) for d in (2, 3) for m in (2, 3, 4)]
        members += [ch.hamming(4, 3)]
        for cfg in members:
            assert ch.validate_configuration(cfg.matrix).ok
            ch.compute_structure_constants(cfg.matrix)


class TestParsers:
    def test_edge_list(self):
        g = ch.parse_edge_list("5\n0 1\n1 2\n2 3\n3 4\n4 0\n")
        assert g.n == 5 and len(g.edges) == 5

    def test_permutations(self):
        p = ch.parse_permutations("1 2 0\n0 2 1\n")
        assert p.n == 3 and len(p.generators) == 2

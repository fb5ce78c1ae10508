import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cohere as ch
import oracles
from conftest import complete_graph, cycle_graph, path_graph


class TestValidate:
    def test_c5_ok(self, c5):
        assert ch.validate_configuration(c5.matrix).ok

    def test_diagonal_separation_violation(self):
        cells = np.array([[0, 0, 1], [2, 0, 1], [2, 2, 0]])
        res = ch.validate_configuration(ch.ColorMatrix(cells))
        assert not res.ok
        v = next(x for x in res.violations if x.axiom == "diagonal-separation")
        assert v.witness[0][0] == v.witness[0][1]  # a diagonal cell
        assert v.witness[1][0] != v.witness[1][1]  # an off-diagonal cell

    def test_pairing_violation(self):
        # color 1 transposes to 1 between 0,1 but to 2 between 2,3
        cells = np.array(
            [
                [0, 1, 3, 3],
                [1, 0, 3, 3],
                [3, 3, 0, 1],
                [3, 3, 2, 0],
            ]
        )
        res = ch.validate_configuration(ch.ColorMatrix(cells))
        assert not res.ok
        assert any(v.axiom == "pairing" for v in res.violations)

    def test_transpose_with_pairing_still_valid(self, c5, t5):
        for cfg in (c5, t5):
            star = cfg.matrix.pairing()
            transposed = ch.ColorMatrix(star[cfg.matrix.cells.T.astype(np.int64)])
            assert ch.validate_configuration(transposed).ok

    def test_dense_colors_enforced(self):
        with pytest.raises(ValueError, match="dense"):
            ch.ColorMatrix(np.array([[0, 2], [2, 0]]))


class TestStructureConstants:
    def test_c5_tensor(self, c5):
        sc = ch.compute_structure_constants(c5.matrix)
        assert sc.p(1, 1, 1) == 0
        assert sc.p(2, 1, 1) == 1

    def test_t5_srg_parameters(self, t5):
        sc = ch.compute_structure_constants(t5.matrix)
        assert sc.degree(1) == 6
        assert sc.p(1, 1, 1) == 3
        assert sc.p(2, 1, 1) == 4

    def test_p3_coherence_failure(self, p3):
        with pytest.raises(ch.CoherenceError) as err:
            ch.compute_structure_constants(p3.matrix)
        w = err.value.witness
        assert w.color == 1  # the edge color is the one that breaks
        assert w.pair_a != w.pair_b
        assert w.count_a != w.count_b

    def test_matches_triple_loop_oracle(self, c5, t5):
        for cfg in (c5, t5):
            sc = ch.compute_structure_constants(cfg.matrix)
            tensor, witness = oracles.structure_constants(oracles.as_lists(cfg.matrix))
            assert witness is None
            for i, hist in tensor.items():
                for (j, k), cnt in hist.items():
                    assert sc.p(i, j, k) == cnt

    def test_random_samples_recount(self, corpus):
        rng = np.random.Generator(np.random.Philox(7))
        for _, cfg in corpus[:6]:
            sc = cfg.ensure_constants()
            cells = oracles.as_lists(cfg.matrix)
            n = cfg.n
            for _ in range(100):
                u = int(rng.integers(n))
                v = int(rng.integers(n))
                j = int(rng.integers(sc.r))
                k = int(rng.integers(sc.r))
                i = cells[u][v]
                assert oracles.walk_count(cells, u, v, j, k) == sc.p(i, j, k)

    def test_degree_sum(self, corpus):
        for name, cfg in corpus:
            sc = cfg.ensure_constants()
            diag = cfg.matrix.cells[0, 0]
            total = sum(int(sc.degrees[i]) for i in range(sc.r) if i != diag)
            assert total == cfg.n - 1, name

    def test_tensor_identities_exhaustive(self, corpus):
        # degree pairing, transpose symmetry, degree exchange, row sums
        for name, cfg in corpus:
            sc = cfg.ensure_constants()
            dense = sc.dense()
            star = sc.star
            deg = sc.degrees
            r = sc.r
            assert (deg == deg[star]).all(), name
            for i in range(r):
                for j in range(r):
                    for k in range(r):
                        assert dense[i, j, k] == dense[star[i], star[k], star[j]], name
                        assert (
                            deg[i] * dense[i, j, k]
                            == deg[j] * dense[j, i, star[k]]
                        ), name
            for i in range(r):
                for k in range(r):
                    assert dense[i, :, k].sum() == deg[k], name
                    assert dense[i, k, :].sum() == deg[k], name


class TestPredicates:
    def test_homogeneous(self, c5, p3):
        assert ch.is_homogeneous(c5.matrix)
        stable, _ = ch.wl_refine(p3.matrix)
        assert not ch.is_homogeneous(stable)
        assert ch.is_homogeneous(ch.ColorMatrix(np.array([[0]])))

    def test_primitive_t5(self, t5):
        assert ch.is_primitive(t5).primitive

    def test_imprimitive_k33(self):
        g = ch.GraphInput.from_pairs(6, [(a, b) for a in range(3) for b in range(3, 6)])
        cfg = ch.from_graph(g)
        res = ch.is_primitive(cfg)
        assert not res.primitive
        assert res.disconnected_color == 2  # the non-edge color
        assert sorted(len(c) for c in res.weak_components) == [3, 3]

    def test_primitive_rank2(self):
        cfg = ch.from_graph(complete_graph(4))
        assert ch.is_primitive(cfg).primitive

    def test_rejects_nonhomogeneous(self, p3):
        stable, _ = ch.wl_refine(p3.matrix)
        with pytest.raises(ValueError):
            ch.is_primitive(ch.configuration(stable))


class TestConstituent:
    def test_c5_neighborhoods(self, c5):
        d = ch.constituent_digraph(c5, 1)
        assert set(d.out_neighbors(0)) == {1, 4}
        d2 = ch.constituent_digraph(c5, 2)
        assert set(d2.out_neighbors(0)) == {2, 3}

    def test_t5_out_degrees(self, t5):
        d = ch.constituent_digraph(t5, 1)
        assert all(d.out_degree(u) == 6 for u in range(10))

    def test_diagonal_rejected(self, c5):
        with pytest.raises(ValueError):
            ch.constituent_digraph(c5, 0)


class TestCanonicalAndIO:
    def test_canonical_diag_first(self):
        cells = np.array([[2, 0, 0], [1, 2, 0], [1, 1, 2]])
        canon = ch.canonicalize(ch.ColorMatrix(cells))
        assert canon.cells[0, 0] == 0
        assert canon.cells[0, 1] == 1  # first off-diagonal occurrence

    def test_canonical_idempotent(self, t5, c5):
        for cfg in (t5, c5):
            once = ch.canonicalize(cfg.matrix)
            assert ch.canonicalize(once) == once

    def test_roundtrip_bit_exact(self, t5):
        text = ch.dumps_ccm(t5.matrix)
        again = ch.loads_ccm(text)
        assert again == t5.matrix
        assert ch.dumps_ccm(again) == text

    def test_comments_ignored(self):
        text = "# a comment\n2 2  # trailing\n0 1\n1 0\n"
        m = ch.loads_ccm(text)
        assert m.n == 2 and m.r == 2

    def test_bad_header(self):
        with pytest.raises(ch.CcmFormatError):
            ch.loads_ccm("2\n0 1\n1 0\n")

    def test_color_out_of_range(self):
        with pytest.raises(ch.CcmFormatError):
            ch.loads_ccm("2 2\n0 5\n5 0\n")


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.randoms(use_true_random=False))
def test_permuted_configuration_still_valid(n, rnd):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if rnd.random() < 0.5]
    cfg = ch.from_graph(ch.GraphInput.from_pairs(n, pairs))
    perm = list(range(n))
    rnd.shuffle(perm)
    permuted = cfg.matrix.permuted(np.array(perm))
    assert ch.validate_configuration(permuted).ok

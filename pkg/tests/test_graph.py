import io

import numpy as np
import pytest

from tricache import (CsrGraph, ParseError, brute_triangles, parse_edge_list,
                      preprocess, read_csr, validate, write_csr)
from tricache.graph import EdgeList

from conftest import er_edges


class TestParse:
    def test_basic(self):
        el = parse_edge_list("0 1\n1 2\n", directed=True)
        assert el.edges.tolist() == [[0, 1], [1, 2]]
        assert el.n_hint == 3

    def test_comment_skipped(self):
        el = parse_edge_list("# c\n0 1\n", directed=True)
        assert el.edges.tolist() == [[0, 1]]

    def test_malformed_token(self):
        with pytest.raises(ParseError) as exc:
            parse_edge_list("0 x\n", directed=True)
        assert exc.value.line == 1

    def test_negative_id(self):
        with pytest.raises(ParseError):
            parse_edge_list("0 -1\n", directed=True)

    def test_wrong_arity(self):
        with pytest.raises(ParseError) as exc:
            parse_edge_list("0 1\n0 1 2\n", directed=True)
        assert exc.value.line == 2

    def test_empty(self):
        el = parse_edge_list("# nothing\n", directed=False)
        assert len(el.edges) == 0 and el.n_hint == 0


class TestPreprocess:
    def test_triangle(self):
        el = parse_edge_list("0 1\n1 2\n0 2\n", directed=False)
        g, _ = preprocess(el)
        assert (g.n, g.m) == (3, 6)
        assert all(g.degree(v) == 2 for v in range(3))

    def test_path_collapses_to_empty(self):
        # Endpoints have degree 1; removing them isolates the middle vertex,
        # which the dense relabel then drops.
        el = parse_edge_list("0 1\n1 2\n", directed=False)
        g, rmap = preprocess(el)
        assert g.n == 0 and g.m == 0
        assert rmap.removed == {0, 1, 2}

    def test_star_collapses_to_empty(self):
        el = parse_edge_list("0 1\n0 2\n0 3\n", directed=False)
        g, rmap = preprocess(el)
        assert g.n == 0
        assert rmap.removed == {0, 1, 2, 3}

    def test_self_loops_and_duplicates_dropped(self):
        el = parse_edge_list("0 0\n0 1\n0 1\n1 2\n0 2\n", directed=False)
        g, _ = preprocess(el)
        assert (g.n, g.m) == (3, 6)

    def test_symmetric_input_accepted(self):
        one_way = parse_edge_list("0 1\n1 2\n0 2\n", directed=False)
        both_ways = parse_edge_list("0 1\n1 0\n1 2\n2 1\n0 2\n2 0\n", directed=False)
        g1, _ = preprocess(one_way)
        g2, _ = preprocess(both_ways)
        assert np.array_equal(g1.offsets, g2.offsets)
        assert np.array_equal(g1.adjacencies, g2.adjacencies)

    def test_empty_graph_is_not_an_error(self):
        g, rmap = preprocess(EdgeList(directed=False, n_hint=0,
                                      edges=np.empty((0, 2), dtype=np.int64)))
        assert g.n == 0 and validate(g) == []

    def test_cleaning_preserves_triangles(self):
        # Degree-<2 removal may never change the global triangle count.
        for seed in range(5):
            el = er_edges(40, 0.08, seed)
            before = brute_triangles(el)
            g, _ = preprocess(el)
            after = brute_triangles(g.to_edge_list()) if g.n else 0
            assert before == after

    def test_fixpoint_agrees_on_triangles(self):
        for seed in range(5):
            el = er_edges(40, 0.08, seed + 50)
            g1, _ = preprocess(el)
            g2, _ = preprocess(el, fixpoint=True)
            t1 = brute_triangles(g1.to_edge_list()) if g1.n else 0
            t2 = brute_triangles(g2.to_edge_list()) if g2.n else 0
            assert t1 == t2

    def test_relabel_is_permutation(self):
        el = er_edges(30, 0.3, 1)
        g_id, _ = preprocess(el)
        g_rl, rmap = preprocess(el, seed=9, relabel=True)
        assert g_id.n == g_rl.n and g_id.m == g_rl.m
        assert rmap.seed == 9
        # Degrees permute under the relabel map.
        deg_id = np.diff(g_id.offsets)
        deg_rl = np.diff(g_rl.offsets)
        assert sorted(deg_id) == sorted(deg_rl)

    def test_relabel_neutral_for_triangle_counts(self):
        from tricache import RunConfig, run_lcc
        el = er_edges(30, 0.3, 2)
        g_id, m_id = preprocess(el)
        g_rl, m_rl = preprocess(el, seed=4, relabel=True)
        r_id, _ = run_lcc(g_id, RunConfig())
        r_rl, _ = run_lcc(g_rl, RunConfig())
        for orig in m_id.original_ids().tolist():
            a = m_id.new_of_old[orig]
            b = m_rl.new_of_old[orig]
            assert (a < 0) == (b < 0)
            if a >= 0:
                assert r_id.triangles[a] == r_rl.triangles[b]

    def test_round_trip(self):
        el = er_edges(50, 0.2, 3)
        g, _ = preprocess(el)
        g2, _ = preprocess(g.to_edge_list())
        assert np.array_equal(g.offsets, g2.offsets)
        assert np.array_equal(g.adjacencies, g2.adjacencies)

    def test_degree_sums_to_m(self):
        el = er_edges(50, 0.2, 4)
        g, _ = preprocess(el)
        assert sum(g.degree(v) for v in range(g.n)) == g.m


class TestAccessors:
    def test_degree_and_adjacency(self, k3):
        assert k3.degree(1) == 2
        assert k3.adjacency(0).tolist() == [1, 2]
        assert k3.adjacency(2).tolist() == [0, 1]

    def test_out_of_range(self, k3):
        with pytest.raises(IndexError):
            k3.degree(3)
        with pytest.raises(IndexError):
            k3.adjacency(3)

    def test_last_slice_ends_at_m(self, k3):
        assert k3.offsets[k3.n] == k3.m
        assert len(k3.adjacency(k3.n - 1)) == 2


class TestValidate:
    def test_valid(self, k3):
        assert validate(k3) == []

    def test_non_monotone_offsets(self, k3):
        bad = CsrGraph(directed=False, n=3, m=6,
                       offsets=np.array([0, 4, 2, 6]), adjacencies=k3.adjacencies)
        assert any("non-monotone" in v for v in validate(bad))

    def test_unsorted_slice(self, k3):
        adj = k3.adjacencies.copy()
        adj[0], adj[1] = adj[1], adj[0]
        bad = CsrGraph(directed=False, n=3, m=6, offsets=k3.offsets, adjacencies=adj)
        assert any("unsorted @0" in v for v in validate(bad))

    def test_missing_reverse_edge(self):
        bad = CsrGraph(directed=False, n=2, m=1,
                       offsets=np.array([0, 1, 1]), adjacencies=np.array([1]))
        assert any("reverse" in v for v in validate(bad))


class TestBinaryFormat:
    def test_round_trip(self, k4):
        buf = io.BytesIO()
        write_csr(k4, buf)
        buf.seek(0)
        g = read_csr(buf)
        assert g.directed == k4.directed and g.n == k4.n and g.m == k4.m
        assert np.array_equal(g.offsets, k4.offsets)
        assert np.array_equal(g.adjacencies, k4.adjacencies)

    def test_bad_magic(self):
        with pytest.raises(ValueError):
            read_csr(io.BytesIO(b"NOPE" + b"\0" * 32))

    def test_layout(self, k3):
        buf = io.BytesIO()
        write_csr(k3, buf)
        raw = buf.getvalue()
        assert raw[:4] == b"CSR1"
        assert raw[4] == 0  # undirected
        assert int.from_bytes(raw[5:13], "little") == 3
        assert int.from_bytes(raw[13:21], "little") == 6
        assert len(raw) == 21 + 8 * (k3.n + 1) + 8 * k3.m

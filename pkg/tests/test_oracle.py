import numpy as np
import pytest

from tricache import brute_lcc, brute_triangles, parse_edge_list
from tricache.oracle import SCALE_GUARD
from tricache.graph import EdgeList

from conftest import complete_graph, er_edges


def edge_list(pairs, directed=False, n_hint=None):
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if n_hint is None:
        n_hint = int(arr.max()) + 1 if len(arr) else 0
    return EdgeList(directed=directed, n_hint=n_hint, edges=arr)


class TestKnownGraphs:
    def test_k3(self):
        r = brute_lcc(complete_graph(3))
        assert r.triangles.tolist() == [2, 2, 2]
        assert r.lcc.tolist() == [1.0, 1.0, 1.0]
        assert r.global_triangles == 1

    def test_k4(self):
        r = brute_lcc(complete_graph(4))
        assert r.triangles.tolist() == [6, 6, 6, 6]
        assert r.lcc.tolist() == [1.0] * 4
        assert r.global_triangles == 4

    def test_k5(self):
        r = brute_lcc(complete_graph(5))
        # Each vertex: 4*3 ordered neighbor pairs, all adjacent.
        assert r.triangles.tolist() == [12] * 5
        assert r.global_triangles == 10

    def test_five_cycle_is_triangle_free(self):
        el = edge_list([[i, (i + 1) % 5] for i in range(5)])
        r = brute_lcc(el)
        assert r.triangles.tolist() == [0] * 5
        assert r.lcc.tolist() == [0.0] * 5
        assert r.global_triangles == 0

    def test_directed_three_cycle(self):
        # 0->1->2->0: out-neighbor pairs are never connected both ways needed,
        # each vertex has out-degree 1 so every LCC is 0 by the d >= 2 rule.
        el = edge_list([[0, 1], [1, 2], [2, 0]], directed=True)
        r = brute_lcc(el)
        assert r.triangles.tolist() == [0, 0, 0]
        assert r.lcc.tolist() == [0.0, 0.0, 0.0]
        assert r.global_triangles == 0

    def test_directed_transitive_triangle(self):
        # 0->1, 0->2, 1->2: vertex 0 sees neighbor pair (1, 2) once.
        el = edge_list([[0, 1], [0, 2], [1, 2]], directed=True)
        r = brute_lcc(el)
        assert r.triangles.tolist() == [1, 0, 0]
        assert r.lcc[0] == pytest.approx(0.5)

    def test_bowtie(self):
        # Two triangles sharing vertex 2.
        el = edge_list([[0, 1], [1, 2], [0, 2], [2, 3], [3, 4], [2, 4]])
        r = brute_lcc(el)
        assert r.triangles.tolist() == [2, 2, 4, 2, 2]
        assert r.lcc[2] == pytest.approx(4 / 12)
        assert r.global_triangles == 2


class TestRobustness:
    def test_self_loops_ignored(self):
        with_loop = edge_list([[0, 0], [0, 1], [1, 2], [0, 2]])
        without = edge_list([[0, 1], [1, 2], [0, 2]])
        a, b = brute_lcc(with_loop), brute_lcc(without)
        assert a.triangles.tolist() == b.triangles.tolist()
        assert a.global_triangles == b.global_triangles

    def test_duplicates_ignored(self):
        el = edge_list([[0, 1], [1, 0], [0, 1], [1, 2], [0, 2]])
        assert brute_triangles(el) == 1

    def test_raw_equals_three_t(self):
        # Summed ordered-pair numerators double-count each triangle 6 times,
        # so sum(tri) == 6 * T for undirected graphs.
        for seed in range(5):
            el = er_edges(20, 0.3, seed)
            r = brute_lcc(el)
            assert int(r.triangles.sum()) == 6 * r.global_triangles

    def test_permutation_invariance(self):
        rng = np.random.Generator(np.random.PCG64(9))
        el = er_edges(15, 0.4, 2)
        perm = rng.permutation(15)
        permuted = edge_list(perm[el.edges], n_hint=15)
        a, b = brute_lcc(el), brute_lcc(permuted)
        assert a.global_triangles == b.global_triangles
        for v in range(15):
            assert a.triangles[v] == b.triangles[perm[v]]
            assert a.lcc[v] == pytest.approx(b.lcc[perm[v]])

    def test_scale_guard(self):
        el = EdgeList(directed=False, n_hint=SCALE_GUARD + 1,
                      edges=np.empty((0, 2), dtype=np.int64))
        with pytest.raises(ValueError):
            brute_lcc(el)

    def test_directed_rejected_by_triangle_count(self):
        with pytest.raises(ValueError):
            brute_triangles(edge_list([[0, 1]], directed=True))

    def test_empty(self):
        r = brute_lcc(edge_list([], n_hint=0))
        assert len(r.triangles) == 0 and r.global_triangles == 0

    def test_text_parse_path(self):
        el = parse_edge_list("0 1\n1 2\n0 2\n2 3\n", directed=False)
        r = brute_lcc(el)
        assert r.global_triangles == 1
        assert r.lcc[2] == pytest.approx(2 / 6)

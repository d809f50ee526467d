import pytest

from hkdyn.graph import GraphError, SocialGraph


def test_edges_normalized_and_sorted():
    g = SocialGraph(4, [(3, 1), (0, 2), (1, 0)])
    assert g.edges == [(0, 1), (0, 2), (1, 3)]
    assert g.adjacency == [[1, 2], [0, 3], [0], [1]]
    assert g.check_consistency()


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)], [(-1, 0)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(GraphError):
        SocialGraph(3, edges)


def test_complete_and_path():
    k5 = SocialGraph.complete(5)
    assert k5.m == 10 and all(k5.degree(v) == 4 for v in range(5))
    p = SocialGraph.path(4)
    assert p.edges == [(0, 1), (1, 2), (2, 3)]
    assert p.has_edge(2, 1) and not p.has_edge(0, 2)
    assert k5.check_consistency() and p.check_consistency()


def test_csr_incidence_points_at_the_right_edge():
    g = SocialGraph(5, [(0, 4), (1, 2), (2, 4), (3, 4)])
    for v in range(5):
        for k in range(g.indptr[v], g.indptr[v + 1]):
            e = g.incident[k]
            assert {int(g.edge_u[e]), int(g.edge_v[e])} == {v, int(g.neighbors[k])}


def test_consistency_check_detects_tampering():
    g = SocialGraph(3, [(0, 1), (1, 2)])
    g.adjacency[0].append(2)
    assert not g.check_consistency()


def test_empty_graph():
    g = SocialGraph(3)
    assert g.m == 0 and g.check_consistency()

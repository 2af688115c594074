import pytest

from reassembly.core import make_matrix
from reassembly.counting import GraphSizeQuery, edge_count, node_count, reassembly_lower_bound
from reassembly.errors import DomainError
from reassembly.graph import CutPolicy, build_graph, enumerate_paths


def uniform_matrix(f):
    return make_matrix(0, [(i, [1 / 9] * 9) for i in range(1, f + 1)])


def test_node_count_base_cases():
    assert node_count(GraphSizeQuery(1, 3)) == 6  # n(1,p) = p + 2
    assert node_count(GraphSizeQuery(3, 0)) == 5  # n(f,0) = f + 1


def test_node_count_hand_derived():
    # n(2,2) = 2*n(1,1) + n(1,2) + 1 = 2*3 + 4 + 1 = 11
    assert node_count(GraphSizeQuery(2, 2)) == 12


def test_edge_count_base_cases():
    assert edge_count(GraphSizeQuery(1, 3)) == 8  # e(1,p) = 2p + 3
    assert edge_count(GraphSizeQuery(2, 0)) == 3  # e(f,0) = f + 2


def test_edge_count_hand_derived():
    # e(2,2) = 2*e(1,1) + e(1,2) + 1 = 2*5 + 7 + 1 = 18
    assert edge_count(GraphSizeQuery(2, 2)) == 17


def test_counts_match_enumerated_graph_totals():
    # The recursive term of the edge recursion is read as e(f-1, p-1); this
    # cross-check against real graphs is what settles that reading.
    for f in range(1, 5):
        for p in range(0, 5):
            g = build_graph(
                uniform_matrix(f),
                allow_outsiders=True,
                policy=CutPolicy(theta=0.0),
                positions=tuple(range(1, p + 1)),
            )
            q = GraphSizeQuery(f, p)
            assert g.stats.nodes == node_count(q), (f, p)
            assert g.stats.edges == edge_count(q), (f, p)


def test_counts_strictly_increasing_in_f():
    for p in range(1, 9):
        ns = [node_count(GraphSizeQuery(f, p)) for f in range(1, 9)]
        es = [edge_count(GraphSizeQuery(f, p)) for f in range(1, 9)]
        assert ns == sorted(set(ns)) and es == sorted(set(es))


def test_query_domain():
    with pytest.raises(DomainError):
        GraphSizeQuery(0, 3)
    with pytest.raises(DomainError):
        GraphSizeQuery(2, 9)


def test_lower_bound_full_puzzle():
    assert reassembly_lower_bound(8, 8, False) == 40320  # 8!


def test_lower_bound_trivial_and_factorial():
    assert reassembly_lower_bound(1, 1, False) == 1
    assert reassembly_lower_bound(10, 8, True) == 6_652_800  # 11!/3!


def test_lower_bound_requires_outsiders_when_overfull():
    with pytest.raises(DomainError):
        reassembly_lower_bound(5, 3, False)


def test_lower_bound_matches_exhaustive_injections():
    import itertools

    for p in range(0, 6):
        for f in range(1, p + 1):
            exhaustive = sum(1 for _ in itertools.permutations(range(p), f))
            assert reassembly_lower_bound(f, p, False) == exhaustive


def test_lower_bound_is_a_floor_on_enumerated_paths():
    for f, p in [(2, 1), (3, 2), (4, 2), (4, 3), (5, 3)]:
        g = build_graph(
            uniform_matrix(f),
            allow_outsiders=True,
            policy=CutPolicy(theta=0.0),
            positions=tuple(range(1, p + 1)),
        )
        assert g.path_count >= reassembly_lower_bound(f, p, True)

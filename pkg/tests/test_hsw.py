import json
from fractions import Fraction

import pytest

from hswnet.errors import BudgetExceeded, GraphError
from hswnet.graph import compute_metrics
from hswnet.hsw import (
    build_hsw,
    density,
    level_degree,
    level_probability,
    level_profile,
    order_and_size,
)

SMALL = [(r, g) for r in (2, 3, 4) for g in range(0, 6)]


def brute_hsw_edges(r, g):
    """Independent construction: explicit parent map, then ancestor closure."""
    n = sum(r**i for i in range(g + 1))
    parent = {}
    nxt = 1
    frontier = [0]
    for _ in range(g):
        new = []
        for p in frontier:
            for _ in range(r):
                parent[nxt] = p
                new.append(nxt)
                nxt += 1
        frontier = new
    edges = set()
    for v in range(1, n):
        a = parent[v]
        while True:
            edges.add((a, v))
            if a == 0:
                break
            a = parent[a]
    return n, edges


def test_m1_2_is_path3():
    net = build_hsw(2, 1)
    assert net.n == 3 and net.graph.m == 2
    assert net.graph.edges == ((0, 1), (0, 2))


def test_m3_2_root_degree():
    net = build_hsw(2, 3)
    assert net.n == 15
    assert net.graph.degree(0) == 14


def test_m1_3_is_star():
    net = build_hsw(3, 1)
    assert net.n == 4 and net.graph.m == 3
    assert net.graph.degrees() == [3, 1, 1, 1]


@pytest.mark.parametrize("r,g", SMALL)
def test_constructions_agree(r, g):
    tree = build_hsw(r, g, method="tree")
    rec = build_hsw(r, g, method="recursive")
    n, brute = brute_hsw_edges(r, g)
    assert tree.graph.edges == rec.graph.edges
    assert set(tree.graph.edges) == brute and tree.n == n


@pytest.mark.parametrize("r,g", SMALL)
def test_order_and_size_match_counts(r, g):
    net = build_hsw(r, g)
    assert order_and_size(r, g) == (net.n, net.graph.m)


def test_order_and_size_values():
    assert order_and_size(2, 3) == (15, 34)
    assert order_and_size(2, 0) == (1, 0)
    # a brute count on M_2^3 gives 12 root edges plus 3 x 3 edges below
    assert order_and_size(3, 2) == (13, 21)


def test_order_and_size_large_is_exact():
    n, e = order_and_size(2, 100)
    assert n == 2**101 - 1
    # sum over levels of level * vertices-on-level
    assert e == sum(i * 2**i for i in range(101))


@pytest.mark.parametrize("r,g", SMALL)
def test_degree_is_descendants_plus_ancestors(r, g):
    net = build_hsw(r, g)
    for v in range(net.n):
        assert net.graph.degree(v) == net.desc_count[v] + net.anc_count[v]
        assert net.anc_count[v] == net.level[v] == len(net.ancestors(v))
        assert net.desc_count[v] == len(net.descendants(v))
        if net.is_leaf(v):
            assert net.desc_count[v] == 0


@pytest.mark.parametrize("r,g", [(2, 3), (3, 3), (4, 2)])
def test_basic_tree_is_full(r, g):
    net = build_hsw(r, g)
    for v in range(net.n):
        kids = net.children(v)
        assert len(kids) == (0 if net.level[v] == g else r)
        assert all(net.parent[c] == v and net.level[c] == net.level[v] + 1 for c in kids)


def test_level_degree_examples():
    assert level_degree(2, 3, 0) == 14
    assert level_degree(2, 3, 1) == 7
    assert level_degree(2, 3, 3) == 3
    with pytest.raises(GraphError):
        level_degree(2, 3, 4)


@pytest.mark.parametrize("r,g", SMALL)
def test_level_degree_matches_graph(r, g):
    net = build_hsw(r, g)
    for v in range(net.n):
        assert net.graph.degree(v) == level_degree(r, g, net.level[v])


def test_level_profile_m32():
    prof = level_profile(build_hsw(2, 3))
    assert prof.probabilities[3] == Fraction(8, 15)
    assert prof.histogram == {14: 1, 7: 2, 4: 4, 3: 8}
    assert prof.counts == (1, 2, 4, 8)


@pytest.mark.parametrize("r,g", SMALL)
def test_level_profile_sums(r, g):
    prof = level_profile(build_hsw(r, g))
    assert sum(prof.probabilities) == 1
    assert sum(prof.histogram.values()) == order_and_size(r, g)[0]
    for i, p in enumerate(prof.probabilities):
        assert p == Fraction(r**i, order_and_size(r, g)[0])
        assert p == level_probability(r, g, i)


@pytest.mark.parametrize("r", [2, 3])
def test_density_decreases(r):
    d = [density(r, g) for g in range(2, 9)]
    assert all(a > b for a, b in zip(d, d[1:]))
    assert d[-1] < 0.05


def test_density_matches_metrics():
    assert density(3, 3) == pytest.approx(compute_metrics(build_hsw(3, 3).graph).density, rel=1e-15)


def test_rejects_bad_parameters():
    with pytest.raises(GraphError):
        build_hsw(1, 3)
    with pytest.raises(GraphError):
        order_and_size(2, -1)
    with pytest.raises(BudgetExceeded):
        build_hsw(2, 30)
    with pytest.raises(BudgetExceeded):
        build_hsw(2, 5, budget=10)


def test_descriptor():
    net = build_hsw(2, 2)
    d = json.loads(net.descriptor_json())
    assert (d["r"], d["g"], d["n"], d["m"]) == (2, 2, 7, 10)
    assert [lv["count"] for lv in d["levels"]] == [1, 2, 4]
    assert [lv["degree"] for lv in d["levels"]] == [6, 3, 2]

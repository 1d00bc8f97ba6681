from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from csmkit.analyze import (
    PatternError, classify_deadlocks, diff_graphs, find_terminal_sccs, parse_accepting,
    strongly_connected_components, terminal_nodes, witness_paths,
)
from csmkit.compose import Edge, ReachabilityGraph, SystemState, compose
from csmkit.formula import TRUE, atoms

from helpers import brute_force_sccs, random_graph, seeded

DEADLOCK = "SendStopIteration_ProduceDecisionRequest"


def graph(n, pairs, initial=0):
    nodes = tuple(SystemState((f"n{i}",), f"n{i}", frozenset()) for i in range(n))
    return ReachabilityGraph(("M",), frozenset(), nodes,
                             tuple(Edge(a, TRUE, b) for a, b in pairs), initial)


@pytest.fixture(scope="module")
def original(design_system):
    return compose(design_system)


@pytest.fixture(scope="module")
def repaired(repaired_system):
    return compose(repaired_system)


def names(g, comps):
    return [sorted(g.nodes[i].name for i in c) for c in comps]


def test_fixture_terminal_sccs(original):
    comps = find_terminal_sccs(original)
    assert sorted(names(original, comps)) == sorted([["EndDes_Wait"], [DEADLOCK]])
    assert [original.nodes[i].name for i in terminal_nodes(original)] == [DEADLOCK, "EndDes_Wait"]


def test_small_graphs():
    ring = graph(3, [(0, 1), (1, 2), (2, 0)])
    assert find_terminal_sccs(ring) == [frozenset({0, 1, 2})]
    g = graph(3, [(0, 1), (1, 0), (0, 2), (2, 2)])
    assert find_terminal_sccs(g) == [frozenset({2})]
    sink = graph(2, [(0, 1)])
    assert find_terminal_sccs(sink) == [frozenset({1})]


def test_classify_original(original):
    r = classify_deadlocks(original, ["EndDes_*"])
    assert names(original, r.accepting) == [["EndDes_Wait"]]
    assert names(original, r.deadlocks) == [[DEADLOCK]]
    [w] = r.witnesses
    assert len(w.incoming) == 3
    assert {original.nodes[e.source].name for e in w.incoming} == {
        "IterInProg_DoLoop", "SendStopIteration_DoLoop", "IterInProg_ProduceDecisionRequest"}


def test_classify_repaired(repaired):
    r = classify_deadlocks(repaired, ["EndDes_*"])
    assert r.deadlock_free
    assert names(repaired, r.accepting) == [["EndDes_Wait"]]
    assert names(repaired, find_terminal_sccs(repaired)) == [["EndDes_Wait"]]


def test_classify_without_patterns_and_on_cycles(original):
    r = classify_deadlocks(original)
    assert len(r.deadlocks) == 2
    cycle = graph(2, [(0, 1), (1, 0)])
    assert len(classify_deadlocks(cycle).deadlocks) == 1
    assert classify_deadlocks(cycle, ["n*"]).deadlock_free


def test_vector_patterns(original):
    r = classify_deadlocks(original, ["EndDes, *"])
    assert names(original, r.accepting) == [["EndDes_Wait"]]
    with pytest.raises(PatternError):
        classify_deadlocks(original, ["EndDes,*,*"])


@pytest.mark.parametrize("text", ["", "   ", "End Des", "a[b", "x,,y", "a;b"])
def test_malformed_patterns(text):
    with pytest.raises(PatternError):
        parse_accepting(text)


def test_witness_paths_basic(original):
    assert witness_paths(original, original.initial, 1) == [[]]
    chain = graph(3, [(0, 1), (1, 2), (2, 2)])
    paths = witness_paths(chain, 2, 3)
    assert len(paths) == 1 and [(e.source, e.target) for e in paths[0]] == [(0, 1), (1, 2)]
    diamond = graph(4, [(0, 2), (0, 1), (1, 3), (2, 3)])
    assert [[e.target for e in p] for p in witness_paths(diamond, 3, 5)] == [[1, 3], [2, 3]]
    assert len(witness_paths(diamond, 3, 1)) == 1
    with pytest.raises(ValueError):
        witness_paths(graph(2, []), 1)
    with pytest.raises(KeyError):
        witness_paths(diamond, 9)


def test_deadlock_path_shows_the_coincidence(original):
    target = original.index(DEADLOCK)
    [path] = witness_paths(original, target, 1)
    assert original.nodes[path[-1].target].name == DEADLOCK
    last = atoms(path[-1].guard)
    assert "Suspend" in last and {"CC_DP", "CC_OC", "M_OF"} <= last
    assert [original.nodes[e.target].name for e in path] == [
        "SendGo_Wait", "SendGo_AckGo", "IterInProg_DoLoop", DEADLOCK]


def test_diff(original, repaired, m1_system):
    assert diff_graphs(original, original).empty
    d = diff_graphs(original, repaired)
    assert not d.empty and d.comparable
    assert d.nodes_only_in_first == [] and d.nodes_only_in_second == []
    assert (DEADLOCK, DEADLOCK) in d.edges_only_in_first
    assert (DEADLOCK, "DecNeeded_Wait") in d.edges_only_in_second
    d = diff_graphs(original, compose(m1_system))
    assert not d.comparable and "machine" in d.reason


def test_diff_reports_guard_changes():
    g1 = graph(2, [(0, 1)])
    from csmkit.formula import Atom
    g2 = ReachabilityGraph(g1.machines, g1.environment, g1.nodes, (Edge(0, Atom("a"), 1),), 0)
    d = diff_graphs(g1, g2)
    assert d.guard_changes == [("n0", "n1", "1", "a")]


def bfs_dist(g):
    dist = {g.initial: 0}
    q = deque([g.initial])
    while q:
        v = q.popleft()
        for w in g.successors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1_000_000))
def test_scc_properties(seed):
    g = random_graph(seeded(seed), max_nodes=50)
    comps, reach = brute_force_sccs(g)
    found = strongly_connected_components(g)
    assert set(found) == comps
    assert sorted(i for c in found for i in c) == list(range(len(g.nodes)))
    terminal = find_terminal_sccs(g)
    for c in comps:
        trapped = all(reach[i] <= c for i in c)
        assert (c in terminal) == trapped
    assert [min(c) for c in terminal] == sorted(min(c) for c in terminal)
    assert classify_deadlocks(g, ["*"]).deadlock_free


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 1_000_000), st.integers(1, 4))
def test_witness_paths_are_valid_and_shortest(seed, k):
    g = random_graph(seeded(seed), max_nodes=20)
    dist = bfs_dist(g)
    for target in range(len(g.nodes)):
        paths = witness_paths(g, target, k)
        assert 1 <= len(paths) <= k
        assert len({tuple((e.source, e.target) for e in p) for p in paths}) == len(paths)
        for p in paths:
            assert len(p) == dist[target]
            if p:
                assert p[0].source == g.initial and p[-1].target == target
            for e1, e2 in zip(p, p[1:]):
                assert e1.target == e2.source

"""Trap and deadlock analysis of reachability graphs."""

from __future__ import annotations

import fnmatch
import re
from collections import deque
from dataclasses import dataclass, field

from .compose import Edge, ReachabilityGraph
from .formula import equivalent, render_formula

__all__ = [
    "strongly_connected_components", "find_terminal_sccs", "terminal_nodes",
    "AcceptingPattern", "parse_accepting", "AnalysisReport", "DeadlockWitness",
    "classify_deadlocks", "witness_paths", "GraphDiff", "diff_graphs",
    "PatternError",
]


class PatternError(ValueError):
    pass


def strongly_connected_components(g: ReachabilityGraph) -> list[frozenset[int]]:
    """Tarjan's algorithm, iterative; components in completion order."""
    n = len(g.nodes)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    sccs = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(g.successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(frozenset(comp))
    return sccs


def find_terminal_sccs(g: ReachabilityGraph) -> list[frozenset[int]]:
    """Components with no edge leaving them, ordered by smallest member."""
    out = []
    for comp in strongly_connected_components(g):
        if all(w in comp for v in comp for w in g.successors(v)):
            out.append(comp)
    return sorted(out, key=min)


def terminal_nodes(g: ReachabilityGraph) -> list[int]:
    """Nodes without an edge to any other node."""
    return [i for i in range(len(g.nodes)) if all(w == i for w in g.successors(i))]


# -- accepting patterns ----------------------------------------------------

_PATTERN_CHARS = re.compile(r"[A-Za-z0-9_.*?\[\]!,:-]+")


@dataclass(frozen=True)
class AcceptingPattern:
    """Glob over composite names, or comma-separated per-machine globs."""

    text: str

    def matches(self, g: ReachabilityGraph, i: int) -> bool:
        node = g.nodes[i]
        if "," in self.text:
            parts = [p.strip() for p in self.text.split(",")]
            if len(parts) != len(node.vector):
                raise PatternError(
                    f"pattern {self.text!r} has {len(parts)} components, "
                    f"system has {len(node.vector)} machines")
            return all(fnmatch.fnmatchcase(q, p) for q, p in zip(node.vector, parts))
        return fnmatch.fnmatchcase(node.name, self.text)


def parse_accepting(text: str) -> AcceptingPattern:
    text = re.sub(r"\s*,\s*", ",", text.strip())
    if not text or not _PATTERN_CHARS.fullmatch(text):
        raise PatternError(f"malformed accepting pattern {text!r}")
    if text.count("[") != text.count("]"):
        raise PatternError(f"unbalanced brackets in accepting pattern {text!r}")
    if any(not p.strip() for p in text.split(",")):
        raise PatternError(f"empty component in accepting pattern {text!r}")
    return AcceptingPattern(text)


# -- paths -----------------------------------------------------------------

def _distances(g):
    dist = {g.initial: 0}
    queue = deque([g.initial])
    while queue:
        v = queue.popleft()
        for w in g.successors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def witness_paths(g: ReachabilityGraph, target: int, k: int = 1) -> list[list[Edge]]:
    """Up to ``k`` shortest paths from the initial node to ``target``.

    Every returned path has minimal length.  Paths come out in
    lexicographic order of their node indices.
    """
    if not 0 <= target < len(g.nodes):
        raise KeyError(target)
    dist = _distances(g)
    if target not in dist:
        raise ValueError(f"node {target} is unreachable from the initial node")
    # distance to target along reversed edges, to keep only shortest-path nodes
    preds = {}
    for e in g.edges:
        preds.setdefault(e.target, []).append(e.source)
    back = {target: 0}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u in preds.get(v, ()):
            if u not in back:
                back[u] = back[v] + 1
                queue.append(u)
    on_path = {v for v in dist if v in back and dist[v] + back[v] == dist[target]}
    paths = []

    def extend(v, prefix):
        if len(paths) >= k:
            return
        if v == target:
            paths.append(list(prefix))
            return
        for e in sorted(g.out_edges(v), key=lambda e: e.target):
            w = e.target
            if w in on_path and dist[w] == dist[v] + 1:
                prefix.append(e)
                extend(w, prefix)
                prefix.pop()

    if k > 0:
        extend(g.initial, [])
    return paths


# -- report ----------------------------------------------------------------

@dataclass
class DeadlockWitness:
    component: frozenset[int]
    incoming: list[Edge]
    paths: list[list[Edge]]

    @property
    def path(self) -> list[Edge]:
        return self.paths[0] if self.paths else []


@dataclass
class AnalysisReport:
    terminal_nodes: list[int]
    terminal_sccs: list[frozenset[int]]
    accepting: list[frozenset[int]] = field(default_factory=list)
    deadlocks: list[frozenset[int]] = field(default_factory=list)
    witnesses: list[DeadlockWitness] = field(default_factory=list)

    @property
    def deadlock_free(self) -> bool:
        return not self.deadlocks


def classify_deadlocks(g: ReachabilityGraph, accepting=(), paths: int = 1) -> AnalysisReport:
    """Split terminal components into accepting ends and deadlocks.

    A component is accepting when every member matches some pattern.
    """
    patterns = [p if isinstance(p, AcceptingPattern) else parse_accepting(p) for p in accepting]
    report = AnalysisReport(terminal_nodes(g), find_terminal_sccs(g))
    dist = _distances(g)
    for comp in report.terminal_sccs:
        if patterns and all(any(p.matches(g, i) for p in patterns) for i in comp):
            report.accepting.append(comp)
            continue
        report.deadlocks.append(comp)
        entry = min(comp, key=lambda i: (dist[i], i))
        incoming = [e for e in g.edges if e.target in comp and e.source not in comp]
        found = witness_paths(g, entry, max(paths, 1))
        report.witnesses.append(DeadlockWitness(comp, incoming, found))
    return report


# -- comparison ------------------------------------------------------------

@dataclass
class GraphDiff:
    comparable: bool = True
    reason: str = ""
    nodes_only_in_first: list[str] = field(default_factory=list)
    nodes_only_in_second: list[str] = field(default_factory=list)
    edges_only_in_first: list[tuple[str, str]] = field(default_factory=list)
    edges_only_in_second: list[tuple[str, str]] = field(default_factory=list)
    guard_changes: list[tuple[str, str, str, str]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.comparable and not (
            self.nodes_only_in_first or self.nodes_only_in_second
            or self.edges_only_in_first or self.edges_only_in_second
            or self.guard_changes)


def diff_graphs(g1: ReachabilityGraph, g2: ReachabilityGraph) -> GraphDiff:
    if g1.machines != g2.machines:
        return GraphDiff(False, f"machine lists differ: {list(g1.machines)} vs {list(g2.machines)}")
    d = GraphDiff()
    names1 = [n.name for n in g1.nodes]
    names2 = [n.name for n in g2.nodes]
    set1, set2 = set(names1), set(names2)
    d.nodes_only_in_first = [n for n in names1 if n not in set2]
    d.nodes_only_in_second = [n for n in names2 if n not in set1]

    def keyed(g):
        return {(g.nodes[e.source].name, g.nodes[e.target].name): e.guard for e in g.edges}

    e1, e2 = keyed(g1), keyed(g2)
    d.edges_only_in_first = [k for k in e1 if k not in e2]
    d.edges_only_in_second = [k for k in e2 if k not in e1]
    for key, f in e1.items():
        if key in e2 and not equivalent(f, e2[key]):
            d.guard_changes.append((key[0], key[1], render_formula(f), render_formula(e2[key])))
    return d

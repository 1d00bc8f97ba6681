"""Broadcast composition of CSMs into a reachability graph.

At every step the global symbol set is the environment's input together
with the outputs of every component's current state; all components move
at once, each along one enabled transition (a self-loop counts).  An edge
between system states is labelled by the product of the chosen guards with
all internal symbols replaced by their known values, so only environment
symbols remain.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .formula import (
    DEFAULT_ATOM_CAP, Formula, atoms, conjoin, disjoin, is_satisfiable, restrict,
)
from .model import Csm, CsmTransition, ModelError, incomplete_states, validate_csm

__all__ = [
    "SystemModel", "SystemState", "Edge", "ReachabilityGraph", "CompositionError",
    "system_output", "edge_guard", "compose", "composite_name",
]

SEPARATOR = "_"


class CompositionError(ModelError):
    pass


@dataclass(frozen=True)
class SystemModel:
    """Ordered machines plus the split of symbols into internal/environment.

    ``internal`` and ``environment`` default to the machines' combined
    outputs and the remaining inputs.  An explicit ``environment`` also
    removes its symbols from the default internal set.
    """

    machines: tuple[Csm, ...]
    name: str = "system"
    internal: frozenset[str] | None = None
    environment: frozenset[str] | None = None
    accepting: tuple[str, ...] = ()

    @cached_property
    def internal_symbols(self) -> frozenset[str]:
        if self.internal is not None:
            return frozenset(self.internal)
        produced = frozenset().union(*(m.outputs for m in self.machines))
        return produced - (self.environment or frozenset())

    @cached_property
    def environment_symbols(self) -> frozenset[str]:
        if self.environment is not None:
            return frozenset(self.environment)
        consumed = frozenset().union(*(m.inputs for m in self.machines))
        return consumed - self.internal_symbols

    @property
    def machine_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.machines)

    def initial_vector(self) -> tuple[str, ...]:
        return tuple(m.initial for m in self.machines)

    def check(self):
        names = self.machine_names
        if len(set(names)) != len(names):
            raise CompositionError(f"duplicate machine names in {list(names)}")
        both = self.internal_symbols & self.environment_symbols
        if both:
            raise CompositionError(f"symbols {sorted(both)} are both internal and environment")


@dataclass(frozen=True)
class SystemState:
    vector: tuple[str, ...]
    name: str
    outputs: frozenset[str]


@dataclass(frozen=True)
class Edge:
    source: int
    guard: Formula
    target: int


@dataclass(frozen=True)
class ReachabilityGraph:
    machines: tuple[str, ...]
    environment: frozenset[str]
    nodes: tuple[SystemState, ...]
    edges: tuple[Edge, ...]
    initial: int = 0
    _succ: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        succ = {i: [] for i in range(len(self.nodes))}
        for e in self.edges:
            succ[e.source].append(e)
        object.__setattr__(self, "_succ", succ)

    def out_edges(self, i: int) -> list[Edge]:
        return self._succ[i]

    def in_edges(self, i: int) -> list[Edge]:
        return [e for e in self.edges if e.target == i]

    def successors(self, i: int) -> list[int]:
        return [e.target for e in self._succ[i]]

    def index(self, name_or_vector) -> int:
        key = "name" if isinstance(name_or_vector, str) else "vector"
        if key == "vector":
            name_or_vector = tuple(name_or_vector)
        for i, n in enumerate(self.nodes):
            if getattr(n, key) == name_or_vector:
                return i
        raise KeyError(name_or_vector)

    def edge(self, source: int, target: int) -> Edge | None:
        for e in self._succ[source]:
            if e.target == target:
                return e
        return None


def composite_name(vector: Sequence[str], machines: Sequence[str] | None = None) -> str:
    if machines is None:
        return SEPARATOR.join(vector)
    return SEPARATOR.join(f"{m}.{s}" for m, s in zip(machines, vector))


def _check_vector(s: SystemModel, v):
    if len(v) != len(s.machines):
        raise CompositionError(f"state vector {tuple(v)} has {len(v)} entries, expected {len(s.machines)}")
    for m, q in zip(s.machines, v):
        if q not in m.state_names:
            raise CompositionError(f"machine {m.name} has no state {q!r}")


def system_output(s: SystemModel, v: Sequence[str]) -> frozenset[str]:
    """Union of the outputs of every component's current state."""
    _check_vector(s, v)
    out = frozenset()
    for m, q in zip(s.machines, v):
        out |= m.state(q).outputs
    return out


def _known_values(s: SystemModel, produced: frozenset[str], mentioned) -> dict[str, bool]:
    env = s.environment_symbols
    known = {}
    for x in mentioned:
        if x in produced:
            known[x] = True
        elif x not in env:
            known[x] = False
    return known


def edge_guard(s: SystemModel, v: Sequence[str], chosen: Sequence[CsmTransition]) -> Formula:
    """Product of the chosen guards reduced against the outputs of ``v``."""
    if len(chosen) != len(s.machines):
        raise CompositionError(f"need one transition per machine, got {len(chosen)}")
    for m, q, t in zip(s.machines, v, chosen):
        if t.source != q:
            raise CompositionError(
                f"transition {t.source} -> {t.target} of {m.name} does not leave {q!r}")
    produced = system_output(s, v)
    product = conjoin(t.guard for t in chosen)
    return restrict(product, _known_values(s, produced, atoms(product)))


def compose(s: SystemModel, allow_incomplete: bool = False,
            cap: int = DEFAULT_ATOM_CAP) -> ReachabilityGraph:
    """Breadth-first construction of the reachable system states."""
    s.check()
    for m in s.machines:
        report = validate_csm(m, cap)
        if not report.ok:
            raise CompositionError("; ".join(str(e) for e in report.errors))
        if not allow_incomplete:
            missing = incomplete_states(m, cap)
            if missing:
                raise CompositionError(
                    f"machine {m.name} is incomplete in {missing}; "
                    "apply completeness closure or allow incomplete machines")

    outgoing = [{q: m.outgoing(q) for q in m.state_names} for m in s.machines]
    start = s.initial_vector()
    order = [start]
    index = {start: 0}
    edges = []
    i = 0
    while i < len(order):
        v = order[i]
        produced = system_output(s, v)
        merged = {}
        for combo in itertools.product(*(out[q] for out, q in zip(outgoing, v))):
            product = conjoin(t.guard for t in combo)
            g = restrict(product, _known_values(s, produced, atoms(product)))
            if not is_satisfiable(g, cap):
                continue
            w = tuple(t.target for t in combo)
            if w not in index:
                index[w] = len(order)
                order.append(w)
            merged.setdefault(index[w], []).append(g)
        for j, gs in merged.items():
            edges.append(Edge(i, disjoin(gs), j))
        i += 1

    names = [composite_name(v) for v in order]
    if len(set(names)) != len(names):
        names = [composite_name(v, s.machine_names) for v in order]
    nodes = tuple(SystemState(v, n, system_output(s, v)) for v, n in zip(order, names))
    return ReachabilityGraph(
        machines=s.machine_names,
        environment=s.environment_symbols,
        nodes=nodes,
        edges=tuple(edges),
        initial=0,
    )

"""Concurrent state machines: Moore outputs, formula-guarded transitions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .formula import (
    FALSE, Formula, atoms, disjoin, is_satisfiable, is_tautology, negate,
    conjoin, DEFAULT_ATOM_CAP, AtomCapExceeded,
)

__all__ = [
    "CsmState", "CsmTransition", "Csm", "Finding", "ValidationReport",
    "ModelError", "validate_csm", "completeness_closure",
    "local_reachable_states", "incomplete_states",
]


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CsmState:
    name: str
    outputs: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CsmTransition:
    source: str
    guard: Formula
    target: str


@dataclass(frozen=True)
class Csm:
    name: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    states: tuple[CsmState, ...]
    initial: str
    transitions: tuple[CsmTransition, ...]

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    def state(self, name: str) -> CsmState:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(f"machine {self.name} has no state {name!r}")

    def outgoing(self, name: str) -> tuple[CsmTransition, ...]:
        return tuple(t for t in self.transitions if t.source == name)


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    subject: str = ""

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code, message, subject=""):
        self.errors.append(Finding(code, message, subject))

    def warn(self, code, message, subject=""):
        self.warnings.append(Finding(code, message, subject))

    def extend(self, other: "ValidationReport", prefix: str = ""):
        for f in other.errors:
            self.errors.append(Finding(f.code, prefix + f.message, f.subject))
        for f in other.warnings:
            self.warnings.append(Finding(f.code, prefix + f.message, f.subject))

    def codes(self, kind="errors"):
        return [f.code for f in getattr(self, kind)]


def local_reachable_states(m: Csm, cap: int = DEFAULT_ATOM_CAP) -> set[str]:
    """States reachable from the initial state over satisfiable guards."""
    names = set(m.state_names)
    if m.initial not in names:
        return set()
    seen = {m.initial}
    queue = deque([m.initial])
    while queue:
        s = queue.popleft()
        for t in m.outgoing(s):
            if t.target in names and t.target not in seen and is_satisfiable(t.guard, cap):
                seen.add(t.target)
                queue.append(t.target)
    return seen


def incomplete_states(m: Csm, cap: int = DEFAULT_ATOM_CAP) -> list[str]:
    """States whose outgoing guards do not cover every input set."""
    return [s.name for s in m.states
            if not is_tautology(disjoin(t.guard for t in m.outgoing(s.name)), cap)]


def _overlaps(m, state, cap):
    out = m.outgoing(state)
    pairs = []
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if out[i].target != out[j].target and is_satisfiable(
                    conjoin([out[i].guard, out[j].guard]), cap):
                pairs.append((out[i], out[j]))
    return pairs


def validate_csm(m: Csm, cap: int = DEFAULT_ATOM_CAP) -> ValidationReport:
    r = ValidationReport()
    names = [s.name for s in m.states]
    seen = set()
    for n in names:
        if n in seen:
            r.error("duplicate-state", f"{m.name}: state {n!r} declared twice", n)
        seen.add(n)
    if not m.initial or m.initial not in seen:
        r.error("missing-initial", f"{m.name}: initial state {m.initial!r} is not declared")
    for s in m.states:
        extra = s.outputs - m.outputs
        if extra:
            r.error("output-alphabet",
                    f"{m.name}: state {s.name!r} outputs {sorted(extra)} outside the output alphabet",
                    s.name)
    guards_ok = True
    for t in m.transitions:
        edge = f"{t.source} -> {t.target}"
        for end in (t.source, t.target):
            if end not in seen:
                r.error("dangling", f"{m.name}: transition {edge} names unknown state {end!r}", edge)
        stray = atoms(t.guard) - m.inputs
        if stray:
            r.error("input-alphabet",
                    f"{m.name}: guard of {edge} uses {sorted(stray)} outside the input alphabet", edge)
        if t.guard == FALSE:
            r.error("false-guard", f"{m.name}: transition {edge} is guarded by 0", edge)
            continue
        try:
            if not is_satisfiable(t.guard, cap):
                r.error("unsatisfiable-guard",
                        f"{m.name}: guard of {edge} can never be true", edge)
        except AtomCapExceeded as exc:
            guards_ok = False
            r.error("atom-cap", f"{m.name}: {edge}: {exc}", edge)
    if not r.ok or not guards_ok:
        return r

    reachable = local_reachable_states(m, cap)
    for n in names:
        if n not in reachable:
            r.warn("unreachable", f"{m.name}: state {n!r} is unreachable from {m.initial!r}", n)
    for n in incomplete_states(m, cap):
        r.warn("incomplete", f"{m.name}: state {n!r} has no enabled transition for some inputs", n)
    for n in names:
        for a, b in _overlaps(m, n, cap):
            r.warn("nondeterministic",
                   f"{m.name}: in {n!r} transitions to {a.target!r} and {b.target!r} can both fire", n)
    return r


def completeness_closure(m: Csm, cap: int = DEFAULT_ATOM_CAP) -> Csm:
    """Give every incomplete state a self-loop on the uncovered inputs."""
    missing = set(incomplete_states(m, cap))
    if not missing:
        return m
    added = []
    for s in m.states:
        if s.name in missing:
            stay = negate(disjoin(t.guard for t in m.outgoing(s.name)))
            added.append(CsmTransition(s.name, stay, s.name))
    return replace(m, transitions=m.transitions + tuple(added))

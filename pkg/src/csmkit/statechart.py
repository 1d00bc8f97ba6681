"""Extended state diagrams and their translation into CSMs.

Events and conditions become input symbols, actions become outputs of
inserted intermediate states.  Messages exchanged between modules follow
an acknowledgment handshake: the receiver of message ``e`` spends one step
in a state emitting ``ACKe``; the sender of message ``a`` waits in its
action state until ``ACKa`` is seen.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .formula import (
    Atom, Formula, atoms, conjoin, disjoin, negate, is_satisfiable, FALSE, TRUE,
)
from .model import Csm, CsmState, CsmTransition, ModelError, ValidationReport

__all__ = [
    "StTransition", "Statechart", "MessageDecl", "validate_statechart",
    "to_csm", "augment_outputs", "ack", "action_state_name", "ack_state_name",
]

ACK_PREFIX = "ACK"


def ack(symbol: str) -> str:
    return ACK_PREFIX + symbol


def action_state_name(source: str, target: str) -> str:
    return f"{source}__{target}__act"


def ack_state_name(source: str, event: str) -> str:
    return f"{source}__ack_{event}"


@dataclass(frozen=True)
class StTransition:
    """One labelled arrow.  At least one of ``event`` and ``condition``.

    ``act_state``/``ack_state`` optionally name the states inserted for this
    arrow; otherwise names are derived from the endpoints.
    """

    source: str
    target: str
    event: str | None = None
    condition: Formula | None = None
    actions: tuple[str, ...] = ()
    act_state: str | None = None
    ack_state: str | None = None

    @property
    def trigger(self) -> Formula:
        parts = []
        if self.event is not None:
            parts.append(Atom(self.event))
        if self.condition is not None:
            parts.append(self.condition)
        return conjoin(parts)


@dataclass(frozen=True)
class Statechart:
    name: str
    states: tuple[str, ...]
    initial: str
    transitions: tuple[StTransition, ...] = ()

    def outgoing(self, state):
        return tuple(t for t in self.transitions if t.source == state)


@dataclass(frozen=True)
class MessageDecl:
    messages: frozenset[str] = frozenset()
    environment_events: frozenset[str] = frozenset()
    conditions: frozenset[str] = frozenset()
    external_actions: frozenset[str] = frozenset()

    def groups(self):
        return {
            "messages": self.messages,
            "environment": self.environment_events,
            "conditions": self.conditions,
            "external": self.external_actions,
        }


def validate_statechart(s: Statechart, d: MessageDecl) -> ValidationReport:
    r = ValidationReport()
    groups = list(d.groups().items())
    for i, (ga, sa) in enumerate(groups):
        for gb, sb in groups[i + 1:]:
            both = sa & sb
            if both:
                r.error("declaration-overlap",
                        f"symbols {sorted(both)} declared both as {ga} and {gb}")

    if not s.states or not s.initial:
        r.error("missing-initial", f"{s.name}: no initial state")
    elif s.initial not in s.states:
        r.error("missing-initial", f"{s.name}: initial state {s.initial!r} is not declared")
    seen = set()
    for n in s.states:
        if n in seen:
            r.error("duplicate-state", f"{s.name}: state {n!r} declared twice", n)
        seen.add(n)

    events_ok = d.messages | d.environment_events
    actions_ok = d.messages | d.external_actions
    named = set()
    for t in s.transitions:
        edge = f"{t.source} -> {t.target}"
        for end in (t.source, t.target):
            if end not in seen:
                r.error("dangling", f"{s.name}: transition {edge} names unknown state {end!r}", edge)
        if t.event is None and t.condition is None:
            r.error("no-trigger", f"{s.name}: transition {edge} has no trigger", edge)
        if t.event is not None and t.event not in events_ok:
            r.error("unclassified",
                    f"{s.name}: event {t.event!r} on {edge} is not declared as a message or environment event",
                    t.event)
        if t.condition is not None:
            if t.condition == FALSE:
                r.error("false-guard", f"{s.name}: condition on {edge} is 0", edge)
            for a in sorted(atoms(t.condition) - d.conditions):
                r.error("unclassified",
                        f"{s.name}: condition atom {a!r} on {edge} is not declared as a condition", a)
        for a in t.actions:
            if a not in actions_ok:
                r.error("unclassified",
                        f"{s.name}: action {a!r} on {edge} is not declared as a message or external action", a)
        for n in (t.act_state, t.ack_state):
            if n is None:
                continue
            if n in seen or n in named:
                r.error("duplicate-state", f"{s.name}: inserted state name {n!r} is already used", n)
            named.add(n)
        if t.act_state is not None and not t.actions:
            r.error("bad-name", f"{s.name}: {edge} names an action state but has no actions", edge)
        if t.ack_state is not None and t.event not in d.messages:
            r.error("bad-name", f"{s.name}: {edge} names an ack state but its trigger is not a message", edge)

    if r.ok:
        reach = {s.initial}
        queue = deque([s.initial])
        while queue:
            q = queue.popleft()
            for t in s.outgoing(q):
                if t.target not in reach:
                    reach.add(t.target)
                    queue.append(t.target)
        for n in s.states:
            if n not in reach:
                r.warn("unreachable", f"{s.name}: state {n!r} is unreachable", n)
    return r


def to_csm(s: Statechart, d: MessageDecl) -> Csm:
    """Translate a statechart into a complete CSM."""
    report = validate_statechart(s, d)
    if not report.ok:
        raise ModelError("; ".join(str(e) for e in report.errors))

    taken = set(s.states)
    taken.update(t.act_state for t in s.transitions if t.act_state)
    taken.update(t.ack_state for t in s.transitions if t.ack_state)

    def fresh(base):
        name, k = base, 2
        while name in taken:
            name = f"{base}_{k}"
            k += 1
        taken.add(name)
        return name

    inputs, outputs = set(), set()
    main = []        # transitions leaving statechart states
    inserted = []    # (state, transitions) for intermediate states
    for state in s.states:
        out = s.outgoing(state)
        for t in out:
            guard = t.trigger
            inputs |= atoms(guard)
            nxt = t.target
            if t.actions:
                outputs.update(t.actions)
                name = t.act_state or fresh(action_state_name(t.source, t.target))
                waits = [a for a in t.actions if a in d.messages]
                if waits:
                    got = conjoin(Atom(ack(a)) for a in waits)
                    inputs.update(ack(a) for a in waits)
                    trans = [CsmTransition(name, got, nxt), CsmTransition(name, negate(got), name)]
                else:
                    trans = [CsmTransition(name, TRUE, nxt)]
                inserted.append((CsmState(name, frozenset(t.actions)), trans))
                nxt = name
            if t.event is not None and t.event in d.messages:
                name = t.ack_state or fresh(ack_state_name(t.source, t.event))
                outputs.add(ack(t.event))
                # insert ahead of the action state so the ack comes first
                inserted.insert(len(inserted) - (1 if t.actions else 0),
                                (CsmState(name, frozenset({ack(t.event)})),
                                 [CsmTransition(name, TRUE, nxt)]))
                nxt = name
            main.append(CsmTransition(state, guard, nxt))
        stay = negate(disjoin(t.trigger for t in out))
        if stay != FALSE and is_satisfiable(stay):
            main.append(CsmTransition(state, stay, state))

    states = tuple(CsmState(n) for n in s.states) + tuple(st for st, _ in inserted)
    transitions = tuple(main) + tuple(t for _, ts in inserted for t in ts)
    return Csm(
        name=s.name,
        inputs=frozenset(inputs),
        outputs=frozenset(outputs),
        states=states,
        initial=s.initial,
        transitions=transitions,
    )


def augment_outputs(m: Csm, state: str, extra) -> Csm:
    """Return ``m`` with ``extra`` symbols also produced in ``state``."""
    extra = frozenset(extra)
    if state not in m.state_names:
        raise ModelError(f"machine {m.name} has no state {state!r}")
    if not extra:
        return m
    states = tuple(replace(st, outputs=st.outputs | extra) if st.name == state else st
                   for st in m.states)
    return replace(m, states=states, outputs=m.outputs | extra)

"""Line-oriented text format for machines, statecharts and systems.

A file is a sequence of sections.  A section starts with a header line
(``csm NAME``, ``statechart NAME``, ``system NAME``, ``messages`` or
``accepting``) and runs until the next header.  ``#`` starts a comment.
An optional first line ``format csmkit/1`` tags the format version.

Example::

    format csmkit/1

    csm M1
    inputs start, end
    outputs go
    state wait
    state run / go
    init wait
    trans wait -> run : start
    trans wait -> wait : !start
    trans run -> wait : end
    trans run -> run : !end
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .compose import SystemModel
from .formula import FALSE, FormulaSyntaxError, IDENT_RE, atoms, parse_formula, render_formula
from .model import Csm, CsmState, CsmTransition
from .statechart import MessageDecl, Statechart, StTransition, to_csm

__all__ = [
    "FORMAT_TAG", "ModelSyntaxError", "SystemSpec", "ModelDocument",
    "parse_model", "render_model", "render_csm", "render_statechart",
    "render_messages", "render_system",
]

FORMAT_TAG = "csmkit/1"

_HEADER_RE = re.compile(r"^(csm|statechart|system)\s+(\S+)\s*$|^(messages|accepting)\s*$")
_TRANS_RE = re.compile(r"^trans\s+(\S+)\s*->\s*(\S+)\s*:\s*(.*)$")
_ACK_AS_RE = re.compile(r"\s+ack\s+as\s+(\S+)\s*$")
_AS_RE = re.compile(r"\s+as\s+(\S+)\s*$")
_MESSAGE_KEYS = {"messages", "environment", "conditions", "external"}


class ModelSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class SystemSpec:
    name: str
    members: tuple[str, ...]
    internal: frozenset[str] | None = None
    environment: frozenset[str] | None = None


@dataclass
class ModelDocument:
    csms: dict[str, Csm] = field(default_factory=dict)
    statecharts: dict[str, Statechart] = field(default_factory=dict)
    systems: dict[str, SystemSpec] = field(default_factory=dict)
    messages: MessageDecl | None = None
    accepting: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.csms or self.statecharts or self.systems
                    or self.messages is not None or self.accepting)

    def machine(self, name: str) -> Csm:
        """A CSM by name; statecharts are translated on demand."""
        if name in self.csms:
            return self.csms[name]
        if name in self.statecharts:
            return to_csm(self.statecharts[name], self.messages or MessageDecl())
        raise KeyError(f"no csm or statechart named {name!r}")

    def system(self, name: str | None = None) -> SystemModel:
        """Build a system model.

        Without a name, the only system section is used; with no system
        sections at all, every CSM of the file in order.
        """
        if name is None:
            if len(self.systems) > 1:
                raise KeyError(f"several systems defined, choose one of {sorted(self.systems)}")
            if self.systems:
                name = next(iter(self.systems))
            else:
                if not self.csms:
                    raise KeyError("file defines no system and no csm")
                return SystemModel(tuple(self.csms.values()), name="system",
                                   accepting=tuple(self.accepting))
        spec = self.systems[name]
        return SystemModel(
            tuple(self.machine(m) for m in spec.members),
            name=spec.name,
            internal=spec.internal,
            environment=spec.environment,
            accepting=tuple(self.accepting),
        )


def _names(text, lineno, what="symbol"):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if not IDENT_RE.fullmatch(part):
            raise ModelSyntaxError(lineno, f"invalid {what} name {part!r}")
        out.append(part)
    return out


def _ident(text, lineno, what):
    if not IDENT_RE.fullmatch(text):
        raise ModelSyntaxError(lineno, f"invalid {what} name {text!r}")
    return text


def _formula(text, lineno):
    try:
        return parse_formula(text)
    except FormulaSyntaxError as exc:
        raise ModelSyntaxError(lineno, str(exc)) from None


class _CsmBuilder:
    def __init__(self, name, lineno):
        self.name = name
        self.lineno = lineno
        self.inputs = None
        self.outputs = None
        self.states = []
        self.state_lines = {}
        self.initial = None
        self.transitions = []

    def feed(self, line, n):
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key in ("inputs", "outputs"):
            if getattr(self, key) is not None:
                raise ModelSyntaxError(n, f"{key} declared twice")
            setattr(self, key, frozenset(_names(rest, n)))
        elif key == "state":
            name, _, outs = rest.partition("/")
            name = _ident(name.strip(), n, "state")
            if name in self.state_lines:
                raise ModelSyntaxError(n, f"duplicate state {name!r}")
            self.state_lines[name] = n
            self.states.append(CsmState(name, frozenset(_names(outs, n))))
        elif key == "init":
            if self.initial is not None:
                raise ModelSyntaxError(n, "initial state declared twice")
            self.initial = (_ident(rest, n, "state"), n)
        elif key == "trans":
            m = _TRANS_RE.match(line)
            if not m:
                raise ModelSyntaxError(n, "expected 'trans <from> -> <to> : <guard>'")
            guard = _formula(m.group(3), n)
            if guard == FALSE:
                raise ModelSyntaxError(n, "transition guarded by 0 can never fire")
            self.transitions.append((CsmTransition(m.group(1), guard, m.group(2)), n))
        else:
            raise ModelSyntaxError(n, f"unknown csm statement {key!r}")

    def build(self):
        if self.initial is None:
            raise ModelSyntaxError(self.lineno, f"csm {self.name} has no init line")
        init, n = self.initial
        if init not in self.state_lines:
            raise ModelSyntaxError(n, f"unknown initial state {init!r}")
        for t, n in self.transitions:
            for end in (t.source, t.target):
                if end not in self.state_lines:
                    raise ModelSyntaxError(n, f"unknown state {end!r}")
        ts = tuple(t for t, _ in self.transitions)
        inputs = self.inputs
        if inputs is None:
            inputs = frozenset().union(*(atoms(t.guard) for t in ts))
        outputs = self.outputs
        if outputs is None:
            outputs = frozenset().union(*(s.outputs for s in self.states))
        return Csm(self.name, inputs, outputs, tuple(self.states), init, ts)


class _StatechartBuilder:
    def __init__(self, name, lineno):
        self.name = name
        self.lineno = lineno
        self.states = []
        self.initial = None
        self.transitions = []

    def feed(self, line, n):
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "state":
            name = _ident(rest, n, "state")
            if name in self.states:
                raise ModelSyntaxError(n, f"duplicate state {name!r}")
            self.states.append(name)
        elif key == "init":
            if self.initial is not None:
                raise ModelSyntaxError(n, "initial state declared twice")
            self.initial = (_ident(rest, n, "state"), n)
        elif key == "trans":
            m = _TRANS_RE.match(line)
            if not m:
                raise ModelSyntaxError(n, "expected 'trans <from> -> <to> : on <event> | if <formula>'")
            self.transitions.append((self._label(m.group(1), m.group(2), m.group(3), n), n))
        else:
            raise ModelSyntaxError(n, f"unknown statechart statement {key!r}")

    @staticmethod
    def _label(source, target, label, n):
        act_state = ack_state = None
        label = " " + label
        while True:
            m = _ACK_AS_RE.search(label)
            if m and ack_state is None:
                ack_state = _ident(m.group(1), n, "state")
                label = label[:m.start()]
                continue
            m = _AS_RE.search(label)
            if m and act_state is None:
                act_state = _ident(m.group(1), n, "state")
                label = label[:m.start()]
                continue
            break
        trigger, slash, acts = label.partition("/")
        actions = tuple(_names(acts, n, "action")) if slash else ()
        trigger = trigger.strip()
        event = condition = None
        if trigger.startswith("on ") or trigger == "on":
            head, _, cond = trigger[3:].strip().partition(" if ")
            event = _ident(head.strip(), n, "event")
            if cond.strip():
                condition = _formula(cond, n)
        elif trigger.startswith("if "):
            condition = _formula(trigger[3:], n)
        else:
            raise ModelSyntaxError(n, "trigger must be 'on <event> [if <formula>]' or 'if <formula>'")
        return StTransition(source, target, event, condition, actions, act_state, ack_state)

    def build(self):
        if self.initial is None:
            raise ModelSyntaxError(self.lineno, f"statechart {self.name} has no init line")
        init, n = self.initial
        if init not in self.states:
            raise ModelSyntaxError(n, f"unknown initial state {init!r}")
        for t, n in self.transitions:
            for end in (t.source, t.target):
                if end not in self.states:
                    raise ModelSyntaxError(n, f"unknown state {end!r}")
        return Statechart(self.name, tuple(self.states), init, tuple(t for t, _ in self.transitions))


class _MessagesBuilder:
    def __init__(self, lineno):
        self.lineno = lineno
        self.groups = {}

    def feed(self, line, n):
        key, colon, rest = line.partition(":")
        key = key.strip()
        if not colon or key not in _MESSAGE_KEYS:
            raise ModelSyntaxError(n, f"expected one of {sorted(_MESSAGE_KEYS)} followed by ':'")
        self.groups.setdefault(key, set()).update(_names(rest, n))

    def build(self):
        g = self.groups
        return MessageDecl(
            frozenset(g.get("messages", ())),
            frozenset(g.get("environment", ())),
            frozenset(g.get("conditions", ())),
            frozenset(g.get("external", ())),
        )


class _SystemBuilder:
    def __init__(self, name, lineno):
        self.name = name
        self.lineno = lineno
        self.members = []
        self.overrides = {}

    def feed(self, line, n):
        if line.startswith("machines ") or line == "machines":
            for name in _names(line[len("machines"):], n, "machine"):
                self.members.append((name, n))
            return
        key, colon, rest = line.partition(":")
        key = key.strip()
        if colon and key in ("internal", "environment"):
            if key in self.overrides:
                raise ModelSyntaxError(n, f"{key} declared twice")
            self.overrides[key] = frozenset(_names(rest, n))
            return
        raise ModelSyntaxError(n, "expected 'machines ...', 'internal: ...' or 'environment: ...'")

    def build(self):
        if not self.members:
            raise ModelSyntaxError(self.lineno, f"system {self.name} lists no machines")
        return SystemSpec(self.name, tuple(m for m, _ in self.members),
                          self.overrides.get("internal"), self.overrides.get("environment"))


class _AcceptingBuilder:
    def __init__(self, lineno):
        self.lineno = lineno
        self.patterns = []

    def feed(self, line, n):
        self.patterns.append(line.strip())

    def build(self):
        return self.patterns


def parse_model(text: str) -> ModelDocument:
    doc = ModelDocument()
    current = None
    sections = []
    seen_content = False
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("format ") or line == "format":
            if seen_content:
                raise ModelSyntaxError(n, "format tag must come first")
            tag = line[len("format"):].strip()
            if tag != FORMAT_TAG:
                raise ModelSyntaxError(n, f"unsupported format {tag!r}, expected {FORMAT_TAG!r}")
            seen_content = True
            continue
        seen_content = True
        m = _HEADER_RE.match(line)
        if m:
            kind = m.group(1) or m.group(3)
            name = m.group(2)
            if name is not None:
                _ident(name, n, kind)
            current = {
                "csm": lambda: _CsmBuilder(name, n),
                "statechart": lambda: _StatechartBuilder(name, n),
                "system": lambda: _SystemBuilder(name, n),
                "messages": lambda: _MessagesBuilder(n),
                "accepting": lambda: _AcceptingBuilder(n),
            }[kind]()
            sections.append((kind, name, n, current))
            continue
        if current is None:
            word = line.split()[0]
            raise ModelSyntaxError(n, f"unknown section {word!r}")
        current.feed(line, n)

    if not sections:
        raise ModelSyntaxError(0, "file defines no entities")

    for kind, name, n, builder in sections:
        value = builder.build()
        if kind in ("csm", "statechart", "system"):
            if name in doc.csms or name in doc.statecharts or name in doc.systems:
                raise ModelSyntaxError(n, f"duplicate name {name!r}")
            {"csm": doc.csms, "statechart": doc.statecharts, "system": doc.systems}[kind][name] = value
        elif kind == "messages":
            if doc.messages is not None:
                raise ModelSyntaxError(n, "messages section declared twice")
            doc.messages = value
        else:
            doc.accepting.extend(value)

    for kind, name, n, builder in sections:
        if kind == "system":
            for member, line_no in builder.members:
                if member not in doc.csms and member not in doc.statecharts:
                    raise ModelSyntaxError(line_no, f"system {name} refers to unknown machine {member!r}")
    return doc


# -- rendering -------------------------------------------------------------

def _join(symbols):
    return ", ".join(sorted(symbols))


def render_csm(m: Csm) -> str:
    lines = [f"csm {m.name}", f"inputs {_join(m.inputs)}".rstrip(),
             f"outputs {_join(m.outputs)}".rstrip()]
    for s in m.states:
        lines.append(f"state {s.name} / {_join(s.outputs)}" if s.outputs else f"state {s.name}")
    lines.append(f"init {m.initial}")
    for t in m.transitions:
        lines.append(f"trans {t.source} -> {t.target} : {render_formula(t.guard)}")
    return "\n".join(lines) + "\n"


def render_statechart(s: Statechart) -> str:
    lines = [f"statechart {s.name}"]
    lines += [f"state {n}" for n in s.states]
    lines.append(f"init {s.initial}")
    for t in s.transitions:
        if t.event is not None:
            label = f"on {t.event}"
            if t.condition is not None:
                label += f" if {render_formula(t.condition)}"
        else:
            label = f"if {render_formula(t.condition)}"
        if t.actions:
            label += " / " + ", ".join(t.actions)
        if t.act_state:
            label += f" as {t.act_state}"
        if t.ack_state:
            label += f" ack as {t.ack_state}"
        lines.append(f"trans {t.source} -> {t.target} : {label}")
    return "\n".join(lines) + "\n"


def render_messages(d: MessageDecl) -> str:
    lines = ["messages"]
    for key, symbols in d.groups().items():
        if symbols:
            lines.append(f"{key}: {_join(symbols)}")
    return "\n".join(lines) + "\n"


def render_system(s: SystemSpec) -> str:
    lines = [f"system {s.name}", "machines " + ", ".join(s.members)]
    if s.internal is not None:
        lines.append(f"internal: {_join(s.internal)}".rstrip())
    if s.environment is not None:
        lines.append(f"environment: {_join(s.environment)}".rstrip())
    return "\n".join(lines) + "\n"


def render_model(doc: ModelDocument) -> str:
    parts = [f"format {FORMAT_TAG}\n"]
    parts += [render_statechart(s) for s in doc.statecharts.values()]
    if doc.messages is not None:
        parts.append(render_messages(doc.messages))
    parts += [render_csm(m) for m in doc.csms.values()]
    parts += [render_system(s) for s in doc.systems.values()]
    if doc.accepting:
        parts.append("accepting\n" + "".join(p + "\n" for p in doc.accepting))
    return "\n".join(parts)

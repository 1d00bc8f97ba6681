"""Boolean guard formulas over symbol atoms.

Guard text uses ``!`` for negation, ``*`` for product and ``+`` for sum,
with ``0``/``1`` as constants.  Precedence is ``!`` > ``*`` > ``+``.

An atom is true iff its symbol is present in the set of symbols being
broadcast, so evaluation takes a plain set of names.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Const", "Atom", "Not", "And", "Or", "Formula", "TRUE", "FALSE",
    "FormulaSyntaxError", "AtomCapExceeded", "DEFAULT_ATOM_CAP",
    "parse_formula", "render_formula", "atoms", "evaluate", "restrict",
    "is_satisfiable", "is_tautology", "equivalent", "truth_table",
    "conjoin", "disjoin", "negate",
]

DEFAULT_ATOM_CAP = 20

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True, slots=True)
class Const:
    value: bool

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True, slots=True)
class Atom:
    name: str


@dataclass(frozen=True, slots=True)
class Not:
    child: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[Const, Atom, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


class FormulaSyntaxError(ValueError):
    """Raised for malformed guard text; ``pos`` is a 0-based column."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at column {pos + 1} in {text!r}")


class AtomCapExceeded(ValueError):
    """The formula mentions too many atoms for exhaustive checking."""


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([01])(?![A-Za-z0-9_])|([!*+()]))")


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message):
        raise FormulaSyntaxError(message, self.text, self.tokens[self.i][1])

    def parse(self):
        if self.peek() == "":
            self.error("empty formula")
        f = self.sum()
        if self.peek() != "":
            self.error(f"unexpected {self.peek()!r}")
        return f

    def sum(self):
        terms = [self.product()]
        while self.peek() == "+":
            self.take()
            terms.append(self.product())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def product(self):
        factors = [self.unary()]
        while self.peek() == "*":
            self.take()
            factors.append(self.unary())
        return factors[0] if len(factors) == 1 else And(tuple(factors))

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return f
        if tok == "0":
            self.take()
            return FALSE
        if tok == "1":
            self.take()
            return TRUE
        if tok and IDENT_RE.fullmatch(tok):
            self.take()
            return Atom(tok)
        self.error("expected operand" if tok else "unexpected end of formula")


def parse_formula(text: str) -> Formula:
    """Parse guard text into a formula tree (no simplification)."""
    return _Parser(text).parse()


def render_formula(f: Formula) -> str:
    if isinstance(f, Const):
        return "1" if f.value else "0"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = render_formula(f.child)
        if isinstance(f.child, (Const, Atom, Not)):
            return "!" + inner
        return "!(" + inner + ")"
    if isinstance(f, And):
        parts = []
        for c in f.children:
            s = render_formula(c)
            parts.append("(" + s + ")" if isinstance(c, Or) else s)
        return "*".join(parts)
    return "+".join(render_formula(c) for c in f.children)


# -- semantics -------------------------------------------------------------

def atoms(f: Formula) -> frozenset[str]:
    found = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            found.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(g.children)
    return frozenset(found)


def evaluate(f: Formula, present: Iterable[str]) -> bool:
    """Truth value of ``f`` when exactly the symbols in ``present`` occur."""
    if not isinstance(present, (set, frozenset)):
        present = frozenset(present)
    return _eval(f, present)


def _eval(f, present):
    if isinstance(f, Atom):
        return f.name in present
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not _eval(f.child, present)
    if isinstance(f, And):
        return all(_eval(c, present) for c in f.children)
    return any(_eval(c, present) for c in f.children)


def negate(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.child
    return Not(f)


def _combine(op, fs, unit, zero):
    out = []
    for f in fs:
        if isinstance(f, op):
            items = f.children
        else:
            items = (f,)
        for g in items:
            if g == zero:
                return zero
            if g == unit or g in out:
                continue
            out.append(g)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return op(tuple(out))


def conjoin(fs: Iterable[Formula]) -> Formula:
    """Product of ``fs`` with constants folded; the empty product is ``1``."""
    return _combine(And, fs, TRUE, FALSE)


def disjoin(fs: Iterable[Formula]) -> Formula:
    """Sum of ``fs`` with constants folded; the empty sum is ``0``."""
    return _combine(Or, fs, FALSE, TRUE)


def restrict(f: Formula, partial: Mapping[str, bool]) -> Formula:
    """Substitute the assigned atoms by constants and fold the result."""
    if isinstance(f, Atom):
        if f.name in partial:
            return TRUE if partial[f.name] else FALSE
        return f
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return negate(restrict(f.child, partial))
    children = [restrict(c, partial) for c in f.children]
    if isinstance(f, And):
        return conjoin(children)
    return disjoin(children)


def truth_table(f: Formula, order: tuple[str, ...]) -> int:
    """Bit ``i`` of the result is ``f`` under the assignment encoded by ``i``.

    Atom ``order[k]`` is true in assignment ``i`` iff bit ``k`` of ``i`` is
    set.  Atoms of ``f`` missing from ``order`` are treated as absent.
    """
    size = 1 << len(order)
    mask = (1 << size) - 1
    columns = {}
    for k, name in enumerate(order):
        # period-2^(k+1) pattern: 2^k zeros followed by 2^k ones
        col = ((1 << (1 << k)) - 1) << (1 << k)
        width = 1 << (k + 1)
        while width < size:
            col |= col << width
            width <<= 1
        columns[name] = col & mask

    def table(g):
        if isinstance(g, Atom):
            return columns.get(g.name, 0)
        if isinstance(g, Const):
            return mask if g.value else 0
        if isinstance(g, Not):
            return ~table(g.child) & mask
        if isinstance(g, And):
            acc = mask
            for c in g.children:
                acc &= table(c)
            return acc
        acc = 0
        for c in g.children:
            acc |= table(c)
        return acc

    return table(f)


def _checked_order(fs, cap):
    names = set()
    for f in fs:
        names |= atoms(f)
    if len(names) > cap:
        raise AtomCapExceeded(
            f"{len(names)} atoms exceed the enumeration cap of {cap}")
    return tuple(sorted(names))


def is_satisfiable(f: Formula, cap: int = DEFAULT_ATOM_CAP) -> bool:
    if isinstance(f, Const):
        return f.value
    return truth_table(f, _checked_order([f], cap)) != 0


def is_tautology(f: Formula, cap: int = DEFAULT_ATOM_CAP) -> bool:
    if isinstance(f, Const):
        return f.value
    order = _checked_order([f], cap)
    return truth_table(f, order) == (1 << (1 << len(order))) - 1


def equivalent(f: Formula, g: Formula, cap: int = DEFAULT_ATOM_CAP) -> bool:
    order = _checked_order([f, g], cap)
    return truth_table(f, order) == truth_table(g, order)

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from csmkit.formula import (
    FALSE, TRUE, And, Atom, AtomCapExceeded, FormulaSyntaxError, Not, Or, atoms,
    conjoin, disjoin, equivalent, evaluate, is_satisfiable, is_tautology, parse_formula,
    render_formula, restrict, truth_table,
)

from helpers import oracle_eval, subsets

a, b, c = Atom("a"), Atom("b"), Atom("c")


def brute_sat(f):
    return any(oracle_eval(f, e) for e in subsets(atoms(f)))


def brute_taut(f):
    return all(oracle_eval(f, e) for e in subsets(atoms(f)))


# -- parsing and rendering -------------------------------------------------

@pytest.mark.parametrize("text, expected", [
    ("!start", Not(Atom("start"))),
    ("1", TRUE),
    ("0", FALSE),
    ("a*!b+c", Or((And((a, Not(b))), c))),
    ("a+b*c", Or((a, And((b, c))))),
    ("(a+b)*c", And((Or((a, b)), c))),
    ("a*b*c", And((a, b, c))),
    ("!!a", Not(Not(a))),
    ("  a  +  b ", Or((a, b))),
    ("CC_DP", Atom("CC_DP")),
])
def test_parse(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("text, pos", [
    ("", 0),
    ("   ", 3),
    ("a+", 2),
    ("a b", 2),
    ("(a", 2),
    ("a)", 1),
    ("a & b", 2),
    ("2", 0),
    ("1a", 0),
    ("*a", 0),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.pos == pos


@pytest.mark.parametrize("f, text", [
    (TRUE, "1"),
    (FALSE, "0"),
    (Not(Atom("start")), "!start"),
    (And((a, Or((b, c)))), "a*(b+c)"),
    (Or((And((a, b)), c)), "a*b+c"),
    (Not(And((a, b))), "!(a*b)"),
    (Not(Not(a)), "!!a"),
])
def test_render(f, text):
    assert render_formula(f) == text


def test_render_then_parse_is_identity_on_parsed_text():
    for text in ["a*!b+c", "!(a+b)*c", "a+b+c", "!(!a*(b+!c))", "1*a+0"]:
        f = parse_formula(text)
        assert parse_formula(render_formula(f)) == f


# -- evaluation ------------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(Atom("start"), {"start", "end"})
    assert evaluate(TRUE, set())
    assert evaluate(parse_formula("!start"), set())
    assert not evaluate(Atom("start"), {"end"})
    assert evaluate(parse_formula("a*!b+c"), ["a"])


def test_satisfiable_examples():
    assert not is_satisfiable(parse_formula("a*!a"))
    assert is_satisfiable(parse_formula("start"))
    f = parse_formula("!CC_DP + !CC_OC + M_OF")
    assert is_satisfiable(f)
    # 7 of the 8 assignments satisfy it; counted by plain enumeration
    assert sum(oracle_eval(f, e) for e in subsets(atoms(f))) == 7
    assert bin(truth_table(f, ("CC_DP", "CC_OC", "M_OF"))).count("1") == 7


def test_tautology_examples():
    assert is_tautology(parse_formula("a+!a"))
    assert not is_tautology(parse_formula("start"))
    assert is_tautology(parse_formula("start + !start"))
    assert is_tautology(TRUE) and not is_tautology(FALSE)


def test_atom_cap():
    f = conjoin(Atom(f"x{i}") for i in range(21))
    with pytest.raises(AtomCapExceeded):
        is_satisfiable(f)
    with pytest.raises(AtomCapExceeded):
        is_tautology(f)
    assert is_satisfiable(f, cap=21)
    with pytest.raises(AtomCapExceeded):
        is_satisfiable(parse_formula("a*b*c"), cap=2)


def test_truth_table_bit_layout():
    # bit i set iff assignment i satisfies; atom k is bit k of i
    assert truth_table(a, ("a", "b")) == 0b1010
    assert truth_table(b, ("a", "b")) == 0b1100
    assert truth_table(parse_formula("a*b"), ("a", "b")) == 0b1000
    assert truth_table(parse_formula("!a"), ("a",)) == 0b01


# -- restriction and products ----------------------------------------------

@pytest.mark.parametrize("text, partial, expected", [
    ("Go*!StopIt", {"Go": True}, "!StopIt"),
    ("a*b", {"a": False}, "0"),
    ("a+b", {"a": False, "b": False}, "0"),
    ("a+b", {"a": True}, "1"),
    ("!(a*b)+c", {"a": True}, "!b+c"),
    ("a*b", {}, "a*b"),
])
def test_restrict(text, partial, expected):
    assert render_formula(restrict(parse_formula(text), partial)) == expected


@pytest.mark.parametrize("fs, expected", [
    ([a, TRUE], "a"),
    ([], "1"),
    ([Atom("start"), Not(Atom("end"))], "start*!end"),
    ([a, FALSE, b], "0"),
    ([And((a, b)), c], "a*b*c"),
    ([a, a], "a"),
])
def test_conjoin(fs, expected):
    assert render_formula(conjoin(fs)) == expected


def test_disjoin_identities():
    assert disjoin([]) == FALSE
    assert disjoin([a, TRUE]) == TRUE
    assert disjoin([FALSE, b]) == b


# -- properties ------------------------------------------------------------

NAMES = ["a", "b", "c", "d", "e"]


def formulas(max_leaves=12):
    leaves = st.one_of(st.sampled_from([TRUE, FALSE]), st.sampled_from(NAMES).map(Atom))

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


assignments = st.dictionaries(st.sampled_from(NAMES), st.booleans())


@settings(max_examples=300, deadline=None)
@given(formulas(), assignments)
def test_restriction_is_sound(f, partial):
    g = restrict(f, partial)
    assert atoms(g) <= atoms(f) - set(partial)
    free = sorted(set(NAMES) - set(partial))
    fixed = {k for k, v in partial.items() if v}
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            sigma = fixed | set(extra)
            assert oracle_eval(g, sigma) == oracle_eval(f, sigma)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_render_round_trip_preserves_truth_table(f):
    g = parse_formula(render_formula(f))
    assert all(oracle_eval(f, e) == oracle_eval(g, e) for e in subsets(NAMES))
    assert render_formula(g) == render_formula(parse_formula(render_formula(g)))


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_satisfiability_matches_enumeration(f):
    assert is_satisfiable(f) == brute_sat(f)
    assert is_tautology(f) == brute_taut(f)
    assert is_satisfiable(f) == (not is_tautology(Not(f)))


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas(6), max_size=4), st.sets(st.sampled_from(NAMES)))
def test_conjoin_is_product(fs, sigma):
    assert oracle_eval(conjoin(fs), sigma) == all(oracle_eval(f, sigma) for f in fs)
    assert oracle_eval(disjoin(fs), sigma) == any(oracle_eval(f, sigma) for f in fs)


@settings(max_examples=200, deadline=None)
@given(formulas(), st.sets(st.sampled_from(NAMES)))
def test_evaluate_matches_oracle(f, sigma):
    assert evaluate(f, sigma) == oracle_eval(f, sigma)


def test_equivalent():
    assert equivalent(parse_formula("!(a+b)"), parse_formula("!a*!b"))
    assert not equivalent(parse_formula("a"), parse_formula("b"))

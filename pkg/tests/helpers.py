"""Random model generators and brute-force oracles shared by the tests.

The oracles here deliberately avoid csmkit's restrict/truth-table code:
formulas are evaluated by a local recursive interpreter, and system steps
are computed by enumerating every environment subset.
"""

import itertools
import random
from pathlib import Path

from csmkit.formula import FALSE, TRUE, And, Atom, Const, Not, Or
from csmkit.model import Csm, CsmState, CsmTransition, completeness_closure
from csmkit.compose import SystemModel

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "csmkit" / "fixtures"


def oracle_eval(f, present):
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return f.name in present
    if isinstance(f, Not):
        return not oracle_eval(f.child, present)
    vals = [oracle_eval(c, present) for c in f.children]
    return all(vals) if isinstance(f, And) else any(vals)


def subsets(symbols):
    symbols = sorted(symbols)
    for r in range(len(symbols) + 1):
        for combo in itertools.combinations(symbols, r):
            yield frozenset(combo)


def random_formula(rng, names, depth=3, const_p=0.05):
    if not names or rng.random() < const_p:
        return rng.choice([TRUE, FALSE])
    if depth == 0 or rng.random() < 0.3:
        return Atom(rng.choice(names))
    kind = rng.choice(["not", "and", "or", "and", "or"])
    if kind == "not":
        return Not(random_formula(rng, names, depth - 1, const_p))
    k = rng.randint(2, 3)
    children = tuple(random_formula(rng, names, depth - 1, const_p) for _ in range(k))
    return And(children) if kind == "and" else Or(children)


def random_system(rng, max_machines=3, max_states=4, max_symbols=6):
    # small sizes are kept but rare, so most cases exercise real interleavings
    n_sym = rng.randint(1, max_symbols) if rng.random() < 0.1 else rng.randint(2, max_symbols)
    symbols = [f"s{i}" for i in range(n_sym)]
    machines = []
    for k in range(rng.randint(1, max_machines)):
        n_states = rng.randint(1, max_states) if rng.random() < 0.1 else rng.randint(2, max_states)
        names = [f"q{j}" for j in range(n_states)]
        inputs = rng.sample(symbols, rng.randint(1, min(3, n_sym)))
        outs = rng.sample(symbols, rng.randint(0, min(2, n_sym)))
        states = tuple(
            CsmState(n, frozenset(o for o in outs if rng.random() < 0.5)) for n in names)
        transitions = []
        for n in names:
            others = [x for x in names if x != n] or names
            for _ in range(rng.randint(0, 3)):
                g = random_formula(rng, sorted(inputs), depth=rng.choice([0, 1, 1, 2]), const_p=0.1)
                if not any(oracle_eval(g, e) for e in subsets(atoms_of(g))):
                    continue
                target = rng.choice(others) if rng.random() < 0.8 else rng.choice(names)
                transitions.append(CsmTransition(n, g, target))
        m = Csm(f"M{k}", frozenset(inputs), frozenset(outs), states,
                rng.choice(names), tuple(transitions))
        machines.append(completeness_closure(m))
    environment = None
    if rng.random() < 0.2:
        # explicit split: some produced symbols may also come from outside
        environment = frozenset(rng.sample(symbols, rng.randint(0, n_sym)))
    return SystemModel(tuple(machines), name="random", environment=environment)


def atoms_of(f):
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, Const):
        return set()
    if isinstance(f, Not):
        return atoms_of(f.child)
    return set().union(*(atoms_of(c) for c in f.children))


def outputs_of(s, v):
    out = set()
    for m, q in zip(s.machines, v):
        out |= next(st.outputs for st in m.states if st.name == q)
    return frozenset(out)


def oracle_successors(s, v, env):
    """Every next vector reachable from ``v`` when the environment sends ``env``."""
    present = env | outputs_of(s, v)
    options = []
    for m, q in zip(s.machines, v):
        options.append([t.target for t in m.transitions
                        if t.source == q and oracle_eval(t.guard, present)])
    return set(itertools.product(*options))


def oracle_relation(s):
    """Reachable vectors and the full step relation, by brute force."""
    env_sets = list(subsets(s.environment_symbols))
    start = tuple(m.initial for m in s.machines)
    relation = {}
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        relation[v] = {e: oracle_successors(s, v, e) for e in env_sets}
        for succ in relation[v].values():
            for w in succ:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return seen, relation


def graph_relation(g, env_sets):
    """Step relation read off a reachability graph's edge guards."""
    rel = {}
    for i, node in enumerate(g.nodes):
        rel[node.vector] = {}
        for e in env_sets:
            present = e | node.outputs
            rel[node.vector][e] = {g.nodes[x.target].vector for x in g.out_edges(i)
                                   if oracle_eval(x.guard, present)}
    return rel


def brute_force_sccs(g):
    """SCCs via transitive closure."""
    n = len(g.nodes)
    reach = [set([i]) for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            new = set(reach[i])
            for j in list(reach[i]):
                new |= set(g.successors(j))
            if new != reach[i]:
                reach[i] = new
                changed = True
    comps = {}
    for i in range(n):
        comps[i] = frozenset(j for j in range(n) if j in reach[i] and i in reach[j])
    return set(comps.values()), reach


def random_graph(rng, max_nodes=12):
    from csmkit.compose import Edge, ReachabilityGraph, SystemState

    n = rng.randint(1, max_nodes)
    nodes = tuple(SystemState((f"v{i}",), f"v{i}", frozenset()) for i in range(n))
    edges = []
    # a spanning tree from node 0 keeps every node reachable
    for i in range(1, n):
        edges.append((rng.randrange(i), i))
    for _ in range(rng.randint(0, 2 * n)):
        edges.append((rng.randrange(n), rng.randrange(n)))
    uniq = list(dict.fromkeys(edges))
    return ReachabilityGraph(("M",), frozenset(), nodes,
                             tuple(Edge(a, TRUE, b) for a, b in uniq), 0)


def fixture(name):
    return (FIXTURES / name).read_text()


def seeded(seed):
    return random.Random(seed)

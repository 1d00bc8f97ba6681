"""Serialization of graphs, analysis reports and traces."""

from __future__ import annotations

import json

from . import __version__
from .analyze import AnalysisReport, GraphDiff
from .compose import Edge, ReachabilityGraph, SystemState
from .formula import parse_formula, render_formula
from .simulate import Trace

__all__ = [
    "GRAPH_FORMAT", "GraphFormatError", "graph_to_dict", "graph_to_json",
    "graph_from_json", "export_dot", "report_to_dict", "report_to_text",
    "trace_to_dict", "trace_to_text", "diff_to_dict", "diff_to_text",
    "parse_env_sequence", "graph_to_text",
]

GRAPH_FORMAT = "csmkit-graph/1"


class GraphFormatError(ValueError):
    pass


def graph_to_dict(g: ReachabilityGraph, model_hash: str | None = None) -> dict:
    return {
        "format": GRAPH_FORMAT,
        "machines": list(g.machines),
        "environment": sorted(g.environment),
        "initial": g.initial,
        "nodes": [
            {"index": i, "name": n.name, "vector": list(n.vector), "outputs": sorted(n.outputs)}
            for i, n in enumerate(g.nodes)
        ],
        "edges": [
            {"from": e.source, "to": e.target, "guard": render_formula(e.guard)}
            for e in g.edges
        ],
        "metadata": {"model_hash": model_hash, "tool_version": __version__},
    }


def graph_to_json(g: ReachabilityGraph, model_hash: str | None = None) -> str:
    return json.dumps(graph_to_dict(g, model_hash), indent=2) + "\n"


def graph_from_json(text: str) -> ReachabilityGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not a graph document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != GRAPH_FORMAT:
        raise GraphFormatError(f"expected a {GRAPH_FORMAT} document")
    try:
        nodes = tuple(
            SystemState(tuple(n["vector"]), n["name"], frozenset(n["outputs"]))
            for n in sorted(doc["nodes"], key=lambda n: n["index"]))
        edges = tuple(Edge(e["from"], parse_formula(e["guard"]), e["to"]) for e in doc["edges"])
        return ReachabilityGraph(
            machines=tuple(doc["machines"]),
            environment=frozenset(doc["environment"]),
            nodes=nodes,
            edges=edges,
            initial=doc["initial"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from None


def _quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: ReachabilityGraph, marks=()) -> str:
    """DOT digraph; marked nodes are drawn filled black."""
    marks = set(marks)
    lines = [f"digraph {_quote('reachability')} {{", "  rankdir=TB;",
             '  node [shape=box, fontname="Helvetica"];']
    for i, n in enumerate(g.nodes):
        label = n.name
        if n.outputs:
            label += "\\n" + ", ".join(sorted(n.outputs))
        attrs = [f"label={_quote(label)}"]
        if i in marks:
            attrs.append('style=filled, fillcolor=black, fontcolor=white')
        if i == g.initial:
            attrs.append("peripheries=2")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for e in g.edges:
        lines.append(f"  n{e.source} -> n{e.target} [label={_quote(render_formula(e.guard))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_text(g: ReachabilityGraph) -> str:
    lines = [f"# {len(g.nodes)} states, {len(g.edges)} edges"]
    for i, n in enumerate(g.nodes):
        outs = ",".join(sorted(n.outputs))
        lines.append(f"state\t{i}\t{n.name}\t{outs}")
    for e in g.edges:
        lines.append(f"edge\t{e.source}\t{e.target}\t{render_formula(e.guard)}")
    return "\n".join(lines) + "\n"


def _edge_dict(g, e):
    return {"from": g.nodes[e.source].name, "to": g.nodes[e.target].name,
            "guard": render_formula(e.guard)}


def report_to_dict(g: ReachabilityGraph, r: AnalysisReport) -> dict:
    def names(comp):
        return [g.nodes[i].name for i in sorted(comp)]

    return {
        "states": len(g.nodes),
        "edges": len(g.edges),
        "terminal_nodes": [g.nodes[i].name for i in r.terminal_nodes],
        "terminal_sccs": [names(c) for c in r.terminal_sccs],
        "accepting": [names(c) for c in r.accepting],
        "deadlocks": [
            {
                "states": names(w.component),
                "incoming": [_edge_dict(g, e) for e in w.incoming],
                "paths": [[_edge_dict(g, e) for e in p] for p in w.paths],
            }
            for w in r.witnesses
        ],
    }


def report_to_text(g: ReachabilityGraph, r: AnalysisReport) -> str:
    lines = [f"reachable states: {len(g.nodes)}", f"edges: {len(g.edges)}"]
    for c in r.accepting:
        lines.append("accepting: " + " ".join(g.nodes[i].name for i in sorted(c)))
    if not r.deadlocks:
        lines.append("deadlocks: none")
    for w in r.witnesses:
        lines.append("DEADLOCK: " + " ".join(g.nodes[i].name for i in sorted(w.component)))
        for e in w.incoming:
            lines.append(f"  incoming: {g.nodes[e.source].name} --[{render_formula(e.guard)}]--> "
                         f"{g.nodes[e.target].name}")
        for k, p in enumerate(w.paths, start=1):
            lines.append(f"  path {k}:")
            lines.append(f"    {g.nodes[g.initial].name}")
            for e in p:
                lines.append(f"    --[{render_formula(e.guard)}]--> {g.nodes[e.target].name}")
    return "\n".join(lines) + "\n"


def trace_to_dict(t: Trace) -> dict:
    return {
        "initial": list(t.initial),
        "steps": [
            {
                "env": sorted(s.env),
                "before": list(s.before),
                "global": sorted(s.global_set),
                "chosen": [
                    {"from": c.source, "guard": render_formula(c.guard), "to": c.target}
                    for c in s.chosen
                ],
                "after": list(s.after),
            }
            for s in t.steps
        ],
    }


def trace_to_text(t: Trace) -> str:
    lines = ["step\tenv\tbefore\tglobal\tafter"]
    for k, s in enumerate(t.steps):
        lines.append("\t".join([
            str(k), ",".join(sorted(s.env)) or "-", "_".join(s.before),
            ",".join(sorted(s.global_set)) or "-", "_".join(s.after)]))
    lines.append(f"final\t\t{'_'.join(t.final)}")
    return "\n".join(lines) + "\n"


def diff_to_dict(d: GraphDiff) -> dict:
    return {
        "comparable": d.comparable,
        "reason": d.reason,
        "nodes_only_in_first": d.nodes_only_in_first,
        "nodes_only_in_second": d.nodes_only_in_second,
        "edges_only_in_first": [list(e) for e in d.edges_only_in_first],
        "edges_only_in_second": [list(e) for e in d.edges_only_in_second],
        "guard_changes": [list(c) for c in d.guard_changes],
    }


def diff_to_text(d: GraphDiff) -> str:
    if not d.comparable:
        return f"incomparable: {d.reason}\n"
    if d.empty:
        return "graphs are identical\n"
    lines = []
    lines += [f"- state {n}" for n in d.nodes_only_in_first]
    lines += [f"+ state {n}" for n in d.nodes_only_in_second]
    lines += [f"- edge {a} -> {b}" for a, b in d.edges_only_in_first]
    lines += [f"+ edge {a} -> {b}" for a, b in d.edges_only_in_second]
    lines += [f"~ edge {a} -> {b}: {f} => {g}" for a, b, f, g in d.guard_changes]
    return "\n".join(lines) + "\n"


def parse_env_sequence(text: str) -> list[frozenset[str]]:
    """One comma-separated symbol set per line; an empty line is the empty set.

    A trailing newline does not add a step.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [frozenset(p.strip() for p in line.split(",") if p.strip()) for line in lines]

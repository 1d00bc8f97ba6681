"""Command-line driver.

Exit status: 0 on success, 1 on any error, 2 when ``analyze`` finds a
deadlock.  Artifacts go to stdout (or ``-o``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .analyze import PatternError, classify_deadlocks, diff_graphs
from .compose import SystemModel, compose
from .formula import DEFAULT_ATOM_CAP, AtomCapExceeded, FormulaSyntaxError
from .graphio import (
    GraphFormatError, diff_to_dict, diff_to_text, export_dot, graph_from_json,
    graph_to_json, graph_to_text, parse_env_sequence, report_to_dict, report_to_text,
    trace_to_dict, trace_to_text,
)
from .model import ModelError, completeness_closure, validate_csm
from .modelfile import ModelSyntaxError, parse_model, render_csm
from .simulate import POLICIES, SimulationError, run
from .statechart import MessageDecl, to_csm, validate_statechart

EXIT_OK, EXIT_ERROR, EXIT_DEADLOCK = 0, 1, 2


class CliError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(args, text):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _system(args, doc) -> SystemModel:
    try:
        s = doc.system(args.system)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None
    if args.close_incomplete:
        s = SystemModel(tuple(completeness_closure(m, args.atom_cap) for m in s.machines),
                        name=s.name, internal=s.internal, environment=s.environment,
                        accepting=s.accepting)
    return s


def model_hash(s: SystemModel) -> str:
    h = hashlib.sha256()
    for m in s.machines:
        h.update(render_csm(m).encode())
    h.update(",".join(sorted(s.internal_symbols)).encode() + b"|")
    h.update(",".join(sorted(s.environment_symbols)).encode())
    return "sha256:" + h.hexdigest()


def _load_graph(args):
    """Graph and accepting patterns from a graph document or a model file."""
    text = _read(args.file)
    if text.lstrip().startswith("{"):
        return graph_from_json(text), [], None
    doc = parse_model(text)
    s = _system(args, doc)
    return compose(s, args.allow_incomplete, args.atom_cap), list(s.accepting), s


def cmd_check(args):
    failed = False
    for path in args.files:
        doc = parse_model(_read(path))
        findings = []
        for m in doc.csms.values():
            findings.append(validate_csm(m, args.atom_cap))
        decl = doc.messages or MessageDecl()
        for sc in doc.statecharts.values():
            r = validate_statechart(sc, decl)
            findings.append(r)
            if r.ok:
                findings.append(validate_csm(to_csm(sc, decl), args.atom_cap))
        n_err = n_warn = 0
        for r in findings:
            for f in r.errors:
                print(f"{path}: error: {f}", file=sys.stderr)
            for f in r.warnings:
                print(f"{path}: warning: {f}", file=sys.stderr)
            n_err += len(r.errors)
            n_warn += len(r.warnings)
        if not n_err:
            for name in doc.systems:
                try:
                    doc.system(name).check()
                except ModelError as exc:
                    print(f"{path}: error: system {name}: {exc}", file=sys.stderr)
                    n_err += 1
        print(f"{path}: {n_err} error(s), {n_warn} warning(s)", file=sys.stderr)
        failed |= n_err > 0
    return EXIT_ERROR if failed else EXIT_OK


def cmd_transform(args):
    doc = parse_model(_read(args.file))
    decl = doc.messages or MessageDecl()
    names = args.name or list(doc.statecharts)
    if not names:
        raise CliError(f"{args.file} contains no statechart")
    out = []
    for name in names:
        if name not in doc.statecharts:
            raise CliError(f"no statechart named {name!r}")
        m = to_csm(doc.statecharts[name], decl)
        print(f"{name}: {len(doc.statecharts[name].states)} statechart states -> "
              f"{len(m.states)} CSM states", file=sys.stderr)
        out.append(render_csm(m))
    _write(args, "format csmkit/1\n\n" + "\n".join(out))
    return EXIT_OK


def _figure(args, g, report=None):
    if not getattr(args, "figure", None):
        return
    from .plotting import plot_reachability_graph

    deadlocks = set().union(*report.deadlocks) if report and report.deadlocks else set()
    accepting = set().union(*report.accepting) if report and report.accepting else set()
    plot_reachability_graph(g, args.figure, deadlocks, accepting)
    print(f"figure written to {args.figure}", file=sys.stderr)


def cmd_compose(args):
    doc = parse_model(_read(args.file))
    s = _system(args, doc)
    g = compose(s, args.allow_incomplete, args.atom_cap)
    product = 1
    for m in s.machines:
        product *= len(m.states)
    print(f"{len(g.nodes)} reachable states out of {product}, {len(g.edges)} edges",
          file=sys.stderr)
    if args.format == "json":
        _write(args, graph_to_json(g, model_hash(s)))
    elif args.format == "dot":
        _write(args, export_dot(g))
    else:
        _write(args, graph_to_text(g))
    _figure(args, g)
    return EXIT_OK


def cmd_analyze(args):
    g, accepting, _ = _load_graph(args)
    if args.accepting:
        accepting = args.accepting
    report = classify_deadlocks(g, accepting, args.paths)
    if args.format == "json":
        _write(args, json.dumps(report_to_dict(g, report), indent=2) + "\n")
    else:
        _write(args, report_to_text(g, report))
    _figure(args, g, report)
    return EXIT_DEADLOCK if report.deadlocks else EXIT_OK


def cmd_simulate(args):
    doc = parse_model(_read(args.file))
    s = _system(args, doc)
    trace = run(s, parse_env_sequence(_read(args.envfile)), args.policy, args.seed)
    if args.format == "json":
        _write(args, json.dumps(trace_to_dict(trace), indent=2) + "\n")
    else:
        _write(args, trace_to_text(trace))
    return EXIT_OK


def cmd_export(args):
    g, accepting, _ = _load_graph(args)
    if args.accepting:
        accepting = args.accepting
    marks = set()
    if not args.no_marks:
        for comp in classify_deadlocks(g, accepting).deadlocks:
            marks |= comp
    _write(args, export_dot(g, marks))
    return EXIT_OK


def cmd_diff(args):
    g1 = graph_from_json(_read(args.first))
    g2 = graph_from_json(_read(args.second))
    d = diff_graphs(g1, g2)
    if args.format == "json":
        _write(args, json.dumps(diff_to_dict(d), indent=2) + "\n")
    else:
        _write(args, diff_to_text(d))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csmkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True):
        sp.add_argument("--atom-cap", type=int, default=DEFAULT_ATOM_CAP,
                        help="largest atom count decided by enumeration")
        if system:
            sp.add_argument("--system", help="system section to use")
            sp.add_argument("--close-incomplete", action="store_true",
                            help="add self-loops to incomplete states before composing")
            sp.add_argument("--allow-incomplete", action="store_true",
                            help="compose incomplete machines as they are")
        sp.add_argument("-o", "--output", help="write the artifact here instead of stdout")

    sp = sub.add_parser("check", help="validate model files")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--atom-cap", type=int, default=DEFAULT_ATOM_CAP)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("transform", help="translate statecharts into CSM sections")
    sp.add_argument("file")
    sp.add_argument("--name", action="append", help="statechart to translate (repeatable)")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("compose", help="build the reachability graph")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("json", "text", "dot"), default="json")
    sp.add_argument("--figure", help="also render the graph to this image file")
    common(sp)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("analyze", help="report terminal components and deadlocks")
    sp.add_argument("file", help="model file or graph document")
    sp.add_argument("--accepting", action="append",
                    help="glob over composite state names (repeatable)")
    sp.add_argument("--paths", type=int, default=1, help="shortest witness paths per deadlock")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.add_argument("--figure", help="also render the graph with deadlocks marked")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("simulate", help="replay an environment input sequence")
    sp.add_argument("file")
    sp.add_argument("envfile", help="one comma-separated symbol set per line")
    sp.add_argument("--policy", choices=POLICIES, default="first")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("export", help="emit DOT with deadlocks marked")
    sp.add_argument("file", help="model file or graph document")
    sp.add_argument("--accepting", action="append")
    sp.add_argument("--no-marks", action="store_true")
    sp.add_argument("--format", choices=("dot",), default="dot")
    common(sp)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("diff", help="compare two graph documents")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_diff)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, ModelError, ModelSyntaxError, FormulaSyntaxError, GraphFormatError,
            PatternError, SimulationError, AtomCapExceeded) as exc:
        print(f"csmkit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

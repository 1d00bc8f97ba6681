"""Verification toolkit for systems of concurrent state machines."""

__version__ = "0.1.0"

from .formula import (  # noqa: E402
    parse_formula, render_formula, evaluate, restrict, is_satisfiable,
    is_tautology, conjoin,
)
from .model import Csm, CsmState, CsmTransition, validate_csm, completeness_closure  # noqa: E402
from .statechart import Statechart, StTransition, MessageDecl, to_csm, augment_outputs  # noqa: E402
from .compose import SystemModel, ReachabilityGraph, compose, system_output, edge_guard  # noqa: E402
from .analyze import classify_deadlocks, find_terminal_sccs, witness_paths, diff_graphs  # noqa: E402
from .simulate import step, run  # noqa: E402
from .modelfile import parse_model, render_model  # noqa: E402

__all__ = [
    "parse_formula", "render_formula", "evaluate", "restrict", "is_satisfiable",
    "is_tautology", "conjoin",
    "Csm", "CsmState", "CsmTransition", "validate_csm", "completeness_closure",
    "Statechart", "StTransition", "MessageDecl", "to_csm", "augment_outputs",
    "SystemModel", "ReachabilityGraph", "compose", "system_output", "edge_guard",
    "classify_deadlocks", "find_terminal_sccs", "witness_paths", "diff_graphs",
    "step", "run", "parse_model", "render_model",
]

"""Step-by-step execution of a system of CSMs under explicit inputs.

Symbols are not latched: an environment symbol is present only in the step
it is supplied in, and state outputs are present only while the state is
occupied.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .compose import CompositionError, SystemModel, system_output
from .formula import evaluate
from .model import CsmTransition

__all__ = ["POLICIES", "StepRecord", "Trace", "SimulationError", "step", "run",
           "enabled_transitions"]

POLICIES = ("enumerate", "first", "random")


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepRecord:
    env: frozenset[str]
    before: tuple[str, ...]
    global_set: frozenset[str]
    chosen: tuple[CsmTransition, ...]
    after: tuple[str, ...]


@dataclass(frozen=True)
class Trace:
    initial: tuple[str, ...]
    steps: tuple[StepRecord, ...]

    @property
    def final(self) -> tuple[str, ...]:
        return self.steps[-1].after if self.steps else self.initial


def enabled_transitions(s: SystemModel, v: Sequence[str], global_set) -> list[list[CsmTransition]]:
    out = []
    for m, q in zip(s.machines, v):
        ok = [t for t in m.outgoing(q) if evaluate(t.guard, global_set)]
        if not ok:
            raise SimulationError(
                f"machine {m.name} has no enabled transition in {q!r} "
                f"under {sorted(global_set)} (machine is incomplete)")
        out.append(ok)
    return out


def step(s: SystemModel, v: Sequence[str], env: Iterable[str],
         policy: str = "enumerate", rng: random.Random | None = None) -> list[StepRecord]:
    """Advance every machine once.

    ``enumerate`` returns one record per combination of enabled transitions;
    ``first`` and ``random`` return a single record.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    env = frozenset(env)
    v = tuple(v)
    injected = env & s.internal_symbols
    if injected:
        raise SimulationError(f"environment cannot supply internal symbols {sorted(injected)}")
    unknown = env - s.environment_symbols
    if unknown:
        raise SimulationError(f"symbols {sorted(unknown)} are not environment symbols")
    try:
        produced = system_output(s, v)
    except CompositionError as exc:
        raise SimulationError(str(exc)) from exc
    global_set = env | produced
    options = enabled_transitions(s, v, global_set)

    if policy == "first":
        combos = [tuple(ts[0] for ts in options)]
    elif policy == "random":
        rng = rng or random.Random()
        combos = [tuple(rng.choice(ts) for ts in options)]
    else:
        combos = list(itertools.product(*options))
    return [StepRecord(env, v, global_set, c, tuple(t.target for t in c)) for c in combos]


def run(s: SystemModel, env_sequence: Iterable[Iterable[str]], policy: str = "first",
        seed: int | None = None) -> Trace:
    """Fold :func:`step` over ``env_sequence`` from the initial vector.

    The ``enumerate`` policy is accepted only while the run stays
    deterministic.
    """
    rng = random.Random(seed)
    v = s.initial_vector()
    records = []
    for k, env in enumerate(env_sequence):
        results = step(s, v, env, policy, rng)
        if len(results) > 1:
            raise SimulationError(
                f"step {k} has {len(results)} possible outcomes; "
                "use the 'first' or 'random' policy for nondeterministic runs")
        records.append(results[0])
        v = results[0].after
    return Trace(s.initial_vector(), tuple(records))

"""Counterexample traces: extraction from a solver model and concrete replay."""

from __future__ import annotations

from dataclasses import dataclass, field

from kiwi.bvtypes import BvType
from kiwi.frontend import ast as A
from kiwi.frontend.interp import Execution, Step, execute
from kiwi.solver.context import Model
from kiwi.ssa.system import SsaSystem


@dataclass
class Trace:
    """A replayed counterexample.

    ``choices`` are the nondeterministic values keyed like the interpreter's
    choice points; ``steps`` come from re-executing the program with them.
    """

    k: int
    site: int
    choices: dict[tuple, int]
    steps: list[Step] = field(default_factory=list)

    def text(self) -> str:
        out = [f"counterexample of length {self.k}, assertion {self.site} fails"]
        for i, st in enumerate(self.steps):
            out.append(f"step {i} (line {st.line}, {st.kind}): {st.text}")
            out.extend(f"  {name}={value}" for name, value in st.env.items())
        return "\n".join(out)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "assertion": self.site,
            "choices": [{"key": list(map(_jsonable, key)), "value": v} for key, v in self.choices.items()],
            "steps": [{"line": s.line, "kind": s.kind, "text": s.text, "env": s.env} for s in self.steps],
        }


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def extract_choices(s: SsaSystem, model: Model) -> dict[tuple, int]:
    """Read every nondeterministic choice of the concrete run out of ``model``.

    Copy ``u`` of a loop executes iteration ``k-1-u`` when the run starts
    from the entry (as it does in a concrete check).
    """
    out = {}
    for kind, ident, path, x in s.choice_points:
        iters = tuple(s.k - 1 - u for u in path)
        out[(kind, ident, iters)] = model.eval_signed(x)
    return out


def failed_site(s: SsaSystem, model: Model, level: int = 0) -> int:
    for a in s.assertions:
        if model.eval(a.guard) and model.eval_signed(a.slack) == level and not model.eval(a.prop):
            return a.site
    raise ValueError("model does not violate any assertion at the requested step")


def _chooser(choices: dict[tuple, int]):
    def choose(key: tuple, t: BvType) -> int:
        return choices.get(key, 0)

    return choose


def run_trace(p: A.Program, trace: Trace) -> Execution:
    return execute(p, _chooser(trace.choices), fuel=1_000_000, max_head_passes=trace.k)


def replay(p: A.Program, trace: Trace) -> bool:
    """True iff the concrete run with the trace's choices fails the reported
    assertion after exactly ``trace.k`` loop head passes."""
    exe = run_trace(p, trace)
    return exe.status == "violation" and exe.failed_assert == trace.site and exe.head_passes == trace.k


def make_trace(p: A.Program, s: SsaSystem, model: Model, k: int, level: int = 0) -> Trace:
    trace = Trace(k, failed_site(s, model, level), extract_choices(s, model))
    trace.steps = run_trace(p, trace).steps
    return trace

"""The three satisfiability tests of the verification loop."""

from __future__ import annotations

from kiwi.solver import bv
from kiwi.solver.bv import BvExpr
from kiwi.ssa.system import SsaSystem

INITIAL = "initial"
INDUCTION_STEP = "induction-step"
CONCRETE = "concrete"
KINDS = (INITIAL, INDUCTION_STEP, CONCRETE)


def build_check(s: SsaSystem, kind: str, inv: BvExpr = bv.TRUE) -> tuple[BvExpr, list[BvExpr]]:
    """Return ``(goal, assumptions)``; the test is satisfiable iff ``goal`` is
    satisfiable together with the system's constraints under ``assumptions``.

    * ``initial``: ``Start(x0) & Err(x0)``; an error before the first loop head.
    * ``induction-step``: ``P[k] & I & T[k] & Err(x_k)`` with loop-back values free.
    * ``concrete``: the same plus ``Start``, so a model is a real execution.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown check kind {kind!r}")
    assumptions = s.enable_assumptions()
    if kind == INITIAL:
        return s.error_at_slack(s.k), assumptions + s.start_assumptions()
    assumptions += s.no_earlier_errors()
    if inv is not bv.TRUE:
        assumptions.append(inv)
    if kind == CONCRETE:
        assumptions += s.start_assumptions()
    return s.err(), assumptions

"""Template invariant inference: inductivity check, strengthening, fixpoint driver.

All queries run on the engine's solver context, under the same standing
assumptions (enable literals and ``P[k]``) as the property checks.  The
template constraints enter a query only as assumption literals, so the
permanent clause database grows by definitions alone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from kiwi.bvtypes import BvType
from kiwi.domains.template import BOTTOM, TOP, AbstractValue, GuardedTemplate, _max
from kiwi.solver import bv
from kiwi.solver.bv import BvExpr
from kiwi.solver.context import Model, SolverContext

BINSEARCH = "binsearch"
ENUM = "enum"


@dataclass
class Inductive:
    pass


@dataclass
class Violation:
    model: Model
    rows: list[int]
    witness: dict[int, int]


@dataclass
class StrengthenStats:
    lower: int
    upper: int
    calls: int

    @property
    def bound(self) -> int:
        """The allowed number of solver calls for this search."""
        span = self.upper - self.lower
        return 0 if span <= 0 else math.ceil(math.log2(span)) + 1


@dataclass
class InferenceStats:
    iterations: int = 0
    inductivity_checks: int = 0
    strengthen: list[StrengthenStats] = field(default_factory=list)
    capped: bool = False
    time: float = 0.0

    def merge(self, other: "InferenceStats") -> None:
        self.iterations += other.iterations
        self.inductivity_checks += other.inductivity_checks
        self.strengthen += other.strengthen
        self.capped |= other.capped
        self.time += other.time


class Inference:
    """Inference for one template over one (growing) SSA system.

    ``assumptions`` returns the standing assumption literals of the
    current unwinding; it is re-read on every query.
    """

    def __init__(self, template: GuardedTemplate, ctx: SolverContext,
                 assumptions: Callable[[], Sequence[BvExpr]], per_row_floor: bool = False,
                 iteration_factor: int = 64, sync: Callable[[], None] | None = None) -> None:
        self.t = template
        self.sync = sync
        self.ctx = ctx
        self.assumptions = assumptions
        self.per_row_floor = per_row_floor
        self.cap = max(1, iteration_factor * len(template.rows))
        self.stats = InferenceStats()
        self._fresh = 0

    def _solve(self, assumptions: list, tag: str):
        if self.sync is not None:
            self.sync()
        return self.ctx.solve(assumptions, tag=tag)

    # -- inductivity check ---------------------------------------------------------
    def is_inductive(self, v: AbstractValue) -> Inductive | Violation:
        """Solve ``T(lb, d) & T[k] & not T'(x', d)``."""
        self.stats.inductivity_checks += 1
        pre = self.t.concretize_loopback(v)
        post = self.t.violation(v)
        if post is bv.FALSE:
            return Inductive()
        res = self._solve(list(self.assumptions()) + [pre, post], "inductivity")
        if not res.sat:
            return Inductive()
        m = res.model
        rows, witness = [], {}
        for i, r in enumerate(self.t.rows):
            val = self.t.post_values(r, m)
            d = v.values[i]
            if val is None or d is TOP:
                continue
            if d is BOTTOM or val > d:
                rows.append(i)
                witness[i] = val
        assert rows, "a violation model must exceed some row"
        return Violation(m, rows, witness)

    # -- strengthening -------------------------------------------------------------
    def strengthen(self, v: AbstractValue, bad: Violation) -> AbstractValue:
        """Jointly raise the violated rows by binary search on the sum of their bounds."""
        self._fresh += 1
        R = bad.rows
        rows = self.t.rows
        deltas: dict[int, BvExpr] = {}
        parts = []
        for i, r in enumerate(rows):
            d = v.values[i]
            atoms = self.t.loopback_atoms(r)
            if i in bad.witness:
                delta = bv.var(f"delta#{self._fresh}.{i}", r.ptype)
                deltas[i] = delta
                for g, e in atoms:
                    parts.append(bv.implies(g, bv.sle(e, delta)))
                point, guard = self.t.post_point(r.loop)
                parts.append(guard)
                parts.append(bv.sle(delta, r.expr(point)))
                if self.per_row_floor:
                    parts.append(bv.sle(bv.const(bad.witness[i], r.ptype), delta))
            else:
                for g, e in atoms:
                    parts.append(self.t._row_formula(g, e, d))
        system = bv.conj(parts)
        sum_width = max(rows[i].ptype.width for i in R) + max(1, math.ceil(math.log2(len(R) + 1)))
        st = BvType.internal(True, sum_width)
        total = None
        for i in R:
            term = bv.sext(deltas[i], sum_width, True)
            total = term if total is None else bv.add(total, term)

        lower = sum(bad.witness[i] for i in R)
        upper = sum(rows[i].max_value() for i in R)
        stats = StrengthenStats(lower, upper, 0)
        best = dict(bad.witness)
        lo, hi = lower, upper
        base = list(self.assumptions())
        while lo < hi:
            m = lo + (hi - lo + 1) // 2
            stats.calls += 1
            res = self._solve(base + [system, bv.sle(bv.const(m, st), total)], "strengthen")
            if res.sat:
                best = {i: res.model.eval_signed(deltas[i]) for i in R}
                # the model may already witness a larger sum than m
                lo = min(hi, max(m, sum(best.values())))
            else:
                hi = m - 1
        self.stats.strengthen.append(stats)
        out = list(v.values)
        for i in R:
            out[i] = _max(out[i], best[i])
        return AbstractValue(tuple(out))

    # -- drivers ---------------------------------------------------------------------
    def infer(self, start: AbstractValue | None = None, method: str = BINSEARCH) -> AbstractValue:
        t0 = time.perf_counter()
        v = start if start is not None else AbstractValue.bottom(len(self.t.rows))
        cap = self.cap
        if method == ENUM:
            # one join may raise a row by a single value step, so allow the lattice height
            cap = max(cap, sum(r.max_value() - r.min_value() + 2 for r in self.t.rows))
        try:
            for _ in range(cap):
                self.stats.iterations += 1
                out = self.is_inductive(v)
                if isinstance(out, Inductive):
                    return v
                if method == BINSEARCH:
                    nv = self.strengthen(v, out)
                else:
                    nv = self.t.join(v, out.model)
                assert nv != v, "strengthening must make progress"
                v = nv
            self.stats.capped = True
            return AbstractValue.top(len(self.t.rows))
        finally:
            self.stats.time += time.perf_counter() - t0


def infer(template: GuardedTemplate, ctx: SolverContext, assumptions: Callable[[], Sequence[BvExpr]],
          method: str = BINSEARCH, **kw) -> tuple[AbstractValue, InferenceStats]:
    inf = Inference(template, ctx, assumptions, **kw)
    v = inf.infer(method=method)
    return v, inf.stats


def infer_enumeration(template: GuardedTemplate, ctx: SolverContext,
                      assumptions: Callable[[], Sequence[BvExpr]], **kw) -> tuple[AbstractValue, InferenceStats]:
    return infer(template, ctx, assumptions, method=ENUM, **kw)

"""Guarded template domains over loop-back variables.

A row ``r`` of a template belongs to one loop and reads ``e_r(x) <= d_r``
for a linear form ``e_r`` with coefficients in {-1, 1}.  Row expressions are
evaluated in a signed type one bit (two for sums of two variables) wider
than the operands, so they never wrap.

A row is instantiated at several places of the SSA system:

* at the loop-back variables of the top copy, under ``head guard & ls``;
  this is the assumption side of the inductivity check;
* at every loop head copy, under that copy's head guard; this is how a
  proven invariant is used by the property checks;
* at a selected *post point* ``x'``: either a loop head reached from the
  loop entry (the initial-value branch) or the end of the bottom body copy
  (the fed-back values).  Selector variables pick one point per loop, so a
  single model exhibits one concrete post state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from kiwi.bvtypes import BOOL, BvType
from kiwi.solver import bv
from kiwi.solver.bv import BvExpr
from kiwi.ssa.system import LoopInfo, LoopInstance, SsaSystem

INTERVALS = "intervals"
ZONES = "zones"
OCTAGONS = "octagons"
KINDS = (INTERVALS, ZONES, OCTAGONS)


class _Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return (_Bottom, ())


class _Top:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


BOTTOM = _Bottom()
TOP = _Top()
Entry = object  # BOTTOM | int | TOP


@dataclass(frozen=True)
class TemplateRow:
    loop: LoopInfo
    terms: tuple[tuple[str, int], ...]
    ptype: BvType

    @property
    def variables(self) -> list[str]:
        return [v for v, _ in self.terms]

    def expr(self, values: dict[str, BvExpr]) -> BvExpr:
        """``e_r`` over the given SSA values, computed in the promoted type."""
        out = None
        for v, c in self.terms:
            x = values[v]
            ext = bv.sext(x, self.ptype.width, True) if x.signed else bv.zext(x, self.ptype.width, True)
            term = ext if c > 0 else bv.neg(ext)
            out = term if out is None else bv.add(out, term)
        return out

    def evaluate(self, values: dict[str, int]) -> int:
        """Exact integer value of ``e_r``; ``values`` hold natural (signed-aware) integers."""
        return sum(c * values[v] for v, c in self.terms)

    def max_value(self) -> int:
        total = 0
        for v, c in self.terms:
            t = self.loop.types[v]
            total += t.max_value if c > 0 else -t.min_value
        return total

    def min_value(self) -> int:
        total = 0
        for v, c in self.terms:
            t = self.loop.types[v]
            total += t.min_value if c > 0 else -t.max_value
        return total

    def text(self, values: dict[str, BvExpr]) -> str:
        if len(self.terms) == 1 and self.terms[0][1] > 0:
            return bv.to_text(values[self.terms[0][0]])
        return bv.to_text(self.expr(values))


def row_max(r: TemplateRow) -> int:
    return r.max_value()


def _promoted(types: Sequence[BvType], extra: int) -> BvType:
    return BvType.internal(True, max(t.width for t in types) + extra)


@dataclass
class GuardedTemplate:
    system: SsaSystem
    kind: str
    rows: list[TemplateRow]
    _points: dict[tuple[int, int], tuple[dict[str, BvExpr], BvExpr]] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def loops(self) -> list[LoopInfo]:
        seen: list[LoopInfo] = []
        for r in self.rows:
            if r.loop not in seen:
                seen.append(r.loop)
        return seen

    # -- instantiations --------------------------------------------------------
    def loopback_atoms(self, r: TemplateRow) -> list[tuple[BvExpr, BvExpr]]:
        """(guard, e_r) at the loop-back values of every instance of the row's loop."""
        out = []
        for inst in self.system.loop_instances(r.loop):
            top = inst.top
            out.append((bv.band(top.head_guard, top.ls), r.expr(top.lb)))
        return out

    def head_atoms(self, r: TemplateRow, u: int | None = None) -> list[tuple[BvExpr, BvExpr]]:
        """(guard, e_r) at loop head copies (all copies, or only copy ``u``)."""
        out = []
        for inst in self.system.loop_instances(r.loop):
            for c in inst.copies:
                if u is None or c.index == u:
                    out.append((c.head_guard, r.expr(c.head)))
        return out

    def post_point(self, loop: LoopInfo) -> tuple[dict[str, BvExpr], BvExpr]:
        """Selected post state ``x'`` of ``loop`` at the current unwinding and its guard ``G'``.

        Candidate points: each head copy entered from the loop entry (the
        top select guard is off) and the end of the bottom body copy.
        """
        key = (loop.id, self.system.k)
        if key in self._points:
            return self._points[key]
        s = self.system
        cands: list[tuple[BvExpr, dict[str, BvExpr]]] = []
        for inst in s.loop_instances(loop):
            top = inst.top
            for c in inst.copies:
                cands.append((bv.band(c.head_guard, bv.bnot(top.ls)), c.head))
            bottom = inst.copies[0]
            cands.append((bottom.end_guard, bottom.end))
        tag = f"L{loop.id}k{s.k}"
        sels = []
        for i, (g, _) in enumerate(cands):
            sel = bv.var(f"sel#{tag}p{i}", BOOL)
            s.add(bv.implies(sel, g), "select")
            sels.append(sel)
        point = {}
        for v in loop.variables:
            val = cands[-1][1][v]
            for sel, (_, vals) in zip(reversed(sels[:-1]), reversed(cands[:-1])):
                val = bv.ite(sel, vals[v], val)
            point[v] = s.define(bv.var(f"{v}#post{tag}", loop.types[v]), val, "select")
        guard = bv.disj(sels)
        self._points[key] = (point, guard)
        return point, guard

    # -- concretisation ----------------------------------------------------------
    @staticmethod
    def _row_formula(guard: BvExpr, e: BvExpr, entry: Entry) -> BvExpr:
        if entry is TOP:
            return bv.TRUE
        if entry is BOTTOM:
            return bv.bnot(guard)
        return bv.implies(guard, bv.sle(e, bv.const(entry, e.type)))

    def concretize_loopback(self, v: "AbstractValue") -> BvExpr:
        """``T(lb, d)``: the rows at the loop-back values of every loop instance."""
        parts = []
        for r, d in zip(self.rows, v.values):
            for g, e in self.loopback_atoms(r):
                parts.append(self._row_formula(g, e, d))
        return bv.conj(parts)

    def concretize_head(self, v: "AbstractValue", u: int | None = None) -> BvExpr:
        """The rows at the loop heads of unwinding ``u`` (all unwindings by default)."""
        parts = []
        for r, d in zip(self.rows, v.values):
            for g, e in self.head_atoms(r, u):
                parts.append(self._row_formula(g, e, d))
        return bv.conj(parts)

    def concretize_body(self, v: "AbstractValue") -> BvExpr:
        """``T'(x', d)``: the rows at the selected post point of every loop."""
        parts = []
        for r, d in zip(self.rows, v.values):
            point, guard = self.post_point(r.loop)
            parts.append(self._row_formula(guard, r.expr(point), d))
        return bv.conj(parts)

    def violation(self, v: "AbstractValue") -> BvExpr:
        """``not T'(x', d)`` as a disjunction over rows."""
        parts = []
        for r, d in zip(self.rows, v.values):
            if d is TOP:
                continue
            point, guard = self.post_point(r.loop)
            if d is BOTTOM:
                parts.append(guard)
            else:
                e = r.expr(point)
                parts.append(bv.band(guard, bv.slt(bv.const(d, e.type), e)))
        return bv.disj(parts)

    # -- models -------------------------------------------------------------------
    def post_values(self, r: TemplateRow, model) -> int | None:
        """``e_r(x')`` in ``model``, or None when the row's post guard is off."""
        point, guard = self.post_point(r.loop)
        if not model.eval(guard):
            return None
        return model.eval_signed(r.expr(point))

    def join(self, v: "AbstractValue", model) -> "AbstractValue":
        """Pointwise max of ``v`` and the post state of ``model``."""
        out = list(v.values)
        for i, r in enumerate(self.rows):
            val = self.post_values(r, model)
            if val is not None:
                out[i] = _max(out[i], val)
        return AbstractValue(tuple(out))

    # -- text -----------------------------------------------------------------------
    def row_text(self, r: TemplateRow, d: Entry, where: str = "loopback") -> str:
        inst = self.system.loop_instances(r.loop)[0]
        top = inst.top
        guard = bv.to_text(bv.band(top.head_guard, top.ls))
        body = r.text(top.lb)
        if d is BOTTOM:
            return f"{guard} ==> FALSE"
        if d is TOP:
            return f"{guard} ==> TRUE  // {body}"
        return f"{guard} ==> {body} <= {d}"

    def dump(self, v: "AbstractValue") -> str:
        return "\n".join(self.row_text(r, d) for r, d in zip(self.rows, v.values))


def _max(a: Entry, b: Entry) -> Entry:
    if a is BOTTOM:
        return b
    if b is BOTTOM:
        return a
    if a is TOP or b is TOP:
        return TOP
    return max(a, b)


@dataclass(frozen=True)
class AbstractValue:
    values: tuple

    @staticmethod
    def bottom(n: int) -> "AbstractValue":
        return AbstractValue((BOTTOM,) * n)

    @staticmethod
    def top(n: int) -> "AbstractValue":
        return AbstractValue((TOP,) * n)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Entry:
        return self.values[i]

    def leq(self, other: "AbstractValue") -> bool:
        return all(_max(a, b) == b if not (a is b) else True for a, b in zip(self.values, other.values))

    def join(self, other: "AbstractValue") -> "AbstractValue":
        return AbstractValue(tuple(_max(a, b) for a, b in zip(self.values, other.values)))

    def normalized(self, rows: Sequence[TemplateRow]) -> "AbstractValue":
        """Replace bounds at or above the row maximum by TOP."""
        return AbstractValue(tuple(TOP if isinstance(d, int) and d >= r.max_value() else d
                                   for r, d in zip(rows, self.values)))

    def __str__(self) -> str:
        return "(" + ", ".join("_|_" if d is BOTTOM else "T" if d is TOP else str(d) for d in self.values) + ")"


def make_template(s: SsaSystem, kind: str = INTERVALS) -> GuardedTemplate:
    if kind not in KINDS:
        raise ValueError(f"unknown template domain {kind!r}")
    rows: list[TemplateRow] = []
    for loop in s.loops:
        names = [v for v in loop.variables if loop.types[v] != BOOL]
        for v in names:
            pt = _promoted([loop.types[v]], 1)
            rows.append(TemplateRow(loop, ((v, 1),), pt))
            rows.append(TemplateRow(loop, ((v, -1),), pt))
        if kind == INTERVALS:
            continue
        for a, b in itertools.combinations(names, 2):
            ta, tb = loop.types[a], loop.types[b]
            if ta != tb:
                continue
            diff = _promoted([ta, tb], 1)
            rows.append(TemplateRow(loop, ((a, 1), (b, -1)), diff))
            rows.append(TemplateRow(loop, ((b, 1), (a, -1)), diff))
            if kind == OCTAGONS:
                wide = _promoted([ta, tb], 2)
                rows.append(TemplateRow(loop, ((a, 1), (b, 1)), wide))
                rows.append(TemplateRow(loop, ((a, -1), (b, -1)), wide))
    return GuardedTemplate(s, kind, rows)

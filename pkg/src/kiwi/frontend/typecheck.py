"""Type checking and conversion insertion.

Rules (deliberately simpler than C):

* arithmetic happens at the common width of the operands, with no
  promotion to ``int``; the narrower operand is extended according to its
  own signedness;
* operands of a binary operator (and branches of ``?:``) must agree in
  signedness unless one side is a literal, which adopts the other side's
  type and must fit it;
* booleans used as numbers are converted to the partner type (``i32`` if
  both sides are boolean), numbers used as conditions mean ``!= 0``;
* assignment converts to the target type like a C cast.

Every implicit conversion becomes an explicit ``Cast(implicit=True)`` so
later stages never need to re-derive types.
"""

from __future__ import annotations

from dataclasses import replace

from kiwi.bvtypes import BOOL, I32, U32, BvType
from kiwi.frontend import ast as A
from kiwi.frontend.ast import Diagnostic

ARITH_OPS = ("+", "-", "*", "/", "%", "&", "|", "^")
SHIFT_OPS = ("<<", ">>")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("&&", "||")


def _literal_value(e: A.Expr) -> int | None:
    """Integer value of a literal, possibly under unary minus/plus; else None."""
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.Unary) and e.op in ("-", "+"):
        inner = _literal_value(e.operand)
        if inner is not None:
            return -inner if e.op == "-" else inner
    return None


class TypeChecker:
    def __init__(self) -> None:
        self.scope: dict[str, BvType] = {}
        self.declared: set[str] = set()

    # -- statements --------------------------------------------------------------
    def stmts(self, body: tuple[A.Stmt, ...]) -> tuple[A.Stmt, ...]:
        return tuple(self.stmt(s) for s in body)

    def block(self, body: tuple[A.Stmt, ...]) -> tuple[A.Stmt, ...]:
        # names are block scoped but must be globally unique
        saved = dict(self.scope)
        out = self.stmts(body)
        self.scope = saved
        return out

    def stmt(self, s: A.Stmt) -> A.Stmt:
        if isinstance(s, A.Decl):
            if s.name in self.declared:
                raise Diagnostic(A.REDECLARED, f"variable {s.name!r} declared twice", s.pos)
            init = self.coerce(self.expr(s.init), s.vtype, s.init) if s.init is not None else None
            self.scope[s.name] = s.vtype
            self.declared.add(s.name)
            return replace(s, init=init)
        if isinstance(s, A.Assign):
            t = self.lookup(s.target, s.pos)
            return replace(s, value=self.coerce(self.expr(s.value), t, s.value))
        if isinstance(s, A.If):
            return replace(s, cond=self.cond(s.cond), then=self.block(s.then), other=self.block(s.other))
        if isinstance(s, A.While):
            return replace(s, cond=self.cond(s.cond), body=self.block(s.body))
        if isinstance(s, A.Assert):
            return replace(s, cond=self.cond(s.cond))
        if isinstance(s, A.Assume):
            return replace(s, cond=self.cond(s.cond))
        raise TypeError(s)

    def lookup(self, name: str, pos: A.Pos) -> BvType:
        t = self.scope.get(name)
        if t is None:
            raise Diagnostic(A.UNKNOWN_ID, f"unknown identifier {name!r}", pos)
        return t

    # -- expressions -----------------------------------------------------------
    def cond(self, e: A.Expr) -> A.Expr:
        return self.to_bool(self.expr(e))

    @staticmethod
    def to_bool(e: A.Expr) -> A.Expr:
        if e.type == BOOL:
            return e
        return A.Cast(BOOL, e, implicit=True, type=BOOL, pos=e.pos)

    def coerce(self, typed: A.Expr, t: BvType, raw: A.Expr | None = None) -> A.Expr:
        """Convert a typed expression to ``t``; literals are re-typed after a range check."""
        lit = _literal_value(raw) if raw is not None else None
        if lit is not None and t != BOOL:
            return self.literal_as(raw, t)
        if typed.type == t:
            return typed
        return A.Cast(t, typed, implicit=True, type=t, pos=typed.pos)

    def literal_as(self, raw: A.Expr, t: BvType) -> A.Expr:
        value = _literal_value(raw)
        assert value is not None
        fits = t.min_value <= value <= t.max_value or (not t.signed and -t.max_value <= value < 0)
        if not fits:
            raise Diagnostic(A.LITERAL_OVERFLOW, f"literal {value} does not fit {t}", raw.pos)
        return self._retype_literal(raw, t)

    def _retype_literal(self, e: A.Expr, t: BvType) -> A.Expr:
        if isinstance(e, A.IntLit):
            return replace(e, type=t)
        assert isinstance(e, A.Unary)
        return replace(e, operand=self._retype_literal(e.operand, t), type=t)

    def expr(self, e: A.Expr) -> A.Expr:
        if isinstance(e, A.IntLit):
            t = U32 if e.unsigned_suffix else I32
            if e.value > t.max_value:
                raise Diagnostic(A.LITERAL_OVERFLOW, f"literal {e.value} does not fit {t}", e.pos)
            return replace(e, type=t)
        if isinstance(e, A.Var):
            return replace(e, type=self.lookup(e.name, e.pos))
        if isinstance(e, A.Nondet):
            return replace(e, type=e.result)
        if isinstance(e, A.Cast):
            inner = self.expr(e.operand)
            if e.target == BOOL:
                return replace(e, operand=inner, type=BOOL)
            return replace(e, operand=inner, type=e.target)
        if isinstance(e, A.Unary):
            lit = _literal_value(e)
            if lit is not None and e.op == "-":
                t = U32 if self._has_u_suffix(e) else I32
                if isinstance(e.operand, A.IntLit) and t.signed and e.operand.value > -t.min_value:
                    raise Diagnostic(A.LITERAL_OVERFLOW, f"literal -{e.operand.value} does not fit {t}", e.pos)
                if isinstance(e.operand, A.IntLit):
                    return replace(e, operand=replace(e.operand, type=t), type=t)
            if e.op == "!":
                return replace(e, operand=self.cond(e.operand), type=BOOL)
            inner = self.expr(e.operand)
            if inner.type == BOOL:
                inner = A.Cast(I32, inner, implicit=True, type=I32, pos=inner.pos)
            return replace(e, operand=inner, type=inner.type)
        if isinstance(e, A.Binary):
            if e.op in LOGIC_OPS:
                return replace(e, left=self.cond(e.left), right=self.cond(e.right), type=BOOL)
            if e.op in SHIFT_OPS:
                left = self.expr(e.left)
                if left.type == BOOL:
                    left = A.Cast(I32, left, implicit=True, type=I32, pos=left.pos)
                right = self.coerce(self.expr(e.right), left.type, e.right)
                return replace(e, left=left, right=right, type=left.type)
            left, right, t = self.unify(e.left, e.right, e.op, e.pos)
            if e.op in CMP_OPS:
                if t == BOOL and e.op not in ("==", "!="):
                    left = A.Cast(I32, left, implicit=True, type=I32, pos=left.pos)
                    right = A.Cast(I32, right, implicit=True, type=I32, pos=right.pos)
                return replace(e, left=left, right=right, type=BOOL)
            if t == BOOL:
                left = A.Cast(I32, left, implicit=True, type=I32, pos=left.pos)
                right = A.Cast(I32, right, implicit=True, type=I32, pos=right.pos)
                t = I32
            return replace(e, left=left, right=right, type=t)
        if isinstance(e, A.Cond):
            c = self.cond(e.cond)
            a, b, t = self.unify(e.then, e.other, "?:", e.pos)
            return replace(e, cond=c, then=a, other=b, type=t)
        raise TypeError(e)

    def _has_u_suffix(self, e: A.Expr) -> bool:
        while isinstance(e, A.Unary):
            e = e.operand
        return isinstance(e, A.IntLit) and e.unsigned_suffix

    def unify(self, l: A.Expr, r: A.Expr, op: str, pos: A.Pos) -> tuple[A.Expr, A.Expr, BvType]:
        lit_l, lit_r = _literal_value(l), _literal_value(r)
        tl, tr = self.expr(l), self.expr(r)
        if lit_l is not None and lit_r is None and tr.type != BOOL:
            return self.literal_as(l, tr.type), tr, tr.type
        if lit_r is not None and lit_l is None and tl.type != BOOL:
            return tl, self.literal_as(r, tl.type), tl.type
        a, b = tl.type, tr.type
        if a == b:
            return tl, tr, a
        if a == BOOL:
            return A.Cast(b, tl, implicit=True, type=b, pos=tl.pos), tr, b
        if b == BOOL:
            return tl, A.Cast(a, tr, implicit=True, type=a, pos=tr.pos), a
        if a.signed != b.signed:
            what = "comparison" if op in CMP_OPS else "operands"
            raise Diagnostic(A.MIXED_SIGN, f"mixed-signedness {what} ({a} {op} {b})", pos)
        t = a if a.width >= b.width else b
        if tl.type != t:
            tl = A.Cast(t, tl, implicit=True, type=t, pos=tl.pos)
        if tr.type != t:
            tr = A.Cast(t, tr, implicit=True, type=t, pos=tr.pos)
        return tl, tr, t


def typecheck(p: A.Program) -> A.Program:
    """Return a typed copy of ``p``; raises :class:`Diagnostic` on type errors."""
    if p.typed:
        return p
    return A.Program(TypeChecker().stmts(p.body), typed=True)


def load(source: str) -> A.Program:
    """Parse and type-check in one step."""
    from kiwi.frontend.parser import parse

    return typecheck(parse(source))

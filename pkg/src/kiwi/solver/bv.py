"""Bit-vector expression trees.

Nodes are immutable and hash-consed: building the same operator over the
same children twice returns the same object, so identity comparison and
identity-keyed caches are safe.  Builders fold constants eagerly.

Booleans are width-1 bit-vectors.  Division and remainder are total:
``x / 0`` is all-ones and ``x % 0`` is ``x`` for both signednesses.
"""

from __future__ import annotations

import threading
import weakref
from typing import Iterable, Mapping, Sequence

from kiwi.bvtypes import BOOL, BvType

ARITH = ("add", "sub", "mul", "udiv", "sdiv", "urem", "srem", "and", "or", "xor", "shl", "lshr", "ashr")
COMPARE = ("eq", "ne", "ult", "ule", "slt", "sle")
BOOL_NARY = ("band", "bor")
COMMUTATIVE = ("add", "mul", "and", "or", "xor", "eq", "ne", "band", "bor")

_table: "weakref.WeakValueDictionary[tuple, BvExpr]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


class BvExpr:
    """One node of a bit-vector expression DAG."""

    __slots__ = ("op", "args", "type", "value", "name", "params", "__weakref__")

    op: str
    args: tuple["BvExpr", ...]
    type: BvType
    value: int | None
    name: str | None
    params: tuple

    def __new__(cls, op: str, args: Sequence["BvExpr"], type_: BvType,
                value: int | None = None, name: str | None = None, params: tuple = ()):
        key = (op, type_, value, name, params, tuple(id(a) for a in args))
        with _lock:
            node = _table.get(key)
            if node is not None:
                return node
            node = object.__new__(cls)
            node.op = op
            node.args = tuple(args)
            node.type = type_
            node.value = value
            node.name = name
            node.params = params
            _table[key] = node
            return node

    def __reduce__(self):
        return (BvExpr, (self.op, self.args, self.type, self.value, self.name, self.params))

    @property
    def width(self) -> int:
        return self.type.width

    @property
    def signed(self) -> bool:
        return self.type.signed

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_bool(self) -> bool:
        return self.type.width == 1

    def signed_value(self) -> int:
        assert self.value is not None
        return BvType.internal(True, self.width).wrap(self.value)

    def __repr__(self) -> str:
        return f"BvExpr({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)


# ---------------------------------------------------------------------------
# leaves

def const(value: int, t: BvType) -> BvExpr:
    return BvExpr("const", (), t, value=value & t.mask)


def var(name: str, t: BvType) -> BvExpr:
    return BvExpr("var", (), t, name=name)


TRUE = const(1, BOOL)
FALSE = const(0, BOOL)


def boolean(b: bool) -> BvExpr:
    return TRUE if b else FALSE


# ---------------------------------------------------------------------------
# builders

def _same(a: BvExpr, b: BvExpr, op: str) -> None:
    if a.width != b.width:
        raise TypeError(f"{op}: width mismatch {a.width} vs {b.width}")


def _fold(op: str, args: Sequence[BvExpr], t: BvType, params: tuple = ()) -> BvExpr:
    node = BvExpr(op, args, t, params=params)
    if all(a.is_const for a in args):
        return const(evaluate(node, {}), t)
    return node


def binop(op: str, a: BvExpr, b: BvExpr) -> BvExpr:
    if op in COMPARE:
        _same(a, b, op)
        return _fold(op, (a, b), BOOL)
    if op not in ARITH:
        raise ValueError(f"unknown operator {op}")
    _same(a, b, op)
    return _fold(op, (a, b), a.type)


def add(a, b): return binop("add", a, b)
def sub(a, b): return binop("sub", a, b)
def mul(a, b): return binop("mul", a, b)
def udiv(a, b): return binop("udiv", a, b)
def sdiv(a, b): return binop("sdiv", a, b)
def urem(a, b): return binop("urem", a, b)
def srem(a, b): return binop("srem", a, b)
def eq(a, b): return binop("eq", a, b)
def ne(a, b): return binop("ne", a, b)
def ult(a, b): return binop("ult", a, b)
def ule(a, b): return binop("ule", a, b)
def slt(a, b): return binop("slt", a, b)
def sle(a, b): return binop("sle", a, b)


def lt(a: BvExpr, b: BvExpr, signed: bool) -> BvExpr:
    return slt(a, b) if signed else ult(a, b)


def le(a: BvExpr, b: BvExpr, signed: bool) -> BvExpr:
    return sle(a, b) if signed else ule(a, b)


def neg(a: BvExpr) -> BvExpr:
    return _fold("neg", (a,), a.type)


def bvnot(a: BvExpr) -> BvExpr:
    if a.is_bool:
        return bnot(a)
    return _fold("not", (a,), a.type)


def bnot(a: BvExpr) -> BvExpr:
    if not a.is_bool:
        raise TypeError("bnot expects a boolean")
    if a.op == "bnot":
        return a.args[0]
    return _fold("bnot", (a,), BOOL)


def _nary(op: str, items: Iterable[BvExpr]) -> BvExpr:
    unit, zero = (TRUE, FALSE) if op == "band" else (FALSE, TRUE)
    flat: list[BvExpr] = []
    seen: set[int] = set()
    for x in items:
        if not x.is_bool:
            raise TypeError(f"{op} expects booleans")
        parts = x.args if x.op == op else (x,)
        for p in parts:
            if p is zero:
                return zero
            if p is unit or id(p) in seen:
                continue
            seen.add(id(p))
            flat.append(p)
    if not flat:
        return unit
    if len(flat) == 1:
        return flat[0]
    return BvExpr(op, flat, BOOL)


def band(*items: BvExpr) -> BvExpr:
    return _nary("band", items)


def bor(*items: BvExpr) -> BvExpr:
    return _nary("bor", items)


def conj(items: Iterable[BvExpr]) -> BvExpr:
    return _nary("band", items)


def disj(items: Iterable[BvExpr]) -> BvExpr:
    return _nary("bor", items)


def implies(a: BvExpr, b: BvExpr) -> BvExpr:
    if a is FALSE or b is TRUE:
        return TRUE
    if a is TRUE:
        return b
    return BvExpr("implies", (a, b), BOOL)


def ite(c: BvExpr, a: BvExpr, b: BvExpr) -> BvExpr:
    if not c.is_bool:
        raise TypeError("ite condition must be boolean")
    _same(a, b, "ite")
    if c is TRUE:
        return a
    if c is FALSE:
        return b
    if a is b:
        return a
    return BvExpr("ite", (c, a, b), a.type)


def zext(a: BvExpr, width: int, signed: bool | None = None) -> BvExpr:
    t = BvType.internal(a.signed if signed is None else signed, width)
    if width < a.width:
        raise TypeError("extension must not narrow")
    if width == a.width:
        return a if t == a.type else retype(a, t)
    return _fold("zext", (a,), t, (width,))


def sext(a: BvExpr, width: int, signed: bool | None = None) -> BvExpr:
    t = BvType.internal(a.signed if signed is None else signed, width)
    if width < a.width:
        raise TypeError("extension must not narrow")
    if width == a.width:
        return a if t == a.type else retype(a, t)
    return _fold("sext", (a,), t, (width,))


def extract(a: BvExpr, hi: int, lo: int, signed: bool = False) -> BvExpr:
    if not (0 <= lo <= hi < a.width):
        raise ValueError("bad extract range")
    t = BvType.internal(signed, hi - lo + 1)
    if lo == 0 and hi == a.width - 1 and t == a.type:
        return a
    return _fold("extract", (a,), t, (hi, lo))


def retype(a: BvExpr, t: BvType) -> BvExpr:
    """Reinterpret the bits of ``a`` under a type of the same width."""
    if t.width != a.width:
        raise TypeError("retype keeps the width")
    if t == a.type:
        return a
    if a.is_const:
        return const(a.value, t)
    return BvExpr("retype", (a,), t)


def cast(a: BvExpr, t: BvType) -> BvExpr:
    """C-style conversion: truncate, or extend according to the source signedness."""
    if t.width == 1:
        return ne(a, const(0, a.type)) if a.width > 1 else a
    if a.width == t.width:
        return retype(a, t)
    if a.width > t.width:
        return extract(a, t.width - 1, 0, t.signed)
    ext = sext if a.signed else zext
    return ext(a, t.width, t.signed)


def to_bool(a: BvExpr) -> BvExpr:
    return a if a.is_bool else ne(a, const(0, a.type))


# ---------------------------------------------------------------------------
# evaluation

def _s(v: int, w: int) -> int:
    return v - (1 << w) if v >> (w - 1) else v


def apply_op(op: str, vals: Sequence[int], widths: Sequence[int], out: BvType, params: tuple = ()) -> int:
    """Evaluate one operator on unsigned-encoded operand values."""
    m = out.mask
    if op == "add":
        return (vals[0] + vals[1]) & m
    if op == "sub":
        return (vals[0] - vals[1]) & m
    if op == "mul":
        return (vals[0] * vals[1]) & m
    if op == "neg":
        return (-vals[0]) & m
    if op == "not":
        return (~vals[0]) & m
    if op == "and":
        return vals[0] & vals[1]
    if op == "or":
        return vals[0] | vals[1]
    if op == "xor":
        return vals[0] ^ vals[1]
    if op == "udiv":
        return m if vals[1] == 0 else vals[0] // vals[1]
    if op == "urem":
        return vals[0] if vals[1] == 0 else vals[0] % vals[1]
    if op in ("sdiv", "srem"):
        w = widths[0]
        a, b = _s(vals[0], w), _s(vals[1], w)
        if b == 0:
            return m if op == "sdiv" else vals[0]
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return (q if op == "sdiv" else a - q * b) & m
    if op == "shl":
        return 0 if vals[1] >= widths[0] else (vals[0] << vals[1]) & m
    if op == "lshr":
        return 0 if vals[1] >= widths[0] else vals[0] >> vals[1]
    if op == "ashr":
        w = widths[0]
        sh = min(vals[1], w)
        return (_s(vals[0], w) >> sh) & m
    if op == "eq":
        return int(vals[0] == vals[1])
    if op == "ne":
        return int(vals[0] != vals[1])
    if op == "ult":
        return int(vals[0] < vals[1])
    if op == "ule":
        return int(vals[0] <= vals[1])
    if op == "slt":
        return int(_s(vals[0], widths[0]) < _s(vals[1], widths[0]))
    if op == "sle":
        return int(_s(vals[0], widths[0]) <= _s(vals[1], widths[0]))
    if op == "band":
        return int(all(vals))
    if op == "bor":
        return int(any(vals))
    if op == "bnot":
        return 1 - vals[0]
    if op == "implies":
        return int((not vals[0]) or bool(vals[1]))
    if op == "ite":
        return vals[1] if vals[0] else vals[2]
    if op == "zext" or op == "retype":
        return vals[0]
    if op == "sext":
        return _s(vals[0], widths[0]) & m
    if op == "extract":
        hi, lo = params
        return (vals[0] >> lo) & ((1 << (hi - lo + 1)) - 1)
    raise ValueError(f"cannot evaluate {op}")


def evaluate(e: BvExpr, env: Mapping[str, int], default: int | None = None,
             memo: dict[int, int] | None = None) -> int:
    """Evaluate ``e`` to its unsigned-encoded value.

    Variables are looked up in ``env`` (values are reduced modulo the
    width).  Missing variables raise ``KeyError`` unless ``default`` is
    given.
    """
    if memo is None:
        memo = {}
    stack = [e]
    while stack:
        n = stack[-1]
        if id(n) in memo:
            stack.pop()
            continue
        if n.op == "const":
            memo[id(n)] = n.value
            stack.pop()
            continue
        if n.op == "var":
            if n.name in env:
                memo[id(n)] = env[n.name] & n.type.mask
            elif default is not None:
                memo[id(n)] = default & n.type.mask
            else:
                raise KeyError(n.name)
            stack.pop()
            continue
        if n.op == "ite" and id(n.args[0]) in memo:
            # evaluate only the taken branch
            c = memo[id(n.args[0])]
            branch = n.args[1] if c else n.args[2]
            if id(branch) in memo:
                memo[id(n)] = memo[id(branch)]
                stack.pop()
            else:
                stack.append(branch)
            continue
        if n.op == "ite":
            stack.append(n.args[0])
            continue
        pending = [a for a in n.args if id(a) not in memo]
        if pending:
            stack.extend(pending)
            continue
        vals = [memo[id(a)] for a in n.args]
        memo[id(n)] = apply_op(n.op, vals, [a.width for a in n.args], n.type, n.params)
        stack.pop()
    return memo[id(e)]


def evaluate_signed(e: BvExpr, env: Mapping[str, int], default: int | None = None) -> int:
    v = evaluate(e, env, default)
    return e.type.wrap(v) if e.signed else v


def free_vars(e: BvExpr) -> dict[str, BvType]:
    out: dict[str, BvType] = {}
    seen: set[int] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if n.op == "var":
            out[n.name] = n.type
        stack.extend(n.args)
    return out


def substitute(e: BvExpr, mapping: Mapping[str, BvExpr]) -> BvExpr:
    """Replace variables by expressions, rebuilding through the folding builders."""
    memo: dict[int, BvExpr] = {}

    def go(n: BvExpr) -> BvExpr:
        r = memo.get(id(n))
        if r is not None:
            return r
        if n.op == "var":
            r = mapping.get(n.name, n)
        elif n.op == "const":
            r = n
        else:
            r = rebuild(n, [go(a) for a in n.args])
        memo[id(n)] = r
        return r

    return go(e)


def rebuild(n: BvExpr, args: list[BvExpr]) -> BvExpr:
    op = n.op
    if all(a is b for a, b in zip(args, n.args)):
        return n
    if op in ARITH or op in COMPARE:
        return binop(op, args[0], args[1])
    if op == "neg":
        return neg(args[0])
    if op == "not":
        return bvnot(args[0])
    if op == "bnot":
        return bnot(args[0])
    if op == "band":
        return conj(args)
    if op == "bor":
        return disj(args)
    if op == "implies":
        return implies(args[0], args[1])
    if op == "ite":
        return ite(*args)
    if op == "zext":
        return zext(args[0], n.width, n.signed)
    if op == "sext":
        return sext(args[0], n.width, n.signed)
    if op == "extract":
        return extract(args[0], n.params[0], n.params[1], n.signed)
    if op == "retype":
        return retype(args[0], n.type)
    raise ValueError(op)


# ---------------------------------------------------------------------------
# printing

_INFIX = {
    "add": ("+", 6), "sub": ("-", 6), "mul": ("*", 7), "udiv": ("/", 7), "sdiv": ("/", 7),
    "urem": ("%", 7), "srem": ("%", 7), "shl": ("<<", 5), "lshr": (">>", 5), "ashr": (">>", 5),
    "and": ("&", 3), "or": ("|", 1), "xor": ("^", 2),
    "ult": ("<", 4), "slt": ("<", 4), "ule": ("<=", 4), "sle": ("<=", 4),
    "eq": ("==", 4), "ne": ("!=", 4),
}


def const_text(n: BvExpr) -> str:
    if n.is_bool:
        return "TRUE" if n.value else "FALSE"
    if n.signed:
        return str(n.type.wrap(n.value))
    return f"{n.value}u"


def to_text(e: BvExpr, top: bool = True) -> str:
    """Render in a C-like style close to the listings used for SSA dumps.

    Comparisons nested under boolean connectives are parenthesised;
    ``a <= b`` prints as ``b >= a`` and ``a < b`` stays as is.
    """
    return _show(e, 0)


def _show(n: BvExpr, ctx: int) -> str:
    op = n.op
    if op == "const":
        return const_text(n)
    if op == "var":
        return n.name
    if op in ("ule", "sle"):
        a, b = n.args
        s = f"{_show(b, 5)} >= {_show(a, 5)}"
        return f"({s})" if ctx > 0 else s
    if op in _INFIX:
        sym, prec = _INFIX[op]
        a, b = n.args
        if op in ("eq", "ne", "ult", "slt"):
            s = f"{_show(a, 5)} {sym} {_show(b, 5)}"
            return f"({s})" if ctx > 0 else s
        s = f"{_show(a, prec)} {sym} {_show(b, prec + 1)}"
        return f"({s})" if prec < ctx else s
    if op == "neg":
        return f"-{_show(n.args[0], 9)}"
    if op == "not":
        return f"~{_show(n.args[0], 9)}"
    if op == "bnot":
        return f"!{_show(n.args[0], 9)}"
    if op == "band":
        s = " && ".join(_show(a, 1) for a in n.args)
        return f"({s})" if ctx > 1 else s
    if op == "bor":
        s = " || ".join(_show(a, 1) for a in n.args)
        return f"({s})" if ctx > 0 else s
    if op == "implies":
        s = f"{_show(n.args[0], 1)} ==> {_show(n.args[1], 1)}"
        return f"({s})" if ctx > 0 else s
    if op == "ite":
        c, a, b = n.args
        return f"({_show(c, 1)} ? {_show(a, 1)} : {_show(b, 1)})"
    if op in ("zext", "sext", "retype"):
        kind = "signed" if n.signed else "unsigned"
        return f"(({kind} __CPROVER_bitvector[{n.width}]){_show(n.args[0], 9)})"
    if op == "extract":
        hi, lo = n.params
        return f"{_show(n.args[0], 9)}[{hi}:{lo}]"
    raise ValueError(op)


def format_constraint(e: BvExpr) -> str:
    """Top-level constraint rendering: ``lhs == rhs`` without outer parentheses."""
    if e.op == "eq" and e.args[0].op == "var":
        return f"{e.args[0].name} == {_show(e.args[1], 0)}"
    if e.op == "implies":
        return f"{_show(e.args[0], 1)} ==> {_show(e.args[1], 0)}"
    return _show(e, 0)

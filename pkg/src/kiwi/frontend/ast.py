"""Abstract syntax of the input language.

Positions are carried for diagnostics but excluded from equality, so two
parses of the same text (or of a pretty-printed copy) compare equal.
Expression nodes have a ``type`` slot that is ``None`` after parsing and
filled in by :func:`kiwi.frontend.typecheck.typecheck`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from kiwi.bvtypes import BvType

Pos = tuple[int, int]


class Diagnostic(Exception):
    """A front-end error with a stable code and a source position."""

    def __init__(self, code: str, message: str, pos: Pos | None = None) -> None:
        self.code = code
        self.message = message
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(f"{where}{code}: {message}")


SYNTAX = "syntax-error"
UNKNOWN_ID = "unknown-identifier"
UNSUPPORTED = "unsupported-construct"
TYPE_MISMATCH = "type-mismatch"
MIXED_SIGN = "mixed-signedness"
LITERAL_OVERFLOW = "literal-overflow"
REDECLARED = "redeclared"


# -- expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    unsigned_suffix: bool = False
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str  # '-', '!', '~', '+'
    operand: "Expr"
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / % & | ^ << >> == != < <= > >= && ||
    left: "Expr"
    right: "Expr"
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Cond:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Cast:
    target: BvType
    operand: "Expr"
    implicit: bool = False
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Nondet:
    """A call to a ``__VERIFIER_nondet_*`` intrinsic; ``site`` numbers call sites."""

    result: BvType
    intrinsic: str
    site: int = 0
    type: BvType | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


Expr = Union[IntLit, Var, Unary, Binary, Cond, Cast, Nondet]


# -- statements ----------------------------------------------------------------

@dataclass(frozen=True)
class Decl:
    name: str
    vtype: BvType
    init: Expr | None = None
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple["Stmt", ...]
    other: tuple["Stmt", ...] = ()
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple["Stmt", ...]
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Assert:
    cond: Expr
    site: int = 0
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Assume:
    cond: Expr
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


Stmt = Union[Decl, Assign, If, While, Assert, Assume]


@dataclass(frozen=True)
class Program:
    """The body of ``main``.  ``typed`` is set once the type checker ran."""

    body: tuple[Stmt, ...]
    typed: bool = False

    @property
    def decls(self) -> list[Decl]:
        return [s for s in walk_stmts(self.body) if isinstance(s, Decl)]

    def variables(self) -> dict[str, BvType]:
        return {d.name: d.vtype for d in self.decls}

    def loops(self) -> list[While]:
        return [s for s in walk_stmts(self.body) if isinstance(s, While)]

    def assertions(self) -> list[Assert]:
        return [s for s in walk_stmts(self.body) if isinstance(s, Assert)]

    def assumes(self) -> list[Assume]:
        return [s for s in walk_stmts(self.body) if isinstance(s, Assume)]


def walk_stmts(stmts: tuple[Stmt, ...]):
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.other)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)


def walk_expr(e: Expr):
    yield e
    if isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Cond):
        yield from walk_expr(e.cond)
        yield from walk_expr(e.then)
        yield from walk_expr(e.other)
    elif isinstance(e, Cast):
        yield from walk_expr(e.operand)


def assigned_vars(stmts: tuple[Stmt, ...]) -> list[str]:
    """Variables written anywhere in ``stmts`` (declarations count), in first-write order."""
    out: list[str] = []
    for s in walk_stmts(stmts):
        name = s.target if isinstance(s, Assign) else s.name if isinstance(s, Decl) else None
        if name is not None and name not in out:
            out.append(name)
    return out

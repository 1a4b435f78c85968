"""Concrete small-step interpreter for typed programs.

The interpreter is written directly against Python integers and does not
reuse the solver's evaluator, so it can serve as an independent oracle for
the SSA encoding.  Values are kept in the natural range of their type
(signed types as negative numbers).

Nondeterminism is resolved by a callback ``choose(key, type)`` where
``key`` identifies the choice point:

* ``("nondet", site, path)`` for an intrinsic call,
* ``("init", name, path)`` for a declaration without initializer,

and ``path`` lists the 0-based iteration counters of the enclosing loop
instances, outermost first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from kiwi.bvtypes import BOOL, BvType
from kiwi.frontend import ast as A
from kiwi.frontend.printer import expr_text

Chooser = Callable[[tuple, BvType], int]


@dataclass
class Step:
    """One executed statement and the variable values right after it."""

    kind: str
    text: str
    line: int
    env: dict[str, int]
    head_passes: int


@dataclass
class LoopVisit:
    loop: int
    path: tuple[int, ...]
    env: dict[str, int]
    head_passes: int


@dataclass
class Execution:
    status: str  # "ok" | "violation" | "blocked" | "fuel"
    env: dict[str, int]
    steps: list[Step] = field(default_factory=list)
    failed_assert: int | None = None
    head_passes: int = 0
    loop_visits: list[LoopVisit] = field(default_factory=list)
    choices: dict[tuple, int] = field(default_factory=dict)


class _Stop(Exception):
    def __init__(self, status: str) -> None:
        self.status = status


def _signed(v: int, w: int) -> int:
    v &= (1 << w) - 1
    return v - (1 << w) if v >> (w - 1) else v


def eval_expr(e: A.Expr, env: dict[str, int], nondet: Callable[[A.Nondet], int]) -> int:
    t = e.type
    assert t is not None, "program must be type-checked"
    if isinstance(e, A.IntLit):
        return t.wrap(e.value)
    if isinstance(e, A.Var):
        return env[e.name]
    if isinstance(e, A.Nondet):
        return t.wrap(nondet(e))
    if isinstance(e, A.Cast):
        v = eval_expr(e.operand, env, nondet)
        if t == BOOL:
            return int(v != 0)
        return t.wrap(v)
    if isinstance(e, A.Unary):
        v = eval_expr(e.operand, env, nondet)
        if e.op == "-":
            return t.wrap(-v)
        if e.op == "+":
            return v
        if e.op == "~":
            return t.wrap(~v)
        if e.op == "!":
            return int(not v)
        raise ValueError(e.op)
    if isinstance(e, A.Cond):
        c = eval_expr(e.cond, env, nondet)
        return eval_expr(e.then if c else e.other, env, nondet)
    if isinstance(e, A.Binary):
        op = e.op
        if op == "&&":
            return int(bool(eval_expr(e.left, env, nondet)) and bool(eval_expr(e.right, env, nondet)))
        if op == "||":
            return int(bool(eval_expr(e.left, env, nondet)) or bool(eval_expr(e.right, env, nondet)))
        a = eval_expr(e.left, env, nondet)
        b = eval_expr(e.right, env, nondet)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        if op == "<":
            return int(a < b)
        if op == "<=":
            return int(a <= b)
        if op == ">":
            return int(a > b)
        if op == ">=":
            return int(a >= b)
        w = t.width
        if op == "+":
            return t.wrap(a + b)
        if op == "-":
            return t.wrap(a - b)
        if op == "*":
            return t.wrap(a * b)
        if op in ("/", "%"):
            if b == 0:
                return t.wrap(-1) if op == "/" else a
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return t.wrap(q) if op == "/" else t.wrap(a - q * b)
        if op == "&":
            return t.wrap(a & b)
        if op == "|":
            return t.wrap(a | b)
        if op == "^":
            return t.wrap(a ^ b)
        if op in ("<<", ">>"):
            amount = b & ((1 << w) - 1)
            if op == "<<":
                return 0 if amount >= w else t.wrap(a << amount)
            if t.signed:
                return a >> min(amount, w)
            return 0 if amount >= w else a >> amount
        raise ValueError(op)
    raise TypeError(e)


class Interpreter:
    def __init__(self, program: A.Program, choose: Chooser, fuel: int = 100_000,
                 record_steps: bool = True, max_head_passes: int | None = None) -> None:
        if not program.typed:
            raise ValueError("interpreter needs a type-checked program")
        self.program = program
        self.choose = choose
        self.fuel = fuel
        self.record = record_steps
        self.max_head_passes = max_head_passes
        self.loop_ids = {id(w): i for i, w in enumerate(program.loops())}
        self.env: dict[str, int] = {}
        self.path: list[int] = []
        self.exe = Execution("ok", self.env)

    def _pick(self, key: tuple, t: BvType) -> int:
        v = t.wrap(self.choose(key, t))
        if t == BOOL:
            v &= 1
        self.exe.choices[key] = v
        return v

    def _nondet(self, e: A.Nondet) -> int:
        return self._pick(("nondet", e.site, tuple(self.path)), e.result)

    def _eval(self, e: A.Expr) -> int:
        return eval_expr(e, self.env, self._nondet)

    def _step(self, kind: str, text: str, pos: A.Pos) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise _Stop("fuel")
        if self.record:
            self.exe.steps.append(Step(kind, text, pos[0], dict(self.env), self.exe.head_passes))

    def run(self) -> Execution:
        try:
            self._block(self.program.body)
        except _Stop as stop:
            self.exe.status = stop.status
        self.exe.env = dict(self.env)
        return self.exe

    def _block(self, stmts: tuple[A.Stmt, ...]) -> None:
        for s in stmts:
            self._stmt(s)

    def _stmt(self, s: A.Stmt) -> None:
        if isinstance(s, A.Decl):
            if s.init is not None:
                self.env[s.name] = self._eval(s.init)
            else:
                self.env[s.name] = self._pick(("init", s.name, tuple(self.path)), s.vtype)
            self._step("decl", s.name, s.pos)
        elif isinstance(s, A.Assign):
            self.env[s.target] = self._eval(s.value)
            self._step("assign", f"{s.target} = {expr_text(s.value)}", s.pos)
        elif isinstance(s, A.Assume):
            ok = self._eval(s.cond)
            self._step("assume", expr_text(s.cond), s.pos)
            if not ok:
                raise _Stop("blocked")
        elif isinstance(s, A.Assert):
            ok = self._eval(s.cond)
            self._step("assert", expr_text(s.cond), s.pos)
            if not ok:
                self.exe.failed_assert = s.site
                raise _Stop("violation")
        elif isinstance(s, A.If):
            c = self._eval(s.cond)
            self._step("branch", f"if ({expr_text(s.cond)}) -> {'then' if c else 'else'}", s.pos)
            self._block(s.then if c else s.other)
        elif isinstance(s, A.While):
            lid = self.loop_ids[id(s)]
            self.path.append(0)
            while True:
                self.exe.head_passes += 1
                if self.max_head_passes is not None and self.exe.head_passes > self.max_head_passes:
                    raise _Stop("fuel")
                self.exe.loop_visits.append(
                    LoopVisit(lid, tuple(self.path), dict(self.env), self.exe.head_passes))
                c = self._eval(s.cond)
                self._step("loop-head", f"while ({expr_text(s.cond)}) -> {'enter' if c else 'exit'}", s.pos)
                if not c:
                    break
                self._block(s.body)
                self.path[-1] += 1
            self.path.pop()
        else:
            raise TypeError(s)


def execute(program: A.Program, choose: Chooser, fuel: int = 100_000, record_steps: bool = True,
            max_head_passes: int | None = None) -> Execution:
    return Interpreter(program, choose, fuel, record_steps, max_head_passes).run()


def random_chooser(rng, bias: float = 0.3) -> Chooser:
    """Random inputs, biased towards small magnitudes and type extremes."""

    def choose(key: tuple, t: BvType) -> int:
        r = rng.random()
        if r < bias:
            return rng.randint(-3, 10) if t.signed else rng.randint(0, 10)
        if r < bias + 0.1:
            return rng.choice([t.min_value, t.max_value, 0])
        return rng.randint(t.min_value, t.max_value)

    return choose

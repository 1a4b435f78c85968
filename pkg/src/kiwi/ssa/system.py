"""Guarded SSA encoding with cut loops and backward incremental unwinding.

Naming follows the listings the tool is compared against: ``base#n`` where
``n`` is a static location number shared by every copy of a statement, plus
an unwinding suffix ``%u`` (``%u.v`` for nested loops; an all-zero suffix is
omitted).  Loop heads get ``x#phi{h}``, free loop-back values ``x#lb{h}`` and
a select guard ``guard#ls{h}``.

Copies of a loop body are numbered from the bottom: copy 0 runs last before
the error check and copy ``k-1`` is the top copy, the only one whose head
multiplexer (``ls ? lb : entry``) is enabled.  Adding a copy inserts it on
top and stitches the old top head to the new copy's end, so every existing
constraint stays valid and only enable assumptions change.

Besides program values each path carries a *slack* counter (16-bit signed):
it starts at ``k`` and drops by one at each loop head pass, saturating below
zero.  An assertion instance reached with slack 0 fires at step ``k``;
instances with positive slack belong to earlier steps and make up ``P[k]``.
The top head resets the slack to ``k-1`` when it takes the loop-back branch,
so instances below a havocked head are also placed correctly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from kiwi.bvtypes import BOOL, BvType
from kiwi.frontend import ast as A
from kiwi.solver import bv
from kiwi.solver.bv import BvExpr

SLACK = BvType.internal(True, 16)
MAX_K = SLACK.max_value - 1

Path = tuple[int, ...]


def suffix(path: Path) -> str:
    return "%" + ".".join(map(str, path)) if any(path) else ""


def dec(s: BvExpr) -> BvExpr:
    """One head pass: decrement, saturating once negative."""
    zero = bv.const(0, SLACK)
    return bv.ite(bv.slt(s, zero), s, bv.sub(s, bv.const(1, SLACK)))


@dataclass
class Constraint:
    """One asserted formula ``enable ==> expr`` (or plain ``expr``).

    ``kind`` classifies the constraint for the dump views: ``def`` (program
    values and guards), ``mux`` (top loop head), ``stitch``, ``merge``,
    ``slack`` (step bookkeeping), ``select`` (invariant point selectors).
    """

    expr: BvExpr
    kind: str = "def"
    enable: BvExpr | None = None
    comment: str = ""

    @property
    def formula(self) -> BvExpr:
        return bv.implies(self.enable, self.expr) if self.enable is not None else self.expr


@dataclass
class AssertionInstance:
    site: int
    guard: BvExpr
    prop: BvExpr
    slack: BvExpr
    path: Path
    pos: A.Pos = (0, 0)

    @property
    def text(self) -> str:
        return f"{bv.to_text(self.guard)} ==> {bv.to_text(self.prop)}"


@dataclass
class Copy:
    """One body copy of a loop instance."""

    index: int
    path: Path
    head: dict[str, BvExpr]
    head_guard: BvExpr
    head_slack: BvExpr
    body_guard: BvExpr
    exit_guard: BvExpr
    end: dict[str, BvExpr] = field(default_factory=dict)
    end_guard: BvExpr = bv.FALSE
    end_slack: BvExpr = bv.const(0, SLACK)
    lb: dict[str, BvExpr] = field(default_factory=dict)
    ls: BvExpr | None = None


@dataclass
class LoopInfo:
    """Static description of one ``while`` statement."""

    id: int
    node: A.While
    head_loc: int
    body_loc: int
    exit_loc: int
    variables: list[str]
    types: dict[str, BvType]
    depth: int


@dataclass
class LoopInstance:
    """A loop as it occurs in one copy of its enclosing loops."""

    loop: LoopInfo
    outer: Path
    entry: dict[str, BvExpr]
    entry_guard: BvExpr
    entry_slack: BvExpr
    copies: list[Copy] = field(default_factory=list)
    out: dict[str, BvExpr] = field(default_factory=dict)
    out_guard: BvExpr = bv.FALSE
    out_slack: BvExpr = bv.const(0, SLACK)

    @property
    def top(self) -> Copy:
        return self.copies[-1]

    def label(self) -> str:
        return f"loop{self.loop.id}{suffix(self.outer)}"


class SsaSystem:
    """The incrementally growing constraint system of one program."""

    def __init__(self, program: A.Program) -> None:
        if not program.typed:
            raise ValueError("encode needs a type-checked program")
        self.program = program
        self.k = 0
        self.constraints: list[Constraint] = []
        self.assertions: list[AssertionInstance] = []
        self.enables: list[BvExpr] = []
        self.instances: list[LoopInstance] = []
        self.loops: list[LoopInfo] = []
        self.start_slack = bv.var("slack#start", SLACK)
        self._loop_of: dict[int, LoopInfo] = {}
        self._locs: dict[tuple[int, str], int] = {}
        self._used: set[tuple[str, int]] = set()
        self._loc = 0
        self._types = program.variables()
        self._guard_vars: set[str] = set()
        # (kind, site or name, path, variable) for every nondeterministic value
        self.choice_points: list[tuple[str, object, Path, BvExpr]] = []

    # -- naming ----------------------------------------------------------------
    def _number(self, node: object, role: str, base: str | None = None, fresh: bool = False) -> int:
        key = (id(node), role)
        n = self._locs.get(key)
        if n is None:
            if fresh or base is None or (base, self._loc) in self._used:
                self._loc += 1
            n = self._loc
            if base is not None:
                self._used.add((base, n))
            self._locs[key] = n
        return n

    @staticmethod
    def name(base: str, n: int | str, path: Path) -> str:
        return f"{base}#{n}{suffix(path)}"

    def _var(self, base: str, n: int | str, path: Path, t: BvType) -> BvExpr:
        return bv.var(self.name(base, n, path), t)

    def _guard(self, n: int | str, path: Path) -> BvExpr:
        g = self._var("guard", n, path, BOOL)
        self._guard_vars.add(g.name)
        return g

    def add(self, expr: BvExpr, kind: str = "def", enable: BvExpr | None = None, comment: str = "") -> None:
        if expr is bv.TRUE:
            return
        self.constraints.append(Constraint(expr, kind, enable, comment))

    def define(self, v: BvExpr, value: BvExpr, kind: str = "def", enable: BvExpr | None = None,
               comment: str = "") -> BvExpr:
        self.add(bv.eq(v, value), kind, enable, comment)
        return v

    def enable(self, j: int) -> BvExpr:
        while len(self.enables) <= j:
            self.enables.append(bv.var(f"enable#{len(self.enables)}", BOOL))
        return self.enables[j]

    @property
    def active(self) -> BvExpr:
        return self.enable(self.k - 1)

    # -- expressions -----------------------------------------------------------
    def lower(self, e: A.Expr, env: dict[str, BvExpr], path: Path) -> BvExpr:
        t = e.type
        if isinstance(e, A.IntLit):
            return bv.const(e.value, t)
        if isinstance(e, A.Var):
            return env[e.name]
        if isinstance(e, A.Nondet):
            x = self._var(f"nondet{e.site}", self._number(e, "nondet", f"nondet{e.site}"), path, t)
            self.choice_points.append(("nondet", e.site, path, x))
            return x
        if isinstance(e, A.Cast):
            a = self.lower(e.operand, env, path)
            return bv.to_bool(a) if t == BOOL else bv.cast(a, t)
        if isinstance(e, A.Unary):
            if e.op == "-" and isinstance(e.operand, A.IntLit):
                return bv.const(-e.operand.value, t)
            a = self.lower(e.operand, env, path)
            return {"-": bv.neg, "~": bv.bvnot, "!": bv.bnot, "+": lambda x: x}[e.op](a)
        if isinstance(e, A.Cond):
            return bv.ite(self.lower(e.cond, env, path), self.lower(e.then, env, path),
                          self.lower(e.other, env, path))
        if isinstance(e, A.Binary):
            a = self.lower(e.left, env, path)
            b = self.lower(e.right, env, path)
            return lower_binary(e.op, a, b, e.left.type)
        raise TypeError(e)

    # -- statements ------------------------------------------------------------
    def block(self, stmts: tuple[A.Stmt, ...], env: dict[str, BvExpr], g: BvExpr, s: BvExpr,
              path: Path) -> tuple[dict[str, BvExpr], BvExpr, BvExpr]:
        for st in stmts:
            env, g, s = self.stmt(st, env, g, s, path)
        return env, g, s

    def stmt(self, st: A.Stmt, env: dict[str, BvExpr], g: BvExpr, s: BvExpr,
             path: Path) -> tuple[dict[str, BvExpr], BvExpr, BvExpr]:
        if isinstance(st, A.Decl):
            env = dict(env)
            n = self._number(st, "def", st.name)
            v = self._var(st.name, n, path, st.vtype)
            if st.init is not None:
                self.define(v, self.lower(st.init, env, path))
            else:
                self.choice_points.append(("init", st.name, path, v))
            env[st.name] = v
            return env, g, s
        if isinstance(st, A.Assign):
            value = self.lower(st.value, env, path)
            n = self._number(st, "def", st.target)
            env = dict(env)
            env[st.target] = self.define(self._var(st.target, n, path, self._types[st.target]), value)
            return env, g, s
        if isinstance(st, A.Assume):
            c = self.lower(st.cond, env, path)
            n = self._number(st, "guard", fresh=True)
            return env, self.define(self._guard(n, path), bv.band(c, g)), s
        if isinstance(st, A.Assert):
            c = self.lower(st.cond, env, path)
            self.assertions.append(AssertionInstance(st.site, g, c, s, path, st.pos))
            # later statements only see paths on which the assertion held
            return env, bv.band(c, g), s
        if isinstance(st, A.If):
            return self._if(st, env, g, s, path)
        if isinstance(st, A.While):
            return self._while(st, env, g, s, path)
        raise TypeError(st)

    def _if(self, st: A.If, env, g, s, path):
        c = self.lower(st.cond, env, path)
        nt = self._number(st, "then", fresh=True)
        g_then = self.define(self._guard(nt, path), bv.band(c, g))
        env_t, gt_end, s_t = self.block(st.then, env, g_then, s, path)
        if st.other:
            ne = self._number(st, "else", fresh=True)
            g_else = self.define(self._guard(ne, path), bv.band(bv.bnot(c), g))
            env_e, ge_end, s_e = self.block(st.other, env, g_else, s, path)
        else:
            g_else = bv.band(bv.bnot(c), g)
            env_e, ge_end, s_e = env, g_else, s
        m = self._number(st, "merge", fresh=True)
        out = {}
        for name, v in env.items():
            a, b = env_t[name], env_e[name]
            if a is b:
                out[name] = a
            else:
                out[name] = self.define(self._var(name, f"phi{m}", path, a.type), bv.ite(g_then, a, b))
        if gt_end is g_then and ge_end is g_else:
            g_out = g
        else:
            g_out = self.define(self._guard(m, path), bv.bor(gt_end, ge_end))
        if s_t is s_e:
            s_out = s_t
        else:
            s_out = self.define(bv.var(self.name("slack", f"phi{m}", path), SLACK),
                                bv.ite(g_then, s_t, s_e), "slack")
        return out, g_out, s_out

    # -- loops -----------------------------------------------------------------
    def _loop_info(self, st: A.While, env: dict[str, BvExpr], path: Path) -> LoopInfo:
        info = self._loop_of.get(id(st))
        if info is None:
            h = self._number(st, "head", fresh=True)
            b = self._number(st, "body", fresh=True)
            written = set(A.assigned_vars(st.body))
            names = [v for v in self._types if v in written and v in env]
            info = LoopInfo(len(self.loops), st, h, b, -1, names,
                            {v: self._types[v] for v in names}, len(path))
            self.loops.append(info)
            self._loop_of[id(st)] = info
        return info

    def _while(self, st: A.While, env, g, s, path):
        info = self._loop_info(st, env, path)
        inst = LoopInstance(info, path, dict(env), g, s)
        self.instances.append(inst)
        # build top-down: copy k-1 first, then the stitched lower copies
        for j in reversed(range(self.k)):
            self._add_copy(inst, j, stitch=j < self.k - 1)
        if info.exit_loc < 0:
            info.exit_loc = self._number(st, "exit", fresh=True)
        e = info.exit_loc
        inst.out = {v: self._var(v, f"out{e}", path, info.types[v]) for v in info.variables}
        inst.out_guard = self._guard(f"out{e}", path)
        inst.out_slack = bv.var(self.name("slack", f"out{e}", path), SLACK)
        self._bind_outputs(inst)
        out_env = {name: inst.out.get(name, v) for name, v in env.items()}
        return out_env, inst.out_guard, inst.out_slack

    def _add_copy(self, inst: LoopInstance, j: int, stitch: bool) -> Copy:
        """Encode body copy ``j`` of ``inst``; with ``stitch`` copy ``j`` feeds copy ``j-1``."""
        info = inst.loop
        p = inst.outer + (j,)
        h = info.head_loc
        head = {v: self._var(v, f"phi{h}", p, info.types[v]) for v in info.variables}
        hg = self._guard(h, p)
        hs = bv.var(self.name("slack", h, p), SLACK)
        env = dict(inst.entry)
        env.update(head)
        cond = self.lower(info.node.cond, env, p)
        copy = Copy(j, p, head, hg, hs, self._guard(info.body_loc, p), bv.FALSE)
        if not stitch:
            self._head_mux(inst, copy)
        self.define(copy.body_guard, bv.band(cond, hg))
        end_env, end_guard, end_slack = self.block(info.node.body, env, copy.body_guard, hs, p)
        copy.end = {v: end_env[v] for v in info.variables}
        copy.end_guard = end_guard
        copy.end_slack = end_slack
        if info.exit_loc < 0:
            info.exit_loc = self._number(info.node, "exit", fresh=True)
        copy.exit_guard = self.define(self._guard(info.exit_loc, p), bv.band(bv.bnot(cond), hg))
        # copies are created top-down; link the previous top to this one
        if inst.copies and inst.copies[0].index == j + 1:
            self._stitch(inst.copies[0], copy)
        inst.copies.insert(0, copy) if not inst.copies or inst.copies[0].index > j else inst.copies.append(copy)
        return copy

    def _head_mux(self, inst: LoopInstance, copy: Copy) -> None:
        info = inst.loop
        en = self.enable(copy.index)
        h = info.head_loc
        p = copy.path
        copy.ls = self._guard(f"ls{h}", p)
        copy.lb = {v: self._var(v, f"lb{h}", p, info.types[v]) for v in info.variables}
        self.define(copy.head_guard, inst.entry_guard, "mux", en)
        for v in info.variables:
            self.define(copy.head[v], bv.ite(copy.ls, copy.lb[v], inst.entry[v]), "mux", en)
        self.define(copy.head_slack, bv.ite(copy.ls, bv.const(copy.index, SLACK), dec(inst.entry_slack)),
                    "slack", en)

    def _stitch(self, upper: Copy, lower: Copy) -> None:
        """Feed the end of ``upper`` into the head of ``lower`` (permanently)."""
        self.define(lower.head_guard, upper.end_guard, "stitch")
        for v, x in lower.head.items():
            self.define(x, upper.end[v], "stitch")
        self.define(lower.head_slack, dec(upper.end_slack), "slack")

    def _bind_outputs(self, inst: LoopInstance) -> None:
        """Merge exit values of all copies and bind them under the active enable."""
        vals = {v: inst.entry[v] for v in inst.loop.variables}
        guard, slack = bv.FALSE, bv.const(0, SLACK)
        for c in inst.copies:
            for v in vals:
                vals[v] = c.head[v] if guard is bv.FALSE else bv.ite(c.exit_guard, c.head[v], vals[v])
            slack = c.head_slack if guard is bv.FALSE else bv.ite(c.exit_guard, c.head_slack, slack)
            guard = c.exit_guard if guard is bv.FALSE else bv.bor(c.exit_guard, guard)
        en = self.active
        for v, x in inst.out.items():
            self.define(x, vals[v], "merge", en)
        self.define(inst.out_guard, guard, "merge", en)
        self.define(inst.out_slack, slack, "slack", en)

    # -- top level ---------------------------------------------------------------
    def encode(self) -> "SsaSystem":
        assert self.k == 0
        self.k = 1
        en = self.enable(0)
        g0 = self._guard(0, ())
        self.define(g0, bv.TRUE)
        self.define(self.start_slack, bv.const(1, SLACK), "slack", en)
        self.block(self.program.body, {}, g0, self.start_slack, ())
        return self

    def unwind(self) -> list[Constraint]:
        """Insert one more copy on top of every loop instance; returns the new constraints."""
        if self.k >= MAX_K:
            raise OverflowError("unwinding limit reached")
        before = len(self.constraints)
        j = self.k
        self.k += 1
        en = self.enable(j)
        self.define(self.start_slack, bv.const(self.k, SLACK), "slack", en)
        for inst in list(self.instances):
            if len(inst.copies) >= self.k:
                continue  # created during this round with all copies
            old_top = inst.top
            copy = self._add_copy(inst, j, stitch=False)
            self._stitch(copy, old_top)
            self._bind_outputs(inst)
        return self.constraints[before:]

    # -- queries ----------------------------------------------------------------
    def enable_assumptions(self) -> list[BvExpr]:
        return [self.active] + [bv.bnot(e) for e in self.enables[: self.k - 1]]

    def top_copies(self) -> list[tuple[LoopInstance, Copy]]:
        return [(i, i.top) for i in self.instances]

    def start_assumptions(self) -> list[BvExpr]:
        """``Start``: every loop is entered from its entry, never from a loop-back value."""
        return [bv.bnot(c.ls) for _, c in self.top_copies()]

    def error_at_slack(self, level: int) -> BvExpr:
        lv = bv.const(level, SLACK)
        return bv.disj(bv.band(a.guard, bv.eq(a.slack, lv), bv.bnot(a.prop)) for a in self.assertions)

    def err(self) -> BvExpr:
        """``Err(x_k)``: some assertion fails at step ``k``."""
        return self.error_at_slack(0)

    def no_earlier_errors(self) -> list[BvExpr]:
        """One ``P[k]`` conjunct per assertion instance: no failure at a step before ``k``."""
        zero = bv.const(0, SLACK)
        return [bv.implies(bv.band(a.guard, bv.slt(zero, a.slack)), a.prop) for a in self.assertions]

    def loop_instances(self, loop: LoopInfo) -> list[LoopInstance]:
        return [i for i in self.instances if i.loop is loop]


def lower_binary(op: str, a: BvExpr, b: BvExpr, operand_type: BvType | None) -> BvExpr:
    signed = operand_type.signed if operand_type is not None else a.signed
    if op == "&&":
        return bv.band(a, b)
    if op == "||":
        return bv.bor(a, b)
    if op == "==":
        return bv.eq(a, b)
    if op == "!=":
        return bv.ne(a, b)
    if op == "<":
        return bv.lt(a, b, signed)
    if op == "<=":
        return bv.le(a, b, signed)
    if op == ">":
        return bv.lt(b, a, signed)
    if op == ">=":
        return bv.le(b, a, signed)
    if op in ("+", "*", "&", "|", "^"):
        a, b = canonical_pair(a, b)
        name = {"+": "add", "*": "mul", "&": "and", "|": "or", "^": "xor"}[op]
        return bv.binop(name, a, b)
    if op == "-":
        return bv.sub(a, b)
    if op == "/":
        return bv.sdiv(a, b) if signed else bv.udiv(a, b)
    if op == "%":
        return bv.srem(a, b) if signed else bv.urem(a, b)
    if op == "<<":
        return bv.binop("shl", a, b)
    if op == ">>":
        return bv.binop("ashr" if signed else "lshr", a, b)
    raise ValueError(op)


def canonical_pair(a: BvExpr, b: BvExpr) -> tuple[BvExpr, BvExpr]:
    """Order commutative operands: constants first, then variables by name."""
    if b.is_const and not a.is_const:
        return b, a
    if a.op == "var" and b.op == "var" and b.name < a.name:
        return b, a
    return a, b


def encode(p: A.Program) -> SsaSystem:
    return SsaSystem(p).encode()

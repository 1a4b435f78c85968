"""Independent oracles: concrete execution, exhaustive search and model checks.

Nothing here calls the inference or engine code; the SSA side is only read
through a solver model with every nondeterministic value pinned.
"""

from __future__ import annotations

import itertools
from pathlib import Path

from kiwi.bvtypes import BOOL, BvType
from kiwi.frontend import load
from kiwi.frontend.interp import Execution, execute
from kiwi.solver import bv
from kiwi.solver.context import SolverContext
from kiwi.ssa.system import SsaSystem, encode

CORPUS = Path(__file__).resolve().parent.parent / "src" / "kiwi" / "corpus"


def corpus_program(name: str):
    return load((CORPUS / name).read_text())


def unwound(p, k: int) -> SsaSystem:
    s = encode(p)
    while s.k < k:
        s.unwind()
    return s


def _natural(value: int, t: BvType) -> int:
    return t.wrap(value)


def check_run_against_ssa(p, exe: Execution) -> list[str]:
    """Mismatches between a concrete run and the SSA system at unwinding ``h+1``.

    The run's choices and ``Start`` are asserted; the SSA is then
    deterministic, so one model decides every loop head value and every
    assertion.  An empty list means the run is contained in the encoding.
    """
    h = exe.head_passes
    k = max(1, h + 1)
    s = unwound(p, k)
    pins = []
    for kind, ident, path, x in s.choice_points:
        key = (kind, ident, tuple(k - 1 - u for u in path))
        if key in exe.choices:
            pins.append(bv.eq(x, bv.const(x.type.wrap(exe.choices[key]), x.type)))
    with SolverContext() as ctx:
        for c in s.constraints:
            ctx.assert_expr(c.formula)
        res = ctx.solve(s.enable_assumptions() + s.start_assumptions() + pins)
        if not res.sat:
            return [f"no SSA model for a run with {h} head passes"]
        m = res.model
    problems = []
    copies = {(inst.loop.id, c.path): c for inst in s.instances for c in inst.copies}
    for visit in exe.loop_visits:
        path = tuple(k - 1 - i for i in visit.path)
        c = copies.get((visit.loop, path))
        if c is None:
            problems.append(f"no copy for loop {visit.loop} at {visit.path}")
            continue
        if not m.eval(c.head_guard):
            problems.append(f"head guard of loop {visit.loop} at {visit.path} is false")
        for v, x in c.head.items():
            want = _natural(visit.env[v], x.type)
            got = m.eval_signed(x)
            if got != want:
                problems.append(f"loop {visit.loop} at {visit.path}: {v} is {got} in SSA, {want} concretely")
    if exe.status == "violation":
        hit = [a.site for a in s.assertions
               if m.eval(a.guard) and not m.eval(a.prop) and m.eval_signed(a.slack) == k - h]
        if exe.failed_assert not in hit:
            problems.append(f"assertion {exe.failed_assert} does not fail in SSA at slack {k - h}")
    elif exe.status in ("ok", "blocked"):
        for a in s.assertions:
            if m.eval(a.guard) and not m.eval(a.prop):
                problems.append(f"assertion {a.site} fails in SSA but not concretely")
    return problems


def small_values(t: BvType) -> list[int]:
    if t == BOOL:
        return [0, 1]
    if t.width <= 4:
        return list(range(t.min_value, t.max_value + 1))
    return sorted({0, 1, 2, t.max_value, t.min_value, -1 if t.signed else 3})


def shortest_violation(p, max_passes: int, values=small_values, limit: int = 200_000) -> int | None:
    """Fewest loop head passes of any failing run, searching choice trees depth-first.

    Choices range over ``values(type)``; with only Boolean or small-typed
    choices the search is exhaustive up to ``max_passes``.
    """
    best: int | None = None
    runs = 0
    stack: list[tuple[tuple[int, ...]]] = [()]
    while stack:
        prefix = stack.pop()
        runs += 1
        if runs > limit:
            raise RuntimeError("search limit exceeded")
        taken: list[tuple[tuple, BvType]] = []

        def choose(key, t, prefix=prefix, taken=taken):
            i = len(taken)
            taken.append((key, t))
            return prefix[i] if i < len(prefix) else values(t)[0]

        exe = execute(p, choose, record_steps=False, max_head_passes=max_passes)
        if exe.status == "violation" and (best is None or exe.head_passes < best):
            best = exe.head_passes
        for i in range(len(prefix), len(taken)):
            opts = values(taken[i][1])
            base = list(prefix) + [values(t)[0] for _, t in taken[len(prefix):i]]
            for o in opts[1:]:
                stack.append(tuple(base + [o]))
    return best


def all_assignments(types: dict[str, BvType]):
    names = sorted(types)
    for combo in itertools.product(*(range(types[n].min_value, types[n].max_value + 1) for n in names)):
        yield dict(zip(names, combo))

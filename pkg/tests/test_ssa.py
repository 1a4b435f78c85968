import random
import re
from pathlib import Path

import pytest

from kiwi.frontend import load
from kiwi.frontend.interp import execute, random_chooser
from kiwi.solver import bv
from kiwi.solver.context import SolverContext
from kiwi.ssa import build_check, encode, full_view, match_up_to_naming, program_view
from kiwi.ssa.checks import CONCRETE, INDUCTION_STEP, INITIAL
from oracles import CORPUS, check_run_against_ssa, corpus_program, unwound

GOLDEN = Path(__file__).resolve().parent / "golden"
CORPUS_NAMES = sorted(p.name for p in CORPUS.glob("*.c"))


def _golden(name):
    return [l for l in (GOLDEN / name).read_text().splitlines() if l.strip()]


def test_count10_program_view_matches_golden_listing():
    s = encode(corpus_program("count10.c"))
    ok, why = match_up_to_naming(program_view(s), _golden("count10.ssa"))
    assert ok, why


def test_golden_match_rejects_a_changed_constant():
    s = encode(corpus_program("count10.c"))
    lines = [l.replace("10u", "11u", 1) if "<" in l else l for l in program_view(s)]
    assert not match_up_to_naming(lines, _golden("count10.ssa"))[0]


def test_golden_match_rejects_inconsistent_renaming():
    a = ["x#1 == 0", "y#1 == x#1"]
    assert not match_up_to_naming(a, ["x#1 == 0", "y#1 == x#2"])[0]


_NEG_CHAIN_KEYS = [
    r"^[wxyz]#phi\d+ == \(guard#ls",
    r"^z#\d+ == -y#phi", r"^y#\d+ == -x#phi", r"^w#\d+ == 1 \+ w#phi", r"^x#\d+ == w#\d+ \+ x#phi",
    r"^w#\d+ == w#\d+ / 3$", r"^w#phi\d+ == \(guard",
    r"^z#\d+ == 0$", r"^y#\d+ == z#\d+$", r"^x#\d+ == y#\d+$",
    r"^[xyz]#phi\d+ == \(guard#\d+ \? [xyz]#\d+ : [xyz]#\d+\)$",
    r"==> 3 \+ z#phi\d+ >= x#phi\d+$",
]


def test_neg_chain_key_lines_match_up_to_naming():
    s = encode(corpus_program("neg_chain.c"))
    view = program_view(s)
    keys = [l for l in view if any(re.search(p, l) for p in _NEG_CHAIN_KEYS)]
    ok, why = match_up_to_naming(keys, _golden("neg_chain_body.ssa"))
    assert ok, why + "\n" + "\n".join(keys)


def test_neg_chain_guard_after_infinite_loop_is_false():
    view = program_view(encode(corpus_program("neg_chain.c")))
    assert any(re.fullmatch(r"guard#\d+ == FALSE", l) for l in view)


def test_loop_back_values_are_free_variables():
    s = encode(corpus_program("count10.c"))
    defined = {c.expr.args[0].name for c in s.constraints if c.expr.op == "eq" and c.expr.args[0].op == "var"}
    top = s.instances[0].top
    assert all(x.name not in defined for x in top.lb.values())
    assert top.ls.name not in defined


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_unwinding_only_appends_constraints(name):
    s = encode(corpus_program(name))
    for _ in range(3):
        before = list(s.constraints)
        s.unwind()
        assert s.constraints[: len(before)] == before


def _enabled_definitions(s):
    active = s.active
    for c in s.constraints:
        if c.enable is not None and c.enable is not active:
            continue
        e = c.expr
        if e.op == "eq" and e.args[0].op == "var":
            yield e.args[0].name, set(bv.free_vars(e.args[1]))


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_enabled_definitions_are_acyclic_and_unique(name):
    s = encode(corpus_program(name))
    for _ in range(4):
        defs: dict[str, set[str]] = {}
        for lhs, deps in _enabled_definitions(s):
            assert lhs not in defs, f"{lhs} defined twice at k={s.k}"
            defs[lhs] = deps
        state: dict[str, int] = {}

        def visit(v, trail=()):
            if state.get(v) == 2 or v not in defs:
                return
            assert state.get(v) != 1, f"cycle through {v} at k={s.k}"
            state[v] = 1
            for d in defs[v]:
                visit(d)
            state[v] = 2

        for v in defs:
            visit(v)
        s.unwind()


def test_guards_defined_once_per_unwinding():
    s = unwound(corpus_program("nested.c"), 3)
    names = [lhs for lhs, _ in _enabled_definitions(s) if lhs.startswith("guard#")]
    assert len(names) == len(set(names))


def test_enable_literals_switch_old_tops_off():
    s = unwound(corpus_program("count10.c"), 3)
    assumptions = s.enable_assumptions()
    assert assumptions[0] is s.enables[2]
    assert [a.args[0] for a in assumptions[1:]] == s.enables[:2]


def test_full_view_lists_enables():
    s = unwound(corpus_program("count10.c"), 2)
    text = "\n".join(full_view(s))
    assert "enable#0 ==> (" in text and "enable#1 ==> (" in text


def test_nondet_variables_are_named_by_site():
    s = encode(load("void main(){ int x = __VERIFIER_nondet_int(); assert(x != 3); }"))
    kinds = [(k, ident) for k, ident, _, _ in s.choice_points]
    assert kinds == [("nondet", 1)]
    assert s.choice_points[0][3].name.startswith("nondet1#")


def _solve(s, goal, assumptions):
    with SolverContext() as ctx:
        for c in s.constraints:
            ctx.assert_expr(c.formula)
        return ctx.solve(list(assumptions) + [goal]).sat


def test_checks_on_count10():
    s = encode(corpus_program("count10.c"))
    assert not _solve(s, *build_check(s, INITIAL))
    # without an invariant the step check at k=1 finds x#lb > 10
    assert _solve(s, *build_check(s, INDUCTION_STEP))
    assert not _solve(s, *build_check(s, CONCRETE))


def test_initial_check_finds_assertion_before_loops():
    s = encode(corpus_program("assert0.c"))
    assert _solve(s, *build_check(s, INITIAL))


# -- loop-free exactness -----------------------------------------------------------

_OPS = ["+", "-", "*", "&", "|", "^", "/", "%"]


def _random_straight_program(rng):
    lines = ["unsigned char a = __VERIFIER_nondet_uchar();", "unsigned char b = 7;"]
    for _ in range(rng.randint(2, 5)):
        op = rng.choice(_OPS)
        tgt = rng.choice("ab")
        if rng.random() < 0.4:
            lines.append(f"if (a {rng.choice(['<', '>', '==', '!='])} {rng.randint(0, 255)}) "
                         f"{{ {tgt} = a {op} b; }} else {{ {tgt} = b {op} {rng.randint(1, 9)}; }}")
        else:
            lines.append(f"{tgt} = {rng.choice('ab')} {op} {rng.randint(1, 9)};")
    lines.append(f"assert(b != {rng.randint(0, 255)} || a < {rng.randint(0, 255)});")
    return "void main() { " + " ".join(lines) + " }"


@pytest.mark.parametrize("seed", range(12))
def test_loop_free_encoding_is_exact(seed):
    """For straight-line code the SSA admits exactly the concrete runs."""
    rng = random.Random(seed)
    p = load(_random_straight_program(rng))
    s = encode(p)
    (_, _, _, a), = s.choice_points
    with SolverContext() as ctx:
        for c in s.constraints:
            ctx.assert_expr(c.formula)
        err = s.err() if s.k else bv.FALSE
        goal, assumptions = build_check(s, INITIAL)
        for v in range(256):
            exe = execute(p, lambda key, t: v)
            res = ctx.solve(assumptions + [goal, bv.eq(a, bv.const(v, a.type))])
            assert res.sat == (exe.status == "violation"), v
        assert err is not None


# -- over-approximation --------------------------------------------------------------

@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_random_runs_satisfy_the_encoding(name):
    p = corpus_program(name)
    rng = random.Random(name)
    for _ in range(3):
        exe = execute(p, random_chooser(rng), max_head_passes=8)
        assert check_run_against_ssa(p, exe) == []


def test_run_check_detects_a_wrong_value():
    """Negative control: a corrupted concrete state must be reported."""
    p = corpus_program("count10.c")
    exe = execute(p, lambda k, t: 0)
    exe.loop_visits[3].env["x"] += 1
    assert check_run_against_ssa(p, exe)


def test_run_check_detects_a_wrong_verdict():
    p = corpus_program("count3_bug.c")
    exe = execute(p, lambda k, t: 0)
    assert exe.status == "violation"
    exe.status = "ok"
    assert check_run_against_ssa(p, exe)

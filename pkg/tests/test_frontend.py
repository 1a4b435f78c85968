import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kiwi.bvtypes import I8, I32, U8, U32
from kiwi.frontend import Diagnostic, load, parse, pretty
from kiwi.frontend import ast as A
from kiwi.frontend.interp import execute, random_chooser
from oracles import CORPUS

CORPUS_FILES = sorted(CORPUS.glob("*.c"))


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.name)
def test_parse_pretty_parse_is_identity(path):
    p = parse(path.read_text())
    assert parse(pretty(p)) == p


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.name)
def test_corpus_typechecks(path):
    assert load(path.read_text()).typed


@pytest.mark.parametrize("src,code", [
    ("void main(){ int x; x = y; }", A.UNKNOWN_ID),
    ("void main(){ for(;;); }", A.UNSUPPORTED),
    ("void main(){ int x; int x; }", A.REDECLARED),
    ("void main(){ unsigned char c = 300; }", A.LITERAL_OVERFLOW),
    ("void main(){ int a; unsigned b; assert(a < b); }", A.MIXED_SIGN),
    ("void main(){ int x = }", A.SYNTAX),
])
def test_diagnostics(src, code):
    with pytest.raises(Diagnostic) as err:
        load(src)
    assert err.value.code == code


def test_block_scoping_allows_sibling_redeclaration():
    load("void main(){ int a = 0; if (a) { int t = 1; } else { int u = 2; } }")


def _run(src, choices=None):
    return execute(load(src), lambda key, t: (choices or {}).get(key, 0))


def test_unsigned_wraps():
    exe = _run("void main(){ unsigned char x = 250; x = x + 10; }")
    assert exe.env["x"] == 4


def test_signed_wraps_to_negative():
    exe = _run("void main(){ signed char x = 120; x = x + 10; }")
    assert exe.env["x"] == -126


def test_signed_division_truncates_towards_zero():
    exe = _run("void main(){ int a = -7; int q = a / 2; int r = a % 2; }")
    assert (exe.env["q"], exe.env["r"]) == (-3, -1)


def test_assert_failure_reports_site_and_head_passes():
    exe = _run("void main(){ int x = 0; while (x < 3) x++; assert(x != 3); }")
    assert exe.status == "violation"
    assert exe.failed_assert == 1
    assert exe.head_passes == 4


def test_assume_blocks():
    exe = _run("void main(){ int x = 0; __CPROVER_assume(x > 0); assert(0); }")
    assert exe.status == "blocked"


def test_choice_keys_carry_iteration_paths():
    src = "void main(){ int i = 0; while (i < 2) { int v = __VERIFIER_nondet_int(); i++; } }"
    exe = _run(src)
    assert ("nondet", 1, (0,)) in exe.choices
    assert ("nondet", 1, (1,)) in exe.choices


def test_uninitialised_declaration_is_a_choice():
    exe = _run("void main(){ int x; assert(x != 5); }", {("init", "x", ()): 5})
    assert exe.status == "violation"


def test_max_head_passes_stops_the_run():
    exe = execute(load("void main(){ while (1) { } }"), lambda k, t: 0, max_head_passes=5)
    assert exe.status == "fuel"
    assert exe.head_passes == 6


_OPS = ["+", "-", "*", "/", "%", "&", "|", "^"]


@settings(max_examples=200, deadline=None)
@given(st.integers(-128, 127), st.integers(-128, 127), st.sampled_from(_OPS))
def test_i8_arithmetic_matches_c_semantics(a, b, op):
    if op in "/%" and b == 0:
        return
    src = f"void main(){{ signed char a = {a}; signed char b = {b}; signed char c = a {op} b; }}"
    exe = _run(src)
    if op == "/":
        want = int(a / b)
    elif op == "%":
        want = a - int(a / b) * b
    else:
        want = eval(f"a {op} b")
    want = (want + 128) % 256 - 128
    assert exe.env["c"] == want


def test_random_chooser_stays_in_type_range():
    rng = random.Random(3)
    choose = random_chooser(rng)
    for t in (U8, I8, U32, I32):
        for _ in range(50):
            assert t.contains(t.wrap(choose(("nondet", 1, ()), t)))

import pytest

from kiwi.bvtypes import I8, I32, U8
from kiwi.domains import BOTTOM, INTERVALS, OCTAGONS, TOP, ZONES, AbstractValue, make_template
from kiwi.frontend import load
from kiwi.solver import bv
from kiwi.solver.context import check_sat
from kiwi.ssa import encode
from oracles import corpus_program

MIXED = """
void main() {
  unsigned char a = 0; unsigned char b = 0; signed char c = 0; int d = 0;
  while (a < 9) { a++; b = b + 2; c--; d++; }
}
"""


def _rows(kind, src=MIXED):
    return make_template(encode(load(src)), kind).rows


def _by_terms(rows):
    return {tuple(r.terms): r for r in rows}


def test_interval_rows_are_plus_and_minus_each_variable():
    rows = _by_terms(_rows(INTERVALS))
    assert set(rows) == {((v, s),) for v in "abcd" for s in (1, -1)}


def test_promoted_widths():
    rows = _by_terms(_rows(OCTAGONS))
    assert rows[(("a", 1),)].ptype.width == 9
    assert rows[(("d", -1),)].ptype.width == 33
    assert rows[(("a", 1), ("b", -1))].ptype.width == 9
    assert rows[(("a", 1), ("b", 1))].ptype.width == 10


def test_relational_rows_only_pair_identical_types():
    for kind in (ZONES, OCTAGONS):
        pairs = [r for r in _rows(kind) if len(r.terms) == 2]
        assert {frozenset(v for v, _ in r.terms) for r in pairs} == {frozenset("ab")}
    assert len([r for r in _rows(ZONES) if len(r.terms) == 2]) == 2
    assert len([r for r in _rows(OCTAGONS) if len(r.terms) == 2]) == 4


def test_row_extremes():
    rows = _by_terms(_rows(OCTAGONS))
    assert rows[(("a", 1),)].max_value() == 255
    assert rows[(("a", -1),)].max_value() == 0
    assert rows[(("c", -1),)].max_value() == 128
    assert rows[(("d", -1),)].max_value() == 2 ** 31
    assert rows[(("a", 1), ("b", -1))].max_value() == 255
    assert rows[(("a", -1), ("b", -1))].min_value() == -510


@pytest.mark.parametrize("t", [U8, I8])
def test_row_expression_is_exact_for_every_value(t):
    """The promoted row value equals the integer value for all 8-bit inputs."""
    src = f"void main() {{ {t} x = 0; while (x != 1) x = x + 1; }}"
    for r in _rows(INTERVALS, src):
        x = bv.var("xx", t)
        out = bv.var("out", r.ptype)
        for v in range(t.min_value, t.max_value + 1):
            res = check_sat([bv.eq(x, bv.const(t.wrap(v), t)), bv.eq(out, r.expr({"x": x}))])
            assert res.model.eval_signed(out) == r.evaluate({"x": v})


def test_negating_the_int_minimum_does_not_overflow():
    x = bv.var("x", I32)
    r = _by_terms(_rows(INTERVALS))[(("d", -1),)]
    out = bv.var("out", r.ptype)
    res = check_sat([bv.eq(x, bv.const(I32.wrap(-2 ** 31), I32)), bv.eq(out, r.expr({"d": x}))])
    assert res.model.eval_signed(out) == 2 ** 31


def test_bottom_and_top_encodings():
    t = make_template(encode(corpus_program("count10.c")))
    g, e = t.loopback_atoms(t.rows[0])[0]
    assert t._row_formula(g, e, TOP) is bv.TRUE
    assert t._row_formula(g, e, BOTTOM) is bv.bnot(g)
    assert t._row_formula(g, e, 5) is bv.implies(g, bv.sle(e, bv.const(5, e.type)))


def test_bottom_value_has_no_violation_when_all_rows_top():
    t = make_template(encode(corpus_program("count10.c")))
    assert t.violation(AbstractValue.top(len(t.rows))) is bv.FALSE


def test_lattice_order_and_join():
    a = AbstractValue((BOTTOM, 3, 7))
    b = AbstractValue((2, TOP, 5))
    j = a.join(b)
    assert j == AbstractValue((2, TOP, 7))
    assert a.leq(j) and b.leq(j)
    assert not j.leq(a)
    assert AbstractValue.bottom(3).leq(a)
    assert a.leq(AbstractValue.top(3))


def test_normalized_turns_maximal_bounds_into_top():
    t = make_template(encode(corpus_program("count10.c")))
    v = AbstractValue((t.rows[0].max_value(), -3)).normalized(t.rows)
    assert v == AbstractValue((TOP, -3))
    # -x of an unsigned variable never exceeds 0
    assert AbstractValue((9, 0)).normalized(t.rows) == AbstractValue((9, TOP))


def test_dump_format():
    t = make_template(encode(corpus_program("count10.c")))
    lines = t.dump(AbstractValue((10, 0))).splitlines()
    assert lines[0].endswith("x#lb1 <= 10") and " ==> " in lines[0]
    assert lines[1].endswith("<= 0") and "x#lb1" in lines[1]
    assert t.dump(AbstractValue((BOTTOM, TOP))).splitlines()[0].endswith("==> FALSE")


def test_unknown_domain_is_rejected():
    with pytest.raises(ValueError):
        make_template(encode(corpus_program("count10.c")), "polyhedra")


def test_loop_free_program_has_no_rows():
    assert make_template(encode(load("void main(){ int x = 1; assert(x); }"))).rows == []

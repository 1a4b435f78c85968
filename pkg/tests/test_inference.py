import random

import pytest

from kiwi.domains import BOTTOM, INTERVALS, OCTAGONS, TOP, ZONES, AbstractValue, make_template
from kiwi.engine import Config, Engine
from kiwi.frontend import load
from kiwi.frontend.interp import execute, random_chooser
from kiwi.inference import BINSEARCH, ENUM, Inductive, Inference, Violation
from kiwi.solver.context import SolverContext
from kiwi.ssa import encode
from oracles import corpus_program


class Harness:
    """One SSA system, template and solver, kept in sync like the engine does."""

    def __init__(self, p, kind=INTERVALS, **kw):
        self.s = encode(p)
        self.t = make_template(self.s, kind)
        self.ctx = SolverContext()
        self.synced = 0
        self.inf = Inference(self.t, self.ctx, self.standing, sync=self.sync, **kw)

    def standing(self):
        return self.s.enable_assumptions() + self.s.no_earlier_errors()

    def sync(self):
        for c in self.s.constraints[self.synced:]:
            self.ctx.assert_expr(c.formula)
        self.synced = len(self.s.constraints)

    def fresh(self, **kw):
        return Inference(self.t, self.ctx, self.standing, sync=self.sync, **kw)


def test_count10_interval_invariant_at_k1():
    h = Harness(corpus_program("count10.c"))
    assert h.inf.infer() == AbstractValue((10, 0))


def test_count10_enumeration_agrees():
    h = Harness(corpus_program("count10.c"))
    assert h.inf.infer(method=ENUM) == AbstractValue((10, 0))


def test_inferred_value_is_inductive_and_tight():
    h = Harness(corpus_program("count10.c"))
    v = h.inf.infer()
    assert isinstance(h.inf.is_inductive(v), Inductive)
    # lowering either bound breaks inductivity
    assert isinstance(h.inf.is_inductive(AbstractValue((9, 0))), Violation)
    assert isinstance(h.inf.is_inductive(AbstractValue((10, -1))), Violation)


def test_bottom_is_not_inductive_for_a_reachable_loop():
    h = Harness(corpus_program("count10.c"))
    out = h.inf.is_inductive(AbstractValue.bottom(2))
    assert isinstance(out, Violation) and out.rows == [0, 1]
    assert out.witness[0] == -out.witness[1]


def test_top_is_always_inductive():
    h = Harness(corpus_program("neg_chain.c"))
    assert isinstance(h.inf.is_inductive(AbstractValue.top(len(h.t.rows))), Inductive)


def test_loop_free_program_gives_empty_value():
    h = Harness(load("void main(){ int x = 3; assert(x == 3); }"))
    assert h.inf.infer() == AbstractValue(())


def test_strengthen_respects_the_call_bound():
    for name in ["count10.c", "u8_up.c", "i8_down.c", "two_counters.c", "nested.c"]:
        h = Harness(corpus_program(name), ZONES)
        h.inf.infer()
        assert h.inf.stats.strengthen
        for st in h.inf.stats.strengthen:
            assert st.calls <= st.bound, (name, st)


def test_strengthen_result_is_above_the_witness():
    h = Harness(corpus_program("u8_up.c"))
    bad = h.inf.is_inductive(AbstractValue.bottom(len(h.t.rows)))
    v = h.inf.strengthen(AbstractValue.bottom(len(h.t.rows)), bad)
    for i, w in bad.witness.items():
        assert v[i] is not BOTTOM and v[i] >= w


@pytest.mark.parametrize("floor", [False, True])
def test_per_row_floor_gives_the_same_invariant_here(floor):
    h = Harness(corpus_program("u8_pair.c"), per_row_floor=floor)
    assert h.inf.infer() == Harness(corpus_program("u8_pair.c")).inf.infer()


@pytest.mark.parametrize("name", ["u8_up.c", "u8_down.c", "i8_up2.c", "u8_step3.c", "u8_pair.c"])
def test_binary_search_matches_enumeration(name):
    a = Harness(corpus_program(name)).inf.infer(method=BINSEARCH)
    b = Harness(corpus_program(name)).inf.infer(method=ENUM)
    assert a == b


def test_enumeration_of_unguarded_u8_increment_terminates():
    p = load("void main(){ unsigned char x = 0; while (1) { x = x + 1; } }")
    h = Harness(p)
    v = h.inf.infer(method=ENUM)
    assert v == AbstractValue((255, 0))
    assert h.inf.stats.iterations <= 257


def test_iteration_cap_gives_top():
    h = Harness(corpus_program("u8_up.c"), iteration_factor=0)
    v = h.inf.infer(method=BINSEARCH)
    assert v == AbstractValue.top(len(h.t.rows)) and h.inf.stats.capped


def test_value_persists_across_unwindings():
    """A k-invariant remains inductive after one more unwinding."""
    h = Harness(corpus_program("i8_up2.c"))
    v1 = h.inf.infer()
    h.s.unwind()
    assert isinstance(h.fresh().is_inductive(v1), Inductive)
    v2 = h.fresh().infer(start=v1)
    assert v2.leq(v1)


def test_inference_queries_use_assumptions_only():
    h = Harness(corpus_program("count10.c"))
    h.sync()
    before = h.ctx.stats.calls
    h.inf.infer()
    h.sync()
    after_defs = h.synced
    # re-running inference adds no constraints to the SSA system
    h.fresh().infer()
    assert h.synced == after_defs and h.ctx.stats.calls > before


@pytest.mark.parametrize("kind", [INTERVALS, ZONES, OCTAGONS])
@pytest.mark.parametrize("name", ["u8_pair.c", "two_counters.c", "u8_nondet_start.c", "alternate.c"])
def test_invariant_holds_on_concrete_loop_back_states(kind, name):
    """Soundness against the interpreter: every visited loop-back state satisfies every row."""
    p = corpus_program(name)
    h = Harness(p, kind)
    v = h.inf.infer()
    rng = random.Random(name + kind)
    for _ in range(20):
        exe = execute(p, random_chooser(rng), max_head_passes=300)
        for visit in exe.loop_visits:
            if visit.path[-1] == 0:
                continue
            for r, d in zip(h.t.rows, v.values):
                if r.loop.id != visit.loop or d is TOP:
                    continue
                assert d is not BOTTOM, "reachable loop-back state under BOTTOM"
                assert r.evaluate(visit.env) <= d, (r.terms, visit.env, d)


def test_zone_relational_bound():
    p = load("void main(){ unsigned char i = 0; unsigned char j = 0;"
             " while (i < 100) { i++; j++; } assert(i == j); }")
    h = Harness(p, ZONES)
    v = h.inf.infer()
    diffs = [d for r, d in zip(h.t.rows, v.values) if len(r.terms) == 2]
    assert diffs == [0, 0]


def test_engine_history_grows_with_k():
    e = Engine(corpus_program("count3_bug.c"), Config(max_k=6, certify=False))
    e.run()
    ks = [k for k, _ in e.history]
    assert ks == sorted(ks) and ks[0] == 1

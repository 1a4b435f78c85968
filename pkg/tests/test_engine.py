import json
from dataclasses import replace

import pytest

from kiwi.cli import read_manifest
from kiwi.engine import (AI, IBMC, KIKI, KIND, PORTFOLIO, RESOURCE_OUT, SAFE, UNKNOWN, UNSAFE, Config, Engine,
                         replay, run, run_ai, run_ibmc, run_kiki, run_kinduction, run_portfolio)
from kiwi.engine.run import certify_safe
from kiwi.frontend import load
from oracles import CORPUS, corpus_program, shortest_violation

ENTRIES = read_manifest(CORPUS)
UNSAFE_ENTRIES = [e for e in ENTRIES if e.expected == "unsafe"]


@pytest.mark.parametrize("entry", UNSAFE_ENTRIES, ids=lambda e: e.path)
def test_manifest_bug_depth_is_the_shortest_violation(entry):
    """The recorded depth comes from exhaustive search, not from the engine."""
    p = corpus_program(entry.path)
    assert shortest_violation(p, entry.k + 2) == entry.k


@pytest.mark.parametrize("entry", UNSAFE_ENTRIES, ids=lambda e: e.path)
def test_ibmc_finds_shortest_counterexample(entry):
    v = run_ibmc(corpus_program(entry.path), max_k=12)
    assert v.status == UNSAFE and v.k == entry.k
    assert replay(corpus_program(entry.path), v.trace)


def test_ibmc_never_proves():
    v = run_ibmc(corpus_program("count10.c"), max_k=4)
    assert v.status == UNKNOWN and v.k == 4 and v.reason == "bound exhausted"


def test_kiki_proves_count10_at_k1():
    v = run_kiki(corpus_program("count10.c"))
    assert (v.status, v.k) == (SAFE, 1)
    assert v.invariant.values == (10, 0)
    assert "x#lb1 <= 10" in v.invariant_text


def test_kinduction_needs_more_unwindings_than_kiki():
    p = corpus_program("count10.c")
    assert run_kiki(p).k == 1
    kind = run_kinduction(p, max_k=20)
    assert kind.status == SAFE and kind.k > 1
    assert run_kiki(p, cfg=Config(domain="zones")).k == 1


def test_ai_reports_weak_invariant():
    v = run_ai(corpus_program("neg_chain.c"))
    assert v.status == UNKNOWN and v.reason == "invariant too weak" and v.k == 1


def test_ai_proves_interval_program():
    v = run_ai(corpus_program("u8_up.c"))
    assert (v.status, v.k) == (SAFE, 1)


def test_unsafe_before_any_loop_is_k0():
    v = run_kiki(corpus_program("assert0.c"))
    assert (v.status, v.k) == (UNSAFE, 0)


def test_tampered_trace_does_not_replay():
    p = corpus_program("count3_bug.c")
    v = run_kiki(p)
    assert replay(p, v.trace)
    assert not replay(p, replace(v.trace, k=v.trace.k + 1))
    assert not replay(p, replace(v.trace, site=v.trace.site + 1))


def test_nondet_trace_choices_matter():
    p = load("void main(){ unsigned char x = __VERIFIER_nondet_uchar(); assert(x != 77); }")
    v = run_kiki(p)
    assert v.status == UNSAFE
    assert list(v.trace.choices.values()) == [77]
    assert not replay(p, replace(v.trace, choices={key: 76 for key in v.trace.choices}))


def test_certification_rejects_a_wrong_invariant():
    p = corpus_program("count10.c")
    good = run_kiki(p).invariant
    assert certify_safe(p, 1, good, Config())[0]
    bad = replace(good, values=(9, 0))
    ok, why = certify_safe(p, 1, bad, Config())
    assert not ok and "inductive" in why


def test_certification_rejects_a_wrong_depth():
    """Without an invariant, count10 is not 1-inductive."""
    assert not certify_safe(corpus_program("count10.c"), 1, None, Config())[0]


def test_runs_are_deterministic():
    p = corpus_program("nested.c")
    a = Engine(p, Config(max_k=6))
    b = Engine(p, Config(max_k=6))
    va, vb = a.run(), b.run()
    assert (va.status, va.k, va.invariant) == (vb.status, vb.k, vb.invariant)
    assert a.history == b.history
    assert va.stats.calls_by_tag == vb.stats.calls_by_tag


@pytest.mark.parametrize("solver", ["minisat", "builtin"])
def test_solver_backends_agree(solver):
    p = load("void main(){ unsigned char x = 0; while (x < 3) x++; assert(x != 3); }")
    v = run(p, Config(solver=solver, max_k=8))
    assert (v.status, v.k) == (UNSAFE, 4)


def test_tiny_timeout_is_resource_out():
    v = run(corpus_program("u8_sat_counter.c"), Config(timeout=1e-6))
    assert v.status == RESOURCE_OUT and v.phase


def test_engine_rejects_portfolio_mode():
    with pytest.raises(ValueError):
        Engine(corpus_program("count10.c"), Config(mode=PORTFOLIO))


@pytest.mark.parametrize("parallel", [False, True])
def test_portfolio_unsafe(parallel):
    v = run_portfolio(corpus_program("count3_bug.c"), max_k=10, parallel=parallel)
    assert (v.status, v.k, v.mode) == (UNSAFE, 4, PORTFOLIO)
    assert v.lane in (IBMC, KIND)


def test_serial_portfolio_prefers_lanes_in_order():
    v = run_portfolio(corpus_program("u8_up.c"), max_k=10, parallel=False)
    assert v.status == SAFE and v.lane == KIND
    assert set(v.stats.lanes) == {IBMC, KIND}


@pytest.mark.parametrize("parallel", [False, True])
def test_portfolio_inconclusive_collects_lane_reasons(parallel):
    v = run_portfolio(corpus_program("neg_chain.c"), max_k=3, parallel=parallel)
    assert v.status == UNKNOWN
    for lane in (IBMC, KIND, AI):
        assert f"{lane}:" in v.reason
    assert v.stats.cpu == pytest.approx(sum(v.stats.lanes.values()))


def test_portfolio_all_lanes_out_of_time():
    v = run_portfolio(corpus_program("u8_sat_counter.c"), cfg=Config(timeout=1e-6), parallel=False)
    assert v.status == RESOURCE_OUT


def test_verdict_json_round_trips():
    v = run_kiki(corpus_program("count10.c"))
    d = json.loads(v.dumps())
    assert d["schema"] == "kiwi-verdict/1"
    assert d["status"] == SAFE and d["k"] == 1 and d["invariant"] == [10, 0]
    assert d["stats"]["solver_calls"] > 0


def test_stats_record_phases():
    v = run_kiki(corpus_program("count10.c"))
    assert {"encode", "initial", "inference", "induction-step", "certify"} <= set(v.stats.phases)
    assert v.stats.inference.iterations >= 1


def test_keep_cnf():
    e = Engine(corpus_program("count10.c"), Config(keep_cnf=True))
    e.run()
    assert e.cnf.startswith("p cnf")


@pytest.mark.parametrize("mode", [KIKI, KIND])
def test_assume_is_respected(mode):
    p = load("void main(){ unsigned char x = __VERIFIER_nondet_uchar(); __VERIFIER_assume(x < 5);"
             " while (x < 9) x++; assert(x == 9); }")
    assert run(p, Config(mode=mode, max_k=12)).status == SAFE

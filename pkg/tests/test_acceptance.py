"""Acceptance suite: one test per criterion, each printing a PASS or FAIL line."""

import random
import time
from contextlib import contextmanager

import pytest

from kiwi.cli.corpus import CATEGORIES
from kiwi.domains import AbstractValue
from kiwi.engine import AI, IBMC, KIKI, KIND, SAFE, UNSAFE, Config, Engine, replay
from kiwi.engine.run import certify_safe
from kiwi.frontend.interp import execute, random_chooser
from kiwi.inference import ENUM, StrengthenStats
from kiwi.ssa import encode, match_up_to_naming, program_view
from oracles import CORPUS, check_run_against_ssa, corpus_program
from test_inference import Harness
from test_ssa import _golden

# 8-bit programs whose loop guards are monotone in the loop variables
MONOTONE_8BIT = ["u8_up.c", "u8_step3.c", "u8_down.c", "i8_up2.c", "i8_down.c", "u8_nondet_bound.c",
                 "u8_nondet_start.c", "u8_pair.c", "u8_up_bug.c", "i8_down_bug.c", "u8_guarded.c",
                 "nested.c", "nested_bug.c"]
FUZZ_RUNS = 1000


@contextmanager
def criterion(n, title, capsys):
    t0 = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        status = "PASS"
    except AssertionError as e:
        note = f" ({str(e).splitlines()[0] if str(e) else 'assertion failed'})"
        raise
    finally:
        with capsys.disabled():
            print(f"\n[acceptance] criterion {n}: {title}: {status} in {time.perf_counter() - t0:.1f}s{note}")


def _row(template, value, var, sign):
    for r, d in zip(template.rows, value.values):
        if r.terms == ((var, sign),):
            return d
    raise KeyError(var)


def _neg_chain_loopback_states():
    """Every concrete loop-back state of the worked example, for all admitted inputs."""
    p = corpus_program("neg_chain.c")
    states = []
    for x0 in range(-10, 0):
        exe = execute(p, lambda key, t, x0=x0: x0, max_head_passes=40, record_steps=False)
        assert exe.status in ("ok", "fuel")
        states += [v.env for v in exe.loop_visits if v.path[-1] > 0]
    return states


def test_criterion_1_neg_chain(capsys):
    with criterion(1, "worked example: open at k=1 with x#lb <= 9, Safe at k=2", capsys):
        t0 = time.perf_counter()
        p = corpus_program("neg_chain.c")
        e1 = Engine(p, Config(max_k=1))
        v1 = e1.run()
        assert v1.status not in (SAFE, UNSAFE), "verdict must still be open at k=1"
        value = e1.history[0][1]
        assert e1.history[0][0] == 1
        assert _row(e1.template, value, "x", 1) == 9
        # soundness against the concrete loop-back states; x <= 9 is their exact maximum
        states = _neg_chain_loopback_states()
        assert max(s["x"] for s in states) == 9
        for s in states:
            for r, d in zip(e1.template.rows, value.values):
                assert r.evaluate(s) <= d
        v2 = Engine(p, Config(max_k=5)).run()
        assert (v2.status, v2.k) == (SAFE, 2)
        assert time.perf_counter() - t0 < 10


@pytest.mark.xfail(strict=True, reason="the reference -x bound is inductive but not least; the least "
                   "inductive interval over the SSA has -x#lb <= 10")
def test_criterion_1a_listing_lower_bound(capsys):
    with criterion("1a", "worked example: reference bound -x#lb <= 2147483648", capsys):
        e = Engine(corpus_program("neg_chain.c"), Config(max_k=1))
        e.run()
        assert _row(e.template, e.history[0][1], "x", -1) == 2147483648, "got " + str(
            _row(e.template, e.history[0][1], "x", -1))


def test_criterion_2_count10(capsys):
    with criterion(2, "running example: golden SSA, Safe at k=1 with [0;10]", capsys):
        t0 = time.perf_counter()
        p = corpus_program("count10.c")
        ok, why = match_up_to_naming(program_view(encode(p)), _golden("count10.ssa"))
        assert ok, why
        e = Engine(p, Config())
        v = e.run()
        assert (v.status, v.k) == (SAFE, 1)
        assert v.invariant == AbstractValue((10, 0))
        elapsed = time.perf_counter() - t0
        # the enumeration oracle at full width reaches the same fixpoint
        assert Harness(p).inf.infer(method=ENUM) == v.invariant
        assert elapsed < 2


def test_criterion_3_subsumption(corpus_report, capsys):
    with criterion(3, "kiki subsumes ibmc, kind and ai on the corpus", capsys):
        kiki = corpus_report.solved(KIKI)
        for mode in (IBMC, KIND, AI):
            for path, (status, _) in corpus_report.solved(mode).items():
                assert path in kiki and kiki[path][0] == status, f"{mode} solves {path}, kiki does not"
        for path, (status, k) in corpus_report.solved(IBMC).items():
            assert status == UNSAFE and kiki[path][1] == k, f"{path}: ibmc k={k}, kiki k={kiki[path][1]}"
        for path, (status, _) in corpus_report.solved(AI).items():
            if status == SAFE:
                assert kiki[path] == (SAFE, 1), f"{path}: ai proves it, kiki gives {kiki[path]}"
        assert corpus_report.total_time < 300


def _history(p, method):
    e = Engine(p, Config(max_k=3, infer=method, certify=False))
    e.run()
    return e.history


def test_criterion_4_binsearch_equals_enumeration(capsys):
    with criterion(4, f"binary search and enumeration agree on {len(MONOTONE_8BIT)} 8-bit programs", capsys):
        t0 = time.perf_counter()
        assert len(MONOTONE_8BIT) >= 10
        for name in MONOTONE_8BIT:
            p = corpus_program(name)
            assert all(t.width <= 8 for loop in encode(p).loops for t in loop.types.values()), name
            a, b = _history(p, "binsearch"), _history(p, ENUM)
            assert a and a == b, f"{name}: {a} != {b}"
        assert time.perf_counter() - t0 < 120


def test_criterion_5_certification(corpus_report, capsys):
    with criterion(5, "every Safe recertifies and every Unsafe replays", capsys):
        assert corpus_report.certification_failures() == []
        checked = 0
        for r in corpus_report.rows:
            p = corpus_program(r.path)
            if r.status == SAFE:
                ok, why = certify_safe(p, r.k, r.invariant, Config())
                assert ok, f"{r.mode} {r.path}: {why}"
                checked += 1
            elif r.status == UNSAFE:
                assert r.trace is not None and r.trace.k == r.k and replay(p, r.trace), f"{r.mode} {r.path}"
                checked += 1
        assert checked >= 100


def test_criterion_6_strengthen_call_bound(corpus_report, capsys):
    with criterion(6, "strengthening stays within ceil(log2(u-l))+1 solver calls", capsys):
        seen = 0
        for r in corpus_report.rows:
            for lower, upper, calls in r.strengthen_calls:
                seen += 1
                assert calls <= StrengthenStats(lower, upper, calls).bound, (r.mode, r.path, lower, upper, calls)
        assert seen > 0


def test_criterion_7_report_shape(corpus_report, capsys):
    with criterion(7, "report has the comparison rows, no false proofs or false alarms", capsys):
        text = corpus_report.text()
        for cat in CATEGORIES:
            assert cat in text
        for m in corpus_report.modes:
            c = corpus_report.counts(m)
            assert set(c) == set(CATEGORIES)
            assert c["false proofs"] == 0 and c["false alarms"] == 0, m
            assert sum(c.values()) == len({r.path for r in corpus_report.rows})
        d = corpus_report.to_json()
        assert set(d["counts"]) == set(corpus_report.modes)


def test_criterion_8_overapproximation_fuzz(capsys):
    with criterion(8, f"{FUZZ_RUNS} random runs satisfy the SSA at their unwinding", capsys):
        names = sorted(p.name for p in CORPUS.glob("*.c"))
        programs = {n: corpus_program(n) for n in names}
        rng = random.Random(2024)
        bad = []
        for i in range(FUZZ_RUNS):
            name = names[i % len(names)]
            exe = execute(programs[name], random_chooser(rng), max_head_passes=rng.randint(0, 8),
                          record_steps=False)
            problems = check_run_against_ssa(programs[name], exe)
            if problems:
                bad.append((name, problems[0]))
        assert not bad, f"{len(bad)} mismatches, first {bad[0]}"

"""The verification loop and its restricted modes.

One run owns one SSA system and one incremental solver context.  Per
unwinding ``k`` the loop performs, in order:

1. (``k = 1`` only) the initial check: an error before the first loop head;
2. invariant inference (``kiki`` and ``ai``; the other modes use TRUE);
3. the induction-step check ``P[k] & I & T[k] & Err(x_k)`` (not in ``ibmc``);
4. the concrete check, the same with ``Start`` (not in ``ai``);
5. one more unwinding.

Verdicts are certified before they are returned: a Safe verdict is
re-checked on a fresh solver, an Unsafe verdict is replayed on the concrete
interpreter.  A failed certification raises :class:`CertificationError`.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from kiwi.domains.template import AbstractValue, GuardedTemplate, make_template
from kiwi.engine.trace import Trace, make_trace, replay
from kiwi.frontend import ast as A
from kiwi.inference.solve import BINSEARCH, Inductive, Inference, InferenceStats
from kiwi.solver import bv
from kiwi.solver.context import ResourceLimit, SolverContext
from kiwi.ssa.checks import CONCRETE, INDUCTION_STEP, INITIAL, build_check
from kiwi.ssa.system import SsaSystem, encode

KIKI, IBMC, KIND, AI, PORTFOLIO = "kiki", "ibmc", "kind", "ai", "portfolio"
MODES = (KIKI, IBMC, KIND, AI, PORTFOLIO)

SAFE, UNSAFE, UNKNOWN, RESOURCE_OUT = "safe", "unsafe", "unknown", "resource-out"


class CertificationError(Exception):
    """A verdict failed independent re-checking; never reported as a verdict."""


@dataclass
class Config:
    mode: str = KIKI
    max_k: int = 50
    timeout: float | None = None
    solver: str = "minisat"
    domain: str = "intervals"
    infer: str = BINSEARCH
    seed: int = 0
    certify: bool = True
    per_row_floor: bool = False
    iteration_factor: int = 64
    keep_cnf: bool = False


@dataclass
class RunStats:
    solver_calls: int = 0
    solver_time: float = 0.0
    calls_by_tag: dict[str, int] = field(default_factory=dict)
    phases: dict[str, float] = field(default_factory=dict)
    inference: InferenceStats = field(default_factory=InferenceStats)
    wall: float = 0.0
    cpu: float = 0.0
    lanes: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "solver_calls": self.solver_calls,
            "solver_time": round(self.solver_time, 4),
            "calls_by_tag": self.calls_by_tag,
            "phases": {k: round(v, 4) for k, v in self.phases.items()},
            "inference_iterations": self.inference.iterations,
            "strengthen_calls": [s.calls for s in self.inference.strengthen],
            "wall": round(self.wall, 4),
            "cpu": round(self.cpu, 4),
            "lanes": {k: round(v, 4) for k, v in self.lanes.items()},
        }


@dataclass
class Verdict:
    status: str
    mode: str
    k: int | None = None
    invariant: AbstractValue | None = None
    invariant_text: str = ""
    trace: Trace | None = None
    reason: str = ""
    phase: str = ""
    lane: str = ""
    stats: RunStats = field(default_factory=RunStats)

    @property
    def conclusive(self) -> bool:
        return self.status in (SAFE, UNSAFE)

    def headline(self) -> str:
        if self.status == SAFE:
            return f"SAFE k={self.k}"
        if self.status == UNSAFE:
            return f"UNSAFE k={self.k}"
        if self.status == RESOURCE_OUT:
            return f"RESOURCE-OUT ({self.phase})"
        return f"UNKNOWN ({self.reason})"

    def witness_text(self) -> str:
        if self.status == SAFE:
            head = f"k={self.k}"
            return f"{head}\n{self.invariant_text}\n" if self.invariant_text else head + "\n"
        if self.status == UNSAFE and self.trace is not None:
            return self.trace.text() + "\n"
        return ""

    def to_json(self) -> dict:
        out = {
            "schema": "kiwi-verdict/1",
            "status": self.status,
            "mode": self.mode,
            "k": self.k,
            "reason": self.reason,
            "phase": self.phase,
            "lane": self.lane,
            "stats": self.stats.to_json(),
        }
        if self.invariant is not None:
            out["invariant"] = [None if not isinstance(d, int) else d for d in self.invariant.values]
            out["invariant_text"] = self.invariant_text.splitlines()
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


class Engine:
    def __init__(self, program: A.Program, cfg: Config | None = None, cancel=None) -> None:
        self.p = program
        self.cfg = cfg or Config()
        if self.cfg.mode not in (KIKI, IBMC, KIND, AI):
            raise ValueError(f"engine mode must be one of kiki/ibmc/kind/ai, not {self.cfg.mode!r}")
        self.cancel = cancel
        self.stats = RunStats()
        self.phase = "setup"
        self.s: SsaSystem | None = None
        self.ctx: SolverContext | None = None
        self.template: GuardedTemplate | None = None
        self._synced = 0
        self.history: list[tuple[int, AbstractValue]] = []
        self.cnf: str | None = None

    # -- plumbing ------------------------------------------------------------------
    def _sync(self) -> None:
        for c in self.s.constraints[self._synced:]:
            self.ctx.assert_expr(c.formula)
        self._synced = len(self.s.constraints)

    def standing(self) -> list:
        return self.s.enable_assumptions() + self.s.no_earlier_errors()

    def _solve(self, goal, assumptions, tag: str):
        self._sync()
        return self.ctx.solve(list(assumptions) + [goal], tag=tag)

    def _timed(self, phase: str):
        engine = self

        class _T:
            def __enter__(self):
                engine.phase = phase
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                engine.stats.phases[phase] = engine.stats.phases.get(phase, 0.0) + time.perf_counter() - self.t0

        return _T()

    # -- the loop ------------------------------------------------------------------------
    def run(self) -> Verdict:
        t0, c0 = time.perf_counter(), time.process_time()
        deadline = time.monotonic() + self.cfg.timeout if self.cfg.timeout else None
        try:
            self.ctx = SolverContext(self.cfg.solver, self.cfg.seed, deadline, self.cancel)
            try:
                v = self._run()
            except ResourceLimit as e:
                v = Verdict(RESOURCE_OUT, self.cfg.mode, self.s.k if self.s else None, phase=self.phase,
                            reason=str(e))
        finally:
            if self.ctx is not None:
                self.stats.solver_calls = self.ctx.stats.calls
                self.stats.solver_time = self.ctx.stats.time
                self.stats.calls_by_tag = dict(self.ctx.stats.by_tag)
                if self.cfg.keep_cnf:
                    self.cnf = self.ctx.dimacs()
                self.ctx.close()
        self.stats.wall = time.perf_counter() - t0
        self.stats.cpu = time.process_time() - c0
        v.stats = self.stats
        return v

    def _run(self) -> Verdict:
        mode = self.cfg.mode
        with self._timed("encode"):
            self.s = encode(self.p)
            if mode in (KIKI, AI):
                self.template = make_template(self.s, self.cfg.domain)
        with self._timed("initial"):
            goal, assumptions = build_check(self.s, INITIAL)
            res = self._solve(goal, assumptions, "initial")
        if res.sat:
            return self._unsafe(res.model, 0, level=self.s.k)
        while True:
            k = self.s.k
            value, inv = None, bv.TRUE
            if mode in (KIKI, AI):
                with self._timed("inference"):
                    value = self._infer()
                    inv = self.template.concretize_head(value)
                    self.history.append((k, value))
            if mode != IBMC:
                with self._timed("induction-step"):
                    goal, assumptions = build_check(self.s, INDUCTION_STEP, inv)
                    res = self._solve(goal, assumptions, "induction-step")
                if not res.sat:
                    return self._safe(k, value)
            if mode == AI:
                return Verdict(UNKNOWN, mode, k, value, self._inv_text(value), reason="invariant too weak")
            with self._timed("concrete"):
                goal, assumptions = build_check(self.s, CONCRETE, inv)
                res = self._solve(goal, assumptions, "concrete")
            if res.sat:
                return self._unsafe(res.model, k)
            if k >= self.cfg.max_k:
                return Verdict(UNKNOWN, mode, k, value, self._inv_text(value), reason="bound exhausted")
            with self._timed("unwind"):
                self.s.unwind()
                self._sync()

    def _infer(self) -> AbstractValue:
        inf = Inference(self.template, self.ctx, self.standing, per_row_floor=self.cfg.per_row_floor,
                        iteration_factor=self.cfg.iteration_factor, sync=self._sync)
        try:
            return inf.infer(method=self.cfg.infer)
        finally:
            self.stats.inference.merge(inf.stats)

    def _inv_text(self, value: AbstractValue | None) -> str:
        if value is None or self.template is None or not len(self.template):
            return ""
        return self.template.dump(value)

    # -- verdicts ---------------------------------------------------------------------
    def _unsafe(self, model, k: int, level: int = 0) -> Verdict:
        with self._timed("certify"):
            trace = make_trace(self.p, self.s, model, k, level)
            if self.cfg.certify and not replay(self.p, trace):
                raise CertificationError(f"counterexample of length {k} does not replay")
        return Verdict(UNSAFE, self.cfg.mode, k, trace=trace)

    def _safe(self, k: int, value: AbstractValue | None) -> Verdict:
        with self._timed("certify"):
            if self.cfg.certify:
                ok, why = certify_safe(self.p, k, value, self.cfg)
                if not ok:
                    raise CertificationError(f"safety proof at k={k} does not re-check: {why}")
        return Verdict(SAFE, self.cfg.mode, k, value, self._inv_text(value))


def certify_safe(p: A.Program, k: int, value: AbstractValue | None, cfg: Config) -> tuple[bool, str]:
    """Re-check a Safe verdict on a fresh solver: the invariant is inductive
    and, together with ``P[k]``, excludes an error at step ``k``."""
    s = encode(p)
    while s.k < k:
        s.unwind()
    synced = 0

    def sync() -> None:
        nonlocal synced
        for c in s.constraints[synced:]:
            ctx.assert_expr(c.formula)
        synced = len(s.constraints)

    with SolverContext(cfg.solver, cfg.seed + 1) as ctx:
        inv = bv.TRUE
        if value is not None:
            template = make_template(s, cfg.domain)
            inf = Inference(template, ctx, lambda: s.enable_assumptions() + s.no_earlier_errors(), sync=sync)
            if not isinstance(inf.is_inductive(value), Inductive):
                return False, "invariant is not inductive"
            inv = template.concretize_head(value)
        goal, assumptions = build_check(s, INDUCTION_STEP, inv)
        sync()
        if ctx.solve(assumptions + [goal], tag="certify").sat:
            return False, "property not implied"
    return True, ""


def run(program: A.Program, cfg: Config | None = None, cancel=None) -> Verdict:
    return Engine(program, cfg, cancel).run()


def _mode(program: A.Program, mode: str, max_k: int, cfg: Config | None) -> Verdict:
    base = cfg or Config()
    c = Config(**{**base.__dict__, "mode": mode, "max_k": max_k})
    return run(program, c)


def run_kiki(p: A.Program, max_k: int = 50, cfg: Config | None = None) -> Verdict:
    return _mode(p, KIKI, max_k, cfg)


def run_ibmc(p: A.Program, max_k: int = 50, cfg: Config | None = None) -> Verdict:
    return _mode(p, IBMC, max_k, cfg)


def run_kinduction(p: A.Program, max_k: int = 50, cfg: Config | None = None) -> Verdict:
    return _mode(p, KIND, max_k, cfg)


def run_ai(p: A.Program, cfg: Config | None = None) -> Verdict:
    return _mode(p, AI, 1, cfg)

"""Run ibmc, kind and ai side by side; the first conclusive lane wins.

Each lane is a separate process with its own solver.  Losing lanes see a
shared event at their next solve call and stop.  Reported CPU time is the
sum over lanes.  With ``parallel=False`` the lanes run one after another in
a fixed order, which makes the outcome deterministic.
"""

from __future__ import annotations

import multiprocessing as mp
import queue
import time
from dataclasses import replace

from kiwi.engine.run import (AI, IBMC, KIND, PORTFOLIO, RESOURCE_OUT, UNKNOWN, CertificationError, Config,
                             RunStats, Verdict, run)
from kiwi.frontend import ast as A

LANES = (IBMC, KIND, AI)


def _lane(program: A.Program, cfg: Config, cancel, out) -> None:
    try:
        v = run(program, cfg, cancel)
    except CertificationError as e:
        v = Verdict(UNKNOWN, cfg.mode, reason=f"certification failed: {e}")
    out.put((cfg.mode, v))


def run_portfolio(program: A.Program, max_k: int = 50, cfg: Config | None = None,
                  parallel: bool = True) -> Verdict:
    base = cfg or Config()
    cfgs = [replace(base, mode=m, max_k=1 if m == AI else max_k) for m in LANES]
    t0 = time.perf_counter()
    results: dict[str, Verdict] = {}
    winner: Verdict | None = None
    if not parallel:
        for c in cfgs:
            try:
                v = run(program, c)
            except CertificationError as e:
                v = Verdict(UNKNOWN, c.mode, reason=f"certification failed: {e}")
            results[c.mode] = v
            if v.conclusive:
                winner = v
                break
    else:
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
        cancel = ctx.Event()
        out = ctx.Queue()
        procs = [ctx.Process(target=_lane, args=(program, c, cancel, out), daemon=True) for c in cfgs]
        for p in procs:
            p.start()
        while len(results) < len(procs):
            try:
                mode, v = out.get(timeout=0.1)
            except queue.Empty:
                if not any(p.is_alive() for p in procs) and out.empty():
                    break
                continue
            results[mode] = v
            if v.conclusive and winner is None:
                winner = v
                cancel.set()
        for p in procs:
            p.join(timeout=5)
            if p.is_alive():
                p.terminate()
    stats = RunStats(wall=time.perf_counter() - t0)
    for mode, v in results.items():
        stats.lanes[mode] = v.stats.cpu
        stats.cpu += v.stats.cpu
        stats.solver_calls += v.stats.solver_calls
    if winner is not None:
        return replace(winner, mode=PORTFOLIO, lane=winner.mode, stats=stats)
    if results and all(v.status == RESOURCE_OUT for v in results.values()):
        return Verdict(RESOURCE_OUT, PORTFOLIO, phase="all lanes", stats=stats)
    reasons = ", ".join(f"{m}: {v.reason or v.status}" for m, v in sorted(results.items()))
    return Verdict(UNKNOWN, PORTFOLIO, reason=reasons, stats=stats)

"""Corpus runs: manifest parsing, per-benchmark execution and the comparison report."""

from __future__ import annotations

import csv
import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from kiwi.domains.template import AbstractValue
from kiwi.engine.portfolio import run_portfolio
from kiwi.engine.run import (AI, IBMC, KIKI, KIND, PORTFOLIO, RESOURCE_OUT, SAFE, UNSAFE, CertificationError,
                             Config, run)
from kiwi.engine.trace import Trace
from kiwi.frontend import load

MANIFEST = "manifest.csv"
SCHEMA = "kiwi-report/1"
ALL_MODES = (KIKI, IBMC, KIND, AI, PORTFOLIO)
CATEGORIES = ("counterexamples", "proofs", "false proofs", "false alarms", "inconclusive", "timeout")

_K_NOTE = re.compile(r"\bk=(\d+)\b")


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    path: str
    expected: str
    k: int | None = None
    notes: str = ""


def read_manifest(directory: str | Path) -> list[CorpusEntry]:
    """Entries of ``directory/manifest.csv``; ``k=N`` in the notes records an expected length."""
    d = Path(directory)
    f = d / MANIFEST
    if not f.is_file():
        raise ManifestError(f"no {MANIFEST} in {d}")
    out = []
    with f.open(newline="") as fh:
        for n, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#") or row[0].strip() == "path":
                continue
            if len(row) < 2:
                raise ManifestError(f"{f}:{n}: expected 'path,expected,notes'")
            path, expected = row[0].strip(), row[1].strip().lower()
            notes = ",".join(row[2:]).strip()
            if expected not in (SAFE, UNSAFE):
                raise ManifestError(f"{f}:{n}: expected verdict must be safe or unsafe, not {expected!r}")
            if not (d / path).is_file():
                raise ManifestError(f"{f}:{n}: missing benchmark {path}")
            m = _K_NOTE.search(notes)
            out.append(CorpusEntry(path, expected, int(m.group(1)) if m else None, notes))
    return out


def classify(status: str, expected: str) -> str:
    if status == UNSAFE:
        return "counterexamples" if expected == UNSAFE else "false alarms"
    if status == SAFE:
        return "proofs" if expected == SAFE else "false proofs"
    if status == RESOURCE_OUT:
        return "timeout"
    return "inconclusive"


@dataclass
class Row:
    path: str
    expected: str
    mode: str
    status: str
    category: str
    k: int | None
    wall: float
    cpu: float
    reason: str = ""
    lane: str = ""
    strengthen_calls: list[tuple[int, int, int]] = field(default_factory=list)
    # kept for re-checking, not part of the JSON report
    invariant: AbstractValue | None = field(default=None, repr=False)
    trace: Trace | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {"path": self.path, "expected": self.expected, "mode": self.mode, "status": self.status,
                "category": self.category, "k": self.k, "wall": round(self.wall, 4), "cpu": round(self.cpu, 4),
                "reason": self.reason, "lane": self.lane}


@dataclass
class Report:
    modes: list[str]
    rows: list[Row] = field(default_factory=list)
    total_time: float = 0.0
    budget: float | None = None

    def counts(self, mode: str) -> dict[str, int]:
        c = {cat: 0 for cat in CATEGORIES}
        for r in self.rows:
            if r.mode == mode:
                c[r.category] += 1
        return c

    def runtime(self, mode: str) -> float:
        return sum(r.cpu for r in self.rows if r.mode == mode)

    def solved(self, mode: str) -> dict[str, tuple[str, int | None]]:
        return {r.path: (r.status, r.k) for r in self.rows if r.mode == mode and r.status in (SAFE, UNSAFE)}

    def certification_failures(self) -> list[Row]:
        return [r for r in self.rows if r.reason.startswith("certification failed")]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "modes": self.modes,
            "budget": self.budget,
            "total_time": round(self.total_time, 4),
            "counts": {m: self.counts(m) for m in self.modes},
            "runtime": {m: round(self.runtime(m), 4) for m in self.modes},
            "rows": [r.to_json() for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def text(self) -> str:
        width = max(len(c) for c in CATEGORIES + ("runtime (s)",)) + 2
        head = "".ljust(width) + "".join(m.rjust(11) for m in self.modes)
        lines = [head]
        for cat in CATEGORIES:
            lines.append(cat.ljust(width) + "".join(str(self.counts(m)[cat]).rjust(11) for m in self.modes))
        lines.append("runtime (s)".ljust(width) + "".join(f"{self.runtime(m):.2f}".rjust(11) for m in self.modes))
        n = len({r.path for r in self.rows})
        budget = f"{self.budget:g}s per run" if self.budget else "no time budget"
        lines.append(f"{n} benchmarks, {budget}; each portfolio lane gets the full budget "
                     f"and the portfolio runtime sums lane CPU time")
        return "\n".join(lines)


def _job(args) -> Row:
    directory, entry, mode, cfg, parallel_portfolio = args
    program = load((Path(directory) / entry.path).read_text())
    t0 = time.perf_counter()
    try:
        if mode == PORTFOLIO:
            v = run_portfolio(program, cfg.max_k, cfg, parallel=parallel_portfolio)
        else:
            c = Config(**{**cfg.__dict__, "mode": mode, "max_k": 1 if mode == AI else cfg.max_k})
            v = run(program, c)
    except CertificationError as e:
        wall = time.perf_counter() - t0
        return Row(entry.path, entry.expected, mode, "unknown", "inconclusive", None, wall, wall,
                   f"certification failed: {e}")
    wall = time.perf_counter() - t0
    st = [(s.lower, s.upper, s.calls) for s in v.stats.inference.strengthen]
    return Row(entry.path, entry.expected, mode, v.status, classify(v.status, entry.expected), v.k, wall,
               v.stats.cpu or wall, v.reason, v.lane, st, v.invariant, v.trace)


def run_corpus(directory: str | Path, modes: Iterable[str] = ALL_MODES, budget: float | None = None,
               max_k: int = 50, jobs: int = 1, seed: int = 0, entries: Sequence[CorpusEntry] | None = None,
               solver: str = "minisat", domain: str = "intervals") -> Report:
    """Run every manifest entry under every requested mode (plus kiki and portfolio).

    With ``jobs == 1`` the run is serial and fully deterministic; portfolio
    lanes then run one after another in a fixed order.
    """
    want = list(dict.fromkeys(list(modes) + [KIKI, PORTFOLIO]))
    for m in want:
        if m not in ALL_MODES:
            raise ValueError(f"unknown mode {m!r}")
    ordered = [m for m in ALL_MODES if m in want]
    items = list(entries) if entries is not None else read_manifest(directory)
    cfg = Config(max_k=max_k, timeout=budget, seed=seed, solver=solver, domain=domain)
    tasks = [(str(directory), e, m, cfg, jobs > 1) for e in items for m in ordered]
    t0 = time.perf_counter()
    if jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_job, tasks))
    else:
        rows = [_job(t) for t in tasks]
    return Report(ordered, rows, time.perf_counter() - t0, budget)


def bundled_corpus() -> Path:
    return Path(__file__).resolve().parent.parent / "corpus"

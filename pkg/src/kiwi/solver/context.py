"""Incremental bit-vector solving context shared by all checks of one run."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from kiwi.solver.backends import SatBackend, make_backend
from kiwi.solver.blast import CnfBuilder
from kiwi.solver.bv import BvExpr, evaluate


class ResourceLimit(Exception):
    """A solve call ran out of its time budget or was cancelled."""


class Model(Mapping[str, int]):
    """Values of the SSA variables in a satisfying assignment (unsigned encoding)."""

    def __init__(self, values: dict[str, int]) -> None:
        self._values = values

    def __getitem__(self, name: str) -> int:
        return self._values[name]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def eval(self, e: BvExpr) -> int:
        """Evaluate an expression; variables the solver never saw default to 0."""
        return evaluate(e, self._values, default=0)

    def eval_signed(self, e: BvExpr) -> int:
        v = self.eval(e)
        return e.type.wrap(v) if e.signed else v


@dataclass
class SolverStats:
    calls: int = 0
    sat: int = 0
    unsat: int = 0
    time: float = 0.0
    by_tag: dict[str, int] = field(default_factory=dict)


@dataclass
class SolveResult:
    sat: bool
    model: Model | None = None


class SolverContext:
    """Permanent assertions plus assumption-based solving over one SAT instance.

    ``deadline`` is an absolute ``time.monotonic()`` value; ``cancel`` is
    any object with an ``is_set()`` method checked before each call.
    """

    def __init__(self, backend: str | SatBackend = "minisat", seed: int = 0,
                 deadline: float | None = None, cancel=None) -> None:
        self.backend = make_backend(backend, seed) if isinstance(backend, str) else backend
        self.cnf = CnfBuilder(self.backend.add_clause)
        self.deadline = deadline
        self.cancel = cancel
        self.stats = SolverStats()

    def assert_expr(self, e: BvExpr) -> int:
        """Permanently assert a boolean expression; returns its literal."""
        lit = self.cnf.lit(e)
        self.cnf.add_clause((lit,))
        return lit

    def literal(self, e: BvExpr) -> int:
        return self.cnf.lit(e)

    def solve(self, assumptions: Iterable[BvExpr | int] = (), tag: str = "") -> SolveResult:
        if self.cancel is not None and self.cancel.is_set():
            raise ResourceLimit("cancelled")
        lits = [a if isinstance(a, int) else self.cnf.lit(a) for a in assumptions]
        t0 = time.perf_counter()
        res = self.backend.solve(lits, self.deadline)
        self.stats.time += time.perf_counter() - t0
        self.stats.calls += 1
        if tag:
            self.stats.by_tag[tag] = self.stats.by_tag.get(tag, 0) + 1
        if res is None:
            raise ResourceLimit("solver time limit")
        if not res:
            self.stats.unsat += 1
            return SolveResult(False)
        self.stats.sat += 1
        return SolveResult(True, self._model())

    def _model(self) -> Model:
        true = self.backend.model_true
        values = {name: self.cnf.word_value(word, true) for name, word in self.cnf.var_bits.items()}
        return Model(values)

    def dimacs(self) -> str:
        lines = [f"p cnf {self.cnf.num_vars} {len(self.cnf.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.cnf.clauses)
        return "\n".join(lines) + "\n"

    def close(self) -> None:
        self.backend.close()

    def __enter__(self) -> "SolverContext":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def check_sat(constraints: Sequence[BvExpr], backend: str = "minisat") -> SolveResult:
    """One-shot satisfiability of a conjunction, on a fresh context."""
    with SolverContext(backend) as ctx:
        for c in constraints:
            ctx.assert_expr(c)
        return ctx.solve()

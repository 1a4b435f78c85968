"""Propositional back ends behind one small incremental interface.

Every back end supports adding clauses at any time and solving under
assumption literals.  ``solve`` returns ``True``/``False`` for SAT/UNSAT
and ``None`` when a resource limit interrupted the search.
"""

from __future__ import annotations

import shlex
import subprocess
import threading
import time
from typing import Protocol, Sequence

from kiwi.solver.cdcl import CdclSolver


class SatBackend(Protocol):
    def add_clause(self, lits: Sequence[int]) -> None: ...

    def solve(self, assumptions: Sequence[int], deadline: float | None = None) -> bool | None: ...

    def model_true(self, lit: int) -> bool: ...

    def close(self) -> None: ...


class PySatBackend:
    """MiniSat 2.2 through python-sat; interrupted from a timer thread on deadline."""

    def __init__(self, name: str = "m22") -> None:
        from pysat.solvers import Solver

        self._solver = Solver(name=name)
        self._model: set[int] = set()

    def add_clause(self, lits: Sequence[int]) -> None:
        self._solver.add_clause(list(lits))

    def solve(self, assumptions: Sequence[int], deadline: float | None = None) -> bool | None:
        timer = None
        if deadline is not None:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            timer = threading.Timer(remaining, self._solver.interrupt)
            timer.start()
        try:
            res = self._solver.solve_limited(assumptions=list(assumptions), expect_interrupt=True)
        finally:
            if timer is not None:
                timer.cancel()
                self._solver.clear_interrupt()
        if res:
            self._model = set(self._solver.get_model() or ())
        return res

    def model_true(self, lit: int) -> bool:
        if lit > 0:
            return lit in self._model
        return -lit not in self._model

    def close(self) -> None:
        self._solver.delete()


class BuiltinBackend:
    """The pure-Python CDCL core in :mod:`kiwi.solver.cdcl`."""

    def __init__(self, seed: int = 0) -> None:
        self._solver = CdclSolver(seed=seed)

    def add_clause(self, lits: Sequence[int]) -> None:
        self._solver.add_clause(lits)

    def solve(self, assumptions: Sequence[int], deadline: float | None = None) -> bool | None:
        return self._solver.solve(assumptions, deadline=deadline)

    def model_true(self, lit: int) -> bool:
        return self._solver.value(lit)

    def close(self) -> None:
        pass


class ExternalBackend:
    """A subprocess speaking the line protocol described in ``docs/solver-protocol.md``.

    Requests: ``c <lits> 0`` adds a clause, ``s <assumptions> 0`` solves,
    ``q`` quits.  Replies to ``s``: ``SAT`` followed by ``v <lits> 0``,
    ``UNSAT``, or ``UNKNOWN``.
    """

    def __init__(self, command: str) -> None:
        self._proc = subprocess.Popen(
            shlex.split(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )
        self._model: set[int] = set()
        self._pending: list[str] = []

    def _send(self, line: str) -> None:
        assert self._proc.stdin is not None
        self._proc.stdin.write(line + "\n")

    def add_clause(self, lits: Sequence[int]) -> None:
        self._pending.append("c " + " ".join(map(str, lits)) + " 0")
        if len(self._pending) >= 4096:
            self._flush()

    def _flush(self) -> None:
        if self._pending:
            assert self._proc.stdin is not None
            self._proc.stdin.write("\n".join(self._pending) + "\n")
            self._pending.clear()

    def solve(self, assumptions: Sequence[int], deadline: float | None = None) -> bool | None:
        self._flush()
        budget = "" if deadline is None else f" t={max(0.0, deadline - time.monotonic()):.3f}"
        self._send("s " + " ".join(map(str, assumptions)) + " 0" + budget)
        assert self._proc.stdin is not None and self._proc.stdout is not None
        self._proc.stdin.flush()
        reply = self._proc.stdout.readline().strip()
        if reply == "SAT":
            vline = self._proc.stdout.readline().split()
            self._model = {int(t) for t in vline[1:] if t != "0"}
            return True
        if reply == "UNSAT":
            return False
        if reply == "UNKNOWN":
            return None
        raise RuntimeError(f"external solver protocol error: {reply!r}")

    def model_true(self, lit: int) -> bool:
        return lit in self._model

    def close(self) -> None:
        try:
            self._send("q")
            assert self._proc.stdin is not None
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            pass
        self._proc.wait(timeout=5)


def make_backend(spec: str = "minisat", seed: int = 0) -> SatBackend:
    """Build a back end from a configuration string.

    ``minisat`` (default), ``builtin``, or ``external:<command line>``.
    """
    if spec in ("minisat", "m22", "pysat"):
        return PySatBackend("m22")
    if spec.startswith("pysat:"):
        return PySatBackend(spec.split(":", 1)[1])
    if spec == "builtin":
        return BuiltinBackend(seed)
    if spec.startswith("external:"):
        return ExternalBackend(spec.split(":", 1)[1])
    raise ValueError(f"unknown solver back end {spec!r}")

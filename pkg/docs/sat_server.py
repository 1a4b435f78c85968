"""Reference SAT server for ``--solver external:<cmd>``.

Reads requests from stdin and answers on stdout, one line each:

    c <lit> ... 0        add a clause (no reply)
    s <lit> ... 0 [t=S]  solve under assumptions, optional time budget in seconds
    q                    quit

Replies to ``s``: ``SAT`` then ``v <lit> ... 0``, or ``UNSAT``, or ``UNKNOWN``.
"""

import sys
import threading

from pysat.solvers import Solver


def main() -> None:
    solver = Solver(name="m22")
    out = sys.stdout
    for line in sys.stdin:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "q":
            break
        if parts[0] == "c":
            solver.add_clause([int(t) for t in parts[1:-1]])
        elif parts[0] == "s":
            budget = None
            if parts[-1].startswith("t="):
                budget = float(parts.pop()[2:])
            assumptions = [int(t) for t in parts[1:-1]]
            timer = threading.Timer(budget, solver.interrupt) if budget is not None else None
            if timer is not None:
                timer.start()
            res = solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
            if timer is not None:
                timer.cancel()
                solver.clear_interrupt()
            if res is None:
                out.write("UNKNOWN\n")
            elif res:
                out.write("SAT\nv " + " ".join(map(str, solver.get_model())) + " 0\n")
            else:
                out.write("UNSAT\n")
            out.flush()
        else:
            out.write(f"ERROR unknown request {parts[0]}\n")
            out.flush()
    solver.delete()


if __name__ == "__main__":
    main()

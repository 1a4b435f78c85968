"""``kiwi-verify``: verify one program, or run a corpus directory and print the comparison table."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from kiwi.cli.corpus import ALL_MODES, ManifestError, run_corpus
from kiwi.domains.template import KINDS
from kiwi.engine.portfolio import run_portfolio
from kiwi.engine.run import (AI, KIKI, PORTFOLIO, RESOURCE_OUT, SAFE, UNSAFE, CertificationError, Config,
                             Engine)
from kiwi.frontend import Diagnostic, load
from kiwi.inference.solve import BINSEARCH, ENUM
from kiwi.ssa import encode, program_view

EXIT_SAFE, EXIT_UNSAFE, EXIT_UNKNOWN, EXIT_RESOURCE = 0, 10, 2, 3
EXIT_USAGE = 64
EXIT_INTERNAL = 70
ENUM_MAX_WIDTH = 8

_EXIT = {SAFE: EXIT_SAFE, UNSAFE: EXIT_UNSAFE, RESOURCE_OUT: EXIT_RESOURCE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kiwi-verify", description="k-induction with k-invariants for small bit-vector programs")
    p.add_argument("path", help="program file, or a corpus directory with a manifest.csv")
    p.add_argument("--mode", default=KIKI, help="kiki, ibmc, kind, ai or portfolio; a comma list for corpus runs")
    p.add_argument("--max-k", type=int, default=50)
    p.add_argument("--timeout", type=float, default=None, help="seconds per run")
    p.add_argument("--witness", metavar="FILE", help="write the invariant or counterexample trace")
    p.add_argument("--json", action="store_true", help="print the verdict as JSON")
    p.add_argument("--dump-ssa", metavar="FILE", help="write the SSA constraints of the last unwinding")
    p.add_argument("--dump-cnf", metavar="FILE", help="write the final clause database in DIMACS")
    p.add_argument("--dump-invariant", metavar="FILE", help="write the inferred invariant rows")
    p.add_argument("--solver", default="minisat", help="minisat, glucose, builtin or external:<cmd>")
    p.add_argument("--domain", default="intervals", choices=KINDS)
    p.add_argument("--infer", default=BINSEARCH, choices=(BINSEARCH, ENUM))
    p.add_argument("--force", action="store_true", help="allow --infer enum above 8-bit loop variables")
    p.add_argument("--stats", action="store_true", help="print solver and phase statistics")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-certify", dest="certify", action="store_false")
    p.add_argument("--report", choices=("text", "json"), default="text", help="corpus report format")
    p.add_argument("--jobs", type=int, default=1, help="parallel corpus workers")
    return p


def _modes(text: str, corpus: bool) -> list[str]:
    modes = [m.strip() for m in text.split(",") if m.strip()]
    if not modes or any(m not in ALL_MODES for m in modes):
        raise UsageError(f"--mode must be one of {', '.join(ALL_MODES)}")
    if len(modes) > 1 and not corpus:
        raise UsageError("several modes are only accepted for corpus runs")
    return modes


def _corpus(args, out) -> int:
    try:
        report = run_corpus(args.path, _modes(args.mode, True), args.timeout, args.max_k, args.jobs, args.seed,
                            solver=args.solver, domain=args.domain)
    except ManifestError as e:
        raise UsageError(str(e)) from e
    print(report.dumps() if args.report == "json" else report.text(), file=out)
    return EXIT_INTERNAL if report.certification_failures() else 0


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _single(args, out) -> int:
    mode = _modes(args.mode, False)[0]
    try:
        program = load(Path(args.path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {args.path}: {e.strerror}") from e
    except Diagnostic as e:
        raise UsageError(f"{args.path}:{e}") from e
    if args.infer == ENUM and not args.force:
        wide = [f"{v}:{t.width}" for loop in encode(program).loops for v, t in loop.types.items()
                if t.width > ENUM_MAX_WIDTH]
        if wide:
            raise UsageError(f"--infer enum needs loop variables of at most {ENUM_MAX_WIDTH} bits "
                             f"({', '.join(wide)}); pass --force to override")
    cfg = Config(mode=mode, max_k=1 if mode == AI else args.max_k, timeout=args.timeout, solver=args.solver,
                 domain=args.domain, infer=args.infer, seed=args.seed, certify=args.certify,
                 keep_cnf=bool(args.dump_cnf))
    engine = None
    try:
        if mode == PORTFOLIO:
            v = run_portfolio(program, args.max_k, cfg)
        else:
            engine = Engine(program, cfg)
            v = engine.run()
    except CertificationError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if engine is not None:
        if args.dump_ssa and engine.s is not None:
            _write(args.dump_ssa, "\n".join(program_view(engine.s)) + "\n")
        if args.dump_cnf and engine.cnf is not None:
            _write(args.dump_cnf, engine.cnf)
    elif args.dump_ssa or args.dump_cnf:
        print("note: --dump-ssa and --dump-cnf are not available in portfolio mode", file=sys.stderr)
    if args.dump_invariant:
        _write(args.dump_invariant, v.invariant_text + "\n" if v.invariant_text else "")
    _write(args.witness, v.witness_text())
    if args.json:
        print(v.dumps(), file=out)
    else:
        print(v.headline(), file=out)
        body = v.witness_text()
        if v.status == SAFE:
            body = v.invariant_text + "\n" if v.invariant_text else ""
        if body:
            print(body, end="", file=out)
        if args.stats:
            print(json.dumps(v.stats.to_json(), indent=2), file=out)
    return _EXIT.get(v.status, EXIT_UNKNOWN)


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.max_k < 0 or args.jobs < 1:
            raise UsageError("--max-k must be >= 0 and --jobs >= 1")
        if Path(args.path).is_dir():
            return _corpus(args, out)
        return _single(args, out)
    except UsageError as e:
        print(f"kiwi-verify: {e}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

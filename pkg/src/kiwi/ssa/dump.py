"""Textual views of an SSA system and a naming-insensitive comparison.

The *program view* shows what is in effect at the current unwinding: it
drops constraints of switched-off unwindings, strips the active enable,
hides step bookkeeping and substitutes loop-exit merges that are plain
aliases.  At ``k = 1`` this is the familiar annotated-SSA listing.  The
*full view* prints every asserted constraint with its enable literal.
"""

from __future__ import annotations

import re

from kiwi.solver import bv
from kiwi.solver.bv import BvExpr
from kiwi.ssa.system import SsaSystem

HIDDEN_KINDS = ("slack", "select")


def _aliases(s: SsaSystem) -> dict[str, BvExpr]:
    out: dict[str, BvExpr] = {}
    for c in s.constraints:
        if c.kind == "merge" and c.enable is s.active:
            lhs, rhs = c.expr.args
            if rhs.op == "var":
                out[lhs.name] = rhs
    return out


def program_view(s: SsaSystem, assertions: bool = True) -> list[str]:
    aliases = _aliases(s)
    lines = []
    for c in s.constraints:
        if c.kind in HIDDEN_KINDS or (c.enable is not None and c.enable is not s.active):
            continue
        if c.kind == "merge" and c.expr.args[0].name in aliases:
            continue
        lines.append(bv.format_constraint(bv.substitute(c.expr, aliases)))
    if assertions:
        for a in s.assertions:
            g = bv.substitute(a.guard, aliases)
            p = bv.substitute(a.prop, aliases)
            lines.append(f"{bv.to_text(g)} ==> {bv.to_text(p)}")
    return lines


def full_view(s: SsaSystem) -> list[str]:
    lines = []
    for c in s.constraints:
        text = bv.format_constraint(c.expr)
        if c.enable is not None:
            text = f"{c.enable.name} ==> ({text})"
        lines.append(text + (f"  // {c.comment}" if c.comment else ""))
    for a in s.assertions:
        lines.append(f"{bv.to_text(a.guard)} ==> {bv.to_text(a.prop)}  // assertion {a.site}")
    return lines


# -- comparison up to renaming ---------------------------------------------------

_TOKEN = re.compile(r"[A-Za-z_]\w*#[\w%.]*|\d+u?|==>|==|!=|>=|<=|&&|\|\||\S")
_IMPLIED = re.compile(r"^(.*) \|\| !([A-Za-z_]\w*#[\w%.]*)$")


def normalize(line: str) -> str:
    line = line.split("//")[0].strip()
    m = _IMPLIED.match(line)
    if m:
        line = f"{m.group(2)} ==> {m.group(1)}"
    return line


def tokens(line: str) -> list[str]:
    out = []
    for t in _TOKEN.findall(normalize(line)):
        if t[0].isdigit() and t.endswith("u"):
            t = t[:-1]
        out.append(t)
    return out


def match_up_to_naming(actual: list[str], expected: list[str]) -> tuple[bool, str]:
    """Compare two listings line by line under one consistent bijective renaming
    of SSA names (tokens containing ``#``); literal ``u`` suffixes are ignored."""
    actual = [l for l in actual if l.strip()]
    expected = [l for l in expected if l.strip()]
    if len(actual) != len(expected):
        return False, f"{len(actual)} lines vs {len(expected)} expected"
    fwd: dict[str, str] = {}
    back: dict[str, str] = {}
    for i, (a, e) in enumerate(zip(actual, expected)):
        ta, te = tokens(a), tokens(e)
        if len(ta) != len(te):
            return False, f"line {i + 1}: {a!r} vs {e!r}"
        for x, y in zip(ta, te):
            if "#" in x and "#" in y:
                if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
                    return False, f"line {i + 1}: {x} cannot be renamed to {y}"
            elif x != y:
                return False, f"line {i + 1}: {a!r} vs {e!r}"
    return True, ""

"""Source pretty-printer.  ``parse(pretty(parse(s))) == parse(s)``."""

from __future__ import annotations

from kiwi.bvtypes import BvType
from kiwi.frontend import ast as A


def type_name(t: BvType) -> str:
    if t.width == 1:
        return "_Bool"
    if t.signed and t.width == 32:
        return "int"
    if not t.signed and t.width == 32:
        return "unsigned"
    return str(t)


def expr_text(e: A.Expr, show_implicit: bool = False) -> str:
    if isinstance(e, A.IntLit):
        return f"{e.value}{'u' if e.unsigned_suffix else ''}"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Nondet):
        return f"{e.intrinsic}()"
    if isinstance(e, A.Unary):
        inner = expr_text(e.operand, show_implicit)
        if isinstance(e.operand, (A.IntLit, A.Var, A.Nondet)):
            return f"{e.op}{inner}"
        return f"{e.op}({inner})"
    if isinstance(e, A.Binary):
        return f"({expr_text(e.left, show_implicit)} {e.op} {expr_text(e.right, show_implicit)})"
    if isinstance(e, A.Cond):
        return (f"({expr_text(e.cond, show_implicit)} ? {expr_text(e.then, show_implicit)}"
                f" : {expr_text(e.other, show_implicit)})")
    if isinstance(e, A.Cast):
        if e.implicit and not show_implicit:
            return expr_text(e.operand, show_implicit)
        return f"(({type_name(e.target)})({expr_text(e.operand, show_implicit)}))"
    raise TypeError(e)


def _strip(text: str) -> str:
    if text.startswith("(") and text.endswith(")"):
        depth = 0
        for i, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(text) - 1:
                return text
        return text[1:-1]
    return text


def stmt_lines(s: A.Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(s, A.Decl):
        init = f" = {_strip(expr_text(s.init))}" if s.init is not None else ""
        return [f"{pad}{type_name(s.vtype)} {s.name}{init};"]
    if isinstance(s, A.Assign):
        return [f"{pad}{s.target} = {_strip(expr_text(s.value))};"]
    if isinstance(s, A.Assert):
        return [f"{pad}assert({_strip(expr_text(s.cond))});"]
    if isinstance(s, A.Assume):
        return [f"{pad}__CPROVER_assume({_strip(expr_text(s.cond))});"]
    if isinstance(s, A.If):
        out = [f"{pad}if ({_strip(expr_text(s.cond))}) {{"]
        for t in s.then:
            out += stmt_lines(t, indent + 1)
        if s.other:
            out.append(f"{pad}}} else {{")
            for t in s.other:
                out += stmt_lines(t, indent + 1)
        out.append(f"{pad}}}")
        return out
    if isinstance(s, A.While):
        out = [f"{pad}while ({_strip(expr_text(s.cond))}) {{"]
        for t in s.body:
            out += stmt_lines(t, indent + 1)
        out.append(f"{pad}}}")
        return out
    raise TypeError(s)


def pretty(p: A.Program) -> str:
    lines = ["void main() {"]
    for s in p.body:
        lines += stmt_lines(s, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"

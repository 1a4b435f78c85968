"""Lexer and recursive-descent parser for the input language (see docs/grammar.md)."""

from __future__ import annotations

import re

from kiwi.bvtypes import BOOL, BvType, I8, I16, I32, I64, U8, U16, U32, U64
from kiwi.frontend import ast as A
from kiwi.frontend.ast import Diagnostic

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>0[xX][0-9a-fA-F]+[uU]?|[0-9]+[uU]?)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\+\+|--|\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<=|>>=|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%&|^~!<>=?:;,(){}\[\]#.])
    """,
    re.VERBOSE | re.DOTALL,
)

TYPE_WORDS = {
    "u8": U8, "u16": U16, "u32": U32, "u64": U64,
    "i8": I8, "i16": I16, "i32": I32, "i64": I64,
    "_Bool": BOOL, "bool": BOOL,
    "uint8_t": U8, "uint16_t": U16, "uint32_t": U32, "uint64_t": U64,
    "int8_t": I8, "int16_t": I16, "int32_t": I32, "int64_t": I64,
}
C_TYPE_WORDS = {"int", "unsigned", "signed", "char", "short", "long"}

NONDET = {
    "__VERIFIER_nondet_int": I32, "__VERIFIER_nondet_uint": U32,
    "__VERIFIER_nondet_unsigned": U32,
    "__VERIFIER_nondet_char": I8, "__VERIFIER_nondet_uchar": U8,
    "__VERIFIER_nondet_short": I16, "__VERIFIER_nondet_ushort": U16,
    "__VERIFIER_nondet_long": I64, "__VERIFIER_nondet_ulong": U64,
    "__VERIFIER_nondet_bool": BOOL, "__VERIFIER_nondet__Bool": BOOL,
}
for _w in (8, 16, 32, 64):
    NONDET[f"__VERIFIER_nondet_u{_w}"] = BvType(False, _w)
    NONDET[f"__VERIFIER_nondet_i{_w}"] = BvType(True, _w)

ASSUME = ("__CPROVER_assume", "__VERIFIER_assume")
ASSERT = ("assert", "__VERIFIER_assert")
KEYWORDS = {"if", "else", "while", "for", "do", "return", "void", "break", "continue", "goto", "switch",
            "extern", "static", "const", "volatile", "struct", "union", "float", "double"}
UNSUPPORTED_WORDS = {"for", "do", "break", "continue", "goto", "switch", "struct", "union", "float", "double"}


class Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: A.Pos) -> None:
        self.kind = kind
        self.text = text
        self.pos = pos

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}@{self.pos}"


def tokenize(source: str) -> list[Token]:
    out: list[Token] = []
    i, line, col = 0, 1, 1
    while i < len(source):
        m = _TOKEN.match(source, i)
        if m is None:
            raise Diagnostic(A.SYNTAX, f"unexpected character {source[i]!r}", (line, col))
        text = m.group()
        kind = m.lastgroup
        if kind == "op" and text == "#":
            raise Diagnostic(A.UNSUPPORTED, "preprocessor directives are not supported", (line, col))
        if kind not in ("ws", "comment"):
            out.append(Token(kind, text, (line, col)))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    out.append(Token("eof", "", (line, col)))
    return out


class Parser:
    def __init__(self, source: str) -> None:
        self.toks = tokenize(source)
        self.i = 0
        self.nondet_sites = 0
        self.assert_sites = 0

    # -- helpers -------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "id")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise Diagnostic(A.SYNTAX, f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.next()

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS or self.is_type_start(t):
            raise Diagnostic(A.SYNTAX, f"expected identifier, found {t.text!r}", t.pos)
        return self.next()

    def is_type_start(self, t: Token | None = None) -> bool:
        t = t or self.tok
        return t.kind == "id" and (t.text in TYPE_WORDS or t.text in C_TYPE_WORDS)

    # -- program -------------------------------------------------------------
    def program(self) -> A.Program:
        body: tuple[A.Stmt, ...] | None = None
        while self.tok.kind != "eof":
            if self.accept("extern"):
                self.skip_prototype()
                continue
            start = self.tok
            if not (self.at("void") or self.is_type_start()):
                raise Diagnostic(A.SYNTAX, "expected a function definition", start.pos)
            if not self.accept("void"):
                self.parse_type()
            name = self.ident() if self.tok.kind == "id" else self.tok
            self.expect("(")
            self.accept("void")
            self.expect(")")
            if self.accept(";"):
                if name.text not in NONDET and name.text not in ASSUME and name.text not in ASSERT:
                    raise Diagnostic(A.UNSUPPORTED, f"function {name.text!r} is not supported", name.pos)
                continue
            if name.text != "main":
                raise Diagnostic(A.UNSUPPORTED, f"function {name.text!r} (only main is supported)", name.pos)
            if body is not None:
                raise Diagnostic(A.REDECLARED, "main defined twice", name.pos)
            body = self.block(top=True)
        if body is None:
            raise Diagnostic(A.SYNTAX, "no main function", self.tok.pos)
        return A.Program(body)

    def skip_prototype(self) -> None:
        while not self.at(";"):
            if self.tok.kind == "eof":
                raise Diagnostic(A.SYNTAX, "unterminated declaration", self.tok.pos)
            t = self.next()
            if t.kind == "id" and t.text not in NONDET and t.text not in ASSUME + ASSERT \
                    and t.text not in KEYWORDS and not self.is_type_start(t) and self.at("("):
                raise Diagnostic(A.UNSUPPORTED, f"function {t.text!r} is not supported", t.pos)
        self.expect(";")

    def parse_type(self) -> BvType:
        t = self.tok
        if t.text in TYPE_WORDS:
            self.next()
            return TYPE_WORDS[t.text]
        words: list[str] = []
        while self.tok.kind == "id" and self.tok.text in C_TYPE_WORDS:
            words.append(self.next().text)
        if not words:
            raise Diagnostic(A.SYNTAX, f"expected a type, found {t.text!r}", t.pos)
        signed = "unsigned" not in words
        core = [w for w in words if w not in ("unsigned", "signed")]
        if not core or core == ["int"]:
            width = 32
        elif core[0] == "char":
            width = 8
        elif core[0] == "short":
            width = 16
        elif core[0] == "long":
            width = 64
        else:
            raise Diagnostic(A.SYNTAX, f"bad type {' '.join(words)!r}", t.pos)
        return BvType(signed, width)

    def block(self, top: bool = False) -> tuple[A.Stmt, ...]:
        self.expect("{")
        stmts: list[A.Stmt] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise Diagnostic(A.SYNTAX, "missing '}'", self.tok.pos)
            if top and self.at("return"):
                t = self.next()
                if not self.at(";"):
                    self.expr()
                self.expect(";")
                if not self.at("}"):
                    raise Diagnostic(A.UNSUPPORTED, "return must be the last statement of main", t.pos)
                continue
            stmts.extend(self.statement())
        self.expect("}")
        return tuple(stmts)

    def body_stmts(self) -> tuple[A.Stmt, ...]:
        if self.at("{"):
            return self.block()
        return tuple(self.statement())

    # -- statements ------------------------------------------------------------
    def statement(self) -> list[A.Stmt]:
        t = self.tok
        if t.kind == "id" and t.text in UNSUPPORTED_WORDS:
            raise Diagnostic(A.UNSUPPORTED, f"'{t.text}' is not supported", t.pos)
        if t.text == "return":
            raise Diagnostic(A.UNSUPPORTED, "return must be the last statement of main", t.pos)
        if self.at("{"):
            return list(self.block())
        if self.at(";"):
            self.next()
            return []
        if self.at("if"):
            self.next()
            self.expect("(")
            c = self.expr()
            self.expect(")")
            then = self.body_stmts()
            other: tuple[A.Stmt, ...] = ()
            if self.accept("else"):
                other = self.body_stmts()
            return [A.If(c, then, other, pos=t.pos)]
        if self.at("while"):
            self.next()
            self.expect("(")
            c = self.expr()
            self.expect(")")
            return [A.While(c, self.body_stmts(), pos=t.pos)]
        if t.kind == "id" and (t.text in ASSERT or t.text in ASSUME):
            self.next()
            self.expect("(")
            c = self.expr()
            self.expect(")")
            self.expect(";")
            if t.text in ASSERT:
                self.assert_sites += 1
                return [A.Assert(c, self.assert_sites, pos=t.pos)]
            return [A.Assume(c, pos=t.pos)]
        if self.accept("const") or self.accept("static") or self.accept("volatile"):
            return self.statement_decl(t)
        if self.is_type_start():
            return self.statement_decl(t)
        if self.at("++") or self.at("--"):
            op = self.next().text
            name = self.ident()
            self.expect(";")
            return [self._incr(name, op)]
        if t.kind == "id" and t.text not in KEYWORDS:
            return self.assignment_stmt()
        raise Diagnostic(A.SYNTAX, f"unexpected {t.text!r}", t.pos)

    def _incr(self, name: Token, op: str) -> A.Assign:
        one = A.IntLit(1, pos=name.pos)
        return A.Assign(name.text, A.Binary("+" if op == "++" else "-", A.Var(name.text, pos=name.pos), one,
                                            pos=name.pos), pos=name.pos)

    def statement_decl(self, start: Token) -> list[A.Stmt]:
        vt = self.parse_type()
        out: list[A.Stmt] = []
        while True:
            name = self.ident()
            if self.at("["):
                raise Diagnostic(A.UNSUPPORTED, "arrays are not supported", self.tok.pos)
            if self.at("*"):
                raise Diagnostic(A.UNSUPPORTED, "pointers are not supported", self.tok.pos)
            init = None
            if self.accept("="):
                init = self.expr()
            out.append(A.Decl(name.text, vt, init, pos=name.pos))
            if not self.accept(","):
                break
        if self.at("*"):
            raise Diagnostic(A.UNSUPPORTED, "pointers are not supported", self.tok.pos)
        self.expect(";")
        return out

    def assignment_stmt(self) -> list[A.Stmt]:
        name = self.ident()
        if self.at("("):
            raise Diagnostic(A.UNSUPPORTED, f"call to {name.text!r} (function calls are not supported)", name.pos)
        if self.at("["):
            raise Diagnostic(A.UNSUPPORTED, "arrays are not supported", self.tok.pos)
        if self.at("++") or self.at("--"):
            op = self.next().text
            self.expect(";")
            return [self._incr(name, op)]
        op_tok = self.tok
        if op_tok.text == "=":
            self.next()
            # chained assignment a = b = c = e  ==>  c = e; b = c; a = b
            targets = [name]
            while self.tok.kind == "id" and self.peek().text == "=" and self.peek(2).text != "=":
                targets.append(self.next())
                self.next()
            value = self.expr()
            self.expect(";")
            out: list[A.Stmt] = []
            for tgt in reversed(targets):
                out.append(A.Assign(tgt.text, value, pos=tgt.pos))
                value = A.Var(tgt.text, pos=tgt.pos)
            return out
        if op_tok.text.endswith("=") and op_tok.text[:-1] in ("+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"):
            self.next()
            rhs = self.expr()
            self.expect(";")
            return [A.Assign(name.text, A.Binary(op_tok.text[:-1], A.Var(name.text, pos=name.pos), rhs,
                                                 pos=op_tok.pos), pos=name.pos)]
        raise Diagnostic(A.SYNTAX, f"expected assignment, found {op_tok.text!r}", op_tok.pos)

    # -- expressions -----------------------------------------------------------
    def expr(self) -> A.Expr:
        return self.conditional()

    def conditional(self) -> A.Expr:
        c = self.binary(0)
        if self.at("?"):
            t = self.next()
            a = self.expr()
            self.expect(":")
            b = self.conditional()
            return A.Cond(c, a, b, pos=t.pos)
        return c

    LEVELS = [("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="), ("<", "<=", ">", ">="), ("<<", ">>"),
              ("+", "-"), ("*", "/", "%")]

    def binary(self, level: int) -> A.Expr:
        if level == len(self.LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in self.LEVELS[level]:
            t = self.next()
            right = self.binary(level + 1)
            left = A.Binary(t.text, left, right, pos=t.pos)
        return left

    def unary(self) -> A.Expr:
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!", "~", "+"):
            self.next()
            return A.Unary(t.text, self.unary(), pos=t.pos)
        if t.kind == "op" and t.text in ("++", "--"):
            raise Diagnostic(A.UNSUPPORTED, "increments inside expressions are not supported", t.pos)
        if self.at("(") and (self.is_type_start(self.peek())):
            self.next()
            vt = self.parse_type()
            if self.at("*"):
                raise Diagnostic(A.UNSUPPORTED, "pointers are not supported", self.tok.pos)
            self.expect(")")
            return A.Cast(vt, self.unary(), pos=t.pos)
        return self.primary()

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "num":
            self.next()
            text = t.text
            suffix = text[-1] in "uU"
            if suffix:
                text = text[:-1]
            return A.IntLit(int(text, 0), suffix, pos=t.pos)
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "id":
            if t.text in ("TRUE", "true"):
                self.next()
                return A.IntLit(1, pos=t.pos)
            if t.text in ("FALSE", "false"):
                self.next()
                return A.IntLit(0, pos=t.pos)
            if t.text in NONDET:
                self.next()
                self.expect("(")
                self.expect(")")
                self.nondet_sites += 1
                return A.Nondet(NONDET[t.text], t.text, self.nondet_sites, pos=t.pos)
            name = self.ident()
            if self.at("("):
                raise Diagnostic(A.UNSUPPORTED, f"call to {name.text!r} (function calls are not supported)",
                                 name.pos)
            if self.at("["):
                raise Diagnostic(A.UNSUPPORTED, "arrays are not supported", self.tok.pos)
            if self.at("++") or self.at("--"):
                raise Diagnostic(A.UNSUPPORTED, "increments inside expressions are not supported", self.tok.pos)
            return A.Var(name.text, pos=name.pos)
        if t.kind == "op" and t.text == "*":
            raise Diagnostic(A.UNSUPPORTED, "pointers are not supported", t.pos)
        if t.kind == "op" and t.text == "&":
            raise Diagnostic(A.UNSUPPORTED, "pointers are not supported", t.pos)
        raise Diagnostic(A.SYNTAX, f"unexpected {t.text or 'end of input'!r} in expression", t.pos)


def parse(source: str) -> A.Program:
    """Parse a program; raises :class:`Diagnostic` on error."""
    return Parser(source).program()

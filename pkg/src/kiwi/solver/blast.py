"""Tseitin-style bit-blasting of :mod:`kiwi.solver.bv` expressions.

Literals are DIMACS integers.  Literal ``TRUE_LIT`` is variable 1 and is
fixed true by a unit clause, so ``-TRUE_LIT`` is false.  Gates are
hash-consed and constant-folded at the literal level, and every
expression node is encoded at most once per builder.
"""

from __future__ import annotations

from typing import Callable, Sequence

from kiwi.solver.bv import BvExpr

TRUE_LIT = 1
FALSE_LIT = -1

Word = list[int]


class CnfBuilder:
    """Accumulates clauses and hands them to a sink as they are produced."""

    def __init__(self, sink: Callable[[Sequence[int]], None] | None = None) -> None:
        self.num_vars = 1
        self.clauses: list[tuple[int, ...]] = []
        self._sink = sink
        self._gates: dict[tuple, int] = {}
        self._words: dict[int, Word] = {}
        self._keep: list[BvExpr] = []
        self.var_bits: dict[str, Word] = {}
        self.add_clause((TRUE_LIT,))

    # -- clause level -------------------------------------------------------
    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Sequence[int]) -> None:
        out = []
        for l in lits:
            if l == TRUE_LIT:
                return
            if l == FALSE_LIT:
                continue
            out.append(l)
        c = tuple(out)
        self.clauses.append(c)
        if self._sink is not None:
            self._sink(c)

    # -- gates ----------------------------------------------------------------
    def g_and(self, a: int, b: int) -> int:
        if a == FALSE_LIT or b == FALSE_LIT or a == -b:
            return FALSE_LIT
        if a == TRUE_LIT:
            return b
        if b == TRUE_LIT or a == b:
            return a
        if a > b:
            a, b = b, a
        key = ("and", a, b)
        g = self._gates.get(key)
        if g is None:
            g = self.new_var()
            self.add_clause((-g, a))
            self.add_clause((-g, b))
            self.add_clause((g, -a, -b))
            self._gates[key] = g
        return g

    def g_or(self, a: int, b: int) -> int:
        return -self.g_and(-a, -b)

    def g_xor(self, a: int, b: int) -> int:
        if a == FALSE_LIT:
            return b
        if b == FALSE_LIT:
            return a
        if a == TRUE_LIT:
            return -b
        if b == TRUE_LIT:
            return -a
        if a == b:
            return FALSE_LIT
        if a == -b:
            return TRUE_LIT
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        if a > b:
            a, b = b, a
        key = ("xor", a, b)
        g = self._gates.get(key)
        if g is None:
            g = self.new_var()
            self.add_clause((-g, a, b))
            self.add_clause((-g, -a, -b))
            self.add_clause((g, -a, b))
            self.add_clause((g, a, -b))
            self._gates[key] = g
        return g * sign

    def g_ite(self, c: int, a: int, b: int) -> int:
        if c == TRUE_LIT:
            return a
        if c == FALSE_LIT:
            return b
        if a == b:
            return a
        if a == TRUE_LIT and b == FALSE_LIT:
            return c
        if a == FALSE_LIT and b == TRUE_LIT:
            return -c
        if a == TRUE_LIT or b == TRUE_LIT or a == FALSE_LIT or b == FALSE_LIT:
            return self.g_or(self.g_and(c, a), self.g_and(-c, b))
        if c < 0:
            c, a, b = -c, b, a
        key = ("ite", c, a, b)
        g = self._gates.get(key)
        if g is None:
            g = self.new_var()
            self.add_clause((-g, -c, a))
            self.add_clause((-g, c, b))
            self.add_clause((g, -c, -a))
            self.add_clause((g, c, -b))
            self.add_clause((-g, a, b))
            self.add_clause((g, -a, -b))
            self._gates[key] = g
        return g

    def g_and_n(self, lits: Sequence[int]) -> int:
        out = TRUE_LIT
        for l in lits:
            out = self.g_and(out, l)
        return out

    def g_or_n(self, lits: Sequence[int]) -> int:
        out = FALSE_LIT
        for l in lits:
            out = self.g_or(out, l)
        return out

    def g_eq(self, a: int, b: int) -> int:
        return -self.g_xor(a, b)

    # -- words ----------------------------------------------------------------
    def w_const(self, value: int, width: int) -> Word:
        return [TRUE_LIT if (value >> i) & 1 else FALSE_LIT for i in range(width)]

    def w_add(self, a: Word, b: Word, carry: int = FALSE_LIT) -> Word:
        out = []
        for x, y in zip(a, b):
            t = self.g_xor(x, y)
            out.append(self.g_xor(t, carry))
            carry = self.g_or(self.g_and(x, y), self.g_and(t, carry))
        return out

    def w_neg(self, a: Word) -> Word:
        return self.w_add([-x for x in a], self.w_const(0, len(a)), TRUE_LIT)

    def w_sub(self, a: Word, b: Word) -> Word:
        return self.w_add(a, [-x for x in b], TRUE_LIT)

    def w_mul(self, a: Word, b: Word) -> Word:
        n = len(a)
        acc = self.w_const(0, n)
        for i in range(n):
            if b[i] == FALSE_LIT:
                continue
            part = [FALSE_LIT] * i + [self.g_and(a[j], b[i]) for j in range(n - i)]
            acc = self.w_add(acc, part)
        return acc

    def w_ult(self, a: Word, b: Word) -> int:
        # borrow out of a - b
        lt = FALSE_LIT
        for x, y in zip(a, b):
            # lt_i = (!x & y) | (!(x ^ y) & lt)
            lt = self.g_or(self.g_and(-x, y), self.g_and(-self.g_xor(x, y), lt))
        return lt

    def w_slt(self, a: Word, b: Word) -> int:
        a2 = a[:-1] + [-a[-1]]
        b2 = b[:-1] + [-b[-1]]
        return self.w_ult(a2, b2)

    def w_eq(self, a: Word, b: Word) -> int:
        return self.g_and_n([self.g_eq(x, y) for x, y in zip(a, b)])

    def w_ite(self, c: int, a: Word, b: Word) -> Word:
        return [self.g_ite(c, x, y) for x, y in zip(a, b)]

    def w_udivrem(self, a: Word, b: Word) -> tuple[Word, Word]:
        """Restoring division; x/0 is all-ones and x%0 is x."""
        n = len(a)
        rem = self.w_const(0, n)
        quot = [FALSE_LIT] * n
        for i in range(n - 1, -1, -1):
            # shift remainder left, bring in bit i of a; keep an extra top bit
            top = rem[-1]
            rem = [a[i]] + rem[:-1]
            wide_rem = rem + [top]
            wide_b = b + [FALSE_LIT]
            diff = self.w_sub(wide_rem, wide_b)
            ge = -self.w_ult(wide_rem, wide_b)
            quot[i] = ge
            rem = self.w_ite(ge, diff[:n], rem)
        return quot, rem

    def w_shift(self, a: Word, b: Word, kind: str) -> Word:
        n = len(a)
        fill = a[-1] if kind == "ashr" else FALSE_LIT
        cur = list(a)
        stages = max(1, (n - 1).bit_length())
        for s in range(stages):
            amt = 1 << s
            if amt >= n:
                shifted = [fill] * n
            elif kind == "shl":
                shifted = [FALSE_LIT] * amt + cur[: n - amt]
            else:
                shifted = cur[amt:] + [fill] * amt
            cur = self.w_ite(b[s], shifted, cur)
        big = self.g_or_n(b[stages:])
        # amounts >= width that fit in the low stages
        if (1 << stages) > n:
            lim = self.w_const(n, len(b))
            big = self.g_or(big, -self.w_ult(b, lim))
        return self.w_ite(big, [fill] * n, cur)

    # -- expressions ------------------------------------------------------------
    def var_word(self, name: str, width: int) -> Word:
        w = self.var_bits.get(name)
        if w is None:
            w = [self.new_var() for _ in range(width)]
            self.var_bits[name] = w
        elif len(w) != width:
            raise TypeError(f"variable {name} used at widths {len(w)} and {width}")
        return w

    def blast(self, e: BvExpr) -> Word:
        """Return the literal vector (LSB first) for ``e``."""
        words = self._words
        if id(e) in words:
            return words[id(e)]
        stack = [e]
        while stack:
            n = stack[-1]
            if id(n) in words:
                stack.pop()
                continue
            pending = [a for a in n.args if id(a) not in words]
            if pending:
                stack.extend(pending)
                continue
            words[id(n)] = self._encode(n, [words[id(a)] for a in n.args])
            self._keep.append(n)
            stack.pop()
        return words[id(e)]

    def lit(self, e: BvExpr) -> int:
        if not e.is_bool:
            raise TypeError("literal of non-boolean expression")
        return self.blast(e)[0]

    def _encode(self, n: BvExpr, a: list[Word]) -> Word:
        op = n.op
        w = n.width
        if op == "const":
            return self.w_const(n.value, w)
        if op == "var":
            return self.var_word(n.name, w)
        if op == "add":
            return self.w_add(a[0], a[1])
        if op == "sub":
            return self.w_sub(a[0], a[1])
        if op == "neg":
            return self.w_neg(a[0])
        if op == "mul":
            return self.w_mul(a[0], a[1])
        if op in ("udiv", "urem"):
            q, r = self._udivrem_cached(n.args[0], n.args[1], a[0], a[1])
            return q if op == "udiv" else r
        if op in ("sdiv", "srem"):
            return self._sdivrem(op, n.args[0], n.args[1], a[0], a[1])
        if op == "not":
            return [-x for x in a[0]]
        if op == "and":
            return [self.g_and(x, y) for x, y in zip(a[0], a[1])]
        if op == "or":
            return [self.g_or(x, y) for x, y in zip(a[0], a[1])]
        if op == "xor":
            return [self.g_xor(x, y) for x, y in zip(a[0], a[1])]
        if op in ("shl", "lshr", "ashr"):
            return self.w_shift(a[0], a[1], op)
        if op == "eq":
            return [self.w_eq(a[0], a[1])]
        if op == "ne":
            return [-self.w_eq(a[0], a[1])]
        if op == "ult":
            return [self.w_ult(a[0], a[1])]
        if op == "ule":
            return [-self.w_ult(a[1], a[0])]
        if op == "slt":
            return [self.w_slt(a[0], a[1])]
        if op == "sle":
            return [-self.w_slt(a[1], a[0])]
        if op == "band":
            return [self.g_and_n([x[0] for x in a])]
        if op == "bor":
            return [self.g_or_n([x[0] for x in a])]
        if op == "bnot":
            return [-a[0][0]]
        if op == "implies":
            return [self.g_or(-a[0][0], a[1][0])]
        if op == "ite":
            return self.w_ite(a[0][0], a[1], a[2])
        if op == "zext":
            return a[0] + [FALSE_LIT] * (w - len(a[0]))
        if op == "sext":
            return a[0] + [a[0][-1]] * (w - len(a[0]))
        if op == "extract":
            hi, lo = n.params
            return a[0][lo : hi + 1]
        if op == "retype":
            return a[0]
        raise ValueError(f"cannot blast {op}")

    def _udivrem_cached(self, x: BvExpr, y: BvExpr, a: Word, b: Word) -> tuple[Word, Word]:
        key = ("udivrem", id(x), id(y))
        hit = self._gates.get(key)
        if hit is None:
            hit = self.w_udivrem(a, b)
            self._gates[key] = hit  # type: ignore[assignment]
        return hit  # type: ignore[return-value]

    def _sdivrem(self, op: str, x: BvExpr, y: BvExpr, a: Word, b: Word) -> Word:
        key = ("sdivrem", id(x), id(y))
        hit = self._gates.get(key)
        if hit is None:
            sa, sb = a[-1], b[-1]
            abs_a = self.w_ite(sa, self.w_neg(a), a)
            abs_b = self.w_ite(sb, self.w_neg(b), b)
            q, r = self.w_udivrem(abs_a, abs_b)
            q_signed = self.w_ite(self.g_xor(sa, sb), self.w_neg(q), q)
            r_signed = self.w_ite(sa, self.w_neg(r), r)
            zero = self.w_eq(b, self.w_const(0, len(b)))
            q_final = self.w_ite(zero, self.w_const(-1, len(a)), q_signed)
            r_final = self.w_ite(zero, a, r_signed)
            hit = (q_final, r_final)
            self._gates[key] = hit  # type: ignore[assignment]
        return hit[0] if op == "sdiv" else hit[1]  # type: ignore[index]

    def word_value(self, word: Word, model_true: Callable[[int], bool]) -> int:
        v = 0
        for i, l in enumerate(word):
            if model_true(l):
                v |= 1 << i
        return v

"""Tokenizer and recursive-descent parser for polynomial expressions.

Grammar::

    expr   := ['+' | '-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT ['/' INT] | IDENT ['^' INT] | '(' expr ')'

Juxtaposition is not multiplication.  The AST is made of plain tuples so it
compares by value:

    ('sum', ((sign, term), ...))       sign is +1 or -1
    ('prod', (factor, ...))
    ('num', Fraction)
    ('var', name, exponent)
    ('paren', sum)
"""
from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", "", n + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] not in ("op",):
            raise ExprSyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def expr(self):
        terms = []
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        terms.append((sign, self.term()))
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                terms.append((-1 if t[1] == "-" else 1, self.term()))
            else:
                break
        return ("sum", tuple(terms))

    def term(self):
        factors = [self.factor()]
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                factors.append(self.factor())
            else:
                break
        return ("prod", tuple(factors))

    def factor(self):
        t = self.take()
        if t[0] == "int":
            num = int(t[1])
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "int":
                    raise ExprSyntaxError("expected an integer denominator", d[2])
                if int(d[1]) == 0:
                    raise ExprSyntaxError("zero denominator", d[2])
                return ("num", Fraction(num, int(d[1])))
            return ("num", Fraction(num))
        if t[0] == "ident":
            exp = 1
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "^":
                self.take()
                e = self.take()
                if e[0] != "int":
                    raise ExprSyntaxError("expected an integer exponent", e[2])
                exp = int(e[1])
            return ("var", t[1], exp)
        if t[0] == "op" and t[1] == "(":
            inner = self.expr()
            self.expect(")")
            return ("paren", inner)
        if t[0] == "ident" or t[0] == "int":
            raise ExprSyntaxError("juxtaposition is not multiplication; use '*'", t[2])
        raise ExprSyntaxError(f"unexpected {t[1] or 'end of input'!r}", t[2])


def parse_expr(text: str):
    p = _Parser(text)
    tree = p.expr()
    t = p.peek()
    if t[0] != "end":
        if t[0] in ("ident", "int") or (t[0] == "op" and t[1] == "("):
            raise ExprSyntaxError("juxtaposition is not multiplication; use '*'", t[2])
        raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
    return tree


def _fmt_num(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_expr(tree) -> str:
    kind = tree[0]
    if kind == "sum":
        parts = []
        for k, (sign, term) in enumerate(tree[1]):
            s = format_expr(term)
            if k == 0:
                parts.append(("-" if sign < 0 else "") + s)
            else:
                parts.append(("- " if sign < 0 else "+ ") + s)
        return " ".join(parts)
    if kind == "prod":
        return "*".join(format_expr(f) for f in tree[1])
    if kind == "num":
        return _fmt_num(tree[1])
    if kind == "var":
        return tree[1] if tree[2] == 1 else f"{tree[1]}^{tree[2]}"
    if kind == "paren":
        return "(" + format_expr(tree[1]) + ")"
    raise ValueError(kind)


def names_in(tree) -> list[str]:
    kind = tree[0]
    if kind == "sum":
        return [n for _, t in tree[1] for n in names_in(t)]
    if kind == "prod":
        return [n for f in tree[1] for n in names_in(f)]
    if kind == "var":
        return [tree[1]]
    if kind == "paren":
        return names_in(tree[1])
    return []


def evaluate(tree, lookup, mul, one, scalar):
    """Fold an AST.  ``lookup(name)`` gives a value, ``mul(a, b)`` multiplies,
    ``scalar(q)`` lifts a Fraction; values must support ``+``, ``-`` and unary ``-``."""
    kind = tree[0]
    if kind == "sum":
        acc = None
        for sign, term in tree[1]:
            v = evaluate(term, lookup, mul, one, scalar)
            if sign < 0:
                v = -v
            acc = v if acc is None else acc + v
        return acc
    if kind == "prod":
        acc = None
        for f in tree[1]:
            v = evaluate(f, lookup, mul, one, scalar)
            acc = v if acc is None else mul(acc, v)
        return acc
    if kind == "num":
        return scalar(tree[1])
    if kind == "var":
        base = lookup(tree[1])
        if tree[2] == 0:
            return one
        acc = base
        for _ in range(tree[2] - 1):
            acc = mul(acc, base)
        return acc
    if kind == "paren":
        return evaluate(tree[1], lookup, mul, one, scalar)
    raise ValueError(kind)

"""Parser for the expression mini-language used on the command line.

Grammar (``^`` binds tightest and associates to the right; unary minus sits
between ``^`` and ``*``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' exponent)?
    atom    := NUMBER | 'x' | call | '(' expr ')'
    call    := weier(a, b[, N]) | takagi([N]) | peano_x([digits])
             | cantor_ext(expr, r[, depth])

Numeric arguments of calls may be any constant subexpression, for example
``weier(3^-0.5, 3)``.  A non-constant base may only be raised to a positive
integer power.
"""

from __future__ import annotations

import math
import re

from .errors import ParseError
from .funcgen import (
    CantorExtension,
    Constant,
    Expr,
    Linear,
    PeanoX,
    Power,
    Product,
    Reciprocal,
    Sum,
    Takagi,
    Weierstrass,
)

_TOKEN = re.compile(r"""
    \s*(?:
        (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^(),])
    )""", re.VERBOSE)

_CALLS = ("weier", "takagi", "peano_x", "cantor_ext")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].isspace():
            break
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = mt.lastgroup
        start = mt.start(kind)
        tokens.append((kind, mt.group(kind), start))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _constant_value(e):
    return e.c if isinstance(e, Constant) else None


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    # token helpers
    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "num":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {value!r}, found {found}")
        return self.take()

    # grammar
    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = _add(e, rhs) if op == "+" else _add(e, _negate(rhs))
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op_tok = self.take()
            rhs = self.unary()
            e = _mul(e, rhs) if op_tok[1] == "*" else self.divide(e, rhs, op_tok)
        return e

    def divide(self, num, den, tok):
        a, b = _constant_value(num), _constant_value(den)
        if a is not None and b is not None:
            if b == 0.0:
                raise self.error("division by the constant 0", tok)
            return Constant(a / b)
        if a == 1.0:
            return Reciprocal(den)
        return Product(num, Reciprocal(den))

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return _negate(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] != ("op", "^"):
            return base
        caret = self.take()
        sign = 1.0
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1.0
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            exponent = Constant(sign * float(tok[1]))
        elif tok[1] == "(":
            exponent = self.atom()
            if sign < 0:
                exponent = _negate(exponent)
        else:
            raise self.error("expected a numeric exponent")
        if self.peek()[:2] == ("op", "^"):
            raise self.error("chained powers are ambiguous; add parentheses")
        p = _constant_value(exponent)
        if p is None:
            raise self.error("exponent must be a constant", tok)
        b = _constant_value(base)
        if b is not None:
            try:
                value = math.pow(b, p)
            except (ValueError, OverflowError):
                raise self.error(f"cannot evaluate {b!r}^{p!r}", caret) from None
            return Constant(value)
        if p != int(p) or p < 1:
            raise self.error("a function may only be raised to a positive integer power", tok)
        return Power(base, int(p))

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Constant(float(value))
        if kind == "name":
            self.take()
            if value == "x":
                return Linear(1.0, 0.0)
            if value in _CALLS:
                return self.call(value, tok)
            raise self.error(f"unknown name {value!r} (functions: {', '.join(_CALLS)}; variable: x)", tok)
        if value == "(" and kind == "op":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(value)
        raise self.error(f"expected a number, x, a function or '(', found {found}")

    def call(self, name, name_tok):
        self.expect("(")
        args = []
        if self.peek()[1] != ")":
            args.append((self.peek(), self.expr()))
            while self.peek()[:2] == ("op", ","):
                self.take()
                args.append((self.peek(), self.expr()))
        self.expect(")")
        try:
            return _build_call(self, name, name_tok, args)
        except ParseError:
            raise
        except (ValueError, TypeError) as exc:
            raise self.error(f"{name}: {exc}", name_tok) from None


def _number(parser, name, tok_expr, integer=False):
    tok, e = tok_expr
    v = _constant_value(e)
    if v is None:
        raise parser.error(f"{name}: argument must be a constant", tok)
    if integer:
        if v != int(v):
            raise parser.error(f"{name}: argument must be an integer, got {v!r}", tok)
        return int(v)
    return v


def _build_call(parser, name, name_tok, args):
    arity = {"weier": (2, 3), "takagi": (0, 1), "peano_x": (0, 1), "cantor_ext": (2, 3)}[name]
    if not arity[0] <= len(args) <= arity[1]:
        want = f"{arity[0]}" if arity[0] == arity[1] else f"{arity[0]} to {arity[1]}"
        raise parser.error(f"{name} takes {want} arguments, got {len(args)}", name_tok)
    if name == "weier":
        a = _number(parser, name, args[0])
        b = _number(parser, name, args[1], integer=True)
        n = _number(parser, name, args[2], integer=True) if len(args) == 3 else None
        return Weierstrass(a, b, n)
    if name == "takagi":
        return Takagi(_number(parser, name, args[0], integer=True) if args else None)
    if name == "peano_x":
        return PeanoX(_number(parser, name, args[0], integer=True) if args else None)
    inner = args[0][1]
    r = _number(parser, name, args[1])
    depth = _number(parser, name, args[2], integer=True) if len(args) == 3 else None
    return CantorExtension(inner, r, depth)


def _negate(e):
    v = _constant_value(e)
    if v is not None:
        return Constant(-v)
    return Product(Constant(-1.0), e)


def _add(a, b):
    va, vb = _constant_value(a), _constant_value(b)
    if va is not None and vb is not None:
        return Constant(va + vb)
    return Sum(a, b)


def _mul(a, b):
    va, vb = _constant_value(a), _constant_value(b)
    if va is not None and vb is not None:
        return Constant(va * vb)
    return Product(a, b)


def parse(text: str) -> Expr:
    """Build the expression tree for ``text``.

    Raises
    ------
    ParseError
        With the offending position, for malformed input or invalid
        generator parameters.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", text or "", 0)
    return _Parser(text).parse()

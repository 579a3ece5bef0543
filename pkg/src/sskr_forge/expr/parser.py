"""Recursive-descent parser for the infix expression grammar.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := base ('^' unary)?          # right-associative, binds tighter than unary minus
    base   := number | ident | ident '(' args ')'
            | 'p' '(' int ',' int ',' int ')' | 'v' '(' int ')'
            | '(' expr ')'

Numbers are decimal with an optional exponent. `i` is the imaginary unit;
`pi` and `e` are predefined constants. There is no implicit multiplication.
"""

from __future__ import annotations

import math

from .nodes import (
    BinOp,
    Call,
    Constant,
    DEFAULT_REGISTRY,
    Expr,
    FreeSymbol,
    Laplacian,
    Neg,
    ParamRef,
    Registry,
    VarRef,
)


class ExprSyntaxError(ValueError):
    """Malformed expression text. offset is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownFunction(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown function {name!r}", offset)
        self.name = name


_CONSTANTS = {"pi": complex(math.pi), "e": complex(math.e), "i": 1j}


class _Token:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind  # "num" | "ident" | "op" | "eof"
        self.value = value
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    n = len(text)
    idx = 0
    while idx < n:
        ch = text[idx]
        if ch.isspace():
            idx += 1
            continue
        if ch.isdigit() or (ch == "." and idx + 1 < n and text[idx + 1].isdigit()):
            start = idx
            while idx < n and text[idx].isdigit():
                idx += 1
            if idx < n and text[idx] == ".":
                idx += 1
                while idx < n and text[idx].isdigit():
                    idx += 1
            if idx < n and text[idx] in "eE":
                # consume as an exponent only when digits actually follow
                j = idx + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    idx = j
                    while idx < n and text[idx].isdigit():
                        idx += 1
            tokens.append(_Token("num", float(text[start:idx]), start))
            continue
        if ch.isalpha() or ch == "_":
            start = idx
            while idx < n and (text[idx].isalnum() or text[idx] == "_"):
                idx += 1
            tokens.append(_Token("ident", text[start:idx], start))
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token("op", ch, idx))
            idx += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", idx)
    tokens.append(_Token("eof", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], registry: Registry):
        self.tokens = tokens
        self.idx = 0
        self.registry = registry

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect_op(self, op: str, context: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.value != op:
            raise ExprSyntaxError(f"expected {op!r} {context}", tok.pos)
        return self.advance()

    def _starts_operand(self, tok: _Token) -> bool:
        return tok.kind in ("num", "ident") or (tok.kind == "op" and tok.value in ("(", "-"))

    def _require_operand(self, after: _Token) -> None:
        # missing-operand errors point at the operator that needed one
        if not self._starts_operand(self.peek()):
            raise ExprSyntaxError(f"expected operand after {after.value!r}", after.pos)

    def parse(self) -> Expr:
        tok = self.peek()
        if not self._starts_operand(tok):
            raise ExprSyntaxError("expected expression", tok.pos)
        node = self.expr()
        tail = self.peek()
        if tail.kind != "eof":
            raise ExprSyntaxError(f"unexpected token {tail.value!r}", tail.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = self.advance()
            self._require_operand(op)
            node = BinOp(op.value, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().value in "*/":
            op = self.advance()
            self._require_operand(op)
            node = BinOp(op.value, node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.value == "-":
            op = self.advance()
            self._require_operand(op)
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.base()
        tok = self.peek()
        if tok.kind == "op" and tok.value == "^":
            op = self.advance()
            self._require_operand(op)
            return BinOp("^", node, self.unary())
        return node

    def base(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Constant(complex(tok.value))
        if tok.kind == "op" and tok.value == "(":
            node = self.expr()
            self.expect_op(")", "to close parenthesis")
            return node
        if tok.kind == "ident":
            follows_call = self.peek().kind == "op" and self.peek().value == "("
            if tok.value == "p" and follows_call:
                r, c, k = self._int_args(tok, 3)
                return ParamRef(r, c, k)
            if tok.value == "v" and follows_call:
                (c,) = self._int_args(tok, 1)
                return VarRef(c)
            if follows_call:
                return self._call(tok)
            if tok.value in _CONSTANTS:
                return Constant(_CONSTANTS[tok.value])
            return FreeSymbol(tok.value)
        raise ExprSyntaxError(f"unexpected token {tok.value!r}", tok.pos)

    def _call(self, name_tok: _Token) -> Expr:
        name = name_tok.value
        if name != "laplacian" and not self.registry.knows(name):
            raise UnknownFunction(name, name_tok.pos)
        self.expect_op("(", "to open argument list")
        args = [self.expr()]
        while self.peek().kind == "op" and self.peek().value == ",":
            self.advance()
            args.append(self.expr())
        self.expect_op(")", "to close argument list")
        if name == "laplacian":
            if len(args) != 1:
                raise ExprSyntaxError("laplacian takes exactly 1 argument", name_tok.pos)
            return Laplacian(args[0])
        lo, hi = self.registry.arity(name)
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo}..{hi}"
            raise ExprSyntaxError(
                f"{name} expects {want} argument(s), got {len(args)}", name_tok.pos
            )
        return Call(name, tuple(args))

    def _int_args(self, name_tok: _Token, count: int) -> list[int]:
        self.expect_op("(", "to open argument list")
        values = []
        for pos in range(count):
            if pos:
                self.expect_op(",", "between indices")
            tok = self.advance()
            if tok.kind != "num" or tok.value != int(tok.value) or tok.value < 1:
                raise ExprSyntaxError(
                    f"{name_tok.value}() indices must be positive integers", tok.pos
                )
            values.append(int(tok.value))
        self.expect_op(")", "to close argument list")
        return values


def parse(text: str, registry: Registry = DEFAULT_REGISTRY) -> Expr:
    """Parse infix text into an expression tree.

    Raises ExprSyntaxError (with a byte offset) on malformed input and
    UnknownFunction for calls to unregistered names.
    """
    return _Parser(_tokenize(text), registry).parse()

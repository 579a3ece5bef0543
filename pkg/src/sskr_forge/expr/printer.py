"""Stable plain-text rendering of expression trees.

The printer emits minimal parentheses under the parser's precedence rules, so
printing then reparsing a parser-built tree reproduces it node for node. Trees
built by hand out of forms the parser never produces (negative or complex
Constants) print to an evaluation-equivalent spelling instead; for those,
print(parse(print(t))) is a fixed point from the second round on.
"""

from __future__ import annotations

from .nodes import BinOp, Call, Constant, Expr, FreeSymbol, Laplacian, Neg, ParamRef, VarRef

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_UNARY = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _render(e: Expr) -> tuple[str, int]:
    """Return (text, effective precedence of the rendered form)."""
    match e:
        case Constant(value):
            re_, im = value.real, value.imag
            if im == 0:
                if re_ < 0:
                    return f"-{_fmt_real(-re_)}", _PREC_UNARY
                return _fmt_real(re_), _PREC_ATOM
            if re_ == 0:
                if im == 1:
                    return "i", _PREC_ATOM
                if im == -1:
                    return "-i", _PREC_UNARY
                if im < 0:
                    return f"-{_fmt_real(-im)}*i", _PREC_UNARY
                return f"{_fmt_real(im)}*i", _PREC_MUL
            sign = "-" if im < 0 else "+"
            return f"{_fmt_real(re_)} {sign} {_fmt_real(abs(im))}*i", _PREC_ADD
        case VarRef(column):
            return f"v({column})", _PREC_ATOM
        case ParamRef(row, column, index):
            return f"p({row},{column},{index})", _PREC_ATOM
        case FreeSymbol(name):
            return name, _PREC_ATOM
        case Neg(operand):
            text = _wrap(operand, _PREC_UNARY)
            return f"-{text}", _PREC_UNARY
        case BinOp("+" | "-" as op, left, right):
            lt = _wrap(left, _PREC_ADD)
            # right side needs parens when it is itself additive (left associativity)
            rt = _wrap(right, _PREC_ADD + 1)
            return f"{lt} {op} {rt}", _PREC_ADD
        case BinOp("*" | "/" as op, left, right):
            lt = _wrap(left, _PREC_MUL)
            rt = _wrap(right, _PREC_MUL + 1)
            return f"{lt}{op}{rt}", _PREC_MUL
        case BinOp("^", left, right):
            lt = _wrap(left, _PREC_POW + 1)  # power is right-associative
            rt = _wrap(right, _PREC_UNARY)
            return f"{lt}^{rt}", _PREC_POW
        case Call(name, args):
            return f"{name}({', '.join(to_text(a) for a in args)})", _PREC_ATOM
        case Laplacian(operand):
            return f"laplacian({to_text(operand)})", _PREC_ATOM
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr, min_prec: int) -> str:
    text, prec = _render(e)
    if prec < min_prec:
        return f"({text})"
    return text


def to_text(e: Expr) -> str:
    """Render the tree as parseable infix text."""
    return _render(e)[0]

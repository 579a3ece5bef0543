"""Numeric evaluation of expression trees over the complex numbers."""

from __future__ import annotations

import cmath

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


class EvalError(ArithmeticError):
    pass


class UnboundSymbol(EvalError):
    def __init__(self, what: str):
        super().__init__(f"unbound symbol {what}")
        self.what = what


class DivisionByZero(EvalError):
    pass


class DomainError(EvalError):
    pass


class UnsupportedNode(EvalError):
    pass


def _ln(z: complex) -> complex:
    if z == 0:
        raise DomainError("ln(0)")
    return cmath.log(z)


def _real_cmp_value(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-9 * (1.0 + abs(z.real)):
        raise DomainError(f"{what} needs real operands, got {z!r}")
    return z.real


def _min(a: complex, b: complex) -> complex:
    return a if _real_cmp_value(a, "min") <= _real_cmp_value(b, "min") else b


def _max(a: complex, b: complex) -> complex:
    return a if _real_cmp_value(a, "max") >= _real_cmp_value(b, "max") else b


_BUILTIN_FNS = {
    "sin": lambda a: cmath.sin(a[0]),
    "cos": lambda a: cmath.cos(a[0]),
    "tan": lambda a: cmath.tan(a[0]),
    "exp": lambda a: cmath.exp(a[0]),
    "ln": lambda a: _ln(a[0]),
    "sqrt": lambda a: cmath.sqrt(a[0]),
    "abs": lambda a: complex(abs(a[0])),
    "min": lambda a: _min(a[0], a[1]),
    "max": lambda a: _max(a[0], a[1]),
}


def evaluate(
    e: Expr,
    bindings: dict[str, complex] | None = None,
    var_values: dict[int, complex] | None = None,
    param_values: dict[tuple[int, int, int], complex] | None = None,
    registry: Registry = DEFAULT_REGISTRY,
) -> complex:
    """Evaluate the tree to a complex number.

    bindings binds FreeSymbols by name, var_values binds v(c) by column, and
    param_values binds p(r,c,k) by index triple. Missing leaves raise
    UnboundSymbol; an exact zero denominator raises DivisionByZero; Laplacian
    nodes never evaluate (UnsupportedNode).
    """
    bindings = bindings or {}
    var_values = var_values or {}
    param_values = param_values or {}

    def run(node: Expr, env: dict[str, complex]) -> complex:
        match node:
            case Constant(value):
                return value
            case FreeSymbol(name):
                if name not in env:
                    raise UnboundSymbol(name)
                return env[name]
            case VarRef(column):
                if column not in var_values:
                    raise UnboundSymbol(f"v({column})")
                return complex(var_values[column])
            case ParamRef(row, column, index):
                key = (row, column, index)
                if key not in param_values:
                    raise UnboundSymbol(f"p({row},{column},{index})")
                return complex(param_values[key])
            case Neg(operand):
                return -run(operand, env)
            case BinOp(op, left, right):
                a = run(left, env)
                b = run(right, env)
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                if op == "*":
                    return a * b
                if op == "/":
                    if b == 0:
                        raise DivisionByZero(f"division by zero")
                    return a / b
                try:
                    return a ** b
                except ZeroDivisionError:
                    raise DivisionByZero("zero base with negative exponent") from None
                except (OverflowError, ValueError) as exc:
                    raise DomainError(f"power failed: {exc}") from None
            case Call(name, args):
                values = [run(a, env) for a in args]
                if name in _BUILTIN_FNS:
                    try:
                        return _BUILTIN_FNS[name](values)
                    except (OverflowError, ValueError) as exc:
                        raise DomainError(f"{name}: {exc}") from None
                form = registry.form(name)
                if form is None:
                    raise UnboundSymbol(f"function {name}")
                local = {p: complex(form.defaults[p]) for p in form.defaults}
                for pname, val in zip(form.params, values):
                    local[pname] = val
                # the body sees only its formals, never the caller's bindings
                return run(form.body, local)
            case Laplacian(_):
                raise UnsupportedNode("laplacian has no numeric value")
        raise TypeError(f"not an expression node: {node!r}")

    return run(e, dict(bindings))

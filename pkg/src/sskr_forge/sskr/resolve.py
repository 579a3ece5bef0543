"""Resolving matrix references inside expressions to registry names."""

from __future__ import annotations

from ..expr import (
    BinOp,
    Call,
    Expr,
    FreeSymbol,
    Laplacian,
    Neg,
    ParamRef,
    VarRef,
)
from .model import Sskr


class UnresolvableRef(ValueError):
    pass


def resolve_expr(s: Sskr, e: Expr) -> Expr:
    """Rewrite v(c) to the column's variable id and p(r,c,k) to the cell's
    k-th parameter id, as free symbols. Raises UnresolvableRef when an index
    points outside the matrix or tuple."""
    match e:
        case VarRef(column):
            var = s.variable_by_column(column)
            if var is None:
                raise UnresolvableRef(f"v({column}): no such column")
            return FreeSymbol(var.id)
        case ParamRef(row, column, index):
            if not 1 <= row <= s.mrm.n_rows or not 1 <= column <= s.mrm.n_cols:
                raise UnresolvableRef(f"p({row},{column},{index}): cell out of range")
            cell = s.mrm.cell(row, column)
            if not cell.is_present or not 1 <= index <= len(cell.params):
                raise UnresolvableRef(f"p({row},{column},{index}): no parameter there")
            return FreeSymbol(cell.params[index - 1])
        case Neg(operand):
            return Neg(resolve_expr(s, operand))
        case Laplacian(operand):
            return Laplacian(resolve_expr(s, operand))
        case BinOp(op, left, right):
            return BinOp(op, resolve_expr(s, left), resolve_expr(s, right))
        case Call(name, args):
            return Call(name, tuple(resolve_expr(s, a) for a in args))
        case _:
            return e

"""Expression trees: parsing, printing, MathML, evaluation, and equivalence."""

from .nodes import (
    BinOp,
    BUILTINS,
    Call,
    Constant,
    DEFAULT_REGISTRY,
    Expr,
    FreeSymbol,
    FunctionDef,
    Laplacian,
    Neg,
    ParamRef,
    Registry,
    RegistryError,
    VarRef,
    contains_laplacian,
    free_symbols,
    map_refs,
    substitute,
    walk,
)
from .parser import ExprSyntaxError, UnknownFunction, parse
from .printer import to_text
from .evaluate import (
    DivisionByZero,
    DomainError,
    EvalError,
    UnboundSymbol,
    UnsupportedNode,
    evaluate,
)
from .equivalence import (
    DEFAULT_INTERVAL,
    EquivalenceVerdict,
    ExhaustedSamples,
    SymbolMismatch,
    Witness,
    equivalent,
    leaf_key,
)
from . import mathml

__all__ = [
    "BinOp",
    "BUILTINS",
    "Call",
    "Constant",
    "DEFAULT_REGISTRY",
    "DEFAULT_INTERVAL",
    "DivisionByZero",
    "DomainError",
    "EquivalenceVerdict",
    "EvalError",
    "ExhaustedSamples",
    "Expr",
    "ExprSyntaxError",
    "FreeSymbol",
    "FunctionDef",
    "Laplacian",
    "Neg",
    "ParamRef",
    "Registry",
    "RegistryError",
    "SymbolMismatch",
    "UnboundSymbol",
    "UnknownFunction",
    "UnsupportedNode",
    "VarRef",
    "Witness",
    "contains_laplacian",
    "equivalent",
    "evaluate",
    "free_symbols",
    "leaf_key",
    "map_refs",
    "mathml",
    "parse",
    "substitute",
    "to_text",
    "walk",
]

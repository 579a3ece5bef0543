"""Expression trees shared by the knowledgebase, planner, and simulation kit."""

from __future__ import annotations

from dataclasses import dataclass, field


class Expr:
    """Base class for expression nodes. Nodes are immutable and compare structurally."""

    __slots__ = ()


@dataclass(frozen=True)
class Constant(Expr):
    """Numeric literal. Stored as complex; real literals have imag == 0."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class VarRef(Expr):
    """Reference to the variable in a matrix column, written v(column). 1-based."""

    column: int


@dataclass(frozen=True)
class ParamRef(Expr):
    """Reference to one parameter of a matrix cell tuple, written p(row, column, index).

    All three indices are 1-based; index selects the element within the cell's tuple.
    """

    row: int
    column: int
    index: int


@dataclass(frozen=True)
class FreeSymbol(Expr):
    """A named symbol bound only at evaluation time."""

    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    """Binary arithmetic node. op is one of + - * / ^."""

    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    """Application of a registered function to positional arguments."""

    name: str
    args: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Laplacian(Expr):
    """Spatial second-derivative operator. Symbolic only: it never evaluates
    numerically and has no serialized MathML form."""

    operand: Expr


@dataclass(frozen=True)
class FunctionDef:
    """A named functional form with formal parameters and a body expression.

    Trailing parameters may carry default values, so calls may pass fewer
    arguments than len(params). The body's free symbols must be a subset of
    the formal parameters (enforced by the registry on registration).
    """

    name: str
    params: tuple[str, ...]
    body: Expr
    defaults: dict[str, float] = field(default_factory=dict)

    @property
    def min_args(self) -> int:
        return len(self.params) - len(self.defaults)

    @property
    def max_args(self) -> int:
        return len(self.params)


# Built-in function arities (evaluated natively, not via a FunctionDef body).
BUILTINS: dict[str, int] = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}


class RegistryError(ValueError):
    pass


class Registry:
    """Function registry: built-ins plus named functional forms.

    The default registry carries the four standard forms:

    H(x, pmax, c, h)  Hill activation      pmax * x^h / (c^h + x^h)
    S(x, k)           first-order secretion k * x
    B(x, y, k)        mass-action binding  k * x * y
    D(x, k)           first-order dissociation k * x
    """

    def __init__(self):
        self._forms: dict[str, FunctionDef] = {}

    def register(self, form: FunctionDef) -> None:
        if form.name in BUILTINS:
            raise RegistryError(f"cannot shadow built-in function {form.name!r}")
        free = {s.name for s in walk(form.body) if isinstance(s, FreeSymbol)}
        extra = free - set(form.params)
        if extra:
            raise RegistryError(
                f"body of {form.name!r} uses symbols outside its parameters: {sorted(extra)}"
            )
        for name in form.defaults:
            if name not in form.params:
                raise RegistryError(f"default for unknown parameter {name!r} in {form.name!r}")
        # defaults must be a suffix of the parameter list so positional calls stay unambiguous
        n_required = len(form.params) - len(form.defaults)
        if set(form.params[n_required:]) != set(form.defaults):
            raise RegistryError(f"defaults of {form.name!r} must cover a trailing parameter block")
        self._forms[form.name] = form

    def form(self, name: str) -> FunctionDef | None:
        return self._forms.get(name)

    def knows(self, name: str) -> bool:
        return name in BUILTINS or name in self._forms

    def arity(self, name: str) -> tuple[int, int]:
        if name in BUILTINS:
            n = BUILTINS[name]
            return n, n
        form = self._forms[name]
        return form.min_args, form.max_args

    def names(self) -> list[str]:
        return sorted(BUILTINS) + sorted(self._forms)


def _default_registry() -> Registry:
    x, y = FreeSymbol("x"), FreeSymbol("y")
    pmax, c, h, k = (FreeSymbol(n) for n in ("pmax", "c", "h", "k"))
    reg = Registry()
    hill_body = BinOp(
        "/",
        BinOp("*", pmax, BinOp("^", x, h)),
        BinOp("+", BinOp("^", c, h), BinOp("^", x, h)),
    )
    reg.register(FunctionDef("H", ("x", "pmax", "c", "h"), hill_body,
                             {"pmax": 1.0, "c": 1.0, "h": 2.0}))
    reg.register(FunctionDef("S", ("x", "k"), BinOp("*", k, x), {"k": 1.0}))
    reg.register(FunctionDef("B", ("x", "y", "k"), BinOp("*", BinOp("*", k, x), y), {"k": 1.0}))
    reg.register(FunctionDef("D", ("x", "k"), BinOp("*", k, x), {"k": 1.0}))
    return reg


def walk(e: Expr):
    """Yield every node of the tree, depth-first, left to right."""
    yield e
    match e:
        case Neg(operand) | Laplacian(operand):
            yield from walk(operand)
        case BinOp(_, left, right):
            yield from walk(left)
            yield from walk(right)
        case Call(_, args):
            for a in args:
                yield from walk(a)


def free_symbols(e: Expr) -> list[Expr]:
    """Ordered set of symbolic leaves (FreeSymbol, VarRef, ParamRef), first appearance first."""
    seen: list[Expr] = []
    have = set()
    for node in walk(e):
        if isinstance(node, (FreeSymbol, VarRef, ParamRef)) and node not in have:
            have.add(node)
            seen.append(node)
    return seen


def contains_laplacian(e: Expr) -> bool:
    return any(isinstance(n, Laplacian) for n in walk(e))


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace FreeSymbol leaves by name. Other leaves pass through unchanged."""
    match e:
        case FreeSymbol(name):
            return mapping.get(name, e)
        case Neg(operand):
            return Neg(substitute(operand, mapping))
        case Laplacian(operand):
            return Laplacian(substitute(operand, mapping))
        case BinOp(op, left, right):
            return BinOp(op, substitute(left, mapping), substitute(right, mapping))
        case Call(name, args):
            return Call(name, tuple(substitute(a, mapping) for a in args))
        case _:
            return e


def map_refs(e: Expr, row_map=None, col_map=None) -> Expr:
    """Rebuild the tree with VarRef columns and ParamRef rows/columns renumbered.

    row_map and col_map are callables on 1-based indices; identity when None.
    """
    rm = row_map or (lambda r: r)
    cm = col_map or (lambda c: c)
    match e:
        case VarRef(column):
            return VarRef(cm(column))
        case ParamRef(row, column, index):
            return ParamRef(rm(row), cm(column), index)
        case Neg(operand):
            return Neg(map_refs(operand, row_map, col_map))
        case Laplacian(operand):
            return Laplacian(map_refs(operand, row_map, col_map))
        case BinOp(op, left, right):
            return BinOp(op, map_refs(left, row_map, col_map), map_refs(right, row_map, col_map))
        case Call(name, args):
            return Call(name, tuple(map_refs(a, row_map, col_map) for a in args))
        case _:
            return e


DEFAULT_REGISTRY = _default_registry()

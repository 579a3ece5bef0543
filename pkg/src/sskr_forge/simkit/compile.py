"""Compile a model specification into an executable derivative evaluator.

The compiler inlines registry function bodies and parameter values into
generated Python source, so the hot loop carries no interpreter overhead
beyond the compiled expression itself. Variables without derivative
entries (constant species) get derivative zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..cma.modelspec import ModelSpec
from ..expr import (
    BinOp,
    Call,
    Constant,
    DEFAULT_REGISTRY,
    Expr,
    FreeSymbol,
    Laplacian,
    Neg,
    Registry,
    UnknownFunction,
    substitute,
)

BLOWUP_LIMIT = 1e12
IMAG_RESIDUE = 1e-12


class UnsupportedPde(ValueError):
    pass


class UnsupportedFramework(ValueError):
    pass


class UnresolvedParameter(ValueError):
    def __init__(self, param_id: str):
        self.param_id = param_id
        super().__init__(f"no value for parameter {param_id!r}")


class NumericalBlowup(ArithmeticError):
    def __init__(self, step: int | None, variable: str):
        self.step = step
        self.variable = variable
        at = "input state" if step is None else f"step {step}"
        super().__init__(f"{variable} is non-finite or beyond {BLOWUP_LIMIT:g} at {at}")


@dataclass(frozen=True)
class ExecutableModel:
    variables: tuple[str, ...]
    rhs: object                    # rhs(state tuple, t) -> derivative tuple
    params: dict[str, float]       # values actually inlined
    source: str                    # generated Python, kept for inspection

    def __call__(self, state, t=0.0):
        return self.rhs(state, t)


def _inline_calls(e: Expr, registry: Registry) -> Expr:
    """Splice registry function bodies in place of their calls; builtin
    calls (sin, exp, ...) stay as calls."""
    match e:
        case Neg(operand):
            return Neg(_inline_calls(operand, registry))
        case BinOp(op, left, right):
            return BinOp(op, _inline_calls(left, registry),
                         _inline_calls(right, registry))
        case Laplacian(_):
            raise UnsupportedPde("laplacian term reached the compiler")
        case Call(name, args):
            done = tuple(_inline_calls(a, registry) for a in args)
            if name in _BUILTIN_NAMES:
                return Call(name, done)
            form = registry.form(name)
            if form is None:
                raise UnknownFunction(name)
            if not form.min_args <= len(done) <= form.max_args:
                raise UnknownFunction(
                    f"{name} takes {form.min_args}-{form.max_args} args, got {len(done)}")
            mapping: dict[str, Expr] = {
                p: Constant(form.defaults[p]) for p in form.defaults}
            for pname, arg in zip(form.params, done):
                mapping[pname] = arg
            return substitute(form.body, mapping)
        case _:
            return e


_BUILTIN_NAMES = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs", "min", "max")


def _emit(e: Expr, index: dict[str, int], params: dict[str, float],
          used: dict[str, float], complex_mode: bool) -> str:
    match e:
        case Constant(value):
            z = complex(value)
            if z.imag == 0:
                return repr(float(z.real))
            return repr(z)
        case FreeSymbol(name):
            if name in index:
                return f"y[{index[name]}]"
            if name in params:
                used[name] = float(params[name])
                return repr(float(params[name]))
            raise UnresolvedParameter(name)
        case Neg(operand):
            return f"(-{_emit(operand, index, params, used, complex_mode)})"
        case BinOp(op, left, right):
            a = _emit(left, index, params, used, complex_mode)
            b = _emit(right, index, params, used, complex_mode)
            return f"({a} {'**' if op == '^' else op} {b})"
        case Call(name, args):
            inner = ", ".join(_emit(a, index, params, used, complex_mode)
                              for a in args)
            return f"_fn_{name}({inner})"
        case Laplacian(_):
            raise UnsupportedPde("laplacian term reached the compiler")
    raise TypeError(f"cannot compile node {e!r}")


def _has_complex_constant(e: Expr) -> bool:
    from ..expr import walk
    return any(isinstance(n, Constant) and complex(n.value).imag != 0
               for n in walk(e))


def _namespace(complex_mode: bool) -> dict:
    if complex_mode:
        import cmath

        def _cmp_real(z, what):
            z = complex(z)
            if abs(z.imag) > 1e-9 * (1.0 + abs(z.real)):
                raise ArithmeticError(f"{what} needs real operands")
            return z.real

        ns = {
            "_fn_sin": cmath.sin, "_fn_cos": cmath.cos, "_fn_tan": cmath.tan,
            "_fn_exp": cmath.exp, "_fn_ln": cmath.log, "_fn_sqrt": cmath.sqrt,
            "_fn_abs": abs,
            "_fn_min": lambda a, b: a if _cmp_real(a, "min") <= _cmp_real(b, "min") else b,
            "_fn_max": lambda a, b: a if _cmp_real(a, "max") >= _cmp_real(b, "max") else b,
        }
    else:
        ns = {
            "_fn_sin": math.sin, "_fn_cos": math.cos, "_fn_tan": math.tan,
            "_fn_exp": math.exp, "_fn_ln": math.log, "_fn_sqrt": math.sqrt,
            "_fn_abs": abs, "_fn_min": min, "_fn_max": max,
        }
    ns["_isfinite"] = math.isfinite
    ns["_NumericalBlowup"] = NumericalBlowup
    return ns


def compile(spec: ModelSpec, params: dict[str, float],
            registry: Registry = DEFAULT_REGISTRY) -> ExecutableModel:
    if spec.framework not in ("ode", "pde"):
        raise UnsupportedFramework(
            f"cannot compile a {spec.framework_name} specification")
    if spec.framework == "pde" or spec.pde_vars:
        raise UnsupportedPde(
            f"spatial terms on {', '.join(sorted(spec.pde_vars)) or 'the model'}")

    index = {v: i for i, v in enumerate(spec.variables)}
    inlined: dict[str, list[Expr]] = {
        v: [_inline_calls(t, registry) for t in terms]
        for v, terms in spec.derivatives.items()}
    complex_mode = any(_has_complex_constant(t)
                       for ts in inlined.values() for t in ts)

    used: dict[str, float] = {}
    components = []
    for v in spec.variables:
        terms = inlined.get(v, [])
        if not terms:
            components.append("0.0")
            continue
        components.append(" + ".join(
            _emit(t, index, params, used, complex_mode) for t in terms))

    n = len(spec.variables)
    guard = " and ".join(f"_isfinite(y[{i}])" for i in range(n)) or "True"
    body = ",\n        ".join(components) if components else ""
    if complex_mode:
        # constants off the real axis: evaluate in C, keep the real part,
        # reject residue above the tolerance
        lines = [
            "def _rhs(y, t):",
            f"    if not ({guard}):",
            "        raise _bad_input(y)",
            f"    _out = ({body}{',' if n == 1 else ''})" if n else "    _out = ()",
            "    return tuple(_real(z) for z in _out)",
        ]
    else:
        lines = [
            "def _rhs(y, t):",
            f"    if not ({guard}):",
            "        raise _bad_input(y)",
            f"    return ({body}{',' if n == 1 else ''})" if n else "    return ()",
        ]
    source = "\n".join(lines) + "\n"

    ns = _namespace(complex_mode)
    variables = spec.variables

    def _bad_input(y):
        for i, val in enumerate(y):
            ok = isinstance(val, (int, float)) and math.isfinite(val)
            if not ok:
                return NumericalBlowup(None, variables[i])
        return NumericalBlowup(None, variables[0] if variables else "?")

    def _real(z):
        z = complex(z)
        if abs(z.imag) > IMAG_RESIDUE * max(1.0, abs(z.real)):
            raise ArithmeticError(
                f"imaginary residue {z.imag:g} above {IMAG_RESIDUE:g}")
        return z.real

    ns["_bad_input"] = _bad_input
    ns["_real"] = _real
    exec(source, ns)
    return ExecutableModel(variables=variables, rhs=ns["_rhs"],
                           params=dict(used), source=source)

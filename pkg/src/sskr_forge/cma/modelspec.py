"""Framework-specific model specifications and their canonical form.

A ModelSpec is the assembly target of planning and the input to the
simulation kit. Canonical serialization is stable byte-for-byte so that
replayed plans can be compared against the original output with plain
equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..expr import (
    BinOp,
    Constant,
    Expr,
    FreeSymbol,
    Neg,
    contains_laplacian,
    parse,
    to_text,
)
from ..sskr.model import Sskr, derivative_target
from ..sskr.resolve import resolve_expr

FRAMEWORKS = {
    "ode": "ODE",
    "pde": "PDE-flagged ODE",
    "petri": "PetriNet",
    "abm": "ABM-primitive",
}


class DdtMismatch(ValueError):
    pass


class UnresolvableRow(ValueError):
    def __init__(self, label: str, reason: str):
        self.label, self.reason = label, reason
        super().__init__(f"row {label!r}: {reason}")


@dataclass(frozen=True)
class SpecFragment:
    var: str
    term: Expr
    framework: str
    refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Transition:
    label: str
    rate: Expr


@dataclass(frozen=True)
class ModelSpec:
    framework: str                              # key into FRAMEWORKS
    variables: tuple[str, ...]
    derivatives: dict[str, tuple[Expr, ...]]    # insertion order = variables order
    pde_vars: frozenset[str] = frozenset()
    transitions: tuple[Transition, ...] = ()
    trace: str = ""

    @property
    def framework_name(self) -> str:
        return FRAMEWORKS[self.framework]


def assemble_spec(goal: str, fragments: list[SpecFragment], trace: str) -> ModelSpec:
    variables: list[str] = []
    deriv: dict[str, list[Expr]] = {}
    pde: set[str] = set()
    transitions: list[Transition] = []
    for frag in fragments:
        for name in (frag.var, *frag.refs):
            if name not in deriv and name not in variables:
                variables.append(name)
        if goal == "petri":
            transitions.append(Transition(frag.var, frag.term))
            continue
        deriv.setdefault(frag.var, []).append(frag.term)
        if contains_laplacian(frag.term):
            pde.add(frag.var)
    ordered = {v: tuple(deriv[v]) for v in variables if v in deriv}
    return ModelSpec(framework=goal, variables=tuple(variables),
                     derivatives=ordered, pde_vars=frozenset(pde),
                     transitions=tuple(transitions), trace=trace)


def spec_to_jsonable(spec: ModelSpec) -> dict:
    doc = {
        "framework": spec.framework,
        "variables": list(spec.variables),
        "derivatives": {v: [to_text(t) for t in terms]
                        for v, terms in spec.derivatives.items()},
        "pde": sorted(spec.pde_vars),
        "trace": spec.trace,
    }
    if spec.transitions:
        doc["transitions"] = [{"label": t.label, "rate": to_text(t.rate)}
                              for t in spec.transitions]
    return doc


def spec_from_jsonable(doc: dict) -> ModelSpec:
    deriv = {str(v): tuple(parse(t) for t in terms)
             for v, terms in doc.get("derivatives", {}).items()}
    return ModelSpec(
        framework=str(doc["framework"]),
        variables=tuple(str(v) for v in doc.get("variables", [])),
        derivatives=deriv,
        pde_vars=frozenset(str(v) for v in doc.get("pde", [])),
        transitions=tuple(Transition(str(t["label"]), parse(str(t["rate"])))
                          for t in doc.get("transitions", [])),
        trace=str(doc.get("trace", "")),
    )


def spec_dumps(spec: ModelSpec) -> str:
    return json.dumps(spec_to_jsonable(spec), indent=2, ensure_ascii=False) + "\n"


def split_terms(e: Expr) -> list[Expr]:
    """Top-level additive terms; subtraction negates the right operand."""
    if isinstance(e, BinOp) and e.op == "+":
        return split_terms(e.left) + split_terms(e.right)
    if isinstance(e, BinOp) and e.op == "-":
        return split_terms(e.left) + [_negate(e.right)]
    return [e]


def _negate(e: Expr) -> Expr:
    if isinstance(e, Neg):
        return e.operand
    return Neg(e)


def _is_mass_action(e: Expr) -> bool:
    if isinstance(e, Neg):
        return _is_mass_action(e.operand)
    if isinstance(e, BinOp) and e.op == "*":
        return _is_mass_action(e.left) and _is_mass_action(e.right)
    return isinstance(e, (Constant, FreeSymbol))


def spec_from_sskr(s: Sskr) -> ModelSpec:
    if s.ddt.time != "continuous":
        raise DdtMismatch(f"need continuous time, model declares {s.ddt.time!r}")
    deriv_rows = [(i, label, derivative_target(label))
                  for i, label in enumerate(s.mrm.rows)]
    has_deriv = any(t is not None for _, _, t in deriv_rows)
    variables = tuple(v.id for v in sorted(s.variables, key=lambda v: v.column))
    deriv: dict[str, list[Expr]] = {}
    pde: set[str] = set()
    transitions: list[Transition] = []
    for i, label, target in deriv_rows:
        expr = resolve_expr(s, s.mrs.rows[i].primary)
        if target is None:
            if has_deriv:
                raise UnresolvableRow(label, "transition row in a derivative-style model")
            for term in split_terms(expr):
                if not _is_mass_action(term):
                    raise UnresolvableRow(label, "term is not mass-action-shaped")
            transitions.append(Transition(label, expr))
            continue
        if s.variable_by_id(target) is None:
            raise UnresolvableRow(label, f"no variable {target!r} for this derivative")
        deriv.setdefault(target, []).extend(split_terms(expr))
        if contains_laplacian(expr):
            pde.add(target)
    if transitions:
        return ModelSpec(framework="petri", variables=variables, derivatives={},
                         transitions=tuple(transitions), trace=f"sskr:{s.name}")
    ordered = {v: tuple(deriv[v]) for v in variables if v in deriv}
    return ModelSpec(framework="pde" if pde else "ode", variables=variables,
                     derivatives=ordered, pde_vars=frozenset(pde),
                     trace=f"sskr:{s.name}")

"""Replayable edit scripts over knowledgebases.

A script is an ordered list of steps. Application is atomic: steps mutate a
private copy, validation runs once at the end, and any failure leaves the
input untouched. Inserting a variable or rule renumbers every stored matrix
reference (MRS p/v refs, MKM keys) that sits at or past the insertion point,
so steps written against the post-insertion layout compose with content that
predates them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..expr import DEFAULT_REGISTRY, Expr, ExprSyntaxError, Registry, map_refs, parse
from ..sskr.io import SchemaError, _cell_from_json, _cell_to_json
from ..sskr.model import Mkm, MrmElement, Mrs, MrsRow, Parameter, Sskr, Variable
from ..sskr.validate import ValidationFailed, validate


class StepError(ValueError):
    """A step could not be applied. index is the step's position in the script."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass
class AddVariable:
    id: str
    label: str
    at: int | None = None  # 1-based column; appended when omitted

    def apply_to(self, s: Sskr) -> None:
        if s.variable_by_id(self.id) is not None:
            raise ValueError(f"duplicate variable id {self.id!r}")
        n = len(s.variables)
        at = self.at if self.at is not None else n + 1
        if not 1 <= at <= n + 1:
            raise ValueError(f"insertion column {at} outside 1..{n + 1}")
        for v in s.variables:
            if v.column >= at:
                v.column += 1
        s.variables.append(Variable(id=self.id, label=self.label, column=at))
        for row in s.mrm.cells:
            row.insert(at - 1, MrmElement.zero())
        shift = _shift_from(at)
        _remap_model_refs(s, row_map=None, col_map=shift)


@dataclass
class AddParameter:
    id: str
    symbol: str
    value: float | None = None
    fixed: bool = False
    bounds: tuple[float, float] | None = None

    def apply_to(self, s: Sskr) -> None:
        if s.parameter_by_id(self.id) is not None:
            raise ValueError(f"duplicate parameter id {self.id!r}")
        s.parameters.append(Parameter(id=self.id, symbol=self.symbol, value=self.value,
                                      fixed=self.fixed, bounds=self.bounds))


@dataclass
class AddRule:
    label: str
    expr: Expr
    at: int | None = None  # 1-based row; appended when omitted

    def apply_to(self, s: Sskr) -> None:
        if self.label in s.mrm.rows:
            raise ValueError(f"duplicate row label {self.label!r}")
        n = s.mrm.n_rows
        at = self.at if self.at is not None else n + 1
        if not 1 <= at <= n + 1:
            raise ValueError(f"insertion row {at} outside 1..{n + 1}")
        # Existing references move first; the new expression is written
        # against the post-insertion layout and must not be renumbered.
        shift = _shift_from(at)
        _remap_model_refs(s, row_map=shift, col_map=None)
        s.mrm.rows.insert(at - 1, self.label)
        s.mrm.cells.insert(at - 1, [MrmElement.zero() for _ in range(len(s.variables))])
        s.mrs.rows.insert(at - 1, MrsRow(primary=self.expr))


@dataclass
class SetCell:
    row: int
    col: int
    cell: MrmElement

    def apply_to(self, s: Sskr) -> None:
        if not 1 <= self.row <= s.mrm.n_rows or not 1 <= self.col <= s.mrm.n_cols:
            raise ValueError(f"cell ({self.row},{self.col}) outside the matrix")
        s.mrm.set_cell(self.row, self.col, self.cell)


@dataclass
class SetMrs:
    """Replace a row's expression. Alternates are replaced too: stale
    alternates would silently stop being equivalent to the new primary."""

    row: int
    expr: Expr
    alternates: tuple[Expr, ...] = ()

    def apply_to(self, s: Sskr) -> None:
        if not 1 <= self.row <= len(s.mrs.rows):
            raise ValueError(f"row {self.row} outside the matrix")
        s.mrs.rows[self.row - 1] = MrsRow(primary=self.expr, alternates=list(self.alternates))


@dataclass
class AppendMkmItem:
    text: str

    def apply_to(self, s: Sskr) -> None:
        s.mkm.items.append(self.text)


@dataclass
class LinkMkmRef:
    row: int
    col: int
    index: int
    items: tuple[int, ...]

    def apply_to(self, s: Sskr) -> None:
        existing = s.mkm.refs.setdefault((self.row, self.col, self.index), [])
        for item in self.items:
            if item not in existing:
                existing.append(item)


Step = (AddVariable | AddParameter | AddRule | SetCell | SetMrs
        | AppendMkmItem | LinkMkmRef)


@dataclass
class ExtensionScript:
    steps: list[Step] = field(default_factory=list)


def _shift_from(at: int):
    return lambda i: i + 1 if i >= at else i


def _remap_model_refs(s: Sskr, row_map, col_map) -> None:
    for row in s.mrs.rows:
        row.primary = map_refs(row.primary, row_map, col_map)
        row.alternates = [map_refs(a, row_map, col_map) for a in row.alternates]
    rm = row_map or (lambda r: r)
    cm = col_map or (lambda c: c)
    s.mkm.refs = {(rm(r), cm(c), k): v for (r, c, k), v in s.mkm.refs.items()}


def _clone(s: Sskr) -> Sskr:
    """Deep copy of the mutable shell; expression trees are immutable and
    shared."""
    from ..sskr.model import Ddt, Mfm, Mrm, RuleRef, SubMfm

    def clone_mfm(m: Mfm | None) -> Mfm | None:
        if m is None:
            return None
        nodes = [RuleRef(n.rule) if isinstance(n, RuleRef) else SubMfm(clone_mfm(n.sub))
                 for n in m.nodes]
        return Mfm(unit=m.unit, nodes=nodes, edges=[list(r) for r in m.edges])

    return Sskr(
        variables=[Variable(v.id, v.label, v.column) for v in s.variables],
        parameters=[Parameter(p.id, p.symbol, p.value, p.fixed, p.bounds, p.computed)
                    for p in s.parameters],
        mrm=Mrm(rows=list(s.mrm.rows), cells=[list(r) for r in s.mrm.cells]),
        mrs=Mrs(rows=[MrsRow(r.primary, list(r.alternates)) for r in s.mrs.rows]),
        ddt=Ddt(s.ddt.spatial_dim, s.ddt.space, s.ddt.time, s.ddt.space_level,
                s.ddt.time_level, s.ddt.boundary, s.ddt.structure,
                None if s.ddt.adjacency is None else [list(r) for r in s.ddt.adjacency]),
        mkm=Mkm(items=list(s.mkm.items),
                refs={k: list(v) for k, v in s.mkm.refs.items()}),
        mfm=clone_mfm(s.mfm),
        name=s.name,
    )


def apply(s: Sskr, script: ExtensionScript) -> Sskr:
    """Run every step against a copy of s and validate the result.

    Atomic: any step failure or a failed final validation raises and leaves
    s untouched (it is never mutated).
    """
    out = _clone(s)
    for i, step in enumerate(script.steps):
        try:
            step.apply_to(out)
        except ValueError as exc:
            raise StepError(i, str(exc)) from None
    report = validate(out)
    if not report.ok:
        raise ValidationFailed(report, "extension result does not validate")
    return out


_STEP_OPS = {
    "AddVariable": AddVariable,
    "AddParameter": AddParameter,
    "AddRule": AddRule,
    "SetCell": SetCell,
    "SetMrs": SetMrs,
    "AppendMkmItem": AppendMkmItem,
    "LinkMkmRef": LinkMkmRef,
}


def _parse_step(doc: Any, pointer: str, registry: Registry) -> Step:
    if not isinstance(doc, dict) or not isinstance(doc.get("op"), str):
        raise SchemaError(pointer, "step must be an object with an 'op' key")
    op = doc["op"]
    if op not in _STEP_OPS:
        raise SchemaError(pointer, f"unknown op {op!r}")

    def expr_of(key: str) -> Expr:
        text = doc.get(key)
        if not isinstance(text, str):
            raise SchemaError(f"{pointer}/{key}", "missing expression string")
        try:
            return parse(text, registry)
        except ExprSyntaxError as exc:
            raise SchemaError(f"{pointer}/{key}", f"bad expression: {exc}") from None

    if op == "AddVariable":
        return AddVariable(id=doc["id"], label=doc.get("label", doc["id"]),
                           at=doc.get("at"))
    if op == "AddParameter":
        bounds = doc.get("bounds")
        return AddParameter(id=doc["id"], symbol=doc.get("symbol", doc["id"]),
                            value=doc.get("value"), fixed=bool(doc.get("fixed", False)),
                            bounds=tuple(bounds) if bounds is not None else None)
    if op == "AddRule":
        return AddRule(label=doc["label"], expr=expr_of("expr"), at=doc.get("at"))
    if op == "SetCell":
        return SetCell(row=int(doc["row"]), col=int(doc["col"]),
                       cell=_cell_from_json(doc.get("cell"), f"{pointer}/cell"))
    if op == "SetMrs":
        alternates = tuple(parse(t, registry) for t in doc.get("alternates", []))
        return SetMrs(row=int(doc["row"]), expr=expr_of("expr"), alternates=alternates)
    if op == "AppendMkmItem":
        return AppendMkmItem(text=doc["text"])
    return LinkMkmRef(row=int(doc["row"]), col=int(doc["col"]),
                      index=int(doc["index"]), items=tuple(doc["items"]))


def script_from_jsonable(doc: Any, registry: Registry = DEFAULT_REGISTRY) -> ExtensionScript:
    if not isinstance(doc, list):
        raise SchemaError("/", "script must be a JSON array of steps")
    steps = []
    for i, step_doc in enumerate(doc):
        try:
            steps.append(_parse_step(step_doc, f"/{i}", registry))
        except KeyError as exc:
            raise SchemaError(f"/{i}", f"missing field {exc.args[0]!r}") from None
    return ExtensionScript(steps=steps)


def script_to_jsonable(script: ExtensionScript) -> list:
    from ..expr import to_text

    out: list[dict] = []
    for step in script.steps:
        if isinstance(step, AddVariable):
            doc: dict[str, Any] = {"op": "AddVariable", "id": step.id, "label": step.label}
            if step.at is not None:
                doc["at"] = step.at
        elif isinstance(step, AddParameter):
            doc = {"op": "AddParameter", "id": step.id, "symbol": step.symbol}
            if step.value is not None:
                doc["value"] = step.value
            if step.fixed:
                doc["fixed"] = True
            if step.bounds is not None:
                doc["bounds"] = list(step.bounds)
        elif isinstance(step, AddRule):
            doc = {"op": "AddRule", "label": step.label, "expr": to_text(step.expr)}
            if step.at is not None:
                doc["at"] = step.at
        elif isinstance(step, SetCell):
            doc = {"op": "SetCell", "row": step.row, "col": step.col,
                   "cell": _cell_to_json(step.cell)}
        elif isinstance(step, SetMrs):
            doc = {"op": "SetMrs", "row": step.row, "expr": to_text(step.expr)}
            if step.alternates:
                doc["alternates"] = [to_text(a) for a in step.alternates]
        elif isinstance(step, AppendMkmItem):
            doc = {"op": "AppendMkmItem", "text": step.text}
        else:
            doc = {"op": "LinkMkmRef", "row": step.row, "col": step.col,
                   "index": step.index, "items": list(step.items)}
        out.append(doc)
    return out


def load_script(path: str | Path, registry: Registry = DEFAULT_REGISTRY) -> ExtensionScript:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"not JSON: {exc}") from None
    return script_from_jsonable(doc, registry)


def save_script(script: ExtensionScript, path: str | Path) -> None:
    text = json.dumps(script_to_jsonable(script), indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")

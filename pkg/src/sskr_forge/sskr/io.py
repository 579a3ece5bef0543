"""On-disk JSON form of a knowledgebase.

Cells serialize as 0 (no interaction), the string "null" (forbidden), or a
list of parameter ids (present; an empty list is an unparameterized
interaction). A JSON null cell is rejected: cells are always explicit.
Expressions serialize as infix text, or as Content-MathML behind a
"mathml:" prefix.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..expr import DEFAULT_REGISTRY, Expr, ExprSyntaxError, Registry, mathml, parse, to_text
from .model import (
    Ddt,
    Mfm,
    Mkm,
    Mrm,
    MrmElement,
    Mrs,
    MrsRow,
    Parameter,
    RuleRef,
    Sskr,
    SubMfm,
    Variable,
)
from .validate import ValidationFailed, validate


class SchemaError(ValueError):
    """Structural violation in an on-disk document. pointer locates it."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


def _require(cond: bool, pointer: str, message: str) -> None:
    if not cond:
        raise SchemaError(pointer, message)


def _parse_expr_text(text: Any, pointer: str, registry: Registry) -> Expr:
    _require(isinstance(text, str), pointer, "expression must be a string")
    try:
        if text.startswith("mathml:"):
            return mathml.parse(text[len("mathml:"):], registry)
        return parse(text, registry)
    except (ExprSyntaxError, mathml.MathMlError) as exc:
        raise SchemaError(pointer, f"bad expression: {exc}") from None


def _cell_to_json(cell: MrmElement) -> Any:
    if cell.kind == "zero":
        return 0
    if cell.kind == "forbidden":
        return "null"
    return list(cell.params)


def _cell_from_json(value: Any, pointer: str) -> MrmElement:
    if value == 0 and isinstance(value, int) and not isinstance(value, bool):
        return MrmElement.zero()
    if value == "null":
        return MrmElement.forbidden()
    if isinstance(value, list):
        _require(all(isinstance(p, str) for p in value), pointer,
                 "present cell must list parameter ids")
        return MrmElement.present(*value)
    raise SchemaError(pointer, f"cell must be 0, \"null\", or a parameter list, got {value!r}")


def _mfm_to_json(mfm: Mfm) -> dict:
    nodes = []
    for node in mfm.nodes:
        if isinstance(node, RuleRef):
            nodes.append({"rule": node.rule})
        else:
            nodes.append({"sub": _mfm_to_json(node.sub)})
    return {"unit": mfm.unit, "nodes": nodes, "edges": mfm.edges}


def _mfm_from_json(doc: Any, pointer: str) -> Mfm:
    _require(isinstance(doc, dict), pointer, "flow graph must be an object")
    _require(isinstance(doc.get("unit"), str), f"{pointer}/unit", "missing unit string")
    nodes_doc = doc.get("nodes")
    _require(isinstance(nodes_doc, list), f"{pointer}/nodes", "missing node list")
    nodes = []
    for i, node_doc in enumerate(nodes_doc):
        np_ = f"{pointer}/nodes/{i}"
        _require(isinstance(node_doc, dict), np_, "node must be an object")
        if "rule" in node_doc:
            _require(isinstance(node_doc["rule"], str), np_, "rule must be a string")
            nodes.append(RuleRef(node_doc["rule"]))
        elif "sub" in node_doc:
            nodes.append(SubMfm(_mfm_from_json(node_doc["sub"], np_)))
        else:
            raise SchemaError(np_, "node needs a 'rule' or 'sub' key")
    edges = doc.get("edges")
    _require(isinstance(edges, list) and all(
        isinstance(row, list) and all(e in (0, 1) for e in row) for row in edges),
        f"{pointer}/edges", "edges must be a 0/1 matrix")
    return Mfm(unit=doc["unit"], nodes=nodes, edges=edges)


def to_jsonable(s: Sskr) -> dict:
    doc: dict[str, Any] = {
        "name": s.name,
        "variables": [{"id": v.id, "label": v.label} for v in
                      sorted(s.variables, key=lambda v: v.column)],
        "parameters": [],
        "mrm": {
            "rows": list(s.mrm.rows),
            "cells": [[_cell_to_json(c) for c in row] for row in s.mrm.cells],
        },
        "mrs": {
            "rows": [
                {"primary": to_text(row.primary),
                 **({"alternates": [to_text(a) for a in row.alternates]}
                    if row.alternates else {})}
                for row in s.mrs.rows
            ]
        },
        "ddt": {
            "spatial_dim": s.ddt.spatial_dim,
            "space": s.ddt.space,
            "time": s.ddt.time,
            "space_level": s.ddt.space_level,
            "time_level": s.ddt.time_level,
            "boundary": s.ddt.boundary,
            "structure": s.ddt.structure,
            **({"adjacency": s.ddt.adjacency} if s.ddt.adjacency is not None else {}),
        },
        "mkm": {
            "items": list(s.mkm.items),
            "refs": {f"{r},{c},{k}": list(v) for (r, c, k), v in sorted(s.mkm.refs.items())},
        },
    }
    for p in s.parameters:
        entry: dict[str, Any] = {"id": p.id, "symbol": p.symbol, "fixed": p.fixed}
        if p.value is not None:
            entry["value"] = p.value
        if p.bounds is not None:
            entry["bounds"] = list(p.bounds)
        if p.computed is not None:
            entry["computed"] = p.computed
        doc["parameters"].append(entry)
    if s.mfm is not None:
        doc["mfm"] = _mfm_to_json(s.mfm)
    return doc


def from_jsonable(doc: Any, registry: Registry = DEFAULT_REGISTRY) -> Sskr:
    _require(isinstance(doc, dict), "/", "document must be an object")

    vars_doc = doc.get("variables")
    _require(isinstance(vars_doc, list), "/variables", "missing variable list")
    variables = []
    for i, v in enumerate(vars_doc):
        vp = f"/variables/{i}"
        _require(isinstance(v, dict), vp, "variable must be an object")
        _require(isinstance(v.get("id"), str), f"{vp}/id", "missing id")
        _require(isinstance(v.get("label"), str), f"{vp}/label", "missing label")
        variables.append(Variable(id=v["id"], label=v["label"], column=i + 1))

    params_doc = doc.get("parameters")
    _require(isinstance(params_doc, list), "/parameters", "missing parameter list")
    parameters = []
    for i, p in enumerate(params_doc):
        pp = f"/parameters/{i}"
        _require(isinstance(p, dict), pp, "parameter must be an object")
        _require(isinstance(p.get("id"), str), f"{pp}/id", "missing id")
        _require(isinstance(p.get("symbol"), str), f"{pp}/symbol", "missing symbol")
        bounds = p.get("bounds")
        if bounds is not None:
            _require(isinstance(bounds, list) and len(bounds) == 2
                     and all(isinstance(b, (int, float)) for b in bounds),
                     f"{pp}/bounds", "bounds must be [lo, hi]")
            bounds = (float(bounds[0]), float(bounds[1]))
        value = p.get("value")
        if value is not None:
            _require(isinstance(value, (int, float)), f"{pp}/value", "value must be a number")
            value = float(value)
        computed = p.get("computed")
        if computed is not None:
            _require(isinstance(computed, str), f"{pp}/computed", "computed must be a row label")
        parameters.append(Parameter(id=p["id"], symbol=p["symbol"], value=value,
                                    fixed=bool(p.get("fixed", False)), bounds=bounds,
                                    computed=computed))

    mrm_doc = doc.get("mrm")
    _require(isinstance(mrm_doc, dict), "/mrm", "missing matrix")
    rows = mrm_doc.get("rows")
    _require(isinstance(rows, list) and all(isinstance(r, str) for r in rows),
             "/mrm/rows", "row labels must be strings")
    cells_doc = mrm_doc.get("cells")
    _require(isinstance(cells_doc, list), "/mrm/cells", "missing cell matrix")
    cells = []
    for r, row_doc in enumerate(cells_doc):
        _require(isinstance(row_doc, list), f"/mrm/cells/{r}", "cell row must be a list")
        cells.append([_cell_from_json(c, f"/mrm/cells/{r}/{j}") for j, c in enumerate(row_doc)])

    mrs_doc = doc.get("mrs")
    _require(isinstance(mrs_doc, dict) and isinstance(mrs_doc.get("rows"), list),
             "/mrs", "missing expression rows")
    mrs_rows = []
    for r, row_doc in enumerate(mrs_doc["rows"]):
        rp = f"/mrs/rows/{r}"
        _require(isinstance(row_doc, dict), rp, "expression row must be an object")
        primary = _parse_expr_text(row_doc.get("primary"), f"{rp}/primary", registry)
        alternates = []
        for j, alt in enumerate(row_doc.get("alternates", [])):
            alternates.append(_parse_expr_text(alt, f"{rp}/alternates/{j}", registry))
        mrs_rows.append(MrsRow(primary=primary, alternates=alternates))

    ddt_doc = doc.get("ddt")
    _require(isinstance(ddt_doc, dict), "/ddt", "missing discretization facts")
    ddt = Ddt(
        spatial_dim=int(ddt_doc.get("spatial_dim", 0)),
        space=ddt_doc.get("space", "none"),
        time=ddt_doc.get("time", "continuous"),
        space_level=ddt_doc.get("space_level"),
        time_level=ddt_doc.get("time_level", "fixed"),
        boundary=ddt_doc.get("boundary", "none"),
        structure=ddt_doc.get("structure", "none"),
        adjacency=ddt_doc.get("adjacency"),
    )

    mkm_doc = doc.get("mkm", {"items": [], "refs": {}})
    _require(isinstance(mkm_doc, dict), "/mkm", "provenance must be an object")
    items = mkm_doc.get("items", [])
    _require(isinstance(items, list) and all(isinstance(i, str) for i in items),
             "/mkm/items", "items must be strings")
    refs: dict[tuple[int, int, int], list[int]] = {}
    refs_doc = mkm_doc.get("refs", {})
    _require(isinstance(refs_doc, dict), "/mkm/refs", "refs must be an object")
    for key, value in refs_doc.items():
        kp = f"/mkm/refs/{key}"
        parts = key.split(",")
        _require(len(parts) == 3 and all(p.strip().isdigit() for p in parts),
                 kp, "key must be 'row,col,index'")
        _require(isinstance(value, list) and all(isinstance(i, int) for i in value),
                 kp, "value must be a list of item indices")
        refs[(int(parts[0]), int(parts[1]), int(parts[2]))] = list(value)

    mfm = _mfm_from_json(doc["mfm"], "/mfm") if "mfm" in doc else None

    name = doc.get("name", "model")
    _require(isinstance(name, str), "/name", "name must be a string")

    return Sskr(variables=variables, parameters=parameters,
                mrm=Mrm(rows=list(rows), cells=cells), mrs=Mrs(rows=mrs_rows),
                ddt=ddt, mkm=Mkm(items=list(items), refs=refs), mfm=mfm, name=name)


def dumps(s: Sskr) -> str:
    return json.dumps(to_jsonable(s), indent=2, ensure_ascii=False) + "\n"


def save(s: Sskr, path: str | Path) -> None:
    """Write the knowledgebase as JSON. Refuses an invalid one."""
    report = validate(s)
    if not report.ok:
        raise ValidationFailed(report, "refusing to save an invalid knowledgebase")
    Path(path).write_text(dumps(s), encoding="utf-8")


def loads(text: str, registry: Registry = DEFAULT_REGISTRY) -> Sskr:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"not JSON: {exc}") from None
    return from_jsonable(doc, registry)


def load(path: str | Path, registry: Registry = DEFAULT_REGISTRY) -> Sskr:
    """Read a knowledgebase document. Shape problems raise SchemaError;
    semantic problems are left to validate()."""
    return loads(Path(path).read_text(encoding="utf-8"), registry)

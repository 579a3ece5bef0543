"""Joining two knowledgebases into one model.

The first operand is the host: its name, DDT, and column order survive.
Shared variable pairs merge under the host's id; everything else is a
disjoint union. Rows feeding the same merged variable's derivative stay
separate rows (the simulation kit sums them), so hosts composing on a
shared compartment keep both contributions inspectable.
"""

from __future__ import annotations

from ..expr import map_refs
from ..sskr.model import Mfm, Mkm, Mrm, MrmElement, Mrs, MrsRow, Sskr, SubMfm
from ..sskr.validate import ValidationFailed, validate


class ParameterIdCollision(ValueError):
    pass


class IncompatibleDdt(ValueError):
    pass


class NameCollision(ValueError):
    pass


def _require_valid(s: Sskr, which: str) -> None:
    report = validate(s)
    if not report.ok:
        raise ValidationFailed(report, f"{which} operand does not validate")


def compose(a: Sskr, b: Sskr, shared: list[tuple[str, str]] | None = None) -> Sskr:
    shared = list(shared or [])
    _require_valid(a, "first")
    _require_valid(b, "second")
    if a.ddt.time != b.ddt.time:
        raise IncompatibleDdt(f"time kinds differ: {a.ddt.time} vs {b.ddt.time}")

    a_param_ids = {p.id for p in a.parameters}
    clashes = sorted(a_param_ids & {p.id for p in b.parameters})
    if clashes:
        raise ParameterIdCollision(f"parameter ids in both models: {', '.join(clashes)}")
    row_clashes = sorted(set(a.mrm.rows) & set(b.mrm.rows))
    if row_clashes:
        raise NameCollision(f"row labels in both models: {', '.join(row_clashes)}")

    shared_b_to_a = {bv: av for av, bv in shared}
    for av, bv in shared:
        if a.variable_by_id(av) is None:
            raise NameCollision(f"shared pair names unknown variable {av!r} in the first model")
        if b.variable_by_id(bv) is None:
            raise NameCollision(f"shared pair names unknown variable {bv!r} in the second model")
    a_var_ids = {v.id for v in a.variables}
    accidental = sorted(a_var_ids & {v.id for v in b.variables
                                     if v.id not in shared_b_to_a})
    if accidental:
        raise NameCollision(
            f"variable ids in both models but not declared shared: {', '.join(accidental)}")

    out = Sskr(variables=[], parameters=[], mrm=Mrm(rows=[], cells=[]),
               mrs=Mrs(rows=[]), ddt=a.ddt, mkm=Mkm(), mfm=None, name=a.name)

    from .script import _clone
    host = _clone(a)
    out.variables = host.variables
    out.parameters = host.parameters + [p for p in _clone(b).parameters]
    out.ddt = host.ddt
    n_a_cols = len(a.variables)
    n_a_rows = a.mrm.n_rows

    # Column map: shared ids collapse onto the host column, the rest append.
    from ..sskr.model import Variable
    b_col_to_merged: dict[int, int] = {}
    next_col = n_a_cols
    for v in sorted(b.variables, key=lambda v: v.column):
        target = shared_b_to_a.get(v.id)
        if target is not None:
            b_col_to_merged[v.column] = a.column_index(target)
        else:
            next_col += 1
            b_col_to_merged[v.column] = next_col
            out.variables.append(Variable(id=v.id, label=v.label, column=next_col))

    n_cols = next_col
    zero = MrmElement.zero()
    out.mrm.rows = list(a.mrm.rows) + list(b.mrm.rows)
    out.mrm.cells = [list(row) + [zero] * (n_cols - n_a_cols) for row in a.mrm.cells]
    for r in range(b.mrm.n_rows):
        merged_row = [zero] * n_cols
        for c in range(1, b.mrm.n_cols + 1):
            merged_row[b_col_to_merged[c] - 1] = b.mrm.cells[r][c - 1]
        out.mrm.cells.append(merged_row)

    row_map = lambda r: r + n_a_rows
    col_map = lambda c: b_col_to_merged[c]
    out.mrs.rows = [MrsRow(r.primary, list(r.alternates)) for r in a.mrs.rows]
    out.mrs.rows += [MrsRow(map_refs(r.primary, row_map, col_map),
                            [map_refs(x, row_map, col_map) for x in r.alternates])
                     for r in b.mrs.rows]

    out.mkm.items = list(a.mkm.items) + list(b.mkm.items)
    offset = len(a.mkm.items)
    out.mkm.refs = {k: list(v) for k, v in a.mkm.refs.items()}
    for (r, c, k), v in b.mkm.refs.items():
        out.mkm.refs[(row_map(r), col_map(c), k)] = [i + offset for i in v]

    if a.mfm is not None and b.mfm is not None:
        out.mfm = Mfm(unit=a.mfm.unit,
                      nodes=[SubMfm(host.mfm), SubMfm(_clone(b).mfm)],
                      edges=[[0, 1], [0, 0]])
    else:
        out.mfm = host.mfm if a.mfm is not None else _clone(b).mfm

    report = validate(out)
    if not report.ok:
        raise ValidationFailed(report, "composed model does not validate")
    return out

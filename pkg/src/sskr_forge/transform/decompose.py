"""Casting one parameter as the output of a finer-grained sub-model.

The sub-model's variables become new columns and its rules new bottom rows.
Original rows get Forbidden cells under the new columns: those variables
may influence the host only through the decomposed parameter, and the
matrix structure enforces that. The parameter is marked computed, with the
sub-model row that produces it as provenance.
"""

from __future__ import annotations

from ..expr import map_refs
from ..sskr.model import Mfm, MrmElement, MrsRow, RuleRef, Sskr, SubMfm, Variable
from ..sskr.validate import ValidationFailed, validate
from .compose import NameCollision
from .script import _clone


class UnknownParameter(ValueError):
    pass


def decompose_parameter(s: Sskr, param_id: str, sub: Sskr,
                        outputs: dict[str, str]) -> Sskr:
    if s.parameter_by_id(param_id) is None:
        raise UnknownParameter(param_id)
    if param_id not in outputs:
        raise UnknownParameter(f"outputs does not name a producing row for {param_id!r}")
    report = validate(sub)
    if not report.ok:
        raise ValidationFailed(report, "sub-model does not validate")

    var_clashes = sorted({v.id for v in s.variables} & {v.id for v in sub.variables})
    if var_clashes:
        raise NameCollision(f"variable ids in both models: {', '.join(var_clashes)}")
    row_clashes = sorted(set(s.mrm.rows) & set(sub.mrm.rows))
    if row_clashes:
        raise NameCollision(f"row labels in both models: {', '.join(row_clashes)}")
    param_clashes = sorted({p.id for p in s.parameters} & {p.id for p in sub.parameters})
    if param_clashes:
        raise NameCollision(f"parameter ids in both models: {', '.join(param_clashes)}")
    for pid, row_label in outputs.items():
        if row_label not in sub.mrm.rows:
            raise UnknownParameter(f"outputs maps {pid!r} to unknown sub-model row {row_label!r}")

    out = _clone(s)
    sub = _clone(sub)
    n_host_rows, n_host_cols = s.mrm.n_rows, len(s.variables)

    for v in sorted(sub.variables, key=lambda v: v.column):
        out.variables.append(Variable(id=v.id, label=v.label, column=v.column + n_host_cols))
    out.parameters += sub.parameters
    for p in out.parameters:
        if p.id in outputs:
            p.computed = outputs[p.id]

    forbidden = MrmElement.forbidden()
    zero = MrmElement.zero()
    n_sub_cols = len(sub.variables)
    for row in out.mrm.cells:
        row += [forbidden] * n_sub_cols
    out.mrm.rows += sub.mrm.rows
    for r in range(sub.mrm.n_rows):
        out.mrm.cells.append([zero] * n_host_cols + list(sub.mrm.cells[r]))

    row_map = lambda r: r + n_host_rows
    col_map = lambda c: c + n_host_cols
    out.mrs.rows += [MrsRow(map_refs(r.primary, row_map, col_map),
                            [map_refs(x, row_map, col_map) for x in r.alternates])
                     for r in sub.mrs.rows]

    offset = len(out.mkm.items)
    out.mkm.items += sub.mkm.items
    for (r, c, k), v in sub.mkm.refs.items():
        out.mkm.refs[(row_map(r), col_map(c), k)] = [i + offset for i in v]

    # A sub-model that carries its own spatial world brings it along when the
    # host has none; time facts always stay the host's.
    if out.ddt.spatial_dim == 0 and sub.ddt.spatial_dim > 0:
        out.ddt.spatial_dim = sub.ddt.spatial_dim
        out.ddt.space = sub.ddt.space
        out.ddt.space_level = sub.ddt.space_level
        out.ddt.boundary = sub.ddt.boundary
        out.ddt.structure = sub.ddt.structure
        out.ddt.adjacency = sub.ddt.adjacency

    sub_flow = sub.mfm or Mfm(unit="time step",
                              nodes=[RuleRef(r) for r in sub.mrm.rows],
                              edges=_chain(len(sub.mrm.rows)))
    host_flow = out.mfm or Mfm(unit="time step",
                               nodes=[RuleRef(r) for r in s.mrm.rows],
                               edges=_chain(n_host_rows))
    out.mfm = Mfm(unit=host_flow.unit, nodes=[SubMfm(sub_flow), SubMfm(host_flow)],
                  edges=[[0, 1], [0, 0]])

    report = validate(out)
    if not report.ok:
        raise ValidationFailed(report, "decomposed model does not validate")
    return out


def _chain(n: int) -> list[list[int]]:
    return [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)]

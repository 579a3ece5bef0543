"""Structural and functional diffing of two knowledgebases.

Rows are matched by label, never by position: an extension that inserts rows
shifts positions without changing what the surviving rows mean. Cells are
matched by variable id for the same reason. Functional comparison resolves
matrix references to parameter/variable ids first, so the same rule shifted
to a different row/column still compares as itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..expr import (
    DEFAULT_REGISTRY,
    EquivalenceVerdict,
    Registry,
    contains_laplacian,
    equivalent,
    free_symbols,
    leaf_key,
)
from ..sskr.model import MrmElement, Sskr
from ..sskr.resolve import resolve_expr


@dataclass(frozen=True)
class NotComparable:
    reason: str

    @property
    def outcome(self) -> str:
        return f"NotComparable: {self.reason}"


@dataclass(frozen=True)
class CellDiff:
    row: str
    variable: str
    a: MrmElement  # a missing column reads as a Zero cell
    b: MrmElement


@dataclass
class ModelDiff:
    variables_only_in_a: list[str] = field(default_factory=list)
    variables_only_in_b: list[str] = field(default_factory=list)
    rows_only_in_a: list[str] = field(default_factory=list)
    rows_only_in_b: list[str] = field(default_factory=list)
    cell_diffs: list[CellDiff] = field(default_factory=list)
    row_verdicts: dict[str, EquivalenceVerdict | NotComparable] = field(default_factory=dict)

    @property
    def changed_rows(self) -> list[str]:
        """Matched rows with at least one structural cell difference, in
        first-appearance order."""
        seen: list[str] = []
        for d in self.cell_diffs:
            if d.row not in seen:
                seen.append(d.row)
        return seen

    @property
    def structurally_empty(self) -> bool:
        return not (self.variables_only_in_a or self.variables_only_in_b
                    or self.rows_only_in_a or self.rows_only_in_b or self.cell_diffs)


def _cells_equal(a: MrmElement, b: MrmElement) -> bool:
    return a.kind == b.kind and a.params == b.params


def compare(a: Sskr, b: Sskr, n: int = 200, tol: float = 1e-9, seed: int = 0,
            registry: Registry = DEFAULT_REGISTRY) -> ModelDiff:
    diff = ModelDiff()
    a_vars = [v.id for v in sorted(a.variables, key=lambda v: v.column)]
    b_vars = [v.id for v in sorted(b.variables, key=lambda v: v.column)]
    diff.variables_only_in_a = [v for v in a_vars if v not in b_vars]
    diff.variables_only_in_b = [v for v in b_vars if v not in a_vars]
    diff.rows_only_in_a = [r for r in a.mrm.rows if r not in b.mrm.rows]
    diff.rows_only_in_b = [r for r in b.mrm.rows if r not in a.mrm.rows]

    all_vars = a_vars + [v for v in b_vars if v not in a_vars]
    zero = MrmElement.zero()
    for label in a.mrm.rows:
        if label not in b.mrm.rows:
            continue
        ra, rb = a.row_index(label), b.row_index(label)
        for vid in all_vars:
            ca, cb = a.column_index(vid), b.column_index(vid)
            cell_a = a.mrm.cell(ra, ca) if ca is not None else zero
            cell_b = b.mrm.cell(rb, cb) if cb is not None else zero
            if not _cells_equal(cell_a, cell_b):
                diff.cell_diffs.append(CellDiff(row=label, variable=vid,
                                                a=cell_a, b=cell_b))

        ea = resolve_expr(a, a.mrs.rows[ra - 1].primary)
        eb = resolve_expr(b, b.mrs.rows[rb - 1].primary)
        if contains_laplacian(ea) or contains_laplacian(eb):
            diff.row_verdicts[label] = NotComparable("Laplacian present")
            continue
        syms_a = {leaf_key(s) for s in free_symbols(ea)}
        syms_b = {leaf_key(s) for s in free_symbols(eb)}
        if syms_a != syms_b:
            only_a = ",".join(sorted(syms_a - syms_b)) or "-"
            only_b = ",".join(sorted(syms_b - syms_a)) or "-"
            diff.row_verdicts[label] = NotComparable(
                f"symbol sets differ (only in A: {only_a}; only in B: {only_b})")
            continue
        diff.row_verdicts[label] = equivalent(ea, eb, n=n, tol=tol, seed=seed,
                                              registry=registry)
    return diff

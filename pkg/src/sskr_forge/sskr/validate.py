"""Structural validation of a knowledgebase."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..expr import Laplacian, ParamRef, VarRef, walk
from .model import FORBIDDEN, Mfm, MrmElement, PRESENT, RuleRef, Sskr, SubMfm, ZERO


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.location}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, location: str, message: str) -> None:
        self.findings.append(Finding("error", location, message))

    def warning(self, location: str, message: str) -> None:
        self.findings.append(Finding("warning", location, message))


class ValidationFailed(ValueError):
    def __init__(self, report: ValidationReport, context: str = "knowledgebase is invalid"):
        lines = "; ".join(str(f) for f in report.errors[:5])
        super().__init__(f"{context}: {lines}")
        self.report = report


def _check_mfm(mfm: Mfm, row_labels: set[str], report: ValidationReport, where: str) -> None:
    n = len(mfm.nodes)
    if len(mfm.edges) != n or any(len(row) != n for row in mfm.edges):
        report.error(where, f"edge matrix must be {n}x{n} to match the node list")
    for i, node in enumerate(mfm.nodes):
        if isinstance(node, RuleRef):
            if node.rule not in row_labels:
                report.error(f"{where}.nodes[{i}]", f"rule reference {node.rule!r} names no row")
        elif isinstance(node, SubMfm):
            _check_mfm(node.sub, {r.rule for r in _rule_refs(node.sub)} | row_labels,
                       report, f"{where}.nodes[{i}]")


def _rule_refs(mfm: Mfm):
    for node in mfm.nodes:
        if isinstance(node, RuleRef):
            yield node


def validate(s: Sskr) -> ValidationReport:
    """Check every cross-reference and shape invariant; never raises."""
    report = ValidationReport()
    n_rows = len(s.mrm.rows)
    n_cols = len(s.variables)

    if not s.variables and not s.mrm.rows:
        report.warning("model", "empty model")

    # registries
    seen_vars: dict[str, int] = {}
    for i, v in enumerate(s.variables):
        if v.id in seen_vars:
            report.error(f"variables[{i}]", f"duplicate variable id {v.id!r}")
        seen_vars[v.id] = i
    columns = sorted(v.column for v in s.variables)
    if columns != list(range(1, n_cols + 1)):
        report.error("variables", f"columns must be 1..{n_cols} with no gaps, got {columns}")
    seen_params: set[str] = set()
    for i, p in enumerate(s.parameters):
        if p.id in seen_params:
            report.error(f"parameters[{i}]", f"duplicate parameter id {p.id!r}")
        seen_params.add(p.id)
        if p.bounds is not None:
            lo, hi = p.bounds
            if not lo < hi:
                report.error(f"parameters[{i}]", f"bounds must satisfy lo < hi, got [{lo}, {hi}]")
            elif p.value is not None and not lo <= p.value <= hi:
                report.error(f"parameters[{i}]",
                             f"value {p.value} outside bounds [{lo}, {hi}]")
    seen_rows: set[str] = set()
    for i, label in enumerate(s.mrm.rows):
        if label in seen_rows:
            report.error(f"mrm.rows[{i}]", f"duplicate row label {label!r}")
        seen_rows.add(label)

    # matrix shape
    if len(s.mrm.cells) != n_rows:
        report.error("mrm", f"{n_rows} row labels but {len(s.mrm.cells)} cell rows")
    rectangular = True
    for r, row in enumerate(s.mrm.cells):
        if len(row) != n_cols:
            report.error(f"mrm.cells[{r}]", f"expected {n_cols} cells, got {len(row)}")
            rectangular = False
    param_ids = {p.id for p in s.parameters}
    for r, row in enumerate(s.mrm.cells):
        for c, cell in enumerate(row):
            for pid in cell.params:
                if pid not in param_ids:
                    report.error(f"mrm[{r + 1}][{c + 1}]", f"unknown parameter id {pid!r}")

    # expressions
    if len(s.mrs.rows) != n_rows:
        report.error("mrs", f"{n_rows} matrix rows but {len(s.mrs.rows)} expression rows")
    referenced_cells: set[tuple[int, int]] = set()
    if rectangular and len(s.mrm.cells) == n_rows:
        for r, mrs_row in enumerate(s.mrs.rows[:n_rows], start=1):
            for which, e in enumerate(mrs_row.all_exprs()):
                where = f"mrs[{r}]" if which == 0 else f"mrs[{r}].alternates[{which - 1}]"
                for node in walk(e):
                    if isinstance(node, ParamRef):
                        if node.row != r:
                            report.error(where,
                                         f"p({node.row},{node.column},{node.index}) "
                                         f"references another row from row {r}")
                            continue
                        if not 1 <= node.column <= n_cols:
                            report.error(where, f"column {node.column} out of range")
                            continue
                        cell = s.mrm.cell(r, node.column)
                        if cell.kind != PRESENT:
                            report.error(where,
                                         f"p({r},{node.column},{node.index}) references a "
                                         f"{cell.kind} cell")
                        elif not 1 <= node.index <= len(cell.params):
                            report.error(where,
                                         f"tuple index {node.index} out of range for cell "
                                         f"({r},{node.column}) with {len(cell.params)} parameters")
                        else:
                            referenced_cells.add((r, node.column))
                    elif isinstance(node, VarRef):
                        if not 1 <= node.column <= n_cols:
                            report.error(where, f"v({node.column}) out of range")
                            continue
                        cell = s.mrm.cell(r, node.column)
                        if cell.kind != PRESENT:
                            report.error(where,
                                         f"v({node.column}) references a {cell.kind} cell "
                                         f"in row {r}")
                        else:
                            referenced_cells.add((r, node.column))

        for r in range(1, n_rows + 1):
            for c in range(1, n_cols + 1):
                if s.mrm.cell(r, c).is_present and (r, c) not in referenced_cells:
                    report.warning(f"mrm[{r}][{c}]",
                                   "present cell is never referenced by its row's expressions")

    # parameters never used anywhere
    used_params: set[str] = set()
    for row in s.mrm.cells:
        for cell in row:
            used_params.update(cell.params)
    for i, p in enumerate(s.parameters):
        if p.id not in used_params:
            report.warning(f"parameters[{i}]", f"parameter {p.id!r} appears in no matrix cell")

    # provenance
    for key, item_idxs in s.mkm.refs.items():
        r, c, k = key
        where = f"mkm.refs[{r},{c},{k}]"
        if not (1 <= r <= n_rows and 1 <= c <= n_cols):
            report.error(where, "cell out of range")
        else:
            cell = s.mrm.cell(r, c)
            if cell.kind != PRESENT:
                report.error(where, f"reference into a {cell.kind} cell")
            elif not 1 <= k <= len(cell.params):
                report.error(where, f"tuple index {k} out of range")
        for idx in item_idxs:
            if not 1 <= idx <= len(s.mkm.items):
                report.error(where, f"item index {idx} out of range (1..{len(s.mkm.items)})")

    # flow graph
    if s.mfm is not None:
        _check_mfm(s.mfm, set(s.mrm.rows), report, "mfm")

    # discretization facts
    d = s.ddt
    if d.spatial_dim not in (0, 1, 2, 3):
        report.error("ddt", f"spatial dimensionality must be 0..3, got {d.spatial_dim}")
    if d.spatial_dim == 0:
        if d.space != "none":
            report.error("ddt", "dimensionality 0 requires space kind none")
        if d.boundary != "none":
            report.error("ddt", "dimensionality 0 requires boundary none")
        if d.structure != "none":
            report.error("ddt", "dimensionality 0 requires structure none")
    elif d.space == "none":
        report.error("ddt", f"dimensionality {d.spatial_dim} requires a space kind")
    if d.space == "none" and d.space_level is not None:
        report.error("ddt", "space discretization level set without a space kind")
    if d.space != "none" and d.space_level not in ("fixed", "adaptive"):
        report.error("ddt", "space kind set without a discretization level")
    if d.time not in ("discrete", "continuous"):
        report.error("ddt", f"bad time kind {d.time!r}")
    if d.time_level not in ("fixed", "adaptive"):
        report.error("ddt", f"bad time discretization level {d.time_level!r}")
    if d.structure == "network" and d.adjacency is None:
        report.error("ddt", "network structure requires an adjacency list")
    if d.structure != "network" and d.adjacency is not None:
        report.error("ddt", "adjacency list without network structure")

    # expressions must stay evaluable: laplacians require continuous space
    for r, mrs_row in enumerate(s.mrs.rows, start=1):
        for e in mrs_row.all_exprs():
            if any(isinstance(n, Laplacian) for n in walk(e)) and d.space != "continuous":
                report.error(f"mrs[{r}]", "laplacian in a model without continuous space")

    return report

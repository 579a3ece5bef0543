"""The five-part structured model knowledgebase.

A knowledgebase couples a rule/variable interaction matrix (MRM) with one
symbolic expression per rule (MRS), discretization facts (DDT), an optional
execution-flow graph (MFM), and itemized provenance notes (MKM).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..expr import Expr

ZERO = "zero"
FORBIDDEN = "forbidden"
PRESENT = "present"

_DERIV_LABEL_RE = re.compile(r"^d(.+?)/dt(?:@.+)?$")


@dataclass(frozen=True)
class MrmElement:
    """One matrix cell: no interaction, a forbidden interaction, or an
    interaction mediated by a (possibly empty) tuple of parameter ids."""

    kind: str
    params: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (ZERO, FORBIDDEN, PRESENT):
            raise ValueError(f"bad cell kind {self.kind!r}")
        if self.kind != PRESENT and self.params:
            raise ValueError(f"{self.kind} cell cannot carry parameters")
        object.__setattr__(self, "params", tuple(self.params))

    @staticmethod
    def zero() -> "MrmElement":
        return MrmElement(ZERO)

    @staticmethod
    def forbidden() -> "MrmElement":
        return MrmElement(FORBIDDEN)

    @staticmethod
    def present(*params: str) -> "MrmElement":
        return MrmElement(PRESENT, tuple(params))

    @property
    def is_present(self) -> bool:
        return self.kind == PRESENT


@dataclass
class Variable:
    id: str
    label: str
    column: int  # 1-based position in the matrix


@dataclass
class Parameter:
    id: str
    symbol: str
    value: float | None = None
    fixed: bool = False
    bounds: tuple[float, float] | None = None
    computed: str | None = None  # row label of the sub-model rule producing it


@dataclass
class Mrm:
    rows: list[str]  # rule labels, unique
    cells: list[list[MrmElement]]

    def cell(self, row: int, col: int) -> MrmElement:
        """1-based access."""
        return self.cells[row - 1][col - 1]

    def set_cell(self, row: int, col: int, element: MrmElement) -> None:
        self.cells[row - 1][col - 1] = element

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0


@dataclass
class MrsRow:
    primary: Expr
    alternates: list[Expr] = field(default_factory=list)

    def all_exprs(self) -> list[Expr]:
        return [self.primary, *self.alternates]


@dataclass
class Mrs:
    rows: list[MrsRow]


@dataclass
class Ddt:
    """Discretization facts: dimensionality, kinds, levels, boundary, structure."""

    spatial_dim: int = 0
    space: str = "none"  # none | discrete | continuous
    time: str = "continuous"  # discrete | continuous
    space_level: str | None = None  # fixed | adaptive, None when no space
    time_level: str = "fixed"  # fixed | adaptive
    boundary: str = "none"  # none | dirichlet | neumann | periodic
    structure: str = "none"  # none | contiguous | network
    adjacency: list[list[int]] | None = None  # neighbor lists when structure == network


@dataclass
class RuleRef:
    rule: str  # MRM row label


@dataclass
class SubMfm:
    sub: "Mfm"


MfmNode = RuleRef | SubMfm


@dataclass
class Mfm:
    unit: str  # what one traversal of the graph advances, e.g. "time step"
    nodes: list[MfmNode]
    edges: list[list[int]]  # adjacency matrix over nodes, entries 0/1


@dataclass
class Mkm:
    """Itemized provenance. Item indices are 1-based; refs tie (row, col,
    tuple-index) cell parameters to the items describing them."""

    items: list[str] = field(default_factory=list)
    refs: dict[tuple[int, int, int], list[int]] = field(default_factory=dict)


@dataclass
class Sskr:
    variables: list[Variable]
    parameters: list[Parameter]
    mrm: Mrm
    mrs: Mrs
    ddt: Ddt
    mkm: Mkm
    mfm: Mfm | None = None
    name: str = "model"

    def variable_by_id(self, vid: str) -> Variable | None:
        for v in self.variables:
            if v.id == vid:
                return v
        return None

    def variable_by_column(self, column: int) -> Variable | None:
        for v in self.variables:
            if v.column == column:
                return v
        return None

    def parameter_by_id(self, pid: str) -> Parameter | None:
        for p in self.parameters:
            if p.id == pid:
                return p
        return None

    def row_index(self, label: str) -> int | None:
        """1-based index of a row label."""
        try:
            return self.mrm.rows.index(label) + 1
        except ValueError:
            return None

    def column_index(self, vid: str) -> int | None:
        v = self.variable_by_id(vid)
        return v.column if v else None


def derivative_target(label: str) -> str | None:
    """Variable id named by a derivative row label ("dX/dt", optionally
    "dX/dt@tag" for disambiguation), or None when the label is not one."""
    m = _DERIV_LABEL_RE.match(label)
    return m.group(1) if m else None

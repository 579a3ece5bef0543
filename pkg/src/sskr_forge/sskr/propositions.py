"""Rendering matrix rows as English propositions."""

from __future__ import annotations

from .model import FORBIDDEN, PRESENT, Sskr


def row_proposition(s: Sskr, row: int) -> str:
    """One statement for a 1-based row: which variables determine it and how.

    "dIa/dt is determined by {E via alpha,sigma; Ia via gamma}", with any
    forbidden columns appended as "forbidden: {...}".
    """
    label = s.mrm.rows[row - 1]
    entries = []
    forbidden = []
    for col in range(1, s.mrm.n_cols + 1):
        cell = s.mrm.cell(row, col)
        var = s.variable_by_column(col)
        vid = var.id if var else f"column {col}"
        if cell.kind == PRESENT:
            if cell.params:
                entries.append(f"{vid} via {','.join(cell.params)}")
            else:
                entries.append(vid)
        elif cell.kind == FORBIDDEN:
            forbidden.append(vid)
    text = f"{label} is determined by {{{'; '.join(entries)}}}"
    if forbidden:
        text += f" forbidden: {{{'; '.join(forbidden)}}}"
    return text


def to_propositions(s: Sskr) -> list[str]:
    """Every row rendered as a proposition, in row order."""
    return [row_proposition(s, r) for r in range(1, s.mrm.n_rows + 1)]

"""Ontology tables: term -> code/category/label/model-symbol lookups.

A term may hold several entries (e.g. a species that is both "messenger
RNA" and "material entity"); the first is primary and supplies the label
shown in annotated renderings. Rule matching tests against the full code
set, so secondary class memberships participate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .statements import Statement, prose_phrase, with_annotation

CATEGORIES = ("entity", "process")


class UnknownTerm(ValueError):
    def __init__(self, term: str):
        self.term = term
        super().__init__(f"term {term!r} is not in the ontology table")


@dataclass(frozen=True)
class OntologyEntry:
    term: str
    code: str
    category: str
    label: str
    var: str


class OntologyTable:
    def __init__(self, entries: list[OntologyEntry]):
        self._by_term: dict[str, list[OntologyEntry]] = {}
        for e in entries:
            self._by_term.setdefault(e.term, []).append(e)
        self.entries = list(entries)

    def _get(self, term: str) -> list[OntologyEntry]:
        try:
            return self._by_term[term]
        except KeyError:
            raise UnknownTerm(term) from None

    def has(self, term: str) -> bool:
        return term in self._by_term

    def codes(self, term: str) -> tuple[str, ...]:
        return tuple(e.code for e in self._get(term))

    def category(self, term: str) -> str:
        return self._get(term)[0].category

    def label(self, term: str) -> str:
        return self._get(term)[0].label

    def var(self, term: str) -> str:
        return self._get(term)[0].var

    def entity_terms(self) -> list[str]:
        return [t for t, es in self._by_term.items() if es[0].category == "entity"]


def table_from_jsonable(data) -> OntologyTable:
    if not isinstance(data, list):
        raise ValueError("ontology file must be a JSON array")
    entries = []
    for i, row in enumerate(data):
        if not isinstance(row, dict) or "term" not in row or "code" not in row:
            raise ValueError(f"ontology entry {i}: need term and code")
        category = row.get("category", "entity")
        if category not in CATEGORIES:
            raise ValueError(f"ontology entry {i}: bad category {category!r}")
        entries.append(OntologyEntry(
            term=str(row["term"]), code=str(row["code"]), category=category,
            label=str(row.get("label", category)),
            var=str(row.get("var", row["term"]))))
    return OntologyTable(entries)


def load_table(path) -> OntologyTable:
    with open(path, encoding="utf-8") as f:
        return table_from_jsonable(json.load(f))


def annotate(st: Statement, table: OntologyTable) -> Statement:
    """Attach ontology codes to every entity and the process. Idempotent."""
    if st.annotated:
        return st
    return with_annotation(
        st,
        subject_codes=table.codes(st.subject),
        process_code=table.codes(st.process)[0],
        object_codes=[table.codes(o) for o in st.objects],
    )


def render_annotated(st: Statement, table: OntologyTable) -> str:
    """The statement with entity names replaced by their class labels."""
    labels = [table.label(e) for e in st.entities()]
    if st.form == "functional":
        return f"{st.process}({', '.join(labels)})"
    parts = [labels[0], prose_phrase(st.process)] + labels[1:]
    return " ".join(parts)

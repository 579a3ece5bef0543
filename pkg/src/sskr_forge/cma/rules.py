"""Mapping rewrite rules: annotated statement patterns -> spec fragments.

A rule matches a statement when the process codes are equal, the subject
carries the rule's subject code, and each object position carries its
declared code. Templates are expressions over the slot symbols X (subject)
and Y/Z/W (objects in order) plus the fresh-rate marker k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..expr import Expr, FreeSymbol, free_symbols, parse, substitute
from .ontology import OntologyTable
from .statements import Statement

SLOTS = ("X", "Y", "Z", "W")
FRESH = "k"


@dataclass(frozen=True)
class FragmentTemplate:
    var_slot: str
    text: str
    expr: Expr


@dataclass(frozen=True)
class MappingRule:
    id: int
    process_code: str
    subject_category: str
    object_categories: tuple[str, ...]
    framework: str
    fragments: tuple[FragmentTemplate, ...]

    def matches(self, st: Statement) -> bool:
        if not st.annotated:
            raise ValueError("statement must be annotated before rule matching")
        if st.process_code != self.process_code:
            return False
        if self.subject_category not in st.subject_codes:
            return False
        if len(st.objects) != len(self.object_categories):
            return False
        return all(cat in codes
                   for cat, codes in zip(self.object_categories, st.object_codes))


def _bound_slots(n_objects: int) -> set[str]:
    return {"X", *SLOTS[1:1 + n_objects], FRESH}


def rule_from_jsonable(row: dict) -> MappingRule:
    obj_cats = tuple(str(c) for c in row.get("object_categories", []))
    if len(obj_cats) > len(SLOTS) - 1:
        raise ValueError(f"rule {row.get('id')}: more object slots than {SLOTS[1:]}")
    bound = _bound_slots(len(obj_cats))
    fragments = []
    for frag in row["fragments"]:
        slot = str(frag["var_slot"])
        if slot not in bound or slot == FRESH:
            raise ValueError(f"rule {row.get('id')}: var_slot {slot!r} is not bound")
        template = parse(str(frag["expr_template"]))
        loose = [s.name for s in free_symbols(template)
                 if isinstance(s, FreeSymbol) and s.name not in bound]
        if loose:
            raise ValueError(f"rule {row.get('id')}: unbound template symbols {loose}")
        fragments.append(FragmentTemplate(slot, str(frag["expr_template"]), template))
    return MappingRule(
        id=int(row["id"]),
        process_code=str(row["process_code"]),
        subject_category=str(row["subject_category"]),
        object_categories=obj_cats,
        framework=str(row.get("framework", "ode")),
        fragments=tuple(fragments),
    )


def rules_from_jsonable(data) -> list[MappingRule]:
    if not isinstance(data, list):
        raise ValueError("rule file must be a JSON array")
    rules = [rule_from_jsonable(row) for row in data]
    seen: set[int] = set()
    for r in rules:
        if r.id in seen:
            raise ValueError(f"duplicate rule id {r.id}")
        seen.add(r.id)
    return rules


def load_rules(path) -> list[MappingRule]:
    with open(path, encoding="utf-8") as f:
        return rules_from_jsonable(json.load(f))


def instantiate(rule: MappingRule, st: Statement, table: OntologyTable,
                step: int) -> list[tuple[str, Expr, tuple[str, ...]]]:
    """Fragment instances for one rule application: (target var, term,
    referenced entity vars). The fresh-rate marker becomes k<step>."""
    slot_vars = {"X": table.var(st.subject)}
    for slot, obj in zip(SLOTS[1:], st.objects):
        slot_vars[slot] = table.var(obj)
    mapping = {s: FreeSymbol(v) for s, v in slot_vars.items()}
    mapping[FRESH] = FreeSymbol(f"k{step}")
    out = []
    for frag in rule.fragments:
        term = substitute(frag.expr, mapping)
        refs = tuple(slot_vars[s.name] for s in free_symbols(frag.expr)
                     if isinstance(s, FreeSymbol) and s.name in slot_vars)
        out.append((slot_vars[frag.var_slot], term, refs))
    return out

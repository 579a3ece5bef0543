"""Modeling assistant: constrained statements, ontology annotation, and
rule-driven planning into framework-specific model specifications."""

from .modelspec import (
    FRAMEWORKS,
    DdtMismatch,
    ModelSpec,
    SpecFragment,
    Transition,
    UnresolvableRow,
    assemble_spec,
    spec_dumps,
    spec_from_jsonable,
    spec_from_sskr,
    spec_to_jsonable,
    split_terms,
)
from .ontology import OntologyTable, UnknownTerm, annotate, load_table, render_annotated, table_from_jsonable
from .planner import (
    DigestMismatch,
    Missing,
    Plan,
    PlanFailure,
    Planned,
    PlanStep,
    Reachable,
    RuleMissing,
    UnreachableFrameworks,
    UntransformedStatements,
    enumerate_plans,
    load_plan,
    plan,
    plan_from_jsonable,
    plan_to_jsonable,
    reachable_frameworks,
    replay,
    replay_matches,
    save_plan,
    statements_digest,
)
from .rules import FragmentTemplate, MappingRule, load_rules, rules_from_jsonable
from .statements import (
    ArityMismatch,
    Statement,
    UnknownVerb,
    parse_statement,
    parse_statements,
)

__all__ = [
    "ArityMismatch",
    "DdtMismatch",
    "DigestMismatch",
    "FRAMEWORKS",
    "FragmentTemplate",
    "MappingRule",
    "Missing",
    "ModelSpec",
    "OntologyTable",
    "Plan",
    "PlanFailure",
    "PlanStep",
    "Planned",
    "Reachable",
    "RuleMissing",
    "SpecFragment",
    "Statement",
    "Transition",
    "UnknownTerm",
    "UnknownVerb",
    "UnreachableFrameworks",
    "UnresolvableRow",
    "UntransformedStatements",
    "annotate",
    "assemble_spec",
    "enumerate_plans",
    "load_plan",
    "load_rules",
    "load_table",
    "parse_statement",
    "parse_statements",
    "plan",
    "plan_from_jsonable",
    "plan_to_jsonable",
    "reachable_frameworks",
    "render_annotated",
    "replay",
    "replay_matches",
    "rules_from_jsonable",
    "save_plan",
    "spec_dumps",
    "spec_from_jsonable",
    "spec_from_sskr",
    "spec_to_jsonable",
    "split_terms",
    "statements_digest",
    "table_from_jsonable",
]

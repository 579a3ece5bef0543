"""Deterministic planning over mapping rewrite rules.

The search state is (untransformed statement indices, accumulated
fragments). Exploration order is fixed: lowest statement index first,
lowest rule id first, which collapses the breadth-first frontier to a
single deterministic path; alternates are exposed through enumerate_plans.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ..expr import parse, to_text
from .modelspec import FRAMEWORKS, ModelSpec, SpecFragment, assemble_spec, spec_dumps
from .ontology import OntologyTable, annotate
from .rules import MappingRule, instantiate
from .statements import Statement

# Rules usable when assembling toward a goal framework. A PDE-flagged ODE
# system is still an ODE system, so it admits plain ODE rules.
_ADMITTED = {"ode": {"ode"}, "pde": {"ode", "pde"}, "petri": {"petri"}, "abm": {"abm"}}


class DigestMismatch(ValueError):
    pass


class RuleMissing(ValueError):
    def __init__(self, rule_id: int):
        self.rule_id = rule_id
        super().__init__(f"plan needs rule {rule_id}, not in the rule set")


@dataclass(frozen=True)
class PlanStep:
    statement: int                      # 1-based statement index
    rule: int
    fragments: tuple[SpecFragment, ...]


@dataclass(frozen=True)
class Plan:
    goal: str
    digest: str
    steps: tuple[PlanStep, ...]


@dataclass(frozen=True)
class Planned:
    plan: Plan
    spec: ModelSpec


@dataclass(frozen=True)
class UntransformedStatements:
    indices: tuple[int, ...]            # 1-based, non-empty


@dataclass(frozen=True)
class UnreachableFrameworks:
    missing: dict[str, tuple[str, ...]]


PlanFailure = UntransformedStatements | UnreachableFrameworks


@dataclass(frozen=True)
class Reachable:
    pass


@dataclass(frozen=True)
class Missing:
    reasons: tuple[str, ...]


def statements_digest(statements: list[Statement]) -> str:
    h = hashlib.sha256("\n".join(st.raw for st in statements).encode("utf-8"))
    return f"sha256:{h.hexdigest()}"


def _goal_check(goal: str, statements, fragments) -> tuple[str, ...]:
    """Reasons the assembled fragments do not meet the goal; empty = met.
    Every goal is vacuously met by an empty statement list."""
    if not statements:
        return ()
    if goal == "abm":
        return ("ABM generation not implemented",)
    if goal == "pde" and not any(f.framework == "pde" for f in fragments):
        return ("no spatial statements",)
    return ()


def plan(statements: list[Statement], rules: list[MappingRule],
         table: OntologyTable, goal: str) -> Planned | PlanFailure:
    if goal not in FRAMEWORKS:
        raise ValueError(f"unknown framework {goal!r}")
    statements = [annotate(st, table) for st in statements]
    digest = statements_digest(statements)
    admitted = sorted((r for r in rules if r.framework in _ADMITTED[goal]),
                      key=lambda r: r.id)

    if goal == "abm" and statements:
        return UnreachableFrameworks({"abm": ("ABM generation not implemented",)})

    steps: list[PlanStep] = []
    untransformed: list[int] = []
    for i, st in enumerate(statements, start=1):
        rule = next((r for r in admitted if r.matches(st)), None)
        if rule is None:
            untransformed.append(i)
            continue
        frags = tuple(SpecFragment(var, term, rule.framework, refs)
                      for var, term, refs in instantiate(rule, st, table, i))
        steps.append(PlanStep(i, rule.id, frags))
    if untransformed:
        return UntransformedStatements(tuple(untransformed))

    fragments = [f for step in steps for f in step.fragments]
    reasons = _goal_check(goal, statements, fragments)
    if reasons:
        return UnreachableFrameworks({goal: reasons})
    spec = assemble_spec(goal, fragments, digest)
    return Planned(Plan(goal, digest, tuple(steps)), spec)


def enumerate_plans(statements: list[Statement], rules: list[MappingRule],
                    table: OntologyTable, goal: str,
                    limit: int = 16) -> list[Planned]:
    """All rule-choice combinations in (statement, rule id) lexicographic
    order, capped at limit. Empty when no combination reaches the goal."""
    if goal not in FRAMEWORKS:
        raise ValueError(f"unknown framework {goal!r}")
    statements = [annotate(st, table) for st in statements]
    digest = statements_digest(statements)
    if goal == "abm" and statements:
        return []
    admitted = sorted((r for r in rules if r.framework in _ADMITTED[goal]),
                      key=lambda r: r.id)
    per_statement = [[r for r in admitted if r.matches(st)] for st in statements]
    if any(not choices for choices in per_statement):
        return []

    out: list[Planned] = []

    def extend(i: int, steps: list[PlanStep]) -> None:
        if len(out) >= limit:
            return
        if i == len(statements):
            fragments = [f for step in steps for f in step.fragments]
            if not _goal_check(goal, statements, fragments):
                out.append(Planned(Plan(goal, digest, tuple(steps)),
                                   assemble_spec(goal, fragments, digest)))
            return
        for rule in per_statement[i]:
            frags = tuple(SpecFragment(var, term, rule.framework, refs)
                          for var, term, refs in instantiate(rule, statements[i], table, i + 1))
            extend(i + 1, steps + [PlanStep(i + 1, rule.id, frags)])
            if len(out) >= limit:
                return

    extend(0, [])
    return out


def replay(plan_: Plan, statements: list[Statement],
           rules: list[MappingRule]) -> ModelSpec:
    if statements_digest(statements) != plan_.digest:
        raise DigestMismatch("statements do not match the plan's digest")
    by_id = {r.id: r for r in rules}
    for step in plan_.steps:
        if step.rule not in by_id:
            raise RuleMissing(step.rule)
    fragments = [f for step in plan_.steps for f in step.fragments]
    return assemble_spec(plan_.goal, fragments, plan_.digest)


def reachable_frameworks(statements: list[Statement], rules: list[MappingRule],
                         table: OntologyTable) -> dict[str, Reachable | Missing]:
    out: dict[str, Reachable | Missing] = {}
    for goal in FRAMEWORKS:
        result = plan(statements, rules, table, goal)
        if isinstance(result, Planned):
            out[goal] = Reachable()
        elif isinstance(result, UntransformedStatements):
            out[goal] = Missing(tuple(
                f"statement {i} matches no rule: {statements[i - 1].raw}"
                for i in result.indices))
        else:
            out[goal] = Missing(result.missing[goal])
    return out


def plan_to_jsonable(plan_: Plan) -> dict:
    return {
        "goal": plan_.goal,
        "digest": plan_.digest,
        "steps": [{
            "statement": s.statement,
            "rule": s.rule,
            "fragments": [{"var": f.var, "expr": to_text(f.term),
                           "framework": f.framework, "refs": list(f.refs)}
                          for f in s.fragments],
        } for s in plan_.steps],
    }


def plan_from_jsonable(doc: dict) -> Plan:
    steps = tuple(
        PlanStep(int(s["statement"]), int(s["rule"]),
                 tuple(SpecFragment(str(f["var"]), parse(str(f["expr"])),
                                    str(f.get("framework", "ode")),
                                    tuple(str(r) for r in f.get("refs", [])))
                       for f in s["fragments"]))
        for s in doc["steps"])
    return Plan(goal=str(doc["goal"]), digest=str(doc["digest"]), steps=steps)


def save_plan(plan_: Plan, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(plan_to_jsonable(plan_), f, indent=2, ensure_ascii=False)
        f.write("\n")


def load_plan(path) -> Plan:
    with open(path, encoding="utf-8") as f:
        return plan_from_jsonable(json.load(f))


def replay_matches(planned: Planned, statements, rules) -> bool:
    """Byte-identical check used by tests and the CLI."""
    return spec_dumps(replay(planned.plan, statements, rules)) == spec_dumps(planned.spec)

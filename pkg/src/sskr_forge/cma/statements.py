"""Constrained-statement parsing for the modeling assistant.

Statements come in two spellings that parse to the same structure: prose
("P2 positively regulates G") and functional ("bind(A-protein, B-protein,
AB-complex)"). The verb lexicon is closed; entity names are free-form,
with multiword names resolved by longest match against a declared entity
list when one is supplied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace


class UnknownVerb(ValueError):
    def __init__(self, verb: str):
        self.verb = verb
        super().__init__(f"unknown verb {verb!r}")


class ArityMismatch(ValueError):
    def __init__(self, verb: str, got: int, lo: int, hi: int):
        self.verb, self.got, self.lo, self.hi = verb, got, lo, hi
        want = str(lo) if lo == hi else f"{lo}-{hi}"
        super().__init__(f"{verb!r} takes {want} object(s), got {got}")


@dataclass(frozen=True)
class VerbEntry:
    prose: str        # phrase as it appears in prose statements
    functional: str   # call-form name
    canonical: str    # ontology lookup term
    min_objects: int
    max_objects: int


# secrete is the one verb beyond the 0-2 object grammar: its functional
# form carries (substance, location, product) after the subject.
LEXICON: tuple[VerbEntry, ...] = (
    VerbEntry("positively regulates", "regulate", "positively regulate", 1, 1),
    VerbEntry("is transcribed into", "transcribe", "transcribe", 1, 1),
    VerbEntry("is translated into", "translate", "translate", 1, 1),
    VerbEntry("degrades", "degrade", "degrade", 0, 0),
    VerbEntry("dimerizes to form", "dimerize", "dimerize", 1, 1),
    VerbEntry("dissociates into", "dissociate", "dissociate", 1, 2),
    VerbEntry("binds", "bind", "bind", 1, 2),
    VerbEntry("secretes", "secrete", "secrete", 3, 3),
    VerbEntry("diffuses", "diffuse", "diffuse", 0, 0),
    VerbEntry("decays", "decay", "decay", 0, 0),
)

_BY_FUNCTIONAL = {e.functional: e for e in LEXICON}
_BY_FUNCTIONAL.update({e.canonical: e for e in LEXICON})
_PROSE_PHRASES = sorted(((e.prose.split(), e) for e in LEXICON),
                        key=lambda t: -len(t[0]))


@dataclass(frozen=True)
class Statement:
    raw: str
    subject: str
    process: str                  # canonical lexicon term
    objects: tuple[str, ...] = ()
    form: str = "prose"           # "prose" | "functional"
    # Annotation state, filled by cma.ontology.annotate:
    subject_codes: tuple[str, ...] | None = None
    process_code: str | None = None
    object_codes: tuple[tuple[str, ...], ...] = field(default=None)

    @property
    def annotated(self) -> bool:
        return self.process_code is not None

    def entities(self) -> tuple[str, ...]:
        return (self.subject, *self.objects)


_FUNCTIONAL = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*\((.*)\)\s*$", re.S)


def parse_statement(text: str, entities: list[str] | None = None) -> Statement:
    raw = text.strip()
    m = _FUNCTIONAL.match(raw)
    if m:
        return _parse_functional(raw, m.group(1), m.group(2))
    return _parse_prose(raw, entities)


def _check_arity(entry: VerbEntry, n: int) -> None:
    if not entry.min_objects <= n <= entry.max_objects:
        raise ArityMismatch(entry.canonical, n, entry.min_objects, entry.max_objects)


def _parse_functional(raw: str, name: str, argtext: str) -> Statement:
    entry = _BY_FUNCTIONAL.get(name)
    if entry is None:
        raise UnknownVerb(name)
    args = [a.strip() for a in argtext.split(",")] if argtext.strip() else []
    if not args:
        raise ArityMismatch(entry.canonical, -1, entry.min_objects, entry.max_objects)
    _check_arity(entry, len(args) - 1)
    return Statement(raw=raw, subject=args[0], process=entry.canonical,
                     objects=tuple(args[1:]), form="functional")


def _parse_prose(raw: str, entities: list[str] | None) -> Statement:
    tokens = raw.replace(",", " ").split()
    if not tokens:
        raise UnknownVerb("")
    subject, i = _match_entity(tokens, 0, entities)
    entry = None
    for phrase, cand in _PROSE_PHRASES:
        if tokens[i:i + len(phrase)] == phrase:
            entry, i = cand, i + len(phrase)
            break
    if entry is None:
        raise UnknownVerb(tokens[i] if i < len(tokens) else tokens[-1])
    objects = []
    while i < len(tokens):
        if tokens[i] == "and":
            i += 1
            continue
        obj, i = _match_entity(tokens, i, entities)
        objects.append(obj)
    _check_arity(entry, len(objects))
    return Statement(raw=raw, subject=subject, process=entry.canonical,
                     objects=tuple(objects), form="prose")


def _match_entity(tokens: list[str], i: int, entities: list[str] | None) -> tuple[str, int]:
    """Longest declared entity name starting at token i; single token otherwise."""
    if entities:
        best = None
        for name in entities:
            parts = name.split()
            if tokens[i:i + len(parts)] == parts and (best is None or len(parts) > len(best)):
                best = parts
        if best is not None:
            return " ".join(best), i + len(best)
    return tokens[i], i + 1


def parse_statements(lines) -> list[Statement]:
    """Parse a statement per non-blank line, skipping # comments."""
    out = []
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(parse_statement(line))
    return out


def with_annotation(st: Statement, subject_codes, process_code, object_codes) -> Statement:
    return replace(st, subject_codes=tuple(subject_codes), process_code=process_code,
                   object_codes=tuple(tuple(c) for c in object_codes))


def prose_phrase(process: str) -> str:
    return _BY_FUNCTIONAL[process].prose

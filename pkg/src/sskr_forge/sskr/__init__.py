"""The structured model knowledgebase: data model, validation, JSON I/O."""

from .model import (
    Ddt,
    FORBIDDEN,
    Mfm,
    MfmNode,
    Mkm,
    Mrm,
    MrmElement,
    Mrs,
    MrsRow,
    PRESENT,
    Parameter,
    RuleRef,
    Sskr,
    SubMfm,
    Variable,
    ZERO,
    derivative_target,
)
from .validate import Finding, ValidationFailed, ValidationReport, validate
from .io import SchemaError, dumps, from_jsonable, load, loads, save, to_jsonable
from .propositions import row_proposition, to_propositions
from .resolve import UnresolvableRef, resolve_expr

__all__ = [
    "Ddt",
    "FORBIDDEN",
    "Finding",
    "Mfm",
    "MfmNode",
    "Mkm",
    "Mrm",
    "MrmElement",
    "Mrs",
    "MrsRow",
    "PRESENT",
    "Parameter",
    "RuleRef",
    "SchemaError",
    "Sskr",
    "SubMfm",
    "UnresolvableRef",
    "ValidationFailed",
    "ValidationReport",
    "Variable",
    "ZERO",
    "derivative_target",
    "dumps",
    "from_jsonable",
    "load",
    "loads",
    "resolve_expr",
    "row_proposition",
    "save",
    "to_jsonable",
    "to_propositions",
    "validate",
]

"""Model surgery: scripted extension, comparison, composition, decomposition."""

from .compare import CellDiff, ModelDiff, NotComparable, compare
from .compose import IncompatibleDdt, NameCollision, ParameterIdCollision, compose
from .decompose import UnknownParameter, decompose_parameter
from .script import (
    AddParameter,
    AddRule,
    AddVariable,
    AppendMkmItem,
    ExtensionScript,
    LinkMkmRef,
    SetCell,
    SetMrs,
    Step,
    StepError,
    apply,
    load_script,
    save_script,
    script_from_jsonable,
    script_to_jsonable,
)

__all__ = [
    "AddParameter",
    "AddRule",
    "AddVariable",
    "AppendMkmItem",
    "CellDiff",
    "ExtensionScript",
    "IncompatibleDdt",
    "LinkMkmRef",
    "ModelDiff",
    "NameCollision",
    "NotComparable",
    "ParameterIdCollision",
    "SetCell",
    "SetMrs",
    "Step",
    "StepError",
    "UnknownParameter",
    "apply",
    "compare",
    "compose",
    "decompose_parameter",
    "load_script",
    "save_script",
    "script_from_jsonable",
    "script_to_jsonable",
]

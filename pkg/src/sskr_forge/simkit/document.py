"""Plain-text simulation document: what will be integrated, and how.

Byte-stable: same spec and config always render the same text, so golden
copies can be compared with string equality.
"""

from __future__ import annotations

from ..cma.modelspec import ModelSpec
from ..expr import Call, to_text, walk
from .compile import compile as compile_model
from .solve import SCHEME_NAMES, SimConfig


def _rate_form(term) -> str:
    if any(isinstance(n, Call) and n.name == "H" for n in walk(term)):
        return "Hill"
    return "MassAction"


def emit_simulation_document(spec: ModelSpec, cfg: SimConfig) -> str:
    compile_model(spec, cfg.params)  # same rejections as the simulation path
    lines = [
        "model {",
        f"  trace = {spec.trace};",
        f"  framework = {spec.framework_name};",
        "}",
        f"species = ({', '.join(spec.variables)});",
    ]
    if cfg.params:
        lines.append("parameters {")
        for pid in sorted(cfg.params):
            lines.append(f"  {pid} = {cfg.params[pid]:g};")
        lines.append("}")
    lines.append("reactions {")
    for v, terms in spec.derivatives.items():
        for term in terms:
            lines.append(f"  d[{v}]/dt += {to_text(term)};  // rate={_rate_form(term)}")
    lines.append("}")
    lines.append("solver {")
    lines.append(f"  numericalScheme = {SCHEME_NAMES[cfg.solver]};")
    lines.append(f"  dt = {cfg.dt:g};")
    lines.append(f"  t_end = {cfg.t_end:g};")
    lines.append(f"  stride = {cfg.stride};")
    if cfg.knockouts:
        lines.append(f"  knockout = ({', '.join(sorted(cfg.knockouts))});")
    lines.append("}")
    return "\n".join(lines) + "\n"

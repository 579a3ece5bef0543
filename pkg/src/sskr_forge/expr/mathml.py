"""Content-MathML reading and writing for expression trees.

Supported elements: apply, plus, minus, times, divide, power, ci, cn, sin,
cos, tan, exp, ln, root, abs, and csymbol (whose definitionURL names a
registered function). ci text follows the infix reference spelling: "v(3)"
reads back as a column reference, "p(1,2,1)" as a cell-parameter reference,
anything else as a free symbol. Laplacian nodes have no MathML form.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
import re

from .nodes import (
    BinOp,
    Call,
    Constant,
    DEFAULT_REGISTRY,
    Expr,
    FreeSymbol,
    Laplacian,
    Neg,
    ParamRef,
    Registry,
    VarRef,
)
from .printer import _fmt_real

_VAR_RE = re.compile(r"^v\((\d+)\)$")
_PARAM_RE = re.compile(r"^p\((\d+),(\d+),(\d+)\)$")

_UNARY_TAGS = {"sin", "cos", "tan", "exp", "ln", "abs"}
_BINARY_TAGS = {"plus": "+", "times": "*", "divide": "/", "power": "^"}


class MathMlError(ValueError):
    pass


class UnsupportedElement(MathMlError):
    def __init__(self, tag: str):
        super().__init__(f"unsupported MathML element <{tag}>")
        self.tag = tag


class UnsupportedNode(MathMlError):
    pass


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit(e: Expr) -> str:
    """Serialize the tree as a Content-MathML fragment."""
    match e:
        case Constant(value):
            if value.imag == 0:
                return f"<cn>{_fmt_real(value.real)}</cn>"
            return (
                f'<cn type="complex-cartesian">{_fmt_real(value.real)}'
                f"<sep/>{_fmt_real(value.imag)}</cn>"
            )
        case VarRef() | ParamRef() | FreeSymbol():
            from .printer import to_text

            return f"<ci>{_escape(to_text(e))}</ci>"
        case Neg(operand):
            return f"<apply><minus/>{emit(operand)}</apply>"
        case BinOp("-", left, right):
            return f"<apply><minus/>{emit(left)}{emit(right)}</apply>"
        case BinOp(op, left, right):
            tag = {v: k for k, v in _BINARY_TAGS.items()}[op]
            return f"<apply><{tag}/>{emit(left)}{emit(right)}</apply>"
        case Call("sqrt", args):
            return f"<apply><root/>{emit(args[0])}</apply>"
        case Call(name, args) if name in _UNARY_TAGS:
            return f"<apply><{name}/>{emit(args[0])}</apply>"
        case Call(name, args):
            body = "".join(emit(a) for a in args)
            return f'<apply><csymbol definitionURL="{_escape(name)}"/>{body}</apply>'
        case Laplacian(_):
            raise UnsupportedNode("laplacian has no MathML form")
    raise TypeError(f"not an expression node: {e!r}")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_cn(el: ET.Element) -> Constant:
    kind = el.get("type", "real")
    if kind in ("real", "integer", "double"):
        text = (el.text or "").strip()
        try:
            return Constant(complex(float(text)))
        except ValueError:
            raise MathMlError(f"bad cn value {text!r}") from None
    if kind == "complex-cartesian":
        seps = [c for c in el if _local(c.tag) == "sep"]
        if len(seps) != 1:
            raise MathMlError("complex-cartesian cn needs exactly one <sep/>")
        re_text = (el.text or "").strip()
        im_text = (seps[0].tail or "").strip()
        try:
            return Constant(complex(float(re_text), float(im_text)))
        except ValueError:
            raise MathMlError(f"bad complex cn value {re_text!r}/{im_text!r}") from None
    raise UnsupportedElement(f"cn type={kind}")


def _parse_ci(el: ET.Element) -> Expr:
    text = (el.text or "").strip()
    if not text:
        raise MathMlError("empty <ci>")
    if m := _VAR_RE.match(text):
        return VarRef(int(m.group(1)))
    if m := _PARAM_RE.match(text):
        return ParamRef(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    return FreeSymbol(text)


def _parse_apply(el: ET.Element, registry: Registry) -> Expr:
    children = list(el)
    if not children:
        raise MathMlError("empty <apply>")
    head, rest = children[0], children[1:]
    tag = _local(head.tag)
    args = [_parse_element(c, registry) for c in rest]
    if tag == "minus":
        if len(args) == 1:
            return Neg(args[0])
        if len(args) == 2:
            return BinOp("-", args[0], args[1])
        raise MathMlError("minus takes 1 or 2 arguments")
    if tag in _BINARY_TAGS:
        if len(args) < 2:
            raise MathMlError(f"{tag} takes at least 2 arguments")
        node = args[0]
        for arg in args[1:]:  # n-ary plus/times fold left
            node = BinOp(_BINARY_TAGS[tag], node, arg)
        return node
    if tag == "root":
        if len(args) != 1:
            raise UnsupportedElement("root with an explicit degree")
        return Call("sqrt", (args[0],))
    if tag in _UNARY_TAGS:
        if len(args) != 1:
            raise MathMlError(f"{tag} takes exactly 1 argument")
        return Call(tag, (args[0],))
    if tag == "csymbol":
        name = head.get("definitionURL") or (head.text or "").strip()
        if not name:
            raise MathMlError("csymbol without a definitionURL")
        if not registry.knows(name):
            raise MathMlError(f"csymbol names unregistered function {name!r}")
        lo, hi = registry.arity(name)
        if not lo <= len(args) <= hi:
            raise MathMlError(f"{name} expects {lo}..{hi} arguments, got {len(args)}")
        return Call(name, tuple(args))
    raise UnsupportedElement(tag)


def _parse_element(el: ET.Element, registry: Registry) -> Expr:
    tag = _local(el.tag)
    if tag == "cn":
        return _parse_cn(el)
    if tag == "ci":
        return _parse_ci(el)
    if tag == "apply":
        return _parse_apply(el, registry)
    raise UnsupportedElement(tag)


def parse(text: str, registry: Registry = DEFAULT_REGISTRY) -> Expr:
    """Parse a Content-MathML fragment (an optional <math> wrapper is accepted)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MathMlError(f"malformed XML: {exc}") from None
    if _local(root.tag) == "math":
        children = list(root)
        if len(children) != 1:
            raise MathMlError("<math> must wrap exactly one expression")
        root = children[0]
    return _parse_element(root, registry)

from __future__ import annotations

import json
import math

from decent.syntax.nodes import (
    UNDEFINED, Abs, App, Const, Dot, DotPut, Fresh, Get, Let, New, Op, Put, SbxAbs, Seq, Var,
)

# binding strength; a child printed below its required level gets parentheses
_SEQ, _LOOSE, _UNARY, _POSTFIX, _ATOM = -1, 0, 7, 8, 9
_BINARY_LEVEL = {
    "||": 1, "&&": 2, "===": 3, "!==": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}


def format_number(x: float) -> str:
    """Render a number the way JavaScript's ``String(x)`` would for common cases."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e21:
        return str(int(x))
    return repr(x)


def format_constant(c) -> str:
    if c is True:
        return "true"
    if c is False:
        return "false"
    if c is None:
        return "null"
    if c is UNDEFINED:
        return "undefined"
    if isinstance(c, str):
        return json.dumps(c, ensure_ascii=False)
    return format_number(c)


def pretty_print(e) -> str:
    """Render an expression (core or sugared) as reparseable surface syntax."""
    return _show(e, _SEQ)


def _level(e):
    if isinstance(e, (Let, Seq)):
        return _SEQ  # a let body runs to the end, swallowing any '; rest'
    if isinstance(e, (Abs, SbxAbs, Put, DotPut)):
        return _LOOSE
    if isinstance(e, Op):
        return _UNARY if e.right is None else _BINARY_LEVEL[e.op]
    if isinstance(e, (New, Fresh)):
        return _UNARY
    if isinstance(e, (App, Get, Dot)):
        return _POSTFIX
    if isinstance(e, Const) and isinstance(e.value, float) and (e.value < 0 or math.copysign(1, e.value) < 0):
        return _UNARY  # prints with a leading minus
    return _ATOM


def _show(e, required):
    text = _render(e)
    return f"({text})" if _level(e) < required else text


def _property_name(name):
    # dot access needs an identifier-shaped name; anything else uses brackets
    if name and (name[0].isalpha() or name[0] in "_$") and all(c.isalnum() or c in "_$" for c in name):
        return name
    return None


def _render(e):
    if isinstance(e, Const):
        return format_constant(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Op):
        if e.right is None:
            return f"{e.op} {_show(e.left, _UNARY)}"
        level = _BINARY_LEVEL[e.op]
        return f"{_show(e.left, level)} {e.op} {_show(e.right, level + 1)}"
    if isinstance(e, Abs):
        if e.self_name:
            return f"fun {e.self_name}({e.param}) => {_show(e.body, _LOOSE)}"
        return f"fun {e.param} => {_show(e.body, _LOOSE)}"
    if isinstance(e, SbxAbs):
        return f"sbx {e.param} => {_show(e.body, _LOOSE)}"
    if isinstance(e, App):
        return f"{_show(e.fn, _POSTFIX)}({_show(e.arg, _LOOSE)})"
    if isinstance(e, New):
        return f"new {_show(e.proto, _UNARY)}"
    if isinstance(e, Fresh):
        return f"fresh {_show(e.body, _UNARY)}"
    if isinstance(e, Get):
        return f"{_show(e.obj, _POSTFIX)}[{_show(e.key, _LOOSE)}]"
    if isinstance(e, Put):
        return f"{_show(e.obj, _POSTFIX)}[{_show(e.key, _LOOSE)}] = {_show(e.value, _LOOSE)}"
    if isinstance(e, Let):
        return f"let {e.name} = {_show(e.value, _LOOSE)}; {_show(e.body, _SEQ)}"
    if isinstance(e, Seq):
        return f"{_show(e.first, _LOOSE)}; {_show(e.rest, _SEQ)}"
    if isinstance(e, Dot):
        name = _property_name(e.name)
        if name is None:
            return f"{_show(e.obj, _POSTFIX)}[{format_constant(e.name)}]"
        return f"{_show(e.obj, _POSTFIX)}.{name}"
    if isinstance(e, DotPut):
        name = _property_name(e.name)
        if name is None:
            return f"{_show(e.obj, _POSTFIX)}[{format_constant(e.name)}] = {_show(e.value, _LOOSE)}"
        return f"{_show(e.obj, _POSTFIX)}.{name} = {_show(e.value, _LOOSE)}"
    raise TypeError(f"not an expression: {e!r}")

"""The primitive-operation table: arithmetic, comparison, equality, logic."""

from __future__ import annotations

import math

from decent.errors import EvalTypeError
from decent.heap import Loc, SandboxClosure, is_constant
from decent.syntax.nodes import UNDEFINED


def truthy(v) -> bool:
    """JavaScript truthiness: false, null, undefined, 0, NaN and "" are falsy."""
    if v is None or v is UNDEFINED or v is False:
        return False
    if type(v) is float:
        return not (v == 0.0 or math.isnan(v))
    if type(v) is str:
        return v != ""
    return True


def strict_equal(u, v) -> bool:
    if isinstance(u, Loc) or isinstance(v, Loc):
        return u == v
    if isinstance(u, SandboxClosure) or isinstance(v, SandboxClosure):
        return u is v
    if type(u) is not type(v):
        return False
    return u == v  # NaN != NaN and 0.0 == -0.0, as in JavaScript


def type_name(v) -> str:
    if v is UNDEFINED:
        return "undefined"
    if v is None:
        return "object"
    if type(v) is bool:
        return "boolean"
    if type(v) is float:
        return "number"
    if type(v) is str:
        return "string"
    if isinstance(v, SandboxClosure):
        return "function"
    return "object"


def _describe(v):
    return type_name(v) if is_constant(v) or isinstance(v, SandboxClosure) else "object"


def _numbers(op, u, v):
    if type(u) is not float or type(v) is not float:
        raise EvalTypeError(f"operator {op} expects two numbers, got {_describe(u)} and {_describe(v)}")


def _divide(u, v):
    if v == 0.0:
        if u == 0.0 or math.isnan(u):
            return math.nan
        return math.copysign(math.inf, u) * math.copysign(1.0, v)
    return u / v


def _remainder(u, v):
    if v == 0.0 or math.isinf(u) or math.isnan(u) or math.isnan(v):
        return math.nan
    if math.isinf(v):
        return u
    return math.fmod(u, v)


_ARITH = {
    "-": lambda u, v: u - v,
    "*": lambda u, v: u * v,
    "/": _divide,
    "%": _remainder,
}

_ORDER = {
    "<": lambda u, v: u < v,
    "<=": lambda u, v: u <= v,
    ">": lambda u, v: u > v,
    ">=": lambda u, v: u >= v,
}


ABSENT = object()


def apply_primop(op: str, u, v=ABSENT):
    """Apply ``op`` to already-evaluated operands (``v`` is absent for unary ops).

    ``typeof`` here does not see the store, so every location reports
    ``"object"``; the evaluator refines callable locations to ``"function"``.
    """
    if op == "typeof":
        return type_name(u)
    if op == "!":
        return not truthy(u)
    if op == "-" and v is ABSENT:
        if type(u) is not float:
            raise EvalTypeError(f"unary - expects a number, got {_describe(u)}")
        return -u
    if op == "&&":
        return v if truthy(u) else u
    if op == "||":
        return u if truthy(u) else v
    if op == "===":
        return strict_equal(u, v)
    if op == "!==":
        return not strict_equal(u, v)
    if op == "+":
        if type(u) is str and type(v) is str:
            return u + v
        _numbers(op, u, v)
        return u + v
    if op in _ARITH:
        _numbers(op, u, v)
        return _ARITH[op](u, v)
    if op in _ORDER:
        if not ((type(u) is float and type(v) is float) or (type(u) is str and type(v) is str)):
            raise EvalTypeError(f"operator {op} expects two numbers or two strings")
        return _ORDER[op](u, v)
    raise EvalTypeError(f"unknown operator {op!r}")

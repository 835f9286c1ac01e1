"""Abstract syntax of the sandbox calculus plus the three surface sugars.

Core nodes: Const, Var, Op, Abs, App, New, Get, Put, SbxAbs, Fresh.
Sugar nodes (removed by :func:`decent.syntax.desugar.desugar`): Let, Seq, Dot, DotPut.

Source positions are carried for diagnostics only and never take part in
equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "undefined"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

Position = Optional[Tuple[int, int]]


def constant_key(value):
    """Identity of a constant that keeps ``True`` apart from ``1.0``."""
    if type(value) is float and math.isnan(value):
        return (float, "nan")
    return (type(value), value)


class Expr:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: object
    pos: Position = field(default=None, repr=False)

    def __eq__(self, other):
        return isinstance(other, Const) and constant_key(self.value) == constant_key(other.value)

    def __hash__(self):
        return hash(("Const", constant_key(self.value)))


@dataclass(frozen=True)
class Var(Expr):
    name: str
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Op(Expr):
    """Primitive operation; ``right`` is ``None`` for unary operators."""

    op: str
    left: Expr
    right: Optional[Expr] = None
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Abs(Expr):
    self_name: Optional[str]
    param: str
    body: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class New(Expr):
    proto: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Get(Expr):
    obj: Expr
    key: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Put(Expr):
    obj: Expr
    key: Expr
    value: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SbxAbs(Expr):
    param: str
    body: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Fresh(Expr):
    body: Expr
    pos: Position = field(default=None, compare=False, repr=False)


# -- sugar ------------------------------------------------------------------


@dataclass(frozen=True)
class Let(Expr):
    name: str
    value: Expr
    body: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq(Expr):
    """``first; rest``: evaluate ``first`` for its effect, then ``rest``."""

    first: Expr
    rest: Expr
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Dot(Expr):
    obj: Expr
    name: str
    pos: Position = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DotPut(Expr):
    obj: Expr
    name: str
    value: Expr
    pos: Position = field(default=None, compare=False, repr=False)


CORE_NODES = (Const, Var, Op, Abs, App, New, Get, Put, SbxAbs, Fresh)
SUGAR_NODES = (Let, Seq, Dot, DotPut)

BINARY_OPS = ("||", "&&", "===", "!==", "<", "<=", ">", ">=", "+", "-", "*", "/", "%")
UNARY_OPS = ("!", "-", "typeof")


def children(e):
    """Immediate subexpressions, left to right."""
    if isinstance(e, (Const, Var)):
        return ()
    if isinstance(e, Op):
        return (e.left,) if e.right is None else (e.left, e.right)
    if isinstance(e, (Abs, SbxAbs)):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, New):
        return (e.proto,)
    if isinstance(e, Get):
        return (e.obj, e.key)
    if isinstance(e, Put):
        return (e.obj, e.key, e.value)
    if isinstance(e, Fresh):
        return (e.body,)
    if isinstance(e, Let):
        return (e.value, e.body)
    if isinstance(e, Seq):
        return (e.first, e.rest)
    if isinstance(e, Dot):
        return (e.obj,)
    if isinstance(e, DotPut):
        return (e.obj, e.value)
    raise TypeError(f"not an expression: {e!r}")


def walk(e):
    """Pre-order iteration over ``e`` and all its subexpressions."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def is_core(e) -> bool:
    return all(isinstance(n, CORE_NODES) for n in walk(e))

"""Seeded random programs for the property suites.

Generation is type-directed so that most programs run without a type error:
arithmetic only sees numbers, property access only sees objects, and
application only sees functions or sandboxes.  A property read has the
catch-all type ``ANY`` and may only flow where any value is acceptable
(comparisons with ``===``, ``typeof``, property values, arguments).

Variables are chosen from the names actually in scope, and a sandbox body
starts from a scope holding only its binder.  Inside a sandbox, a name that
is not in scope is occasionally emitted on purpose: it resolves through the
sandbox global.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Tuple

from decent.syntax import pretty_print
from decent.syntax.nodes import (
    UNDEFINED, Abs, App, Const, Dot, DotPut, Fresh, Let, New, Op, SbxAbs, Seq, Var,
)

NUM, STR, BOOL, OBJ, FUN, SBX, ANY = "num", "str", "bool", "obj", "fun", "sbx", "any"
VALUE_TYPES = (NUM, STR, BOOL, OBJ, FUN, SBX)

KEYS = ("x", "y", "z", "a", "f")
GLOBAL_NAMES = ("a", "b", "x", "y")
MAX_DEPTH = 7


@dataclass
class Scope:
    vars: List[Tuple[str, str]] = field(default_factory=list)
    binder: str = None
    secure: bool = False

    def bind(self, name, ty):
        return Scope(self.vars + [(name, ty)], self.binder, self.secure)

    def of_type(self, ty):
        return [n for n, t in self.vars if ty == ANY or t == ty]


class Generator:
    def __init__(self, seed, size):
        if size < 1:
            raise ValueError("size must be at least 1")
        self.rng = random.Random(seed)
        self.fuel = size
        self._names = 0

    def name(self, prefix="v"):
        self._names += 1
        return f"{prefix}{self._names}"

    def chance(self, p):
        return self.rng.random() < p

    # -- leaves ------------------------------------------------------------

    def literal(self, ty):
        r = self.rng
        if ty == ANY:
            ty = r.choice((NUM, STR, BOOL, NUM, "null", "undefined"))
        if ty == NUM:
            return Const(float(r.randint(0, 9)))
        if ty == STR:
            return Const(r.choice(("a", "b", "ok", "")))
        if ty == BOOL:
            return Const(r.random() < 0.5)
        if ty == "null":
            return Const(None)
        return Const(UNDEFINED)

    def leaf(self, ty, scope):
        names = scope.of_type(ty)
        if names and self.chance(0.6):
            return Var(self.rng.choice(names))
        if ty in (NUM, STR, BOOL, ANY):
            if ty == ANY and scope.binder and self.chance(0.15):
                return self.global_name(scope)
            return self.literal(ty)
        if ty == OBJ:
            return New(Const(None))
        if ty == FUN:
            p = self.name()
            return Abs(None, p, Var(p))
        return Fresh(SbxAbs("h", Const(UNDEFINED)))

    def global_name(self, scope):
        free = [n for n in GLOBAL_NAMES if n not in dict(scope.vars)]
        return Var(self.rng.choice(free)) if free else self.literal(NUM)

    # -- compound forms ----------------------------------------------------

    def expr(self, ty, scope, depth=0):
        if self.fuel <= 0 or depth >= MAX_DEPTH:
            return self.leaf(ty, scope)
        self.fuel -= 1
        if ty == ANY and self.chance(0.25):
            ty = self.rng.choice(VALUE_TYPES)
        build = getattr(self, "_" + ty)
        return build(scope, depth + 1)

    def _num(self, s, d):
        pick = self.rng.randrange(6)
        if pick <= 2:
            return Op(self.rng.choice("+-*"), self.expr(NUM, s, d), self.expr(NUM, s, d))
        if pick == 3:
            return self.let(NUM, s, d)
        if pick == 4:
            return Seq(self.expr(ANY, s, d), self.expr(NUM, s, d))
        return self.leaf(NUM, s)

    def _str(self, s, d):
        pick = self.rng.randrange(4)
        if pick == 0:
            return Op("+", self.expr(STR, s, d), self.expr(STR, s, d))
        if pick == 1:
            return Op("typeof", self.expr(ANY, s, d))
        if pick == 2:
            return self.let(STR, s, d)
        return self.leaf(STR, s)

    def _bool(self, s, d):
        pick = self.rng.randrange(5)
        if pick == 0:
            return Op(self.rng.choice(("<", "<=", ">")), self.expr(NUM, s, d), self.expr(NUM, s, d))
        if pick == 1:
            return Op(self.rng.choice(("===", "!==")), self.expr(ANY, s, d), self.expr(ANY, s, d))
        if pick == 2:
            return Op("!", self.expr(ANY, s, d))
        if pick == 3:
            return Op(self.rng.choice(("&&", "||")), self.expr(BOOL, s, d), self.expr(BOOL, s, d))
        return self.leaf(BOOL, s)

    def _obj(self, s, d):
        pick = self.rng.randrange(5)
        if pick == 0:
            return New(self.expr(OBJ, s, d) if self.chance(0.5) else Const(None))
        if pick == 1:
            # build, write a property, then yield the object
            name = self.name("o")
            inner = s.bind(name, OBJ)
            write = DotPut(Var(name), self.rng.choice(KEYS), self.expr(ANY, inner, d))
            return Let(name, self.expr(OBJ, s, d), Seq(write, Var(name)))
        if pick == 2:
            return self.let(OBJ, s, d)
        if pick == 3 and s.binder:
            return Var(s.binder)
        return self.leaf(OBJ, s)

    def _fun(self, s, d):
        if self.chance(0.7):
            p = self.name()
            return Abs(None, p, self.expr(ANY, s.bind(p, ANY), d))
        return self.leaf(FUN, s)

    def _sbx(self, s, d):
        binder = self.name("g")
        if s.secure and self.chance(0.3):
            # a nested abstraction keeps the enclosing secure scope
            return SbxAbs(binder, self.expr(ANY, s.bind(binder, OBJ), d))
        inner = Scope([(binder, OBJ)], binder, True)
        return Fresh(SbxAbs(binder, self.expr(ANY, inner, d)))

    def _any(self, s, d):
        pick = self.rng.randrange(7)
        if pick == 0:
            return Dot(self.expr(OBJ, s, d), self.rng.choice(KEYS))
        if pick == 1:
            return DotPut(self.expr(OBJ, s, d), self.rng.choice(KEYS), self.expr(ANY, s, d))
        if pick == 2:
            return App(self.expr(FUN, s, d), self.expr(ANY, s, d))
        if pick == 3:
            return App(self.expr(SBX, s, d), self.expr(OBJ, s, d))
        if pick == 4:
            return self.let(ANY, s, d)
        if pick == 5:
            return Seq(self.expr(ANY, s, d), self.expr(ANY, s, d))
        return self.leaf(ANY, s)

    def let(self, ty, s, d):
        bound_ty = self.rng.choice(VALUE_TYPES)
        name = self.name()
        value = self.expr(bound_ty, s, d)
        return Let(name, value, self.expr(ty, s.bind(name, bound_ty), d))

    # -- whole programs ----------------------------------------------------

    def program(self):
        if self.fuel <= 1:
            return self.literal(self.rng.choice((NUM, STR, BOOL)))
        scope = Scope()
        bindings = []
        for _ in range(1 + self.fuel // 10):
            ty = self.rng.choice((OBJ, OBJ, FUN, SBX, NUM))
            name = self.name()
            bindings.append((name, self.expr(ty, scope)))
            scope = scope.bind(name, ty)
        e = self.expr(ANY, scope)
        for name, value in reversed(bindings):
            e = Let(name, value, e)
        return e

    def setup(self):
        """A chain of bindings that builds an outside object graph."""
        scope = Scope()
        steps = []
        objects = []
        for _ in range(2 + self.fuel // 8):
            pick = self.rng.randrange(6)
            if pick <= 1 or not objects:
                name = self.name("o")
                proto = Var(self.rng.choice(objects)) if objects and self.chance(0.4) else Const(None)
                steps.append(("let", name, New(proto)))
                scope = scope.bind(name, OBJ)
                objects.append(name)
            elif pick == 2:
                name = self.name("f")
                p = self.name()
                steps.append(("let", name, Abs(None, p, self.expr(ANY, scope.bind(p, ANY)))))
                scope = scope.bind(name, FUN)
            elif pick == 3:
                obj, other = self.rng.choice(objects), self.rng.choice(objects)
                steps.append(("do", None, DotPut(Var(obj), self.rng.choice(KEYS), Var(other))))
            else:
                obj = self.rng.choice(objects)
                steps.append(("do", None, DotPut(Var(obj), self.rng.choice(KEYS), self.expr(ANY, scope))))
        functions = scope.of_type(FUN)
        for f in functions:
            steps.append(("do", None, DotPut(Var(self.rng.choice(objects)), "f", Var(f))))
        e = Const(UNDEFINED)
        for kind, name, value in reversed(steps):
            e = Let(name, value, e) if kind == "let" else Seq(value, e)
        return e, scope, objects

    def body(self, binder="g"):
        return self.expr(ANY, Scope([(binder, OBJ)], binder, True))


def gen_program(seed, size):
    """A closed program; the same seed and size always give the same text."""
    return pretty_print(Generator(seed, size).program())


def gen_triple(seed, size, binder="g"):
    """``(setup, body, arg)`` texts for one noninterference trial."""
    g = Generator(seed, size)
    setup, scope, objects = g.setup()
    g.fuel = size
    body = g.body(binder)
    if g.chance(0.8):
        arg = Var(g.rng.choice(objects))
    else:
        arg = New(Var(g.rng.choice(objects)))
    return pretty_print(setup), pretty_print(body), pretty_print(arg)

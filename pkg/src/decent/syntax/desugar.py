from __future__ import annotations

from decent.errors import DesugarError, UnboundVariable
from decent.syntax.nodes import (
    Abs, App, Const, Dot, DotPut, Fresh, Get, Let, New, Op, Put, SbxAbs, Seq, Var, children,
)


def desugar(e, sandbox_global=None, bound=()):
    """Rewrite a parsed expression into core form.

    * ``let x = a; b``  becomes  ``(fun x => b)(a)``
    * ``a; b``          becomes  ``(fun _ => b)(a)`` for a name not free in ``b``
    * ``e.name``        becomes  ``e["name"]`` (and likewise for writes)
    * inside a sandbox body with binder ``g``, a free identifier ``y``
      becomes ``g["y"]``.

    ``sandbox_global`` names the binder when the whole expression is itself
    sandbox code (script loading); ``bound`` lists names supplied by the
    surrounding environment.  A free identifier outside any sandbox raises
    :class:`UnboundVariable`.
    """
    scope = frozenset(bound)
    if sandbox_global is not None:
        scope |= {sandbox_global}
    return _Desugarer().run(e, scope, sandbox_global)


class _Desugarer:
    def run(self, e, scope, binder, shadowed=False):
        # binder: innermost sandbox binder or None; shadowed: an inner
        # function parameter hides that binder
        rec = self.run
        if isinstance(e, Const):
            return e
        if isinstance(e, Var):
            if e.name in scope:
                return e
            if binder is None:
                raise UnboundVariable(e.name, e.pos)
            if shadowed:
                raise DesugarError(
                    f"free identifier {e.name!r} cannot reach the sandbox global: "
                    f"{binder!r} is shadowed here"
                )
            return Get(Var(binder, pos=e.pos), Const(e.name), pos=e.pos)
        if isinstance(e, Op):
            right = None if e.right is None else rec(e.right, scope, binder, shadowed)
            return Op(e.op, rec(e.left, scope, binder, shadowed), right, pos=e.pos)
        if isinstance(e, Abs):
            names = {e.param} | ({e.self_name} if e.self_name else set())
            hides = shadowed or (binder is not None and binder in names)
            return Abs(e.self_name, e.param, rec(e.body, scope | names, binder, hides), pos=e.pos)
        if isinstance(e, App):
            return App(rec(e.fn, scope, binder, shadowed), rec(e.arg, scope, binder, shadowed), pos=e.pos)
        if isinstance(e, New):
            return New(rec(e.proto, scope, binder, shadowed), pos=e.pos)
        if isinstance(e, Get):
            return Get(rec(e.obj, scope, binder, shadowed), rec(e.key, scope, binder, shadowed), pos=e.pos)
        if isinstance(e, Put):
            return Put(
                rec(e.obj, scope, binder, shadowed),
                rec(e.key, scope, binder, shadowed),
                rec(e.value, scope, binder, shadowed),
                pos=e.pos,
            )
        if isinstance(e, SbxAbs):
            # nested sandbox abstraction: captures the enclosing secure scope
            return SbxAbs(e.param, rec(e.body, scope | {e.param}, e.param), pos=e.pos)
        if isinstance(e, Fresh):
            if isinstance(e.body, SbxAbs):
                sbx = e.body
                body = rec(sbx.body, frozenset({sbx.param}), sbx.param)
                return Fresh(SbxAbs(sbx.param, body, pos=sbx.pos), pos=e.pos)
            return Fresh(rec(e.body, scope, binder, shadowed), pos=e.pos)
        if isinstance(e, Let):
            value = rec(e.value, scope, binder, shadowed)
            hides = shadowed or e.name == binder
            body = rec(e.body, scope | {e.name}, binder, hides)
            return App(Abs(None, e.name, body, pos=e.pos), value, pos=e.pos)
        if isinstance(e, Seq):
            taken = free_variables(e.rest) | ({binder} if binder else set())
            return self.run(Let(_unused_name(taken), e.first, e.rest, pos=e.pos), scope, binder, shadowed)
        if isinstance(e, Dot):
            return Get(rec(e.obj, scope, binder, shadowed), Const(e.name), pos=e.pos)
        if isinstance(e, DotPut):
            return Put(
                rec(e.obj, scope, binder, shadowed),
                Const(e.name),
                rec(e.value, scope, binder, shadowed),
                pos=e.pos,
            )
        raise TypeError(f"not an expression: {e!r}")


def _unused_name(taken):
    name, i = "_", 0
    while name in taken:
        name, i = f"_{i}", i + 1
    return name


def free_variables(e, bound=frozenset()):
    """Free variables of a core or sugared expression (no sandbox rewriting)."""
    out = set()
    stack = [(e, frozenset(bound))]
    while stack:
        node, scope = stack.pop()
        if isinstance(node, Var):
            if node.name not in scope:
                out.add(node.name)
        elif isinstance(node, Abs):
            names = {node.param} | ({node.self_name} if node.self_name else set())
            stack.append((node.body, scope | names))
        elif isinstance(node, SbxAbs):
            stack.append((node.body, scope | {node.param}))
        elif isinstance(node, Let):
            stack.append((node.value, scope))
            stack.append((node.body, scope | {node.name}))
        else:
            stack.extend((c, scope) for c in children(node))
    return out

"""Human-readable rendering of values for the REPL and script runner."""

from __future__ import annotations

from decent.heap import Loc, OutwardProxy, Plain, SandboxClosure, SandboxProxy
from decent.syntax.printer import format_constant, format_number

DEFAULT_DEPTH = 3


def _head(store, loc):
    obj = store[loc]
    if isinstance(obj, Plain):
        return f"fun#{loc.index}" if obj.closure is not None else f"obj#{loc.index}"
    if isinstance(obj, SandboxProxy):
        return f"proxy#{loc.index} → {_head(store, obj.target)}"
    if isinstance(obj, OutwardProxy):
        return f"outward#{loc.index} → {_head(store, obj.inner)}"
    return f"?#{loc.index}"


def render_value(store, v, depth=DEFAULT_DEPTH, top=True) -> str:
    """Render ``v``; objects show their own properties ``depth`` levels deep.

    At the top level strings print without quotes, which keeps string-building
    programs readable.
    """
    if isinstance(v, SandboxClosure):
        return f"<sandbox {v.sbx.param}>"
    if not isinstance(v, Loc):
        if top and isinstance(v, str):
            return v
        if type(v) is float:
            return format_number(v)
        return format_constant(v)
    obj = store[v]
    head = _head(store, v)
    if not isinstance(obj, Plain) or obj.closure is not None:
        return f"<{head}>"
    if depth <= 0:
        return f"<{head} ...>"
    if not obj.props:
        return f"<{head} {{}}>"
    body = ", ".join(
        f"{k}: {render_value(store, val, depth - 1, top=False)}" for k, val in obj.props.items()
    )
    return f"<{head} {{{body}}}>"

"""Pretty-big-step evaluator for core expressions, including the membrane.

Every rule application is counted against a step budget and can be recorded
in :attr:`Interpreter.trace`.  The standard rules carry their usual names
(``Op-E``, ``Get-Proto``, ...); the sandbox, wrap, recompile and proxy rules
use ``Sandbox-*``, ``Wrap-*``, ``Recompile-*`` and ``App-Sandbox`` /
``Get-Shadow`` / ``Get-Sandbox`` / ``Put-Sandbox``.  Outward proxies, which
only appear after a commit, add ``Get-Outward``, ``Put-Outward``,
``App-Outward`` and the ``Export-*`` family.

Evaluation is written as generators driven by an explicit stack
(:meth:`Interpreter._drive`), so deep object-language recursion never hits
Python's recursion limit.  Property reads, writes and wrapping execute no
object-language code and are ordinary functions.
"""

from __future__ import annotations


from decent.effects import CALL, GET, HAS, OLD_ABSENT, OLD_FROM_SHADOW, OLD_FROM_TARGET, SET, EffectRecord
from decent.errors import EvalError, EvalTypeError, StepBudgetExceeded, UnboundVariable
from decent.heap import (
    Closure, Environment, Loc, OutwardProxy, Plain, SandboxClosure, SandboxProxy, Store, property_key,
)
from decent.primops import apply_primop, type_name
from decent.syntax.nodes import UNDEFINED, Abs, App, Const, Fresh, Get, New, Op, Put, SbxAbs, Var

DEFAULT_BUDGET = 1_000_000

_MISSING = object()


class Interpreter:
    """One store plus everything needed to evaluate against it.

    ``membrane=False`` turns wrapping into the identity (a debugging switch
    used as the negative control of the noninterference suite).
    ``log_effects=False`` stops effect recording, for benchmarking.
    """

    def __init__(self, budget=DEFAULT_BUDGET, membrane=True, log_effects=True, audit=False):
        self.store = Store()
        self.budget = budget
        self.membrane = membrane
        self.log_effects = log_effects
        self.audit = audit
        self.trace = None
        self.steps = 0
        self._limit = budget
        self.clock = 0
        self.logs = {}
        self.global_proxies = set()
        self._sandbox_stack = []
        self._anonymous = 0
        self._handles = 0
        self._dispatch = {
            Const: self._const, Var: self._var, Op: self._op, Abs: self._abs, App: self._app,
            New: self._new, Get: self._get, Put: self._put, SbxAbs: self._sbx_abs, Fresh: self._fresh,
        }

    # -- entry points ------------------------------------------------------

    def run(self, expr, env=None, budget=None):
        """Evaluate a core expression; returns its value (the store is updated in place)."""
        self._start(budget)
        return self._drive(self._eval(env if env is not None else Environment(), expr))

    def apply(self, fn, arg, budget=None):
        self._start(budget)
        return self._drive(self._apply(fn, arg))

    def run_in_sandbox(self, sid, expr, env, budget=None):
        """Evaluate ``expr`` under a sandbox environment on behalf of sandbox ``sid``."""
        self._start(budget)
        return self._drive(self._inside(sid, self._eval(env, expr)))

    def apply_in_sandbox(self, sid, fn, arg, budget=None):
        self._start(budget)
        return self._drive(self._inside(sid, self._apply(fn, arg)))

    def _start(self, budget):
        self.steps = 0
        self._limit = self.budget if budget is None else budget

    def new_handle_id(self):
        self._handles += 1
        return self._handles

    def new_anonymous_id(self):
        self._anonymous -= 1
        return self._anonymous

    def _drive(self, gen):
        stack = [gen]
        send = None
        exc = None
        while True:
            top = stack[-1]
            try:
                if exc is None:
                    sub = top.send(send)
                else:
                    err, exc = exc, None
                    sub = top.throw(err)
            except StopIteration as stop:
                stack.pop()
                if not stack:
                    return stop.value
                send = stop.value
                continue
            except Exception as err:  # propagate into the waiting parent rule
                stack.pop()
                if not stack:
                    raise
                exc = err
                continue
            stack.append(sub)
            send = None

    def _tick(self, rule):
        self.steps += 1
        if self.steps > self._limit:
            raise StepBudgetExceeded(self._limit)
        if self.trace is not None:
            self.trace.append(rule)

    def _alloc(self, obj):
        stack = self._sandbox_stack
        return self.store.alloc(obj, stack[-1] if stack else None)

    def _inside(self, sid, gen):
        self._sandbox_stack.append(sid)
        try:
            return (yield gen)
        finally:
            self._sandbox_stack.pop()

    def current_sandbox(self):
        return self._sandbox_stack[-1] if self._sandbox_stack else None

    # -- effects -----------------------------------------------------------

    def _emit(self, sid, kind, target, prop=None, **fields):
        if not self.log_effects:
            return
        self.clock += 1
        rec = EffectRecord(self.clock, sid, kind, target, prop, **fields)
        self.logs.setdefault(sid, []).append(rec)

    def log_of(self, sid):
        return self.logs.setdefault(sid, [])

    # -- expressions -------------------------------------------------------

    def _eval(self, env, e):
        return self._dispatch[type(e)](env, e)

    def _quick(self, env, e):
        # constants and variables need no generator frame
        t = type(e)
        if t is Const:
            self._tick("Const")
            return e.value
        if t is Var:
            return self._lookup(env, e)
        return _MISSING

    def _const(self, env, e):
        self._tick("Const")
        return e.value
        yield  # pragma: no cover

    def _var(self, env, e):
        return self._lookup(env, e)
        yield  # pragma: no cover

    def _lookup(self, env, e):
        self._tick("Var")
        v = env.get(e.name, _MISSING)
        if v is _MISSING:
            v = self._global_lookup(env, e.name, e.pos)
        return v

    def _global_lookup(self, env, name, pos):
        # a recompiled closure lost its outer bindings; inside a sandbox
        # with a global object the name resolves through that object
        if not env.has_global():
            raise UnboundVariable(name, pos)
        g = env.global_value
        value = self.get_value(g, name, pos)
        if value is UNDEFINED and self._peek_chain(g, name) is _MISSING:
            raise UnboundVariable(name, pos)
        return value

    def _op(self, env, e):
        self._tick("Op-E")
        u = self._quick(env, e.left)
        if u is _MISSING:
            u = yield self._eval(env, e.left)
        if e.right is None:
            self._tick("Op")
            if e.op == "typeof" and isinstance(u, Loc):
                return "function" if self.is_callable(u) else "object"
            return self._primop(e, u)
        self._tick("Op-F")
        v = self._quick(env, e.right)
        if v is _MISSING:
            v = yield self._eval(env, e.right)
        self._tick("Op")
        return self._primop(e, u, v)

    def _primop(self, e, *args):
        try:
            return apply_primop(e.op, *args)
        except EvalError as err:
            if err.position is None:
                err.position = e.pos
            raise

    def _abs(self, env, e):
        self._tick("Abs")
        return self._alloc(Plain({}, Closure(env, e.self_name, e.param, e.body), None))
        yield  # pragma: no cover

    def _app(self, env, e):
        self._tick("App-E")
        fn = self._quick(env, e.fn)
        if fn is _MISSING:
            fn = yield self._eval(env, e.fn)
        self._tick("App-F")
        arg = self._quick(env, e.arg)
        if arg is _MISSING:
            arg = yield self._eval(env, e.arg)
        return (yield self._apply(fn, arg, e.pos))

    def _new(self, env, e):
        self._tick("New-E")
        proto = self._quick(env, e.proto)
        if proto is _MISSING:
            proto = yield self._eval(env, e.proto)
        self._tick("New")
        return self._alloc(Plain({}, None, proto))

    def _get(self, env, e):
        self._tick("Get-E")
        obj = self._quick(env, e.obj)
        if obj is _MISSING:
            obj = yield self._eval(env, e.obj)
        self._tick("Get-F")
        key = self._quick(env, e.key)
        if key is _MISSING:
            key = yield self._eval(env, e.key)
        return self.get_value(obj, self._key(key, e.pos), e.pos)

    def _put(self, env, e):
        self._tick("Put-E")
        obj = self._quick(env, e.obj)
        if obj is _MISSING:
            obj = yield self._eval(env, e.obj)
        self._tick("Put-F")
        key = self._quick(env, e.key)
        if key is _MISSING:
            key = yield self._eval(env, e.key)
        key = self._key(key, e.pos)
        self._tick("Put-G")
        value = self._quick(env, e.value)
        if value is _MISSING:
            value = yield self._eval(env, e.value)
        return self.put_value(obj, key, value, e.pos)

    def _key(self, key, pos):
        if isinstance(key, (Loc, SandboxClosure)):
            raise EvalTypeError("property key must be a constant", pos)
        return property_key(key)

    def _sbx_abs(self, env, e):
        if not env.secure:
            raise EvalTypeError("a sandbox abstraction needs a secure environment (use fresh)", e.pos)
        self._tick("Sandbox-Abstraction")
        return SandboxClosure(env, e)
        yield  # pragma: no cover

    def _fresh(self, env, e):
        self._tick("Sandbox-Fresh-E")
        if not isinstance(e.body, SbxAbs):
            raise EvalTypeError("fresh expects a sandbox abstraction", e.pos)
        self._tick("Sandbox-Fresh")
        return (yield self._sbx_abs(Environment(secure=True), e.body))

    # -- application -------------------------------------------------------

    def _apply(self, fn, arg, pos=None):
        if isinstance(fn, SandboxClosure):
            return (yield self._apply_sandbox(fn, arg))
        if not isinstance(fn, Loc):
            raise EvalTypeError(f"cannot apply a {type_name(fn)}", pos)
        obj = self.store[fn]
        if type(obj) is Plain:
            return (yield self._apply_closure(fn, obj, arg, pos))
        if type(obj) is SandboxProxy:
            return (yield self._proxy_app(fn, obj, arg, pos))
        return (yield self._outward_app(obj, arg, pos))

    def _apply_closure(self, loc, obj, arg, pos=None):
        c = obj.closure
        if c is None:
            raise EvalTypeError("cannot apply a non-function object", pos)
        self._tick("App")
        env = c.env
        if c.self_name:
            env = env.extend(c.self_name, loc)
        return (yield self._eval(env.extend(c.param, arg), c.body))

    def _apply_sandbox(self, sc, arg):
        self._tick("Sandbox-Application")
        sid = self.new_anonymous_id()
        warg = self.wrap(sc.env, sid, arg)
        env = sc.env.extend(sc.sbx.param, warg)
        env = Environment(dict(env.items()), secure=True, global_value=warg)
        self._sandbox_stack.append(sid)
        try:
            result = yield self._eval(env, sc.sbx.body)
        finally:
            self._sandbox_stack.pop()
        if self.audit:
            self.audit_membrane(sid, [env, result])
        return result

    # -- property access ---------------------------------------------------

    def get_value(self, obj, key, pos=None):
        """Rules Get / Get-Proto / Get-Undef, dispatching to proxies as needed."""
        store = self.store
        while True:
            if not isinstance(obj, Loc):
                raise EvalTypeError(f"cannot read property {key!r} of a {type_name(obj)}", pos)
            o = store[obj]
            if type(o) is Plain:
                props = o.props
                if key in props:
                    self._tick("Get")
                    return props[key]
                if isinstance(o.proto, Loc):
                    self._tick("Get-Proto")
                    obj = o.proto
                    continue
                self._tick("Get-Undef")
                return UNDEFINED
            if type(o) is SandboxProxy:
                return self._proxy_get(obj, o, key)
            return self._outward_get(o, key)

    def put_value(self, obj, key, value, pos=None):
        if not isinstance(obj, Loc):
            raise EvalTypeError(f"cannot write property {key!r} of a {type_name(obj)}", pos)
        o = self.store[obj]
        if type(o) is Plain:
            self._tick("Put")
            o.props[key] = value
            return value
        if type(o) is SandboxProxy:
            return self._proxy_put(obj, o, key, value)
        return self._outward_put(o, key, value)

    def _peek_chain(self, obj, key):
        """What a read of ``key`` would find, without logging, wrapping or counting."""
        store = self.store
        while isinstance(obj, Loc):
            o = store[obj]
            if type(o) is Plain:
                if key in o.props:
                    return o.props[key]
                obj = o.proto
            elif type(o) is SandboxProxy:
                shadow = store[o.shadow]
                if key in shadow.props:
                    return shadow.props[key]
                obj = o.target
            else:
                obj = o.inner
        return _MISSING

    def peek(self, obj, key):
        v = self._peek_chain(obj, key)
        return UNDEFINED if v is _MISSING else v

    def has_property(self, obj, key):
        return self._peek_chain(obj, key) is not _MISSING

    def is_callable(self, v):
        if isinstance(v, SandboxClosure):
            return True
        store = self.store
        while isinstance(v, Loc):
            o = store[v]
            if type(o) is Plain:
                return o.closure is not None
            if type(o) is SandboxProxy:
                return store[o.shadow].closure is not None
            v = o.inner
        return False

    # -- membrane: inward --------------------------------------------------

    def wrap(self, env, sid, v):
        """Import ``v`` into sandbox ``sid``; objects get their unique proxy."""
        if isinstance(v, SandboxClosure):
            self._tick("Wrap-Sandbox")
            return v
        if not isinstance(v, Loc):
            self._tick("Wrap-Const")
            return v
        if not self.membrane:
            return v
        store = self.store
        obj = store[v]
        if type(obj) is SandboxProxy and obj.sandbox_id == sid:
            self._tick("Wrap-ProxyObject")
            return v
        table = store.proxy_table(sid)
        existing = table.get(v)
        if existing is not None:
            self._tick("Wrap-Existing")
            return existing
        if type(obj) is OutwardProxy and obj.sandbox_id == sid:
            self._tick("Wrap-Outward")
            return obj.inner
        if store.owner.get(v) == sid:
            self._tick("Wrap-Internal")
            return v
        self._tick("Wrap-NonProxyObject")
        shadow = self.recompile(env, sid, v)
        proxy = store.alloc(SandboxProxy(v, shadow, env, sid), sid)
        table[v] = proxy
        return proxy

    def recompile(self, env, sid, loc):
        """Build the shadow of ``loc``: empty, keeping only a re-closed function body."""
        store = self.store
        obj = store[loc]
        if type(obj) is SandboxProxy:
            self._tick("Recompile-ProxyObject")
            return self.recompile(env, sid, obj.target)
        if type(obj) is OutwardProxy:
            self._tick("Recompile-ProxyObject")
            return self.recompile(env, sid, obj.inner)
        if obj.closure is None:
            self._tick("Recompile-NonFunctionObject")
            return store.alloc(Plain({}, None, None), sid)
        cached = store.recompiled.get((loc, sid))
        if cached is not None:
            self._tick("Recompile-Existing")
            return cached
        self._tick("Recompile-FunctionObject")
        c = obj.closure
        # the self-name is an outside binding too: recursive references
        # resolve through the sandbox global like any other free name
        shadow = store.alloc(Plain({}, Closure(env, None, c.param, c.body), None), sid)
        store.recompiled[(loc, sid)] = shadow
        return shadow

    def _proxy_get(self, loc, p, key):
        sid = p.sandbox_id
        if loc in self.global_proxies:
            self._emit(sid, HAS, p.target, key)
        shadow = self.store[p.shadow]
        if key in shadow.props:
            self._tick("Get-Shadow")
            self._tick("Get")
            return shadow.props[key]
        self._tick("Get-Sandbox")
        raw = self.get_value(p.target, key)
        self._emit(sid, GET, p.target, key, observed=raw)
        return self.wrap(p.env, sid, raw)

    def _proxy_put(self, loc, p, key, value):
        self._tick("Put-Sandbox")
        shadow = self.store[p.shadow]
        if key in shadow.props:
            old, source = shadow.props[key], OLD_FROM_SHADOW
        else:
            old = self._peek_chain(p.target, key)
            source = OLD_FROM_TARGET
            if old is _MISSING:
                old, source = UNDEFINED, OLD_ABSENT
        self._emit(p.sandbox_id, SET, p.target, key, old_value=old, new_value=value, old_source=source)
        self._tick("Put")
        shadow.props[key] = value
        return value

    def _proxy_app(self, loc, p, arg, pos=None):
        self._tick("App-Sandbox")
        shadow = self.store[p.shadow]
        if shadow.closure is None:
            raise EvalTypeError("cannot apply a non-function object", pos)
        sid = p.sandbox_id
        warg = self.wrap(p.env, sid, arg)
        self._emit(sid, CALL, p.target)
        self._sandbox_stack.append(sid)
        try:
            return (yield self._apply_closure(p.shadow, shadow, warg, pos))
        finally:
            self._sandbox_stack.pop()

    # -- membrane: outward -------------------------------------------------

    def export(self, env, sid, v):
        """Make a sandbox-side value usable outside after a commit.

        Proxies of this sandbox give back their target; objects the sandbox
        allocated get their unique outward proxy; anything else is returned
        as is.
        """
        if not isinstance(v, Loc) or not self.membrane:
            self._tick("Export-Const")
            return v
        store = self.store
        obj = store[v]
        if type(obj) is SandboxProxy and obj.sandbox_id == sid:
            self._tick("Export-Proxy")
            return obj.target
        existing = store.outward.get((v, sid))
        if existing is not None:
            self._tick("Export-Existing")
            return existing
        if store.owner.get(v) == sid:
            self._tick("Export-Object")
            out = store.alloc(OutwardProxy(v, env, sid))
            store.outward[(v, sid)] = out
            return out
        self._tick("Export-Outside")
        return v

    def _outward_get(self, o, key):
        self._tick("Get-Outward")
        raw = self.get_value(o.inner, key)
        return self.export(o.env, o.sandbox_id, raw)

    def _outward_put(self, o, key, value):
        self._tick("Put-Outward")
        self.put_value(o.inner, key, self.wrap(o.env, o.sandbox_id, value))
        return value

    def _outward_app(self, o, arg, pos=None):
        self._tick("App-Outward")
        sid = o.sandbox_id
        warg = self.wrap(o.env, sid, arg)
        self._sandbox_stack.append(sid)
        try:
            result = yield self._apply(o.inner, warg, pos)
        finally:
            self._sandbox_stack.pop()
        return self.export(o.env, sid, result)

    # -- debugging ---------------------------------------------------------

    def audit_membrane(self, sid, roots):
        """Check that nothing reachable inside sandbox ``sid`` escapes the membrane.

        Walks from ``roots`` without entering proxy targets; every location met
        must be a proxy of an active sandbox or an object one of them allocated.
        """
        active = set(self._sandbox_stack) | {sid}
        seen, envs = set(), set()
        work = list(roots)
        store = self.store
        while work:
            v = work.pop()
            if isinstance(v, Environment) or isinstance(v, SandboxClosure):
                env = v if isinstance(v, Environment) else v.env
                if id(env) not in envs:
                    envs.add(id(env))
                    work.extend(env.values())
                continue
            if not isinstance(v, Loc) or v in seen:
                continue
            seen.add(v)
            obj = store[v]
            if type(obj) is SandboxProxy and obj.sandbox_id in active:
                work.append(obj.shadow)
                work.append(obj.env)
                continue
            if store.owner.get(v) not in active:
                raise EvalError(f"membrane audit: {v!r} is reachable inside sandbox {sid} unwrapped")
            if type(obj) is Plain:
                work.extend(obj.props.values())
                work.append(obj.proto)
                if obj.closure is not None:
                    work.append(obj.closure.env)

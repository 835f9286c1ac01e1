"""Values, environments, stored objects and the store itself.

A value is a Python constant (``float``, ``str``, ``bool``, ``None`` for null,
or :data:`UNDEFINED`), a :class:`Loc`, or a :class:`SandboxClosure`.

The store is append-only: slots are never removed or reindexed, although the
object held in a slot is mutated in place by property writes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from decent.errors import UnboundVariable
from decent.syntax.nodes import UNDEFINED, SbxAbs
from decent.syntax.printer import format_number

_MISSING = object()


@dataclass(frozen=True, order=True)
class Loc:
    index: int

    def __repr__(self):
        return f"l{self.index}"


class Environment:
    """Immutable variable bindings.

    ``secure`` marks a sandbox environment.  ``global_value`` (when set) is
    the sandbox global consulted for names missing from the bindings.
    """

    __slots__ = ("_bindings", "secure", "global_value")

    def __init__(self, bindings=None, secure=False, global_value=_MISSING):
        self._bindings = dict(bindings or {})
        self.secure = secure
        self.global_value = global_value

    def lookup(self, name):
        try:
            return self._bindings[name]
        except KeyError:
            raise UnboundVariable(name) from None

    def get(self, name, default=None):
        return self._bindings.get(name, default)

    def has_global(self):
        return self.global_value is not _MISSING

    def extend(self, name, value):
        new = Environment.__new__(Environment)
        new._bindings = {**self._bindings, name: value}
        new.secure = self.secure
        new.global_value = self.global_value
        return new

    def tie_global(self, name, value):
        """Bind ``name`` to ``value`` and make it the global, in place.

        Only for building a sandbox environment whose global proxy must
        itself refer to that environment.
        """
        self._bindings[name] = value
        self.global_value = value

    def with_global(self, value):
        return Environment(self._bindings, secure=True, global_value=value)

    def items(self):
        return self._bindings.items()

    def names(self):
        return list(self._bindings)

    def values(self):
        vals = list(self._bindings.values())
        if self.has_global():
            vals.append(self.global_value)
        return vals

    def map_values(self, fn):
        g = fn(self.global_value) if self.has_global() else _MISSING
        return Environment({k: fn(v) for k, v in self._bindings.items()}, self.secure, g)

    def __contains__(self, name):
        return name in self._bindings

    def __len__(self):
        return len(self._bindings)

    def __repr__(self):
        tag = "secure " if self.secure else ""
        return f"<{tag}env {sorted(self._bindings)}>"


@dataclass(eq=False)
class SandboxClosure:
    """A sandbox abstraction paired with the secure environment it closed over."""

    env: Environment
    sbx: SbxAbs

    def __repr__(self):
        return f"<sandbox {self.sbx.param}>"


@dataclass(frozen=True)
class Closure:
    env: Environment
    self_name: Optional[str]
    param: str
    body: object


@dataclass
class Plain:
    props: Dict[str, object] = field(default_factory=dict)
    closure: Optional[Closure] = None
    proto: object = None


@dataclass(frozen=True)
class SandboxProxy:
    target: Loc
    shadow: Loc
    env: Environment
    sandbox_id: int


@dataclass(frozen=True)
class OutwardProxy:
    inner: Loc
    env: Environment
    sandbox_id: int


def is_constant(v) -> bool:
    return v is None or v is UNDEFINED or type(v) in (float, str, bool)


def property_key(c) -> str:
    """Canonical dictionary key for a constant."""
    if type(c) is str:
        return c
    if c is True:
        return "true"
    if c is False:
        return "false"
    if c is None:
        return "null"
    if c is UNDEFINED:
        return "undefined"
    if type(c) is float:
        return format_number(c)
    raise TypeError(f"not a constant: {c!r}")


class Store:
    """Location-indexed heap plus the lookup tables the membrane needs.

    * ``proxies[sid][target]``      -> the unique proxy of ``target`` in sandbox ``sid``
    * ``recompiled[(loc, sid)]``    -> cached shadow of a function object
    * ``outward[(inner, sid)]``     -> the unique outward proxy of a sandbox object
    * ``owner[loc]``                -> sandbox id that allocated ``loc`` (absent outside)
    """

    def __init__(self):
        self.objects: List[object] = []
        self.proxies: Dict[int, Dict[Loc, Loc]] = {}
        self.recompiled: Dict[tuple, Loc] = {}
        self.outward: Dict[tuple, Loc] = {}
        self.owner: Dict[Loc, int] = {}

    def alloc(self, obj, owner=None) -> Loc:
        loc = Loc(len(self.objects))
        self.objects.append(obj)
        if owner is not None:
            self.owner[loc] = owner
        return loc

    def __getitem__(self, loc: Loc):
        return self.objects[loc.index]

    def __setitem__(self, loc: Loc, obj):
        self.objects[loc.index] = obj

    def __len__(self):
        return len(self.objects)

    def __contains__(self, loc):
        return isinstance(loc, Loc) and 0 <= loc.index < len(self.objects) and self.objects[loc.index] is not None

    def locations(self):
        return [Loc(i) for i in range(len(self.objects))]

    def proxy_of(self, target, sid):
        return self.proxies.get(sid, {}).get(target)

    def proxy_table(self, sid):
        return self.proxies.setdefault(sid, {})

    # -- copying -----------------------------------------------------------

    def copy(self) -> "Store":
        return self.renamed(None)

    def snapshot(self, locs) -> "Store":
        """Copy of only the slots in ``locs``; every other slot becomes ``None``."""
        out = Store()
        keep = {l.index for l in locs}
        out.objects = [_copy_object(o) if i in keep else None for i, o in enumerate(self.objects)]
        return out

    def renamed(self, perm) -> "Store":
        """Deep copy with every location ``l`` replaced by ``perm[l.index]``.

        ``perm`` must be a permutation of ``range(len(self))`` (or ``None`` for
        the identity).  Environments inside closures and proxies are renamed
        too, so the result is an isomorphic image of this store.
        """
        ren = Renamer(perm)
        out = Store()
        out.objects = [None] * len(self.objects)
        for i, obj in enumerate(self.objects):
            out.objects[ren.index(i)] = ren.object(obj)
        out.proxies = {
            sid: {ren.value(t): ren.value(p) for t, p in table.items()}
            for sid, table in self.proxies.items()
        }
        out.recompiled = {(ren.value(l), sid): ren.value(s) for (l, sid), s in self.recompiled.items()}
        out.outward = {(ren.value(l), sid): ren.value(p) for (l, sid), p in self.outward.items()}
        out.owner = {ren.value(l): sid for l, sid in self.owner.items()}
        return out


def _copy_object(obj):
    if isinstance(obj, Plain):
        return Plain(dict(obj.props), obj.closure, obj.proto)
    return obj


class Renamer:
    """Applies a location permutation to values, environments and objects.

    Environments are shared structure, so each one is renamed once and the
    result memoised by identity.
    """

    def __init__(self, perm):
        self.perm = perm
        self._envs = {}
        self._sbx = {}

    def index(self, i):
        return i if self.perm is None else self.perm[i]

    def value(self, v):
        if isinstance(v, Loc):
            return Loc(self.index(v.index))
        if isinstance(v, SandboxClosure):
            key = id(v)
            if key not in self._sbx:
                self._sbx[key] = (v, SandboxClosure(self.env(v.env), v.sbx))
            return self._sbx[key][1]
        return v

    def env(self, env):
        key = id(env)
        if key not in self._envs:
            self._envs[key] = (env, env.map_values(self.value))
        return self._envs[key][1]

    def object(self, obj):
        if obj is None:
            return None
        if isinstance(obj, Plain):
            closure = obj.closure
            if closure is not None:
                closure = Closure(self.env(closure.env), closure.self_name, closure.param, closure.body)
            return Plain({k: self.value(v) for k, v in obj.props.items()}, closure, self.value(obj.proto))
        if isinstance(obj, SandboxProxy):
            return SandboxProxy(self.value(obj.target), self.value(obj.shadow), self.env(obj.env), obj.sandbox_id)
        if isinstance(obj, OutwardProxy):
            return OutwardProxy(self.value(obj.inner), self.env(obj.env), obj.sandbox_id)
        raise TypeError(f"not a stored object: {obj!r}")


def successors(store: Store, loc: Loc):
    """Values directly referenced by the object at ``loc``."""
    obj = store[loc]
    if isinstance(obj, Plain):
        out = list(obj.props.values())
        out.append(obj.proto)
        if obj.closure is not None:
            out.extend(obj.closure.env.values())
        return out
    if isinstance(obj, SandboxProxy):
        return [obj.target, obj.shadow, *obj.env.values()]
    if isinstance(obj, OutwardProxy):
        return [obj.inner, *obj.env.values()]
    return []


def reachable_from(store: Store, roots) -> set:
    """Every location reachable from ``roots`` (a fixpoint over references)."""
    seen = set()
    seen_envs = set()
    work = list(roots)
    while work:
        v = work.pop()
        if isinstance(v, Loc):
            if v in seen:
                continue
            seen.add(v)
            work.extend(successors(store, v))
        elif isinstance(v, SandboxClosure):
            if id(v.env) not in seen_envs:
                seen_envs.add(id(v.env))
                work.extend(v.env.values())
        elif isinstance(v, Environment):
            if id(v) not in seen_envs:
                seen_envs.add(id(v))
                work.extend(v.values())
    return seen

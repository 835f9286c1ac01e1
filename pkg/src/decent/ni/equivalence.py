"""Observational equivalence of (store, value) pairs, read coinductively.

Two values are equivalent when they are equal constants, or locations whose
objects agree on every constituent: dictionaries key by key, prototypes,
closures (same abstraction, equivalent environments) and proxies
componentwise.  Cycles are handled by assuming a pair equivalent while its
constituents are being compared, which computes the greatest fixed point.

A failed comparison reports the path from the root to the first mismatch.
Path steps are property names or one of ``<proto>``, ``<env:x>``,
``<global>``, ``<target>``, ``<shadow>`` and ``<inner>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from decent.heap import Environment, Loc, OutwardProxy, Plain, SandboxClosure, SandboxProxy, is_constant
from decent.syntax.nodes import constant_key

PROTO = "<proto>"
GLOBAL = "<global>"
TARGET = "<target>"
SHADOW = "<shadow>"
INNER = "<inner>"


@dataclass(frozen=True)
class Mismatch:
    path: Tuple[str, ...]
    left: object
    right: object
    reason: str


@dataclass
class EquivContext:
    left: object
    right: object
    assumed: set = field(default_factory=set)

    def eq_value(self, v, w) -> bool:
        return self.mismatch(v, w) is None

    def mismatch(self, v, w, path=()) -> Optional[Mismatch]:
        """First difference between ``v`` (left store) and ``w`` (right store)."""
        work = [(v, w, tuple(path))]
        while work:
            a, b, p = work.pop()
            found = self._step(a, b, p, work)
            if found is not None:
                return found
        return None

    def eq_env(self, env_left: Environment, env_right: Environment = None) -> Optional[Mismatch]:
        env_right = env_left if env_right is None else env_right
        work = []
        found = self._envs(env_left, env_right, (), work)
        if found is not None:
            return found
        while work:
            a, b, p = work.pop()
            found = self._step(a, b, p, work)
            if found is not None:
                return found
        return None

    # -- internals ---------------------------------------------------------

    def _envs(self, el, er, path, work):
        if el is er and self.left is self.right:
            return None
        if set(el.names()) != set(er.names()):
            return Mismatch(path, sorted(el.names()), sorted(er.names()), "environments bind different names")
        if el.has_global() != er.has_global():
            return Mismatch(path + (GLOBAL,), None, None, "only one environment has a global")
        # pushed in reverse so names are examined in binding order
        pending = [(el.get(n), er.get(n), path + (f"<env:{n}>",)) for n in el.names()]
        if el.has_global():
            pending.append((el.global_value, er.global_value, path + (GLOBAL,)))
        work.extend(reversed(pending))
        return None

    def _step(self, a, b, path, work):
        if is_constant(a) or is_constant(b):
            if is_constant(a) and is_constant(b) and constant_key(a) == constant_key(b):
                return None
            return Mismatch(path, a, b, "different constants" if is_constant(a) and is_constant(b) else "kind differs")
        if isinstance(a, SandboxClosure) or isinstance(b, SandboxClosure):
            if not (isinstance(a, SandboxClosure) and isinstance(b, SandboxClosure)):
                return Mismatch(path, a, b, "kind differs")
            if a.sbx != b.sbx:
                return Mismatch(path, a, b, "different sandbox abstractions")
            return self._envs(a.env, b.env, path, work)
        if not (isinstance(a, Loc) and isinstance(b, Loc)):
            return Mismatch(path, a, b, "kind differs")
        if (a, b) in self.assumed:
            return None
        self.assumed.add((a, b))
        oa, ob = self.left[a], self.right[b]
        if oa is None or ob is None:
            return Mismatch(path, a, b, "location missing from store")
        if type(oa) is not type(ob):
            return Mismatch(path, a, b, "object kinds differ")
        if isinstance(oa, Plain):
            if set(oa.props) != set(ob.props):
                extra = sorted(set(oa.props) ^ set(ob.props))
                return Mismatch(path + (extra[0],), oa.props.get(extra[0], "<absent>"),
                                ob.props.get(extra[0], "<absent>"), "dictionaries have different keys")
            ca, cb = oa.closure, ob.closure
            if (ca is None) != (cb is None):
                return Mismatch(path, a, b, "only one object is a function")
            pending = [(oa.props[k], ob.props[k], path + (k,)) for k in oa.props]
            pending.append((oa.proto, ob.proto, path + (PROTO,)))
            work.extend(reversed(pending))
            if ca is not None:
                if (ca.self_name, ca.param, ca.body) != (cb.self_name, cb.param, cb.body):
                    return Mismatch(path, a, b, "different function abstractions")
                return self._envs(ca.env, cb.env, path, work)
            return None
        if isinstance(oa, SandboxProxy):
            work.append((oa.target, ob.target, path + (TARGET,)))
            work.append((oa.shadow, ob.shadow, path + (SHADOW,)))
            return self._envs(oa.env, ob.env, path, work)
        if isinstance(oa, OutwardProxy):
            work.append((oa.inner, ob.inner, path + (INNER,)))
            return self._envs(oa.env, ob.env, path, work)
        return Mismatch(path, a, b, "unknown object")


def eq_value(left_store, v, right_store, w) -> bool:
    return EquivContext(left_store, right_store).eq_value(v, w)


def eq_env(left_store, right_store, env) -> bool:
    """Equivalence of two stores on everything an environment can observe."""
    return EquivContext(left_store, right_store).eq_env(env) is None


def eq_envs(left_store, env_left, right_store, env_right) -> bool:
    return EquivContext(left_store, right_store).eq_env(env_left, env_right) is None


def follow_path(store, root, path):
    """Replay a witness path from ``root``; returns the value it leads to."""
    v = root
    for step in path:
        if isinstance(v, SandboxClosure):
            env = v.env
            v = _env_step(env, step)
            continue
        if not isinstance(v, Loc):
            raise KeyError(f"cannot follow {step!r} from a constant")
        obj = store[v]
        if step == PROTO:
            v = obj.proto
        elif step == TARGET:
            v = obj.target
        elif step == SHADOW:
            v = obj.shadow
        elif step == INNER:
            v = obj.inner
        elif step == GLOBAL or step.startswith("<env:"):
            env = obj.closure.env if isinstance(obj, Plain) else obj.env
            v = _env_step(env, step)
        else:
            v = obj.props.get(step, _ABSENT)
    return v


_ABSENT = "<absent>"


def _env_step(env, step):
    if step == GLOBAL:
        return env.global_value
    return env.get(step[len("<env:"):-1])

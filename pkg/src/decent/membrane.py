"""Sandbox handles: effect logs, commit/rollback/revert, inspection and rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from decent.effects import CALL, READ_KINDS, SET, EffectRecord, OLD_ABSENT, OLD_FROM_SHADOW, format_effect
from decent.errors import NotConcluded, NotWrapped, StaleEffect
from decent.heap import Environment, Loc, Plain, SandboxClosure, SandboxProxy, is_constant
from decent.primops import strict_equal, truthy
from decent.syntax import desugar, parse_source
from decent.syntax.nodes import App, Const, Get, SbxAbs, Var

COMMIT_ON = "CommitOn"
ROLLBACK_ON = "RollbackOn"
COMMIT_PROP = "CommitProp"
RAW = "RAW"
WAW = "WAW"


@dataclass(frozen=True)
class Rule:
    kind: str
    target: object
    predicate: object = None
    prop: Optional[str] = None


@dataclass(frozen=True)
class Conflict:
    kind: str
    mine: EffectRecord
    theirs: EffectRecord

    def __str__(self):
        return f"Conflict: {format_effect(self.mine, True)} - {format_effect(self.theirs, True)}"


@dataclass(frozen=True)
class StatsSnapshot:
    objects_wrapped: int
    effects_total: int
    distinct_reads: int
    distinct_writes: int
    distinct_calls: int


@dataclass(frozen=True)
class Change:
    target: Loc
    prop: str
    inside: object
    outside: object


class Sandbox:
    """A reusable sandbox over one global object.

    The global is wrapped once and bound to ``binder`` in the sandbox
    environment; every free name of loaded code reads through it.
    """

    def __init__(self, interp, global_value, binder="g"):
        self.interp = interp
        self.id = interp.new_handle_id()
        self.binder = binder
        self.log: List[EffectRecord] = interp.log_of(self.id)
        self.rules: List[Rule] = []
        self.concluded = False
        interp._start(None)
        self.env = Environment(secure=True)
        self.global_proxy = interp.wrap(self.env, self.id, global_value)
        self.env.tie_global(binder, self.global_proxy)
        if isinstance(self.global_proxy, Loc):
            interp.global_proxies.add(self.global_proxy)
        self._rule_cursor = 0

    @property
    def name(self):
        return "SBX%03d" % self.id

    @property
    def store(self):
        return self.interp.store

    @property
    def proxy_table(self):
        return self.store.proxy_table(self.id)

    # -- running code ------------------------------------------------------

    def wrap(self, v):
        return self.interp.wrap(self.env, self.id, v)

    def call(self, fn, arg, budget=None):
        """Apply ``fn`` to ``arg`` inside the sandbox; both are wrapped first."""
        self.interp._start(budget)
        wfn = self.wrap(fn)
        warg = self.wrap(arg)
        result = self.interp.apply_in_sandbox(self.id, wfn, warg, budget)
        self._concluded()
        return result

    def load(self, source, budget=None):
        """Run script text with its free names bound through the sandbox global."""
        expr = desugar(parse_source(source), sandbox_global=self.binder)
        return self.evaluate(expr, budget)

    def evaluate(self, expr, budget=None):
        result = self.interp.run_in_sandbox(self.id, expr, self.env, budget)
        self._concluded()
        return result

    def _concluded(self):
        self.concluded = True
        for rule in self.rules:
            self._run_rule(rule, self.log[self._rule_cursor:])
        self._rule_cursor = len(self.log)

    # -- effect queries ----------------------------------------------------

    def _target_of(self, v):
        if not isinstance(v, Loc):
            return None
        obj = self.store[v]
        if type(obj) is SandboxProxy and obj.sandbox_id == self.id:
            return obj.target
        return v

    def effects_of(self, target=None, kinds=None):
        loc = None
        if target is not None:
            loc = self._target_of(target)
            if loc is None:
                return []
        return [e for e in self.log
                if (loc is None or e.target == loc) and (kinds is None or e.kind in kinds)]

    def read_effects_of(self, target=None):
        return self.effects_of(target, READ_KINDS)

    def write_effects_of(self, target=None):
        return self.effects_of(target, (SET,))

    def call_effects_of(self, target=None):
        return self.effects_of(target, (CALL,))

    # -- transactions ------------------------------------------------------

    def _proxy_for(self, target):
        proxy = self.proxy_table.get(target)
        if proxy is None:
            raise NotWrapped(f"{target!r} has no proxy in {self.name}")
        return self.store[proxy]

    def _latest_sets(self, records):
        latest = {}
        for e in records:
            if e.kind == SET:
                latest[(e.target, e.prop)] = e
        return latest

    def commit(self, selection=None, strict=False):
        """Write final shadow values to their targets.

        ``selection`` is ``None`` (everything written), one ``set`` record, or
        a ``(target, prop)`` pair.  Returns the committed pairs in order.
        """
        self.interp._start(None)
        if selection is None:
            pairs = list(self._latest_sets(self.log))
        elif isinstance(selection, EffectRecord):
            if selection.kind != SET or selection.sandbox_id != self.id:
                raise StaleEffect(f"{format_effect(selection)} is not a write of {self.name}")
            latest = self._latest_sets(self.log)[(selection.target, selection.prop)]
            if strict and latest is not selection:
                raise StaleEffect(f"{format_effect(selection)} was overwritten by {format_effect(latest)}")
            pairs = [(selection.target, selection.prop)]
        else:
            target, prop = selection
            pairs = [(self._target_of(target), prop)]
        done = []
        for target, prop in pairs:
            shadow = self.store[self._proxy_for(target).shadow]
            if prop not in shadow.props:
                continue
            value = self.interp.export(self.env, self.id, shadow.props[prop])
            obj = self.store[target]
            if type(obj) is Plain:
                obj.props[prop] = value
            else:
                self.interp.put_value(target, prop, value)
            done.append((target, prop))
        return done

    def rollback(self, selection=None):
        """Restore shadow values recorded before each selected write.

        Targets are never touched and shadow objects persist.
        """
        self.interp._start(None)
        if selection is None:
            records = [e for e in reversed(self.log) if e.kind == SET]
        else:
            if selection.kind != SET or selection.sandbox_id != self.id:
                raise StaleEffect(f"{format_effect(selection)} is not a write of {self.name}")
            records = [selection]
        for e in records:
            proxy = self._proxy_for(e.target)
            props = self.store[proxy.shadow].props
            if e.old_source == OLD_ABSENT:
                props.pop(e.prop, None)
            elif e.old_source == OLD_FROM_SHADOW:
                props[e.prop] = e.old_value
            else:
                props[e.prop] = self.interp.wrap(proxy.env, self.id, e.old_value)
        return records

    def revert_of(self, target, deep=True):
        """Empty the shadow of ``target``.

        With ``deep`` (the default) the shadows of every wrapped object
        reachable from ``target`` through outside properties and prototypes
        are emptied too, so the whole outside structure shows through again.
        """
        loc = self._target_of(target)
        if loc is None or loc not in self.proxy_table:
            raise NotWrapped(f"{target!r} has no proxy in {self.name}")
        todo = [loc]
        seen = set()
        reverted = []
        while todo:
            t = todo.pop()
            if t in seen:
                continue
            seen.add(t)
            proxy = self.proxy_table.get(t)
            if proxy is not None:
                self.store[self.store[proxy].shadow].props.clear()
                reverted.append(t)
            if deep:
                obj = self.store[t]
                if type(obj) is Plain:
                    todo.extend(v for v in obj.props.values() if isinstance(v, Loc))
                    if isinstance(obj.proto, Loc):
                        todo.append(obj.proto)
        return reverted

    # -- inspection --------------------------------------------------------

    def _same(self, inside, outside):
        if is_constant(inside) and is_constant(outside):
            return strict_equal(inside, outside)
        if inside == outside or inside is outside:
            return True
        if isinstance(inside, Loc):
            obj = self.store[inside]
            if type(obj) is SandboxProxy and obj.sandbox_id == self.id:
                return obj.target == outside
        return False

    def changes_of(self, target=None):
        """Shadow properties whose value differs from the outside one."""
        out = []
        selected = None if target is None else self._target_of(target)
        for t, proxy in self.proxy_table.items():
            if selected is not None and t != selected:
                continue
            shadow = self.store[self.store[proxy].shadow]
            for prop, inside in shadow.props.items():
                outside = self.interp.peek(t, prop)
                if not self._same(inside, outside):
                    out.append(Change(t, prop, inside, outside))
        return out

    def differences_of(self, target=None):
        """Observed outside values that changed after the sandbox ran."""
        if not self.concluded:
            raise NotConcluded(f"{self.name} has not finished a call or load yet")
        selected = None if target is None else self._target_of(target)
        observed = {}
        for e in self.log:
            if e.kind == "get" and (selected is None or e.target == selected):
                observed[(e.target, e.prop)] = e.observed
        out = []
        for (t, prop), seen in observed.items():
            now = self.interp.peek(t, prop)
            if not self._same(seen, now):
                out.append(Change(t, prop, seen, now))
        return out

    def conflicts_with(self, other: "Sandbox"):
        """Read-after-write and write-after-write pairs between two sandboxes."""
        if other.id == self.id:
            return []
        found = []
        for writer, reader in ((self, other), (other, self)):
            writes = {}
            for w in writer.log:
                if w.kind == SET:
                    writes.setdefault((w.target, w.prop), []).append(w)
            for a in reader.log:
                if a.kind == CALL:
                    continue
                for w in writes.get((a.target, a.prop), ()):
                    if w.seq < a.seq:
                        kind = WAW if a.kind == SET else RAW
                        mine, theirs = (w, a) if writer is self else (a, w)
                        found.append((a.seq, w.seq, Conflict(kind, mine, theirs)))
        found.sort(key=lambda t: (t[0], t[1]))
        return [c for _, _, c in found]

    def in_conflict_with(self, other):
        return bool(self.conflicts_with(other))

    def stats(self):
        reads, writes, calls = set(), set(), set()
        for e in self.log:
            if e.kind in READ_KINDS:
                reads.add((e.target, e.prop))
            elif e.kind == SET:
                writes.add((e.target, e.prop))
            else:
                calls.add(e.target)
        return StatsSnapshot(len(self.proxy_table), len(self.log), len(reads), len(writes), len(calls))

    # -- rules -------------------------------------------------------------

    def apply_rule(self, rule: Rule, budget=None):
        """Install ``rule`` and run it over the writes logged so far."""
        if rule.kind not in (COMMIT_ON, ROLLBACK_ON, COMMIT_PROP):
            raise ValueError(f"unknown rule kind {rule.kind!r}")
        if rule.kind != COMMIT_PROP and not self.interp.is_callable(rule.predicate):
            raise ValueError("rule predicate must be a function")
        self.rules.append(rule)
        return self._run_rule(rule, list(self.log), budget)

    def _run_rule(self, rule, records, budget=None):
        target = self._target_of(rule.target)
        if rule.kind == COMMIT_PROP:
            if any(e.kind == SET and e.target == target and e.prop == rule.prop for e in records):
                return self.commit((target, rule.prop))
            return []
        acted = []
        for e in records:
            if e.kind != SET or e.target != target:
                continue
            if truthy(self._ask(rule.predicate, e, budget)):
                if rule.kind == COMMIT_ON:
                    self.commit(e)
                else:
                    self.rollback(e)
                acted.append(e)
        return acted

    def _ask(self, predicate, e, budget):
        # policy code runs in its own one-shot sandbox; its log is dropped
        interp = self.interp
        effect = interp.store.alloc(Plain({"kind": e.kind, "name": e.prop, "sandbox": float(e.sandbox_id)}))
        holder = interp.store.alloc(Plain({"p": predicate, "e": effect}))
        body = App(Get(Var("h"), Const("p")), Get(Var("h"), Const("e")))
        closure = SandboxClosure(Environment(secure=True), SbxAbs("h", body))
        before = interp._anonymous
        try:
            return interp.apply(closure, holder, budget)
        finally:
            for sid in range(interp._anonymous, before):
                interp.logs.pop(sid, None)

    def describe(self):
        return f"<sandbox {self.name}: {len(self.log)} effects, {len(self.proxy_table)} proxies>"


__all__ = [
    "COMMIT_ON", "COMMIT_PROP", "ROLLBACK_ON", "RAW", "WAW", "Change", "Conflict", "Rule", "Sandbox",
    "StatsSnapshot", "format_effect",
]

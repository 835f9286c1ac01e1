"""Hand-written sandbox bodies that each try to change outside state.

With the membrane in place every case must pass the noninterference check;
with wrapping disabled every case must fail.  The cases cover the different
routes by which a sandbox can reach an outside object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from decent.evaluator import DEFAULT_BUDGET
from decent.ni.checker import check_noninterference


@dataclass(frozen=True)
class MutationCase:
    name: str
    setup: str
    body: str
    arg: str
    budget: Optional[int] = None

    def check(self, membrane=True):
        budget = self.budget or DEFAULT_BUDGET
        return check_noninterference(self.setup, self.body, self.arg, budget, membrane=membrane)


_OBJ = "let o = new null; o.v = 0; o.w = 1; let inner = new null; inner.n = 5; o.child = inner; undefined"

MUTATION_CORPUS = (
    MutationCase("direct-write", _OBJ, "g.v = 99", "o"),
    MutationCase("new-key", _OBJ, "g.fresh = 1", "o"),
    MutationCase("nested-write", _OBJ, "g.child.n = 6", "o"),
    MutationCase("alias-write", _OBJ, "let c = g.child; c.n = 7", "o"),
    MutationCase("free-identifier-write", _OBJ, "child.n = 8", "o"),
    MutationCase("write-object-value", _OBJ, "g.v = new null", "o"),
    MutationCase("overwrite-child", _OBJ, "g.child = 3", "o"),
    MutationCase("write-through-proto", "let p = new null; p.k = 1; let o = new p; undefined",
                 "let q = new g; g.k = 2; q.k", "o"),
    MutationCase("arg-is-inner", _OBJ, "g.n = 0", "inner"),
    MutationCase("function-writes-outside",
                 "let o = new null; o.v = 0; let set = fun x => x.v = 1; o.set = set; undefined",
                 "g.set(g)", "o"),
    MutationCase("function-writes-captured",
                 "let o = new null; o.v = 0; let bump = fun x => o.v = x; o.bump = bump; undefined",
                 "g.bump(5)", "o"),
    MutationCase("replace-method",
                 "let o = new null; o.f = fun x => x; undefined", "g.f = fun y => 0", "o"),
    MutationCase("nested-fresh", _OBJ, "(fresh (sbx h => h.v = 3))(g)", "o"),
    MutationCase("nested-sbx-closure", _OBJ, "(sbx h => h.child.n = 4)(g)", "o"),
    # never terminates: the step budget ends it, and the partial store is compared
    MutationCase("write-until-budget",
                 "let o = new null; o.count = 0; undefined",
                 "let loop = fun step(n) => (g.count = n; step(n + 1)); loop(0)", "o",
                 budget=20_000),
    MutationCase("cycle-write",
                 "let o = new null; o.self = o; o.v = 0; undefined", "g.self.self.v = 1", "o"),
    MutationCase("shared-reference",
                 "let shared = new null; shared.v = 0; let a = new null; a.s = shared; "
                 "let b = new null; b.s = shared; let o = new null; o.a = a; o.b = b; undefined",
                 "g.a.s.v = 1", "o"),
    MutationCase("write-then-restore-key-set", _OBJ, "g.v = 0; g.extra = 1", "o"),
    MutationCase("string-key", _OBJ, 'g["w"] = "changed"', "o"),
    MutationCase("numeric-key", "let o = new null; o[0] = 1; undefined", "g[0] = 2", "o"),
)

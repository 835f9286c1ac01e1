"""Noninterference and differential checks built on store equivalence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Tuple

from decent.errors import DecentError, EvalError, StepBudgetExceeded
from decent.evaluator import DEFAULT_BUDGET, Interpreter
from decent.heap import Environment, Renamer, Store, reachable_from
from decent.ni.equivalence import EquivContext, Mismatch
from decent.ni.generator import gen_program, gen_triple
from decent.syntax import desugar, parse_source
from decent.syntax.nodes import Fresh, Let, SbxAbs, Seq

PASS = "pass"
FAIL = "fail"
ERROR = "error"

ARG_ROOT = "<arg>"


@dataclass(frozen=True)
class Witness:
    root: str
    path: Tuple[str, ...]
    left: object
    right: object
    reason: str = ""

    def describe(self):
        route = ".".join((self.root,) + self.path)
        return f"{route}: before {self.left!r}, after {self.right!r} ({self.reason})"


@dataclass
class NIReport:
    verdict: str
    witness: Optional[Witness] = None
    seed: Optional[int] = None
    program_text: str = ""
    body_error: Optional[str] = None
    harness_error: Optional[str] = None
    # what was compared, kept so a witness can be replayed
    roots: Optional[Environment] = field(default=None, repr=False)
    before: Optional[Store] = field(default=None, repr=False)
    after: Optional[Store] = field(default=None, repr=False)

    @property
    def passed(self):
        return self.verdict == PASS


def evaluate_setup(interp, text, env=None):
    """Evaluate a chain of ``let`` bindings and statements into an environment.

    The bindings along the chain become the top-level environment; whatever
    expression ends the chain is evaluated for its effects and discarded.
    """
    env = env if env is not None else Environment()
    e = parse_source(text)
    while True:
        if isinstance(e, Let):
            value = interp.run(desugar(e.value, bound=env.names()), env)
            env = env.extend(e.name, value)
            e = e.body
        elif isinstance(e, Seq):
            interp.run(desugar(e.first, bound=env.names()), env)
            e = e.rest
        else:
            interp.run(desugar(e, bound=env.names()), env)
            return env


def check_noninterference(setup, body, arg, budget=DEFAULT_BUDGET, membrane=True, seed=None, binder="g"):
    """Apply ``fresh (sbx binder => body)`` to ``arg`` and compare the outside.

    Everything reachable from the setup bindings (and from the argument) is
    snapshotted first; the verdict is ``pass`` when the store after the
    application is equivalent to that snapshot on every binding.  Errors
    raised by the body do not make the verdict fail by themselves: only the
    state they leave behind is compared.
    """
    text = f"{setup}\n--- {binder} => {body}\n--- {arg}"
    interp = Interpreter(budget=budget, membrane=membrane)
    try:
        env = evaluate_setup(interp, setup)
        arg_value = interp.run(desugar(parse_source(arg), bound=env.names()), env)
        sandbox = desugar(Fresh(SbxAbs(binder, parse_source(body))), bound=env.names())
    except DecentError as err:
        return NIReport(ERROR, seed=seed, program_text=text, harness_error=f"{type(err).__name__}: {err}")

    roots = env.extend(ARG_ROOT, arg_value)
    before = interp.store.snapshot(reachable_from(interp.store, [roots]))

    body_error = None
    try:
        closure = interp.run(sandbox, env)
        interp.apply(closure, arg_value)
    except (EvalError, StepBudgetExceeded) as err:
        body_error = f"{type(err).__name__}: {err}"

    found = EquivContext(before, interp.store).eq_env(roots)
    report = NIReport(PASS, seed=seed, program_text=text, body_error=body_error,
                      roots=roots, before=before, after=interp.store)
    if found is not None:
        report.verdict, report.witness = FAIL, _witness(found)
    return report


def _witness(m: Mismatch) -> Witness:
    head, rest = m.path[0], m.path[1:]
    root = head[len("<env:"):-1] if head.startswith("<env:") else head
    return Witness(root, rest, m.left, m.right, m.reason)


def clone_interpreter(interp, perm=None):
    """Copy of ``interp`` whose store is renamed by ``perm`` (identity when None).

    Returns the clone together with the renamer, so environments can be
    carried across with :meth:`Renamer.env`.
    """
    ren = Renamer(perm)
    out = Interpreter(budget=interp.budget, membrane=interp.membrane, log_effects=interp.log_effects)
    out.store = interp.store.renamed(perm)
    out.global_proxies = {ren.value(p) for p in interp.global_proxies}
    out.clock = interp.clock
    out._anonymous = interp._anonymous
    out._handles = interp._handles
    return out, ren


@dataclass(frozen=True)
class Outcome:
    value: object = None
    error: Optional[str] = None
    exhausted: bool = False


def _run(interp, expr, env, budget):
    try:
        return Outcome(interp.run(expr, env, budget))
    except StepBudgetExceeded:
        return Outcome(exhausted=True)
    except EvalError as err:
        return Outcome(error=err.kind)


def differential_check(interp, env, expr, perm, budget=None):
    """Evaluate ``expr`` against ``interp`` and against a renamed copy of it.

    ``perm`` is a permutation of the store's locations.  Both runs start from
    copies, so ``interp`` itself is left untouched.  True when both runs agree
    on termination and error kind, and their results and stores are
    equivalent.
    """
    left, _ = clone_interpreter(interp, None)
    right, ren = clone_interpreter(interp, perm)
    env_right = ren.env(env)
    a = _run(left, expr, env, budget)
    b = _run(right, expr, env_right, budget)
    if a.exhausted != b.exhausted or a.error != b.error:
        return False
    ctx = EquivContext(left.store, right.store)
    if not a.exhausted and a.error is None and not ctx.eq_value(a.value, b.value):
        return False
    return ctx.eq_env(env, env_right) is None


def random_permutation(n, rng):
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def differential_trial(seed, size, budget=DEFAULT_BUDGET):
    """One generated differential check; returns ``(agreed, program_text)``.

    The setup of a generated triple builds the store; the checked expression
    applies the generated sandbox to the generated argument and then runs an
    independent generated program.
    """
    setup, body, arg = gen_triple(seed, size)
    program = f"(fresh (sbx g => ({body})))({arg}); {gen_program(seed, size)}"
    interp = Interpreter(budget=budget)
    env = evaluate_setup(interp, setup)
    expr = desugar(parse_source(program), bound=env.names())
    perm = random_permutation(len(interp.store), random.Random(seed))
    return differential_check(interp, env, expr, perm, budget), f"{setup}\n--- {program}"

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from decent.evaluator import Interpreter
from decent.heap import Environment, Loc, Plain, Store
from decent.ni import (
    ARG_ROOT, FAIL, MUTATION_CORPUS, PASS, EquivContext, check_noninterference, clone_interpreter,
    differential_check, differential_trial, eq_env, eq_envs, eq_value, evaluate_setup, follow_path,
    gen_program, gen_triple,
)
from decent.syntax import desugar, parse_source
from decent.syntax.nodes import UNDEFINED

# -- an independent oracle for store equivalence ------------------------------


def unrolled_equal(ls, v, rs, w, depth=32):
    """Compare two values by unfolding both graphs to a fixed depth.

    Exact on acyclic graphs no deeper than ``depth``; no assumption set, no
    sharing, just the definition applied recursively.
    """
    if not isinstance(v, Loc) or not isinstance(w, Loc):
        if isinstance(v, Loc) or isinstance(w, Loc):
            return False
        same_nan = isinstance(v, float) and isinstance(w, float) and math.isnan(v) and math.isnan(w)
        return same_nan or (type(v) is type(w) and v == w)
    if depth == 0:
        return True
    a, b = ls[v], rs[w]
    if set(a.props) != set(b.props):
        return False
    if any(not unrolled_equal(ls, a.props[k], rs, b.props[k], depth - 1) for k in a.props):
        return False
    if (a.proto is None) != (b.proto is None):
        return False
    return a.proto is None or unrolled_equal(ls, a.proto, rs, b.proto, depth - 1)


def acyclic_store(rng, count):
    """Objects that only point at lower-numbered objects, so no cycles."""
    store = Store()
    nodes = []
    for i in range(count):
        obj = Plain()
        for key in rng.sample("abc", rng.randint(0, 3)):
            if nodes and rng.random() < 0.5:
                obj.props[key] = rng.choice(nodes)
            else:
                obj.props[key] = rng.choice([1.0, 2.0, "s", True, None, UNDEFINED, math.nan])
        if nodes and rng.random() < 0.3:
            obj.proto = rng.choice(nodes)
        nodes.append(store.alloc(obj))
    return store, nodes


def perturbed(store, rng):
    """A copy of ``store`` that may differ in one property."""
    copy = store.renamed(None)
    if rng.random() < 0.5:
        loc = Loc(rng.randrange(len(copy)))
        props = copy[loc].props
        if props and rng.random() < 0.7:
            props[rng.choice(sorted(props))] = 9.0
        else:
            props["extra"] = 1.0
    return copy


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1_000_000), st.integers(1, 12))
def test_equivalence_agrees_with_unrolling(seed, count):
    rng = random.Random(seed)
    left, nodes = acyclic_store(rng, count)
    right = perturbed(left, rng)
    for loc in nodes:
        assert eq_value(left, loc, right, loc) == unrolled_equal(left, loc, right, loc)


class TestEquivalence:
    def test_constants(self):
        s = Store()
        assert eq_value(s, 1.0, s, 1.0)
        assert eq_value(s, math.nan, s, math.nan)
        assert not eq_value(s, 1.0, s, True)
        assert not eq_value(s, None, s, UNDEFINED)
        assert not eq_value(s, "1", s, 1.0)

    def test_cycles_terminate(self):
        left, right = Store(), Store()
        a = left.alloc(Plain())
        left[a].props["self"] = a
        b1 = right.alloc(Plain())
        b2 = right.alloc(Plain({"self": b1}))
        right[b1].props["self"] = b2
        # a one-cycle and a two-cycle unfold to the same infinite tree
        assert eq_value(left, a, right, b1)

    def test_extra_key_is_found(self):
        left, right = Store(), Store()
        a = left.alloc(Plain({"x": 1.0}))
        b = right.alloc(Plain({"x": 1.0, "y": 2.0}))
        m = EquivContext(left, right).mismatch(a, b)
        assert m.path == ("y",) and m.reason == "dictionaries have different keys"

    def test_functions_compare_code_and_environment(self):
        def build(text):
            it = Interpreter()
            return it.store, evaluate_setup(it, text).lookup("f")

        ls, f = build("let k = 1; let f = fun x => x + k; undefined")
        rs, same = build("let k = 1; let f = fun x => x + k; undefined")
        es, other_env = build("let k = 2; let f = fun x => x + k; undefined")
        cs, other_code = build("let k = 1; let f = fun x => x - k; undefined")
        assert eq_value(ls, f, rs, same)
        assert not eq_value(ls, f, es, other_env)
        assert not eq_value(ls, f, cs, other_code)

    def test_environment_reflexive(self, world):
        it, env = world
        assert eq_env(it.store, it.store, env)
        assert eq_env(it.store, it.store.snapshot(set()), Environment())

    def test_unreachable_allocation_is_invisible(self, world):
        it, env = world
        before = it.store.renamed(None)
        it.store.alloc(Plain({"junk": 1.0}))
        assert eq_env(before, it.store, env)

    def test_reachable_change_is_visible(self, world):
        it, env = world
        before = it.store.renamed(None)
        it.store[env.lookup("inner")].props["n"] = 6.0
        found = EquivContext(before, it.store).eq_env(env)
        assert found is not None and found.path[-1] == "n"

    def test_renaming_is_equivalent(self, world):
        it, env = world
        rng = random.Random(3)
        perm = list(range(len(it.store)))
        rng.shuffle(perm)
        clone, ren = clone_interpreter(it, perm)
        assert eq_envs(it.store, env, clone.store, ren.env(env))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_equivalence_is_an_equivalence(seed):
    rng = random.Random(seed)
    s1, nodes = acyclic_store(rng, 6)
    s2, s3 = perturbed(s1, rng), perturbed(s1, rng)
    for loc in nodes:
        assert eq_value(s1, loc, s1, loc)
        assert eq_value(s1, loc, s2, loc) == eq_value(s2, loc, s1, loc)
        if eq_value(s1, loc, s2, loc) and eq_value(s2, loc, s3, loc):
            assert eq_value(s1, loc, s3, loc)


# -- noninterference checks ---------------------------------------------------

OBJ = "let o = new null; o.v = 0; let inner = new null; inner.n = 5; o.child = inner; undefined"


class TestNoninterference:
    def test_write_to_argument_passes(self):
        report = check_noninterference(OBJ, "g.v = 99", "o")
        assert report.verdict == PASS and report.witness is None

    def test_trivial_body_passes(self):
        assert check_noninterference(OBJ, "undefined", "o").passed

    def test_body_errors_are_reported_but_do_not_fail(self):
        report = check_noninterference(OBJ, "(g.v = 1; g.v(2))", "o")
        assert report.passed and report.body_error.startswith("EvalTypeError")

    def test_harness_error(self):
        report = check_noninterference("let o = ; undefined", "g", "o")
        assert report.verdict == "error" and report.harness_error

    def test_without_membrane_the_write_is_caught(self):
        report = check_noninterference(OBJ, "g.child.n = 6", "o", membrane=False)
        assert report.verdict == FAIL
        w = report.witness
        assert (w.root, w.path[-1], w.left, w.right) in {("o", "n", 5.0, 6.0), ("inner", "n", 5.0, 6.0)}
        assert "before 5.0, after 6.0" in w.describe()

    def test_witness_replays_on_both_stores(self):
        report = check_noninterference(OBJ, "g.w = 1", "o", membrane=False)
        w = report.witness
        root = report.roots.lookup(w.root)
        assert follow_path(report.before, root, w.path) == w.left == "<absent>"
        assert follow_path(report.after, root, w.path) == w.right == 1.0

    def test_argument_is_a_root(self):
        report = check_noninterference("let unused = 1; undefined", "g.x = 2", "new null", membrane=False)
        assert report.witness.root == ARG_ROOT

    def test_generated_triples(self):
        for seed in range(30):
            setup, body, arg = gen_triple(seed, 20)
            assert check_noninterference(setup, body, arg, seed=seed).passed, seed


@pytest.mark.parametrize("case", MUTATION_CORPUS, ids=lambda c: c.name)
def test_mutation_corpus(case):
    assert case.check(membrane=True).passed
    broken = case.check(membrane=False)
    assert broken.verdict == FAIL
    w = broken.witness
    root = broken.roots.lookup(w.root)
    assert follow_path(broken.before, root, w.path) == w.left
    assert follow_path(broken.after, root, w.path) == w.right


# -- differential checks ------------------------------------------------------


class TestDifferential:
    def setup_world(self, src):
        it = Interpreter()
        env = evaluate_setup(it, OBJ)
        return it, env, desugar(parse_source(src), bound=env.names())

    def test_identity_permutation(self):
        it, env, expr = self.setup_world("(fresh (sbx g => g.child.n = 1))(o); o.child")
        assert differential_check(it, env, expr, None)

    def test_swap_permutation(self):
        it, env, expr = self.setup_world("o.child.n = o.v; new o")
        perm = list(range(len(it.store)))
        perm[0], perm[-1] = perm[-1], perm[0]
        assert differential_check(it, env, expr, perm)

    def test_original_is_untouched(self):
        it, env, expr = self.setup_world("o.v = 7")
        differential_check(it, env, expr, None)
        assert it.store[env.lookup("o")].props["v"] == 0.0

    def test_errors_must_match(self):
        it, env, expr = self.setup_world("o.v(1)")
        assert differential_check(it, env, expr, None)

    @pytest.mark.parametrize("seed", range(25))
    def test_generated_trials(self, seed):
        agreed, text = differential_trial(seed, 20)
        assert agreed, text


# -- the generator ------------------------------------------------------------


class TestGenerator:
    def test_deterministic(self):
        assert gen_program(42, 25) == gen_program(42, 25)
        assert gen_triple(42, 25) == gen_triple(42, 25)

    def test_seeds_differ(self):
        assert len({gen_program(s, 25) for s in range(20)}) > 15

    def test_smallest_program_is_a_literal(self):
        assert gen_program(1, 1) == "9"

    def test_programs_mostly_run_cleanly(self):
        clean = 0
        for seed in range(200):
            it = Interpreter(budget=200_000)
            try:
                it.run(desugar(parse_source(gen_program(seed, 30))), Environment())
                clean += 1
            except Exception:
                pass
        assert clean >= 180

    def test_triples_parse(self):
        for seed in range(50):
            setup, body, arg = gen_triple(seed, 25)
            for text in (setup, body, arg):
                parse_source(text)

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import evaluate
from decent.errors import EvalTypeError, StepBudgetExceeded, UnboundVariable
from decent.evaluator import Interpreter
from decent.heap import Environment, Loc, Plain, SandboxClosure, SandboxProxy, Store, property_key, reachable_from
from decent.primops import apply_primop, strict_equal, truthy
from decent.render import render_value
from decent.syntax.nodes import UNDEFINED


class TestPrimops:
    @pytest.mark.parametrize("value, expected", [
        (0.0, False), (-0.0, False), (math.nan, False), ("", False), (None, False), (UNDEFINED, False),
        (False, False), (1.0, True), ("0", True), (True, True), (Loc(0), True),
    ])
    def test_truthy(self, value, expected):
        assert truthy(value) is expected

    def test_division_follows_ieee(self):
        assert apply_primop("/", 1.0, 0.0) == math.inf
        assert apply_primop("/", -1.0, 0.0) == -math.inf
        assert math.isnan(apply_primop("/", 0.0, 0.0))
        assert math.isnan(apply_primop("%", 5.0, 0.0))
        assert apply_primop("%", -7.0, 3.0) == -1.0

    def test_plus_concatenates_only_strings(self):
        assert apply_primop("+", "a", "b") == "ab"
        with pytest.raises(EvalTypeError):
            apply_primop("+", "a", 1.0)

    def test_strict_equality(self):
        assert not strict_equal(math.nan, math.nan)
        assert strict_equal(0.0, -0.0)
        assert not strict_equal(1.0, "1")
        assert not strict_equal(None, UNDEFINED)
        sc = SandboxClosure(Environment(secure=True), None)
        assert strict_equal(sc, sc) and not strict_equal(sc, SandboxClosure(sc.env, None))

    def test_logic_returns_an_operand(self):
        assert apply_primop("&&", 0.0, "x") == 0.0
        assert apply_primop("||", "", "x") == "x"

    def test_binary_minus_with_null_is_a_type_error(self):
        with pytest.raises(EvalTypeError):
            apply_primop("-", 1.0, None)

    def test_property_keys(self):
        assert [property_key(c) for c in (1.0, 1.5, True, None, UNDEFINED, "k")] == [
            "1", "1.5", "true", "null", "undefined", "k"]


class TestEvaluation:
    def test_arithmetic(self):
        assert evaluate("1 + 2 * 3") == 7.0

    def test_closures_capture_their_environment(self):
        assert evaluate("let k = 10; let add = fun x => x + k; let k = 0; add(1)") == 11.0

    def test_let_bindings_are_not_recursive(self):
        src = ("let pick = new null; "
               "pick[true] = fun n => n * fact(n - 1); pick[false] = fun n => 1; "
               "let fact = fun f(n) => pick[n > 0](n); fact(5)")
        # the closures in pick were built before `fact` was bound
        with pytest.raises(UnboundVariable):
            evaluate(src)

    def test_recursion_through_an_object(self):
        src = ("let k = new null; k.go = fun n => k[n > 0](n); "
               "k[true] = fun n => n * k.go(n - 1); k[false] = fun n => 1; k.go(6)")
        assert evaluate(src) == 720.0

    def test_deep_recursion_does_not_hit_the_python_stack(self):
        src = ("let k = new null; k.go = fun n => k[n > 0](n); "
               "k[true] = fun n => 1 + k.go(n - 1); k[false] = fun n => 0; k.go(20000)")
        assert evaluate(src) == 20000.0

    def test_typeof(self):
        assert evaluate("typeof (fun x => x)") == "function"
        assert evaluate("typeof new null") == "object"
        assert evaluate("typeof null") == "object"
        assert evaluate("typeof fresh (sbx g => g)") == "function"

    def test_numeric_keys_share_the_string_key(self):
        assert evaluate('let o = new null; o[1] = "one"; o["1"]') == "one"

    def test_prototype_writes_do_not_touch_the_prototype(self):
        it = Interpreter()
        assert evaluate("let p = new null; p.x = 1; let o = new p; o.x = 2; p.x", it) == 1.0

    @pytest.mark.parametrize("src, kind", [
        ("1 + true", EvalTypeError),
        ("(1)(2)", EvalTypeError),
        ("(new null)(2)", EvalTypeError),
        ("null.x", EvalTypeError),
        ("let o = new null; o[new null] = 1", EvalTypeError),
        ("sbx g => g", EvalTypeError),
    ])
    def test_runtime_type_errors(self, src, kind):
        with pytest.raises(kind):
            evaluate(src)

    def test_error_carries_a_position(self):
        with pytest.raises(EvalTypeError) as info:
            evaluate("let o = 1;\n  o.x")
        assert info.value.position == (2, 4)

    def test_step_budget(self):
        it = Interpreter(budget=500)
        with pytest.raises(StepBudgetExceeded):
            evaluate("let w = fun f(x) => f(x); w(0)", it)
        # the budget applies per run
        assert evaluate("1 + 1", it) == 2.0

    def test_trace_records_every_step(self):
        it = Interpreter()
        it.trace = []
        evaluate("(fun x => x)(1)", it)
        assert len(it.trace) == it.steps


class TestSandboxSemantics:
    def test_sandbox_sees_only_its_argument(self):
        with pytest.raises(EvalTypeError):
            evaluate("let secret = 1; (fresh (sbx g => secret))(5)")

    def test_free_names_read_the_global(self, world):
        it, env = world
        assert evaluate("(fresh (sbx g => v))(o)", it, env) == 0.0

    def test_writes_stay_inside(self, world):
        it, env = world
        assert evaluate("(fresh (sbx g => (g.v = 99; g.child.n = 7; g.v + g.child.n)))(o)", it, env) == 106.0
        o = it.store[env.lookup("o")]
        assert o.props["v"] == 0.0 and it.store[o.props["child"]].props["n"] == 5.0

    def test_each_application_is_a_new_sandbox(self, world):
        it, env = world
        src = "let s = fresh (sbx g => (g.v = g.v + 1; g.v)); s(o) + s(o)"
        assert evaluate(src, it, env) == 2.0

    def test_identity_is_preserved(self, world):
        it, env = world
        evaluate("o.again = o.child; undefined", it, env)
        assert evaluate("(fresh (sbx g => g.child === g.again))(o)", it, env) is True

    def test_recompiled_function_loses_outside_bindings(self):
        it = Interpreter()
        with pytest.raises(UnboundVariable):
            evaluate("let secret = new null; let o = new null; o.f = fun x => secret; "
                     "(fresh (sbx g => g.f(0)))(o)", it)

    def test_function_results_are_wrapped(self, world):
        it, env = world
        v = evaluate("o.get = fun x => x.child; (fresh (sbx g => g.get(g)))(o)", it, env)
        assert isinstance(it.store[v], SandboxProxy)
        assert it.store[v].target == it.store[env.lookup("o")].props["child"]

    def test_nested_sandboxes_do_not_leak_into_the_outer_one(self, world):
        it, env = world
        src = "(fresh (sbx g => ((fresh (sbx h => h.v = 5))(g); g.v)))(o)"
        assert evaluate(src, it, env) == 0.0

    def test_membrane_audit_passes(self, world):
        it, env = world
        it.audit = True
        evaluate("(fresh (sbx g => (g.k = new g.child; g.inc(1); g)))(o)", it, env)


class TestStore:
    def test_renamed_is_isomorphic(self, world):
        it, env = world
        n = len(it.store)
        perm = list(reversed(range(n)))
        renamed = it.store.renamed(perm)
        for i in range(n):
            a, b = it.store.objects[i], renamed.objects[perm[i]]
            assert type(a) is type(b)
            if isinstance(a, Plain):
                assert set(a.props) == set(b.props)

    def test_snapshot_keeps_only_requested_slots(self, world):
        it, env = world
        o = env.lookup("o")
        snap = it.store.snapshot({o})
        assert o in snap and sum(x is not None for x in snap.objects) == 1
        it.store[o].props["v"] = 1.0
        assert snap[o].props["v"] == 0.0

    def test_reachability_follows_props_protos_and_closures(self):
        it = Interpreter()
        env = Environment()
        lonely = it.store.alloc(Plain())
        captured = it.store.alloc(Plain())
        proto = it.store.alloc(Plain())
        f = evaluate("fun x => c", it, Environment({"c": captured}))
        root = it.store.alloc(Plain({"f": f}, None, proto))
        seen = reachable_from(it.store, [root, env])
        assert {root, f, captured, proto} <= seen and lonely not in seen

    def test_store_is_append_only(self):
        s = Store()
        a = s.alloc(Plain())
        b = s.alloc(Plain())
        assert (a.index, b.index) == (0, 1) and len(s) == 2


class TestRender:
    def test_objects_and_depth(self, world):
        it, env = world
        text = render_value(it.store, env.lookup("o"), depth=1)
        assert text == "<obj#0 {v: 0, child: <obj#1 ...>, inc: <fun#2>}>"

    def test_top_level_strings_are_raw(self, interp):
        assert render_value(interp.store, "a b") == "a b"
        assert render_value(interp.store, "a", top=False) == '"a"'

    def test_proxies(self, world):
        it, env = world
        p = evaluate("(fresh (sbx g => g))(o)", it, env)
        assert render_value(it.store, p).startswith(f"<proxy#{p.index} → obj#0")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8))
def test_arithmetic_matches_python(xs):
    src = " - ".join(f"({x})" for x in xs)
    expected = float(xs[0]) - sum(xs[1:])
    assert evaluate(src.replace("(-", "(0 - ")) == expected

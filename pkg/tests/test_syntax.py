from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from decent.errors import DesugarError, LexError, ParseError, UnboundVariable
from decent.ni.generator import gen_program
from decent.syntax import desugar, free_variables, parse_source, pretty_print, tokenize
from decent.syntax.lexer import EOF, KEYWORDS, NUMBER, STRING
from decent.syntax.nodes import (
    UNDEFINED, Abs, App, Const, Dot, DotPut, Fresh, Get, Let, New, Op, Put, SbxAbs, Seq, Var, is_core, walk,
)


class TestLexer:
    def test_numbers_and_strings(self):
        toks = tokenize('12 3.5 1e3 "a\\nb" \'q\'')
        assert [t.kind for t in toks] == [NUMBER, NUMBER, NUMBER, STRING, STRING, EOF]
        assert [t.value for t in toks[:-1]] == [12.0, 3.5, 1000.0, "a\nb", "q"]

    def test_positions_are_line_and_column(self):
        toks = tokenize("a\n  bb // note\nc")
        assert [t.position for t in toks[:3]] == [(1, 1), (2, 3), (3, 1)]

    def test_longest_punctuation_wins(self):
        assert [t.lexeme for t in tokenize("a===b=>c")][:5] == ["a", "===", "b", "=>", "c"]

    def test_bad_character(self):
        with pytest.raises(LexError) as info:
            tokenize("1 # 2")
        assert info.value.position == (1, 3)

    def test_unterminated_string(self):
        with pytest.raises(LexError):
            tokenize('"open')


class TestParser:
    def test_precedence(self):
        e = parse_source("1 + 2 * 3 === 7 && !false")
        assert e == Op("&&", Op("===", Op("+", Const(1.0), Op("*", Const(2.0), Const(3.0))), Const(7.0)),
                       Op("!", Const(False)))

    def test_binder_forms(self):
        assert parse_source("fun x => x") == Abs(None, "x", Var("x"))
        assert parse_source("fun f(x) => f") == Abs("f", "x", Var("f"))
        assert parse_source("fresh (sbx g => g.a)") == Fresh(SbxAbs("g", Dot(Var("g"), "a")))

    def test_assignment_targets(self):
        assert parse_source("o.x = 1") == DotPut(Var("o"), "x", Const(1.0))
        assert parse_source('o["x"] = 1') == Put(Var("o"), Const("x"), Const(1.0))

    def test_sequence_and_let(self):
        e = parse_source("let a = 1; a; 2")
        assert e == Let("a", Const(1.0), Seq(Var("a"), Const(2.0)))

    def test_function_body_is_one_expression(self):
        e = parse_source("fun x => x; 3")
        assert e == Seq(Abs(None, "x", Var("x")), Const(3.0))

    def test_keywords_allowed_after_dot(self):
        assert parse_source("o.new") == Dot(Var("o"), "new")

    @pytest.mark.parametrize("src", ["1 +", "(1", "let x = 1", "fun x =>"])
    def test_incomplete_input_is_at_eof(self, src):
        with pytest.raises(ParseError) as info:
            parse_source(src)
        assert info.value.at_eof

    def test_garbage_is_not_at_eof(self):
        with pytest.raises(ParseError) as info:
            parse_source("1 ) 2")
        assert not info.value.at_eof
        assert info.value.position == (1, 3)


class TestDesugar:
    def test_let_becomes_application(self):
        core = desugar(parse_source("let x = 1; x"))
        assert core == App(Abs(None, "x", Var("x")), Const(1.0))

    def test_sequence_uses_an_unused_name(self):
        core = desugar(parse_source("let _ = 1; 2; _"))
        inner = core.fn.body
        assert isinstance(inner, App) and inner.fn.param not in ("_",)

    def test_dot_becomes_string_key(self):
        assert desugar(parse_source("o.x = o.y"), bound=["o"]) == Put(
            Var("o"), Const("x"), Get(Var("o"), Const("y")))

    def test_free_names_inside_a_sandbox_read_the_global(self):
        core = desugar(parse_source("fresh (sbx g => max)"))
        assert core.body.body == Get(Var("g"), Const("max"))

    def test_free_name_outside_a_sandbox_is_an_error(self):
        with pytest.raises(UnboundVariable):
            desugar(parse_source("nope"))

    def test_sandbox_body_does_not_see_outer_bindings(self):
        core = desugar(parse_source("let y = 1; fresh (sbx g => y)"))
        assert Get(Var("g"), Const("y")) in list(walk(core))

    def test_shadowed_binder_cannot_reach_global(self):
        with pytest.raises(DesugarError):
            desugar(parse_source("fresh (sbx g => fun g => other)"))

    def test_script_mode(self):
        assert desugar(parse_source("a"), sandbox_global="g") == Get(Var("g"), Const("a"))

    def test_free_variables(self):
        assert free_variables(parse_source("fun x => x + y")) == {"y"}


class TestPrinter:
    @pytest.mark.parametrize("src", [
        "1 + 2 * 3",
        "(1 + 2) * 3",
        "fun f(x) => f(x)",
        "let a = 1; a; 2",
        "(let a = 1; a) + 2",
        "o.x = (p.y = 2)",
        "new (new null)",
        "(fresh (sbx g => g.v = 1))(o)",
        'o["not a name"]',
        "-(1)",
        "typeof undefined",
    ])
    def test_round_trip_examples(self, src):
        e = parse_source(src)
        assert parse_source(pretty_print(e)) == e

    def test_strings_are_escaped(self):
        assert pretty_print(Const('say "hi"\n')) == '"say \\"hi\\"\\n"'

    def test_numbers_print_like_javascript(self):
        assert pretty_print(Const(3.0)) == "3"
        assert pretty_print(Const(0.5)) == "0.5"


# -- property-based round trips ---------------------------------------------

_names = st.sampled_from(["a", "b", "x", "y", "fn", "o"])
_constants = st.one_of(
    st.floats(min_value=0, max_value=1e9, allow_nan=False).map(lambda f: Const(float(f))),
    st.text(max_size=4).map(Const),
    st.sampled_from([True, False, None, UNDEFINED]).map(Const),
)


def _extend(children):
    binop = st.sampled_from(["+", "-", "*", "/", "%", "<", "<=", ">", ">=", "===", "!==", "&&", "||"])
    return st.one_of(
        st.builds(Op, binop, children, children),
        st.builds(lambda op, e: Op(op, e, None), st.sampled_from(["!", "-", "typeof"]), children),
        st.builds(lambda n, b: Abs(None, n, b), _names, children),
        st.builds(Abs, _names, _names, children),
        st.builds(App, children, children),
        st.builds(New, children),
        st.builds(Get, children, children),
        st.builds(Put, children, children, children),
        st.builds(Dot, children, _names),
        st.builds(DotPut, children, _names, children),
        st.builds(SbxAbs, _names, children),
        st.builds(Fresh, children),
        st.builds(Let, _names, children, children),
        st.builds(Seq, children, children),
    )


expressions = st.recursive(st.one_of(_constants, _names.map(Var)), _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_parse_inverts_pretty_print(e):
    assert parse_source(pretty_print(e)) == e


@settings(max_examples=200, deadline=None)
@given(expressions)
def test_pretty_print_is_idempotent(e):
    once = pretty_print(e)
    assert pretty_print(parse_source(once)) == once


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 40))
def test_generated_programs_desugar_to_core(seed, size):
    core = desugar(parse_source(gen_program(seed, size)))
    assert is_core(core)
    assert not free_variables(core)


def test_keywords_are_not_identifiers():
    for kw in KEYWORDS:
        assert tokenize(kw)[0].kind != "ident"

"""Recursive-descent parser producing the sugared AST.

Precedence, loosest first::

    e1; e2                                (sequence, right-nested)
    fun / sbx / let / property write      (extend as far right as possible)
    ||
    &&
    === !==
    < <= > >=
    + -
    * / %
    ! - typeof new fresh                  (prefix)
    call  e(f)   read  e[f]   e.name      (postfix, left-associative)
"""

from __future__ import annotations

from decent.errors import ParseError
from decent.syntax import lexer
from decent.syntax.lexer import EOF, IDENT, KEYWORD, NUMBER, PUNCT, STRING
from decent.syntax.nodes import (
    UNDEFINED, Abs, App, Const, Dot, DotPut, Fresh, Get, Let, New, Op, Put, SbxAbs, Seq, Var,
)

_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("===", "!=="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)

_LITERALS = {"true": True, "false": False, "null": None, "undefined": UNDEFINED}


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def at(self, kind, lexeme=None):
        return self.tok.is_(kind, lexeme)

    def at_end(self):
        return self.tok.kind == EOF

    def advance(self):
        tok = self.tok
        if tok.kind != EOF:
            self.i += 1
        return tok

    def fail(self, expected):
        tok = self.tok
        found = "end of input" if tok.kind == EOF else repr(tok.lexeme)
        raise ParseError(tok.position, expected, found, at_eof=tok.kind == EOF)

    def expect(self, kind, lexeme=None):
        if not self.at(kind, lexeme):
            self.fail(repr(lexeme) if lexeme else kind)
        return self.advance()

    def ident(self):
        return self.expect(IDENT).lexeme

    # -- grammar ---------------------------------------------------------

    def expression(self):
        first = self.single()
        if self.at(PUNCT, ";"):
            tok = self.advance()
            return Seq(first, self.expression(), pos=tok.position)
        return first

    def single(self):
        # one expression without a trailing sequence; function bodies,
        # let-bound values and assigned values stop at the first ';'
        tok = self.tok
        if tok.kind == KEYWORD and tok.lexeme in ("fun", "sbx", "let"):
            return self.binder_form()
        lhs = self.binary(0)
        if self.at(PUNCT, "="):
            if not isinstance(lhs, (Get, Dot)):
                self.fail("a property reference before '='")
            self.advance()
            value = self.single()
            if isinstance(lhs, Dot):
                return DotPut(lhs.obj, lhs.name, value, pos=lhs.pos)
            return Put(lhs.obj, lhs.key, value, pos=lhs.pos)
        return lhs

    def binder_form(self):
        tok = self.advance()
        pos = tok.position
        if tok.lexeme == "let":
            name = self.ident()
            self.expect(PUNCT, "=")
            value = self.single()
            self.expect(PUNCT, ";")
            return Let(name, value, self.expression(), pos=pos)
        if tok.lexeme == "sbx":
            param = self.ident()
            self.expect(PUNCT, "=>")
            return SbxAbs(param, self.single(), pos=pos)
        # fun x => e | fun (x) => e | fun f(x) => e
        self_name = None
        if self.at(IDENT):
            name = self.advance().lexeme
            if self.at(PUNCT, "=>"):
                self.advance()
                return Abs(None, name, self.single(), pos=pos)
            self_name = name
        self.expect(PUNCT, "(")
        param = self.ident()
        self.expect(PUNCT, ")")
        self.expect(PUNCT, "=>")
        return Abs(self_name, param, self.single(), pos=pos)

    def binary(self, level):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.binary(level + 1)
        while self.tok.kind == PUNCT and self.tok.lexeme in ops:
            tok = self.advance()
            right = self.binary(level + 1)
            left = Op(tok.lexeme, left, right, pos=tok.position)
        return left

    def unary(self):
        tok = self.tok
        if tok.kind == PUNCT and tok.lexeme in ("!", "-"):
            self.advance()
            return Op(tok.lexeme, self.unary(), None, pos=tok.position)
        if tok.kind == KEYWORD:
            if tok.lexeme == "typeof":
                self.advance()
                return Op("typeof", self.unary(), None, pos=tok.position)
            if tok.lexeme == "new":
                self.advance()
                return New(self.unary(), pos=tok.position)
            if tok.lexeme == "fresh":
                self.advance()
                return Fresh(self.unary(), pos=tok.position)
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while True:
            tok = self.tok
            if tok.is_(PUNCT, "("):
                self.advance()
                arg = self.expression()
                self.expect(PUNCT, ")")
                e = App(e, arg, pos=tok.position)
            elif tok.is_(PUNCT, "["):
                self.advance()
                key = self.expression()
                self.expect(PUNCT, "]")
                e = Get(e, key, pos=tok.position)
            elif tok.is_(PUNCT, "."):
                self.advance()
                e = Dot(e, self.property_name(), pos=tok.position)
            else:
                return e

    def property_name(self):
        # keywords are fine after a dot: o.new, o.typeof
        if self.tok.kind in (IDENT, KEYWORD):
            return self.advance().lexeme
        self.fail("property name")

    def primary(self):
        tok = self.tok
        if tok.kind in (NUMBER, STRING):
            self.advance()
            return Const(tok.value, pos=tok.position)
        if tok.kind == IDENT:
            self.advance()
            return Var(tok.lexeme, pos=tok.position)
        if tok.kind == KEYWORD:
            if tok.lexeme in _LITERALS:
                self.advance()
                return Const(_LITERALS[tok.lexeme], pos=tok.position)
            if tok.lexeme in ("fun", "sbx", "let"):
                return self.binder_form()
        if tok.is_(PUNCT, "("):
            self.advance()
            e = self.expression()
            self.expect(PUNCT, ")")
            return e
        self.fail("an expression")


def parse(tokens):
    """Parse a complete token list (as produced by ``tokenize``) into one expression."""
    p = Parser(tokens)
    e = p.expression()
    if not p.at_end():
        p.fail("end of input")
    return e


def parse_source(source: str):
    return parse(lexer.tokenize(source))


def parse_prefix(tokens, start=0):
    """Parse one expression starting at token ``start``.

    Returns ``(expr, next_index)``; used by the REPL to split
    ``<expr> <expr>`` argument lists.
    """
    p = Parser(tokens)
    p.i = start
    e = p.expression()
    return e, p.i

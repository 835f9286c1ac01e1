"""Surface syntax: tokens, parser, desugarer and pretty-printer."""

from decent.syntax.desugar import desugar, free_variables
from decent.syntax.lexer import Token, tokenize
from decent.syntax.nodes import (
    UNDEFINED, Abs, App, Const, Dot, DotPut, Expr, Fresh, Get, Let, New, Op, Put, SbxAbs, Seq, Var,
)
from decent.syntax.parser import parse, parse_prefix, parse_source
from decent.syntax.printer import format_constant, format_number, pretty_print

__all__ = [
    "UNDEFINED", "Abs", "App", "Const", "Dot", "DotPut", "Expr", "Fresh", "Get", "Let", "New",
    "Op", "Put", "SbxAbs", "Seq", "Var", "Token", "desugar", "format_constant", "format_number",
    "free_variables", "parse", "parse_prefix", "parse_source", "pretty_print", "tokenize",
]

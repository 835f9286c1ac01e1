from __future__ import annotations

import re
from dataclasses import dataclass

from decent.errors import LexError

KEYWORDS = frozenset(
    {"fun", "sbx", "fresh", "new", "let", "typeof", "true", "false", "null", "undefined"}
)

# Longest match first.
PUNCTUATION = (
    "===", "!==", "=>", "<=", ">=", "&&", "||",
    "=", "<", ">", "+", "-", "*", "/", "%", "!", "(", ")", "[", "]", ".", ";",
)

IDENT = "ident"
NUMBER = "number"
STRING = "string"
KEYWORD = "keyword"
PUNCT = "punct"
EOF = "eof"

_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "0": "\0",
            "\\": "\\", '"': '"', "'": "'", "/": "/"}


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    position: tuple  # (line, column), both 1-based
    value: object = None
    offset: int = 0

    def is_(self, kind, lexeme=None):
        return self.kind == kind and (lexeme is None or self.lexeme == lexeme)

    def __repr__(self):
        return f"Token({self.kind}, {self.lexeme!r}, {self.position})"


def tokenize(source: str) -> list:
    """Split ``source`` into tokens, ending with a single EOF token.

    Whitespace and ``//`` line comments separate tokens and are dropped; the
    ``offset`` of each token lets callers recover the skipped text.
    """
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(text):
        nonlocal line, col
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            end = n if end < 0 else end
            advance(source[i:end])
            i = end
            continue
        pos = (line, col)
        if ch.isdigit():
            m = _NUMBER_RE.match(source, i)
            lexeme = m.group()
            tokens.append(Token(NUMBER, lexeme, pos, float(lexeme), i))
        elif ch.isalpha() or ch in "_$":
            lexeme = _IDENT_RE.match(source, i).group()
            kind = KEYWORD if lexeme in KEYWORDS else IDENT
            tokens.append(Token(kind, lexeme, pos, None, i))
        elif ch in "\"'":
            lexeme, value = _scan_string(source, i, pos)
            tokens.append(Token(STRING, lexeme, pos, value, i))
        else:
            lexeme = next((p for p in PUNCTUATION if source.startswith(p, i)), None)
            if lexeme is None:
                raise LexError(pos, f"unknown character {ch!r}")
            tokens.append(Token(PUNCT, lexeme, pos, None, i))
        advance(lexeme)
        i += len(lexeme)
    tokens.append(Token(EOF, "", (line, col), None, n))
    return tokens


def _scan_string(source, start, pos):
    quote = source[start]
    out = []
    i = start + 1
    while i < len(source):
        ch = source[i]
        if ch == quote:
            return source[start:i + 1], "".join(out)
        if ch == "\n":
            break
        if ch == "\\":
            if i + 1 >= len(source):
                break
            esc = source[i + 1]
            if esc == "u":
                digits = source[i + 2:i + 6]
                if len(digits) != 4 or not all(c in "0123456789abcdefABCDEF" for c in digits):
                    raise LexError(pos, "malformed \\u escape in string literal")
                out.append(chr(int(digits, 16)))
                i += 6
                continue
            out.append(_ESCAPES.get(esc, esc))
            i += 2
            continue
        out.append(ch)
        i += 1
    raise LexError(pos, "unterminated string literal")

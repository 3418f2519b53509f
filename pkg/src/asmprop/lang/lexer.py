"""Tokenizer shared by the specification, formula, and scenario parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import SourceSpan
from .errors import ParseError

# Constructs that exist in the full modeling language but are outside the
# supported subset; seeing one yields a named diagnostic instead of a
# generic syntax error.
UNSUPPORTED_KEYWORDS = frozenset(
    {
        "seq", "endseq", "choose", "endchoose", "forall", "exist", "exists",
        "let", "endlet", "while", "extend", "abstract", "dynamic", "shared",
        "out", "local", "turbo", "iterate", "enditerate", "seqblock", "endseqblock",
    }
)


@dataclass(frozen=True)
class Token:
    type: str  # 'ident' | 'int' | 'sym' | 'eof'
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, self.line, self.column + max(len(self.text), 1) - 1)


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>//[^\n]*)
    | (?P<sym2>:=|->|!=|<=|>=|\.\.)
    | (?P<int>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<sym1>[{}()\[\]:;,|=<>+\-.!&/])
    """,
    re.VERBOSE,
)


def tokenize(text: str, start_line: int = 1) -> list[Token]:
    """Tokenize `text`, raising ParseError with position on a bad character."""
    tokens: list[Token] = []
    line = start_line
    line_start = 0
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            ch = text[pos]
            raise ParseError.single(
                "lexical-error", f"unexpected character {ch!r}", SourceSpan(line, col, line, col)
            )
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "ws":
            for i, ch in enumerate(tok_text):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "comment":
            pass
        else:
            col = pos - line_start + 1
            ttype = {"int": "int", "ident": "ident"}.get(kind, "sym")
            tokens.append(Token(ttype, tok_text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual expect/accept helpers."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at_eof(self) -> bool:
        return self.peek().type == "eof"

    def advance(self) -> Token:
        tok = self.peek()
        if tok.type != "eof":
            self.pos += 1
        return tok

    def accept(self, text: str) -> Token | None:
        tok = self.peek()
        if tok.type != "eof" and tok.text == text:
            return self.advance()
        return None

    def accept_type(self, ttype: str) -> Token | None:
        tok = self.peek()
        if tok.type == ttype:
            return self.advance()
        return None

    def expect(self, text: str, context: str | None = None) -> Token:
        tok = self.peek()
        if tok.text == text and tok.type != "eof":
            return self.advance()
        self.fail(f"expected '{text}'" + (f" {context}" if context else ""), tok)

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.type == "ident":
            if tok.text in UNSUPPORTED_KEYWORDS:
                self.fail_unsupported(tok)
            return self.advance()
        self.fail(f"expected {what}", tok)

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.type == "int":
            self.advance()
            return int(tok.text)
        self.fail("expected integer literal", tok)

    def fail(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        found = f"'{tok.text}'" if tok.type != "eof" else "end of input"
        raise ParseError.single("syntax-error", f"{message}, found {found}", tok.span)

    def fail_unsupported(self, tok: Token) -> None:
        raise ParseError.single(
            "unsupported-construct", f"unsupported construct: {tok.text}", tok.span
        )

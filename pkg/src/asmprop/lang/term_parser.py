"""Recursive-descent parsing of terms (expressions over the signature).

Precedence, loosest to tightest: iff, implies, or, and, not, comparison,
additive (+ -), mod, primary. Comparisons do not chain. There is no unary
minus; negative values only arise through binary minus.
"""

from __future__ import annotations

from .ast import Apply, Arith, BoolOp, Compare, Constant, Term
from .lexer import TokenStream

_COMPARE = {"=", "!=", "<", "<=", ">", ">="}


def parse_term(ts: TokenStream, reserved_heads: frozenset[str] = frozenset()) -> Term:
    """Parse a full term (iff precedence level)."""
    return _iff(ts, reserved_heads)


def parse_comparison_term(ts: TokenStream, reserved_heads: frozenset[str] = frozenset()) -> Term:
    """Parse a term at comparison level (no top-level boolean connectives)."""
    return _comparison(ts, reserved_heads)


def _iff(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _implies(ts, rh)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "iff":
            ts.advance()
            right = _implies(ts, rh)
            left = BoolOp("iff", (left, right), span=tok.span)
        else:
            return left


def _implies(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _or(ts, rh)
    tok = ts.peek()
    if tok.type == "ident" and tok.text == "implies":
        ts.advance()
        right = _implies(ts, rh)  # right-associative
        return BoolOp("implies", (left, right), span=tok.span)
    return left


def _or(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _and(ts, rh)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "or":
            ts.advance()
            left = BoolOp("or", (left, _and(ts, rh)), span=tok.span)
        else:
            return left


def _and(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _unary(ts, rh)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "and":
            ts.advance()
            left = BoolOp("and", (left, _unary(ts, rh)), span=tok.span)
        else:
            return left


def _unary(ts: TokenStream, rh: frozenset[str]) -> Term:
    tok = ts.peek()
    if tok.type == "ident" and tok.text == "not":
        ts.advance()
        return BoolOp("not", (_unary(ts, rh),), span=tok.span)
    return _comparison(ts, rh)


def _comparison(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _additive(ts, rh)
    tok = ts.peek()
    if tok.type == "sym" and tok.text in _COMPARE:
        ts.advance()
        right = _additive(ts, rh)
        after = ts.peek()
        if after.type == "sym" and after.text in _COMPARE:
            ts.fail("comparisons do not chain", after)
        return Compare(tok.text, left, right, span=tok.span)
    return left


def _additive(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _mult(ts, rh)
    while True:
        tok = ts.peek()
        if tok.type == "sym" and tok.text in ("+", "-"):
            ts.advance()
            left = Arith(tok.text, left, _mult(ts, rh), span=tok.span)
        else:
            return left


def _mult(ts: TokenStream, rh: frozenset[str]) -> Term:
    left = _primary(ts, rh)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "mod":
            ts.advance()
            left = Arith("mod", left, _primary(ts, rh), span=tok.span)
        else:
            return left


def _primary(ts: TokenStream, rh: frozenset[str]) -> Term:
    tok = ts.peek()
    if tok.type == "int":
        ts.advance()
        return Constant(int(tok.text), span=tok.span)
    if tok.type == "ident":
        if tok.text == "true":
            ts.advance()
            return Constant(True, span=tok.span)
        if tok.text == "false":
            ts.advance()
            return Constant(False, span=tok.span)
        if tok.text in ("and", "or", "not", "implies", "iff", "mod"):
            ts.fail("expected a term", tok)
        name = ts.expect_ident().text
        if ts.peek().text == "(" and ts.peek().type == "sym":
            if name.lower() in rh:
                ts.fail(f"temporal operator name '{name}' cannot be applied as a function here", tok)
            ts.advance()
            arg = _iff(ts, rh)
            ts.expect(")")
            return Apply(name, arg, span=tok.span)
        return Apply(name, None, span=tok.span)
    if tok.text == "(" and tok.type == "sym":
        ts.advance()
        inner = _iff(ts, rh)
        ts.expect(")")
        return inner
    ts.fail("expected a term", tok)

"""Parser for CTL/LTL property formulas.

Two surface styles are supported: the lowercase call style used when
properties are embedded in specifications (``ag(min = 59 implies ax(min = 0))``)
and, in lenient mode, an uppercase display style (``AG (min = 59 implies
AX (min = 0))``). Temporal operator names followed by ``(`` are reserved in
formula context, so functions named like an operator cannot be applied
inside a formula.

Boolean connectives above atoms are parsed as formula-level nodes; an atom
is a comparison, application, or constant. Parenthesized purely propositional
subterms are lifted to formula connectives so parsing is canonical.
"""

from __future__ import annotations

from ..diagnostics import Diagnostics
from .ast import (
    Atom,
    BINARY_TEMPORAL_OPS,
    BoolOp,
    Conn,
    CTL_OPS,
    Formula,
    Logic,
    LTL_OPS,
    Temporal,
    temporal_ops_used,
    Term,
)
from .errors import ParseError
from .lexer import TokenStream, tokenize
from .term_parser import parse_comparison_term

_CANON = {op.lower(): op for op in CTL_OPS + LTL_OPS}
RESERVED_FORMULA_HEADS = frozenset(_CANON)


def parse_property(text: str, logic: Logic, lenient: bool = True) -> Formula:
    """Parse a property in the given logic; mixing CTL and LTL operators fails."""
    ts = TokenStream(tokenize(text))
    formula = parse_formula(ts, lenient=lenient)
    if not ts.at_eof():
        ts.fail("unexpected input after formula")
    check_logic(formula, logic)
    return formula


def parse_formula(ts: TokenStream, lenient: bool = True) -> Formula:
    """Parse a formula from an open token stream (used for embedded properties)."""
    return _iff(ts, lenient)


def check_logic(formula: Formula, logic: Logic) -> None:
    """Raise a mixed-logic ParseError unless all operators belong to `logic`."""
    ops = temporal_ops_used(formula)
    ctl = sorted(ops & set(CTL_OPS))
    ltl = sorted(ops & set(LTL_OPS))
    if ctl and ltl:
        raise ParseError.single(
            "mixed-logic", f"CTL operators {ctl} mixed with LTL operators {ltl}"
        )
    wrong = ltl if logic is Logic.CTL else ctl
    if wrong:
        raise ParseError.single(
            "mixed-logic",
            f"{'LTL' if logic is Logic.CTL else 'CTL'} operator '{wrong[0]}' in a {logic.value} property",
        )


def _iff(ts: TokenStream, lenient: bool) -> Formula:
    left = _implies(ts, lenient)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "iff":
            ts.advance()
            left = Conn("iff", (left, _implies(ts, lenient)), span=tok.span)
        else:
            return left


def _implies(ts: TokenStream, lenient: bool) -> Formula:
    left = _or(ts, lenient)
    tok = ts.peek()
    if tok.type == "ident" and tok.text == "implies":
        ts.advance()
        return Conn("implies", (left, _implies(ts, lenient)), span=tok.span)
    return left


def _or(ts: TokenStream, lenient: bool) -> Formula:
    left = _and(ts, lenient)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "or":
            ts.advance()
            left = Conn("or", (left, _and(ts, lenient)), span=tok.span)
        else:
            return left


def _and(ts: TokenStream, lenient: bool) -> Formula:
    left = _unary(ts, lenient)
    while True:
        tok = ts.peek()
        if tok.type == "ident" and tok.text == "and":
            ts.advance()
            left = Conn("and", (left, _unary(ts, lenient)), span=tok.span)
        else:
            return left


def _unary(ts: TokenStream, lenient: bool) -> Formula:
    tok = ts.peek()
    if tok.type == "ident" and tok.text == "not":
        ts.advance()
        return Conn("not", (_unary(ts, lenient),), span=tok.span)
    return _primary(ts, lenient)


def _temporal_head(ts: TokenStream, lenient: bool) -> str | None:
    tok = ts.peek()
    nxt = ts.peek(1)
    if tok.type != "ident" or nxt.text != "(" or nxt.type != "sym":
        return None
    if lenient:
        return _CANON.get(tok.text.lower())
    return _CANON.get(tok.text) if tok.text in _CANON else None


def _primary(ts: TokenStream, lenient: bool) -> Formula:
    op = _temporal_head(ts, lenient)
    if op is not None:
        tok = ts.advance()
        ts.expect("(")
        first = _iff(ts, lenient)
        if op in BINARY_TEMPORAL_OPS:
            ts.expect(",", f"('{op}' takes two subformulas)")
            second = _iff(ts, lenient)
            ts.expect(")")
            return Temporal(op, (first, second), span=tok.span)
        ts.expect(")")
        return Temporal(op, (first,), span=tok.span)

    tok = ts.peek()
    if tok.text == "(" and tok.type == "sym":
        # Could be a parenthesized formula or a parenthesized arithmetic
        # subterm of an atom, e.g. "(min + 1) mod 60 = 0". Try the atom
        # reading first and fall back to a formula.
        save = ts.pos
        try:
            term = parse_comparison_term(ts, RESERVED_FORMULA_HEADS)
            return _lift(term)
        except ParseError:
            ts.pos = save
        ts.expect("(")
        inner = _iff(ts, lenient)
        ts.expect(")")
        return inner

    term = parse_comparison_term(ts, RESERVED_FORMULA_HEADS)
    return _lift(term)


def _lift(term: Term) -> Formula:
    """Lift top-level boolean connectives of a term into formula nodes."""
    if isinstance(term, BoolOp):
        return Conn(term.op, tuple(_lift(o) for o in term.operands), span=term.span)
    return Atom(term, span=getattr(term, "span", None))

"""Parser for the scenario language (set/step/check command sequences)."""

from __future__ import annotations

import re

from .ast import AvallaScenario, CheckCmd, Command, Constant, SetCmd, SourceSpan, StepCmd
from .errors import ParseError
from .lexer import TokenStream, tokenize
from .term_parser import parse_term

_SCENARIO_RE = re.compile(r"^\s*scenario\s+([A-Za-z_][A-Za-z0-9_]*)\s*$")
_LOAD_RE = re.compile(r"^\s*load\s+(\S+)\s*$")


def parse_avalla(text: str) -> AvallaScenario:
    """Parse scenario text; commands keep their source order."""
    lines = text.split("\n")
    idx = 0

    def next_content_line() -> tuple[int, str] | None:
        nonlocal idx
        while idx < len(lines):
            stripped = lines[idx].split("//", 1)[0].strip()
            if stripped:
                return idx, stripped
            idx += 1
        return None

    found = next_content_line()
    if found is None:
        raise ParseError.single("syntax-error", "expected 'scenario', found end of input")
    line_no, content = found
    m = _SCENARIO_RE.match(content)
    if m is None:
        raise ParseError.single(
            "syntax-error", "expected 'scenario <name>'", SourceSpan(line_no + 1, 1, line_no + 1, 1)
        )
    name = m.group(1)
    idx += 1

    found = next_content_line()
    if found is None:
        raise ParseError.single("syntax-error", "expected 'load <spec file>', found end of input")
    line_no, content = found
    m = _LOAD_RE.match(content)
    if m is None:
        raise ParseError.single(
            "syntax-error", "expected 'load <spec file>'", SourceSpan(line_no + 1, 1, line_no + 1, 1)
        )
    loaded_spec = m.group(1)
    idx += 1

    rest = "\n".join(lines[idx:])
    ts = TokenStream(tokenize(rest, start_line=idx + 1))
    commands: list[Command] = []
    while not ts.at_eof():
        commands.append(_command(ts))
    return AvallaScenario(name=name, loaded_spec=loaded_spec, commands=tuple(commands))


def _command(ts: TokenStream) -> Command:
    tok = ts.peek()
    if tok.type != "ident":
        ts.fail("expected a scenario command (set, step, or check)")
    if tok.text == "set":
        ts.advance()
        name_tok = ts.expect_ident("function name")
        ts.expect(":=")
        value = _constant(ts)
        ts.expect(";")
        return SetCmd(name_tok.text, value, span=name_tok.span)
    if tok.text == "step":
        ts.advance()
        ts.expect(";")
        return StepCmd(span=tok.span)
    if tok.text == "check":
        ts.advance()
        term = parse_term(ts)
        ts.expect(";")
        return CheckCmd(term, span=tok.span)
    raise ParseError.single("unknown-command", f"unknown scenario command: {tok.text}", tok.span)


def _constant(ts: TokenStream) -> Constant:
    tok = ts.peek()
    if tok.type == "int":
        ts.advance()
        return Constant(int(tok.text), span=tok.span)
    if tok.type == "ident" and tok.text in ("true", "false"):
        ts.advance()
        return Constant(tok.text == "true", span=tok.span)
    if tok.type == "ident":
        ts.advance()
        return Constant(tok.text, span=tok.span)
    ts.fail("expected a constant value", tok)

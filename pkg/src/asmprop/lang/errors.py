"""Parse-time error carrying structured diagnostics."""

from __future__ import annotations

from ..diagnostics import Diagnostic, Diagnostics, Severity
from .ast import SourceSpan


class ParseError(Exception):
    """Raised by the parsers; `.diagnostics` holds the positioned entries."""

    def __init__(self, diagnostics: Diagnostics):
        self.diagnostics = diagnostics
        first = diagnostics.entries[0] if diagnostics.entries else None
        msg = first.message if first else "parse error"
        if first is not None and first.span is not None:
            msg = f"{first.span}: {msg}"
        super().__init__(msg)

    @classmethod
    def single(cls, code: str, message: str, span: SourceSpan | None = None) -> "ParseError":
        diags = Diagnostics([Diagnostic(Severity.ERROR, code, message, span)])
        return cls(diags)

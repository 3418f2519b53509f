"""Structured diagnostics and their renderings.

Diagnostics are the feedback payload of the whole toolchain: parsers and the
type checker produce them, the CLI prints them for humans, and the assistant's
repair loop embeds the compact machine rendering into follow-up prompts.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .lang.ast import SourceSpan


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan | None = None

    def to_record(self) -> dict:
        rec = {"severity": self.severity.value, "code": self.code, "message": self.message}
        if self.span is not None:
            rec["span"] = {
                "line": self.span.line,
                "column": self.span.column,
                "end_line": self.span.end_line,
                "end_column": self.span.end_column,
            }
        return rec


@dataclass
class Diagnostics:
    """Ordered diagnostic list; empty means the subject was accepted."""

    entries: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        self.entries.append(Diagnostic(Severity.ERROR, code, message, span))

    def warning(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        self.entries.append(Diagnostic(Severity.WARNING, code, message, span))

    def extend(self, other: "Diagnostics") -> None:
        self.entries.extend(other.entries)

    @property
    def ok(self) -> bool:
        return not self.has_errors()

    def has_errors(self) -> bool:
        return any(d.severity is Severity.ERROR for d in self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_json(self) -> str:
        """Stable machine format, one record per entry."""
        return json.dumps([d.to_record() for d in self.entries])


def render_diagnostics(diagnostics: Diagnostics, audience: str = "human") -> str:
    """Render diagnostics as text.

    The ``agent`` audience gets a compact, deterministic, numbered fault list
    meant for prompt embedding; ``human`` gets source-annotated lines.
    Empty diagnostics render as the empty string.
    """
    if audience not in ("human", "agent"):
        raise ValueError(f"unknown audience: {audience!r}")
    if not diagnostics.entries:
        return ""
    lines = []
    if audience == "agent":
        for i, d in enumerate(diagnostics.entries, start=1):
            prefix = "E" if d.severity is Severity.ERROR else "W"
            lines.append(f"{prefix}{i} {d.message}")
    else:
        for d in diagnostics.entries:
            loc = f"{d.span}: " if d.span is not None else ""
            lines.append(f"{loc}{d.severity.value}[{d.code}]: {d.message}")
    return "\n".join(lines)

"""AST node types for the ASM subset, temporal formulas, and Avalla scenarios.

All nodes are frozen dataclasses. Source spans are attached for diagnostics
but excluded from equality and hashing, so two parses of equivalent text
compare equal structurally (the round-trip contract is on this equality).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

Value = Union[bool, int, str]  # str values are enumeration constants


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    end_line: int
    end_column: int

    def __str__(self) -> str:
        return f"line {self.line}, col {self.column}"


def _span_field():
    return field(default=None, compare=False, repr=False)


class Logic(enum.Enum):
    CTL = "CTL"
    LTL = "LTL"


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    """Base class for term nodes."""


@dataclass(frozen=True)
class Constant(Term):
    value: Value
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Apply(Term):
    """Function application; also covers bare identifiers (arg is None)."""

    name: str
    arg: Term | None = None
    span: SourceSpan | None = _span_field()


ARITH_OPS = ("+", "-", "mod")
COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("not", "and", "or", "implies", "iff")


@dataclass(frozen=True)
class Arith(Term):
    op: str  # one of ARITH_OPS
    left: Term
    right: Term
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Compare(Term):
    op: str  # one of COMPARE_OPS
    left: Term
    right: Term
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class BoolOp(Term):
    """Boolean connective over terms; `not` takes one operand, the rest two."""

    op: str  # one of BOOL_OPS
    operands: tuple[Term, ...]
    span: SourceSpan | None = _span_field()

    def __post_init__(self) -> None:
        want = 1 if self.op == "not" else 2
        if len(self.operands) != want:
            raise ValueError(f"'{self.op}' takes {want} operand(s)")


# ---------------------------------------------------------------------------
# Temporal formulas

CTL_OPS = ("AG", "AF", "AX", "EG", "EF", "EX", "AU", "EU")
LTL_OPS = ("G", "F", "X", "U")
BINARY_TEMPORAL_OPS = ("AU", "EU", "U")


@dataclass(frozen=True)
class Formula:
    """Base class for temporal formula nodes."""


@dataclass(frozen=True)
class Atom(Formula):
    """A Boolean-typed term embedded as an atomic proposition."""

    term: Term
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Conn(Formula):
    op: str  # one of BOOL_OPS
    operands: tuple[Formula, ...]
    span: SourceSpan | None = _span_field()

    def __post_init__(self) -> None:
        want = 1 if self.op == "not" else 2
        if len(self.operands) != want:
            raise ValueError(f"'{self.op}' takes {want} operand(s)")


@dataclass(frozen=True)
class Temporal(Formula):
    op: str  # one of CTL_OPS or LTL_OPS
    operands: tuple[Formula, ...]
    span: SourceSpan | None = _span_field()

    def __post_init__(self) -> None:
        want = 2 if self.op in BINARY_TEMPORAL_OPS else 1
        if len(self.operands) != want:
            raise ValueError(f"'{self.op}' takes {want} operand(s)")


def temporal_ops_used(formula: Formula) -> set[str]:
    """All temporal operator names occurring in the formula."""
    ops: set[str] = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Temporal):
            ops.add(node.op)
            stack.extend(node.operands)
        elif isinstance(node, Conn):
            stack.extend(node.operands)
    return ops


def formula_logic(formula: Formula) -> Logic | None:
    """Logic implied by the operators used; None if purely propositional.

    Raises ValueError when CTL and LTL operators are mixed.
    """
    ops = temporal_ops_used(formula)
    ctl = ops & set(CTL_OPS)
    ltl = ops & set(LTL_OPS)
    if ctl and ltl:
        raise ValueError(f"mixed CTL/LTL operators: {sorted(ctl)} with {sorted(ltl)}")
    if ctl:
        return Logic.CTL
    if ltl:
        return Logic.LTL
    return None


# ---------------------------------------------------------------------------
# Rules

@dataclass(frozen=True)
class RuleExpr:
    """Base class for rule expressions."""


@dataclass(frozen=True)
class UpdateRule(RuleExpr):
    target: Apply  # location term: function name plus optional argument
    value: Term
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class ParRule(RuleExpr):
    rules: tuple[RuleExpr, ...]
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class CondRule(RuleExpr):
    guard: Term
    then: RuleExpr
    otherwise: RuleExpr | None = None
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class MacroCall(RuleExpr):
    name: str
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class RuleDecl:
    name: str
    body: RuleExpr
    span: SourceSpan | None = _span_field()


# ---------------------------------------------------------------------------
# Declarations

class DomainKind(enum.Enum):
    RANGE = "integer-range"
    ENUM = "enumeration"
    BOOLEAN = "boolean-builtin"


BOOLEAN_DOMAIN = "Boolean"


@dataclass(frozen=True)
class DomainDecl:
    name: str
    kind: DomainKind
    lo: int | None = None
    hi: int | None = None
    values: tuple[str, ...] | None = None
    span: SourceSpan | None = _span_field()

    def __post_init__(self) -> None:
        if self.kind is DomainKind.RANGE:
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise ValueError(f"domain {self.name}: invalid range bounds")
        elif self.kind is DomainKind.ENUM:
            if not self.values or len(set(self.values)) != len(self.values):
                raise ValueError(f"domain {self.name}: enumeration values must be distinct and non-empty")

    def value_list(self) -> list[Value]:
        """Domain values in canonical order."""
        if self.kind is DomainKind.RANGE:
            return list(range(self.lo, self.hi + 1))
        if self.kind is DomainKind.ENUM:
            return list(self.values)
        return [False, True]

    def size(self) -> int:
        if self.kind is DomainKind.RANGE:
            return self.hi - self.lo + 1
        if self.kind is DomainKind.ENUM:
            return len(self.values)
        return 2

    def contains(self, value: Value) -> bool:
        if self.kind is DomainKind.RANGE:
            return isinstance(value, int) and not isinstance(value, bool) and self.lo <= value <= self.hi
        if self.kind is DomainKind.ENUM:
            return value in self.values
        return isinstance(value, bool)


BOOLEAN_DECL = DomainDecl(BOOLEAN_DOMAIN, DomainKind.BOOLEAN)


class FunctionKind(enum.Enum):
    MONITORED = "monitored"
    CONTROLLED = "controlled"
    STATIC = "static"
    DERIVED = "derived"


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    kind: FunctionKind
    result_domain: str
    arg_domain: str | None = None
    definition: Term | None = None  # static/derived defining term
    span: SourceSpan | None = _span_field()

    @property
    def arity(self) -> int:
        return 0 if self.arg_domain is None else 1


@dataclass
class Signature:
    """Typed symbol table: declared domains and functions, in declaration order."""

    domains: dict[str, DomainDecl] = field(default_factory=dict)
    functions: dict[str, FunctionDecl] = field(default_factory=dict)

    def domain(self, name: str) -> DomainDecl | None:
        if name == BOOLEAN_DOMAIN:
            return BOOLEAN_DECL
        return self.domains.get(name)

    def enum_values(self) -> dict[str, str]:
        """Map enumeration constant -> owning domain name."""
        out: dict[str, str] = {}
        for dom in self.domains.values():
            if dom.kind is DomainKind.ENUM:
                for v in dom.values:
                    out[v] = dom.name
        return out


# ---------------------------------------------------------------------------
# Specifications, properties, scenarios

class PropertyOrigin(enum.Enum):
    HAND_WRITTEN = "hand-written"
    AGENT_GENERATED = "agent-generated"
    COUNTEREXAMPLE_DERIVED = "counterexample-derived"


@dataclass(frozen=True)
class PropertyDecl:
    logic: Logic
    formula: Formula
    source_text: str = field(compare=False)
    origin: PropertyOrigin = field(default=PropertyOrigin.HAND_WRITTEN, compare=False)
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class InitDecl:
    function: str
    value: Constant
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class AsmSpecification:
    name: str
    imports: tuple[str, ...]
    signature: Signature
    macro_rules: tuple[RuleDecl, ...]
    main_rule: RuleDecl
    properties: tuple[PropertyDecl, ...]
    init: tuple[InitDecl, ...]
    init_name: str = "s0"


# Avalla scenario commands

@dataclass(frozen=True)
class SetCmd:
    function: str
    value: Constant
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class StepCmd:
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class CheckCmd:
    term: Term
    span: SourceSpan | None = _span_field()


Command = Union[SetCmd, StepCmd, CheckCmd]


@dataclass(frozen=True)
class AvallaScenario:
    name: str
    loaded_spec: str
    commands: tuple[Command, ...]
    # Loop marker for exported lasso traces; rendered as a comment, so it
    # does not survive a parse round trip and is excluded from equality.
    loop_start_step: int | None = field(default=None, compare=False)

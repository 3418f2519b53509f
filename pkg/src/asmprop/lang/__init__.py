"""Concrete syntax layer: parsers and printers for specs, formulas, scenarios."""

from .asm_parser import parse_asm
from .ast import (
    Apply,
    Arith,
    AsmSpecification,
    Atom,
    AvallaScenario,
    BoolOp,
    CheckCmd,
    Compare,
    CondRule,
    Conn,
    Constant,
    DomainDecl,
    DomainKind,
    Formula,
    FunctionDecl,
    FunctionKind,
    InitDecl,
    Logic,
    MacroCall,
    ParRule,
    PropertyDecl,
    PropertyOrigin,
    RuleDecl,
    RuleExpr,
    SetCmd,
    Signature,
    SourceSpan,
    StepCmd,
    Temporal,
    Term,
    UpdateRule,
    Value,
    formula_logic,
    temporal_ops_used,
)
from .avalla_parser import parse_avalla
from .errors import ParseError
from .formula_parser import parse_property
from .printer import print_asm, print_avalla, print_constant, print_formula, print_term

__all__ = [
    "Apply",
    "Arith",
    "AsmSpecification",
    "Atom",
    "AvallaScenario",
    "BoolOp",
    "CheckCmd",
    "Compare",
    "CondRule",
    "Conn",
    "Constant",
    "DomainDecl",
    "DomainKind",
    "Formula",
    "FunctionDecl",
    "FunctionKind",
    "InitDecl",
    "Logic",
    "MacroCall",
    "ParRule",
    "ParseError",
    "PropertyDecl",
    "PropertyOrigin",
    "RuleDecl",
    "RuleExpr",
    "SetCmd",
    "Signature",
    "SourceSpan",
    "StepCmd",
    "Temporal",
    "Term",
    "UpdateRule",
    "Value",
    "formula_logic",
    "parse_asm",
    "parse_avalla",
    "parse_property",
    "print_asm",
    "print_avalla",
    "print_constant",
    "print_formula",
    "print_term",
    "temporal_ops_used",
]

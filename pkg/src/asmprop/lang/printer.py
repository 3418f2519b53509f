"""Canonical text renderings of specs, formulas, terms, and scenarios.

Printing is deterministic and minimal-parenthesis; `parse(print(ast))` yields
a structurally equal AST. Comments and original layout are not preserved.
"""

from __future__ import annotations

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
    DomainKind,
    Formula,
    MacroCall,
    ParRule,
    RuleDecl,
    RuleExpr,
    SetCmd,
    StepCmd,
    Temporal,
    Term,
    UpdateRule,
)

_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_NOT = 5
_PREC_CMP = 6
_PREC_ADD = 7
_PREC_MOD = 8
_PREC_ATOM = 100

_BOOL_PREC = {"iff": _PREC_IFF, "implies": _PREC_IMPLIES, "or": _PREC_OR, "and": _PREC_AND, "not": _PREC_NOT}


def print_constant(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def print_term(term: Term) -> str:
    text, _ = _term(term)
    return text


def _wrap(text: str, prec: int, minimum: int) -> str:
    return f"({text})" if prec < minimum else text


def _term(term: Term) -> tuple[str, int]:
    if isinstance(term, Constant):
        return print_constant(term.value), _PREC_ATOM
    if isinstance(term, Apply):
        if term.arg is None:
            return term.name, _PREC_ATOM
        return f"{term.name}({print_term(term.arg)})", _PREC_ATOM
    if isinstance(term, Arith):
        prec = _PREC_MOD if term.op == "mod" else _PREC_ADD
        lt, lp = _term(term.left)
        rt, rp = _term(term.right)
        return f"{_wrap(lt, lp, prec)} {term.op} {_wrap(rt, rp, prec + 1)}", prec
    if isinstance(term, Compare):
        lt, lp = _term(term.left)
        rt, rp = _term(term.right)
        return f"{_wrap(lt, lp, _PREC_CMP + 1)} {term.op} {_wrap(rt, rp, _PREC_CMP + 1)}", _PREC_CMP
    if isinstance(term, BoolOp):
        prec = _BOOL_PREC[term.op]
        if term.op == "not":
            ot, op_ = _term(term.operands[0])
            return f"not {_wrap(ot, op_, _PREC_CMP)}", prec
        lt, lp = _term(term.operands[0])
        rt, rp = _term(term.operands[1])
        if term.op == "implies":  # right-associative
            return f"{_wrap(lt, lp, prec + 1)} implies {_wrap(rt, rp, prec)}", prec
        return f"{_wrap(lt, lp, prec)} {term.op} {_wrap(rt, rp, prec + 1)}", prec
    raise TypeError(f"not a term: {term!r}")


def print_formula(formula: Formula, style: str = "uppercase") -> str:
    """Render a formula; `style` is 'uppercase' or 'call' (lowercase call style)."""
    if style not in ("uppercase", "call"):
        raise ValueError(f"unknown formula style: {style!r}")
    text, _ = _formula(formula, style)
    return text


def _formula(f: Formula, style: str) -> tuple[str, int]:
    if isinstance(f, Atom):
        return print_term(f.term), _PREC_ATOM
    if isinstance(f, Conn):
        prec = _BOOL_PREC[f.op]
        if f.op == "not":
            ot, op_ = _formula(f.operands[0], style)
            return f"not {_wrap(ot, op_, _PREC_CMP)}", prec
        lt, lp = _formula(f.operands[0], style)
        rt, rp = _formula(f.operands[1], style)
        if f.op == "implies":
            return f"{_wrap(lt, lp, prec + 1)} implies {_wrap(rt, rp, prec)}", prec
        return f"{_wrap(lt, lp, prec)} {f.op} {_wrap(rt, rp, prec + 1)}", prec
    if isinstance(f, Temporal):
        name = f.op if style == "uppercase" else f.op.lower()
        args = ", ".join(_formula(o, style)[0] for o in f.operands)
        return f"{name}({args})", _PREC_ATOM
    raise TypeError(f"not a formula: {f!r}")


def _rule(rule: RuleExpr, indent: int) -> list[str]:
    pad = "    " * indent
    if isinstance(rule, UpdateRule):
        return [f"{pad}{print_term(rule.target)} := {print_term(rule.value)}"]
    if isinstance(rule, MacroCall):
        return [f"{pad}{rule.name}[]"]
    if isinstance(rule, ParRule):
        lines = [f"{pad}par"]
        for r in rule.rules:
            lines.extend(_rule(r, indent + 1))
        lines.append(f"{pad}endpar")
        return lines
    if isinstance(rule, CondRule):
        lines = [f"{pad}if {print_term(rule.guard)} then"]
        lines.extend(_rule(rule.then, indent + 1))
        if rule.otherwise is not None:
            lines.append(f"{pad}else")
            lines.extend(_rule(rule.otherwise, indent + 1))
        lines.append(f"{pad}endif")
        return lines
    raise TypeError(f"not a rule: {rule!r}")


def _rule_decl(kind: str, decl: RuleDecl) -> list[str]:
    lines = [f"    {kind} rule {decl.name} ="]
    lines.extend(_rule(decl.body, 2))
    return lines


def print_asm(spec: AsmSpecification) -> str:
    lines = [f"asm {spec.name}"]
    for imp in spec.imports:
        lines.append(f"import {imp}")
    lines.append("")
    lines.append("signature:")
    for dom in spec.signature.domains.values():
        if dom.kind is DomainKind.RANGE:
            lines.append(f"    domain {dom.name} subsetof Integer")
        elif dom.kind is DomainKind.ENUM:
            values = " | ".join(dom.values)
            lines.append(f"    enum domain {dom.name} = {{{values}}}")
    for fn in spec.signature.functions.values():
        if fn.arg_domain is None:
            lines.append(f"    {fn.kind.value} {fn.name}: {fn.result_domain}")
        else:
            lines.append(f"    {fn.kind.value} {fn.name}: {fn.arg_domain} -> {fn.result_domain}")
    lines.append("")
    lines.append("definitions:")
    for dom in spec.signature.domains.values():
        if dom.kind is DomainKind.RANGE:
            lines.append(f"    domain {dom.name} = {{{dom.lo} : {dom.hi}}}")
    for fn in spec.signature.functions.values():
        if fn.definition is not None:
            lines.append(f"    function {fn.name} = {print_term(fn.definition)}")
    for macro in spec.macro_rules:
        lines.append("")
        lines.extend(_rule_decl("macro", macro))
    lines.append("")
    lines.extend(_rule_decl("main", spec.main_rule))
    if spec.properties:
        lines.append("")
        for prop in spec.properties:
            keyword = "CTLSPEC" if prop.logic.value == "CTL" else "LTLSPEC"
            lines.append(f"    {keyword} {print_formula(prop.formula, style='call')}")
    lines.append("")
    lines.append(f"default init {spec.init_name}:")
    for entry in spec.init:
        lines.append(f"    function {entry.function} = {print_constant(entry.value.value)}")
    lines.append("")
    return "\n".join(lines)


def print_avalla(scenario: AvallaScenario) -> str:
    lines = [f"scenario {scenario.name}", f"load {scenario.loaded_spec}"]
    for cmd in scenario.commands:
        if isinstance(cmd, SetCmd):
            lines.append(f"set {cmd.function} := {print_constant(cmd.value.value)};")
        elif isinstance(cmd, StepCmd):
            lines.append("step;")
        elif isinstance(cmd, CheckCmd):
            lines.append(f"check {print_term(cmd.term)};")
        else:
            raise TypeError(f"not a scenario command: {cmd!r}")
    if scenario.loop_start_step is not None:
        lines.append(f"// loop starts at step {scenario.loop_start_step}")
    lines.append("")
    return "\n".join(lines)

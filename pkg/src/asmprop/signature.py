"""Signature extraction, name resolution, and type checking.

Checks terms, formulas, rules, and scenarios against a specification's
signature, producing the machine-readable diagnostics that feed both human
output and the assistant's repair loop. Arithmetic is exact machine-integer
arithmetic; domain membership is a runtime check, not a subtyping rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostics
from .diagnostics import render_diagnostics  # re-exported  # noqa: F401
from .lang.ast import (
    Apply,
    Arith,
    AsmSpecification,
    Atom,
    AvallaScenario,
    BOOLEAN_DOMAIN,
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
    Logic,
    MacroCall,
    ParRule,
    RuleExpr,
    SetCmd,
    Signature,
    Temporal,
    Term,
    UpdateRule,
)
from .lang.printer import print_term

# Internal type tags: "bool", ("int", domain-or-None), ("enum", domain).
_BOOL = "bool"


class SignatureError(Exception):
    """Signature-level fault (duplicate symbol, dangling domain reference)."""

    def __init__(self, diagnostics: Diagnostics):
        self.diagnostics = diagnostics
        first = diagnostics.entries[0].message if diagnostics.entries else "signature error"
        super().__init__(first)


@dataclass(frozen=True)
class TypedFormula:
    """A formula whose atoms all resolved and checked as Boolean."""

    formula: Formula
    logic: Logic
    bindings: dict[str, FunctionDecl] = field(compare=False)


def extract_signature(spec: AsmSpecification) -> Signature:
    """Build the complete symbol table, including the builtin Boolean domain.

    Validates name uniqueness, domain references, and static/derived
    definitions; raises SignatureError on faults.
    """
    diags = Diagnostics()
    sig = Signature()
    sig.domains[BOOLEAN_DOMAIN] = DomainDecl(BOOLEAN_DOMAIN, DomainKind.BOOLEAN)
    for dom in spec.signature.domains.values():
        if dom.name in sig.domains:
            diags.error("duplicate-symbol", f"domain '{dom.name}' declared twice", dom.span)
            continue
        sig.domains[dom.name] = dom
    enum_values: dict[str, str] = {}
    for dom in spec.signature.domains.values():
        if dom.kind is DomainKind.ENUM:
            for v in dom.values:
                if v in enum_values:
                    diags.error(
                        "duplicate-symbol",
                        f"enumeration value '{v}' appears in both '{enum_values[v]}' and '{dom.name}'",
                        dom.span,
                    )
                enum_values[v] = dom.name
    for fn in spec.signature.functions.values():
        if fn.name in sig.functions or fn.name in sig.domains or fn.name in enum_values:
            diags.error("duplicate-symbol", f"name '{fn.name}' declared twice", fn.span)
            continue
        for dom_name in filter(None, (fn.arg_domain, fn.result_domain)):
            if dom_name != BOOLEAN_DOMAIN and dom_name not in sig.domains:
                diags.error(
                    "undeclared-domain",
                    f"function '{fn.name}' references undeclared domain '{dom_name}'",
                    fn.span,
                )
        sig.functions[fn.name] = fn
    if diags.has_errors():
        raise SignatureError(diags)
    _check_definitions(sig, diags)
    if diags.has_errors():
        raise SignatureError(diags)
    return sig


def _check_definitions(sig: Signature, diags: Diagnostics) -> None:
    """Static definitions must be constant; derived ones signature-only."""
    for fn in sig.functions.values():
        if fn.definition is None:
            continue
        names = _applied_names(fn.definition)
        enum_values = sig.enum_values()
        for name in names:
            if name in enum_values:
                continue
            target = sig.functions.get(name)
            if target is None:
                diags.error(
                    "unknown-symbol",
                    f"definition of '{fn.name}' references unknown symbol '{name}'",
                    fn.span,
                )
            elif fn.kind is FunctionKind.STATIC:
                diags.error(
                    "invalid-definition",
                    f"static function '{fn.name}' must have a constant definition, found '{name}'",
                    fn.span,
                )
            elif target.kind is FunctionKind.DERIVED:
                diags.error(
                    "invalid-definition",
                    f"derived function '{fn.name}' may not reference derived function '{name}'",
                    fn.span,
                )


def _applied_names(term: Term) -> set[str]:
    names: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Apply):
            names.add(t.name)
            if t.arg is not None:
                stack.append(t.arg)
        elif isinstance(t, (Arith, Compare)):
            stack.extend((t.left, t.right))
        elif isinstance(t, BoolOp):
            stack.extend(t.operands)
    return names


def resolve_term(term: Term, sig: Signature) -> Term:
    """Rewrite enumeration constants to Constant nodes and inline derived
    and static function definitions at use sites."""
    enum_values = sig.enum_values()

    def go(t: Term) -> Term:
        if isinstance(t, Apply):
            if t.arg is None and t.name in enum_values:
                return Constant(t.name, span=t.span)
            fn = sig.functions.get(t.name)
            if fn is not None and fn.definition is not None:
                return go(fn.definition)
            if t.arg is not None:
                return Apply(t.name, go(t.arg), span=t.span)
            return t
        if isinstance(t, Arith):
            return Arith(t.op, go(t.left), go(t.right), span=t.span)
        if isinstance(t, Compare):
            return Compare(t.op, go(t.left), go(t.right), span=t.span)
        if isinstance(t, BoolOp):
            return BoolOp(t.op, tuple(go(o) for o in t.operands), span=t.span)
        return t

    return go(term)


# ---------------------------------------------------------------------------
# Term typing

def _levenshtein(a: str, b: str) -> int:
    if abs(len(a) - len(b)) > 2:
        return 3
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _nearest(name: str, candidates) -> str | None:
    best = min(
        ((d, c) for c in candidates if (d := _levenshtein(name, c)) <= 2),
        default=None,
    )
    return best[1] if best else None


def _describe(ty) -> str:
    if ty == _BOOL:
        return "Boolean"
    if ty[0] == "int":
        return "integer" if ty[1] is None else f"integer ({ty[1]})"
    return f"enumeration {ty[1]}"


def _unknown_symbol(name: str, sig: Signature, diags: Diagnostics, span) -> None:
    candidates = list(sig.functions) + list(sig.enum_values())
    nearest = _nearest(name, candidates)
    hint = f" (did you mean '{nearest}'?)" if nearest else ""
    declared = ", ".join(sig.functions)
    diags.error(
        "unknown-symbol",
        f"unknown symbol '{name}'{hint}; declared functions: {declared}",
        span,
    )


def _domain_type(sig: Signature, domain_name: str):
    dom = sig.domain(domain_name)
    if dom is None:
        return None
    if dom.kind is DomainKind.BOOLEAN:
        return _BOOL
    if dom.kind is DomainKind.RANGE:
        return ("int", dom.name)
    return ("enum", dom.name)


def type_of_term(term: Term, sig: Signature, diags: Diagnostics):
    """Infer a term's type, appending one diagnostic per independent fault.

    Returns None when the type could not be established (fault recorded).
    """
    if isinstance(term, Constant):
        if isinstance(term.value, bool):
            return _BOOL
        if isinstance(term.value, int):
            return ("int", None)
        owner = sig.enum_values().get(term.value)
        if owner is None:
            _unknown_symbol(term.value, sig, diags, term.span)
            return None
        return ("enum", owner)
    if isinstance(term, Apply):
        if term.arg is None and term.name in sig.enum_values():
            return ("enum", sig.enum_values()[term.name])
        fn = sig.functions.get(term.name)
        if fn is None:
            _unknown_symbol(term.name, sig, diags, term.span)
            if term.arg is not None:
                type_of_term(term.arg, sig, diags)
            return None
        if fn.arity == 0 and term.arg is not None:
            diags.error(
                "arity-mismatch",
                f"function '{term.name}' takes no argument",
                term.span,
            )
            type_of_term(term.arg, sig, diags)
        elif fn.arity == 1:
            if term.arg is None:
                diags.error(
                    "arity-mismatch",
                    f"function '{term.name}' needs an argument in {fn.arg_domain}",
                    term.span,
                )
            else:
                arg_ty = type_of_term(term.arg, sig, diags)
                want = _domain_type(sig, fn.arg_domain)
                if arg_ty is not None and want is not None and not _compatible(arg_ty, want):
                    diags.error(
                        "type-mismatch",
                        f"argument of '{term.name}' has type {_describe(arg_ty)}, expected {_describe(want)}",
                        term.span,
                    )
                elif isinstance(term.arg, Constant):
                    dom = sig.domain(fn.arg_domain)
                    if dom is not None and not dom.contains(term.arg.value):
                        diags.error(
                            "value-out-of-domain",
                            f"argument {term.arg.value} of '{term.name}' is not in {_domain_text(dom)}",
                            term.span,
                        )
        return _domain_type(sig, fn.result_domain)
    if isinstance(term, Arith):
        for side in (term.left, term.right):
            ty = type_of_term(side, sig, diags)
            if ty is not None and (ty == _BOOL or ty[0] == "enum"):
                diags.error(
                    "type-mismatch",
                    f"arithmetic '{term.op}' needs integer operands, got {_describe(ty)}",
                    term.span,
                )
        return ("int", None)
    if isinstance(term, Compare):
        lt = type_of_term(term.left, sig, diags)
        rt = type_of_term(term.right, sig, diags)
        if lt is not None and rt is not None:
            if term.op in ("<", "<=", ">", ">="):
                for ty in (lt, rt):
                    if ty == _BOOL or ty[0] == "enum":
                        diags.error(
                            "type-mismatch",
                            f"ordering '{term.op}' needs integer operands, got {_describe(ty)}",
                            term.span,
                        )
            elif not _compatible(lt, rt):
                diags.error(
                    "type-mismatch",
                    f"type mismatch: {_describe(lt)} vs. {_describe(rt)}",
                    term.span,
                )
        return _BOOL
    if isinstance(term, BoolOp):
        for op in term.operands:
            ty = type_of_term(op, sig, diags)
            if ty is not None and ty != _BOOL:
                diags.error(
                    "type-mismatch",
                    f"'{term.op}' needs Boolean operands, got {_describe(ty)}",
                    term.span,
                )
        return _BOOL
    raise TypeError(f"not a term: {term!r}")


def _compatible(a, b) -> bool:
    if a == _BOOL or b == _BOOL:
        return a == b
    if a[0] == "int" and b[0] == "int":
        return True
    return a == b  # enumerations must share the domain


def check_boolean_term(term: Term, sig: Signature) -> Diagnostics:
    diags = Diagnostics()
    ty = type_of_term(term, sig, diags)
    if ty is not None and ty != _BOOL:
        diags.error(
            "non-boolean-term",
            f"term '{print_term(term)}' has type {_describe(ty)}, expected Boolean",
            getattr(term, "span", None),
        )
    return diags


# ---------------------------------------------------------------------------
# Formula and spec checking

def typecheck_formula(
    formula: Formula, sig: Signature, logic: Logic | None = None
) -> TypedFormula | Diagnostics:
    """Type-check a formula; returns a TypedFormula or the fault list."""
    diags = Diagnostics()
    used: dict[str, FunctionDecl] = {}

    def visit(f: Formula) -> None:
        if isinstance(f, Atom):
            ty = type_of_term(f.term, sig, diags)
            if ty is not None and ty != _BOOL:
                diags.error(
                    "non-boolean-atom",
                    f"atom '{print_term(f.term)}' has type {_describe(ty)}, expected Boolean",
                    f.span,
                )
            for name in _applied_names(f.term):
                fn = sig.functions.get(name)
                if fn is not None:
                    used[name] = fn
        elif isinstance(f, (Conn, Temporal)):
            for op in f.operands:
                visit(op)

    visit(formula)
    if diags.has_errors():
        return diags
    if logic is None:
        from .lang.ast import formula_logic

        logic = formula_logic(formula) or Logic.CTL
    return TypedFormula(formula=formula, logic=logic, bindings=used)


def typecheck_spec(spec: AsmSpecification, include_properties: bool = True) -> Diagnostics:
    """Check rules, init values, macro resolution, and embedded properties."""
    diags = Diagnostics()
    try:
        sig = extract_signature(spec)
    except SignatureError as exc:
        return exc.diagnostics

    macros = {m.name: m for m in spec.macro_rules}
    _check_macro_cycles(spec, macros, diags)

    seen_init: set[str] = set()
    for entry in spec.init:
        fn = sig.functions.get(entry.function)
        if fn is None:
            diags.error(
                "init-unknown-function",
                f"init names undeclared function '{entry.function}'",
                entry.span,
            )
            continue
        if fn.kind is not FunctionKind.CONTROLLED:
            diags.error(
                "init-not-controlled",
                f"init entry for {fn.kind.value} function '{entry.function}'; only controlled functions take init values",
                entry.span,
            )
            continue
        if entry.function in seen_init:
            diags.error(
                "duplicate-init",
                f"init gives '{entry.function}' two values",
                entry.span,
            )
        seen_init.add(entry.function)
        dom = sig.domain(fn.result_domain)
        if dom is not None and not dom.contains(entry.value.value):
            diags.error(
                "value-out-of-domain",
                f"init value {entry.value.value} for '{entry.function}' is not in {_domain_text(dom)}",
                entry.span,
            )

    for decl in list(spec.macro_rules) + [spec.main_rule]:
        _check_rule(decl.body, sig, macros, diags)

    if include_properties:
        for i, prop in enumerate(spec.properties):
            result = typecheck_formula(prop.formula, sig, prop.logic)
            if isinstance(result, Diagnostics):
                for d in result.entries:
                    diags.entries.append(
                        type(d)(d.severity, d.code, f"property {i + 1}: {d.message}", d.span)
                    )
    return diags


def _domain_text(dom: DomainDecl) -> str:
    if dom.kind is DomainKind.RANGE:
        return f"{dom.name} = {{{dom.lo} : {dom.hi}}}"
    if dom.kind is DomainKind.ENUM:
        return f"{dom.name} = {{{' | '.join(dom.values)}}}"
    return dom.name


def _check_macro_cycles(spec: AsmSpecification, macros, diags: Diagnostics) -> None:
    def calls(rule: RuleExpr) -> set[str]:
        if isinstance(rule, MacroCall):
            return {rule.name}
        if isinstance(rule, ParRule):
            out = set()
            for r in rule.rules:
                out |= calls(r)
            return out
        if isinstance(rule, CondRule):
            out = calls(rule.then)
            if rule.otherwise is not None:
                out |= calls(rule.otherwise)
            return out
        return set()

    graph = {name: calls(decl.body) & set(macros) for name, decl in macros.items()}
    state: dict[str, int] = {}  # 1 visiting, 2 done

    def dfs(node: str) -> bool:
        state[node] = 1
        for nxt in graph.get(node, ()):
            if state.get(nxt) == 1:
                return True
            if state.get(nxt) is None and dfs(nxt):
                return True
        state[node] = 2
        return False

    for name in macros:
        if state.get(name) is None and dfs(name):
            diags.error("macro-cycle", f"macro rule '{name}' participates in a recursive cycle")
            return


def _check_rule(rule: RuleExpr, sig: Signature, macros, diags: Diagnostics) -> None:
    if isinstance(rule, UpdateRule):
        fn = sig.functions.get(rule.target.name)
        if fn is None:
            _unknown_symbol(rule.target.name, sig, diags, rule.span)
            return
        if fn.kind is not FunctionKind.CONTROLLED:
            code = "update-to-monitored" if fn.kind is FunctionKind.MONITORED else "update-to-static"
            diags.error(
                code,
                f"update target '{rule.target.name}' is a {fn.kind.value} function; only controlled functions can be updated",
                rule.span,
            )
        if fn is not None and fn.arity == 1 and rule.target.arg is None:
            diags.error(
                "arity-mismatch",
                f"update to unary function '{fn.name}' needs an argument",
                rule.span,
            )
        if rule.target.arg is not None:
            if fn.arity == 0:
                diags.error(
                    "arity-mismatch", f"function '{fn.name}' takes no argument", rule.span
                )
            else:
                arg_ty = type_of_term(rule.target.arg, sig, diags)
                want = _domain_type(sig, fn.arg_domain)
                if arg_ty is not None and want is not None and not _compatible(arg_ty, want):
                    diags.error(
                        "type-mismatch",
                        f"argument of '{fn.name}' has type {_describe(arg_ty)}, expected {_describe(want)}",
                        rule.span,
                    )
                elif isinstance(rule.target.arg, Constant):
                    dom = sig.domain(fn.arg_domain)
                    if dom is not None and not dom.contains(rule.target.arg.value):
                        diags.error(
                            "value-out-of-domain",
                            f"argument {rule.target.arg.value} of '{fn.name}' is not in {_domain_text(dom)}",
                            rule.span,
                        )
        value_ty = type_of_term(rule.value, sig, diags)
        want = _domain_type(sig, fn.result_domain)
        if value_ty is not None and want is not None and not _compatible(value_ty, want):
            diags.error(
                "type-mismatch",
                f"update of '{fn.name}' assigns {_describe(value_ty)}, expected {_describe(want)}",
                rule.span,
            )
    elif isinstance(rule, ParRule):
        for r in rule.rules:
            _check_rule(r, sig, macros, diags)
    elif isinstance(rule, CondRule):
        guard_ty = type_of_term(rule.guard, sig, diags)
        if guard_ty is not None and guard_ty != _BOOL:
            diags.error(
                "type-mismatch",
                f"rule guard '{print_term(rule.guard)}' has type {_describe(guard_ty)}, expected Boolean",
                rule.span,
            )
        _check_rule(rule.then, sig, macros, diags)
        if rule.otherwise is not None:
            _check_rule(rule.otherwise, sig, macros, diags)
    elif isinstance(rule, MacroCall):
        if rule.name not in macros:
            diags.error("unknown-macro", f"call to undeclared macro rule '{rule.name}'", rule.span)


def typecheck_scenario(scenario: AvallaScenario, sig: Signature) -> Diagnostics:
    """Check set targets (monitored, in domain) and check terms (Boolean)."""
    diags = Diagnostics()
    for i, cmd in enumerate(scenario.commands):
        if isinstance(cmd, SetCmd):
            fn = sig.functions.get(cmd.function)
            if fn is None:
                _unknown_symbol(cmd.function, sig, diags, cmd.span)
                continue
            if fn.kind is not FunctionKind.MONITORED:
                diags.error(
                    "set-to-controlled",
                    f"command {i + 1}: set targets {fn.kind.value} function '{cmd.function}'; only monitored functions can be set",
                    cmd.span,
                )
                continue
            if fn.arity != 0:
                diags.error(
                    "set-unary-unsupported",
                    f"command {i + 1}: set cannot address unary function '{cmd.function}'",
                    cmd.span,
                )
                continue
            dom = sig.domain(fn.result_domain)
            if dom is not None and not dom.contains(cmd.value.value):
                diags.error(
                    "set-out-of-domain",
                    f"command {i + 1}: value {cmd.value.value} for '{cmd.function}' is not in {_domain_text(dom)}",
                    cmd.span,
                )
        elif isinstance(cmd, CheckCmd):
            sub = check_boolean_term(cmd.term, sig)
            for d in sub.entries:
                diags.entries.append(
                    type(d)(d.severity, d.code, f"command {i + 1}: {d.message}", d.span)
                )
    return diags


def signature_summary(sig: Signature) -> str:
    """One-screen deterministic summary used in prompts and logs."""
    domains = [
        _domain_text(d) for d in sig.domains.values() if d.kind is not DomainKind.BOOLEAN
    ]
    functions = []
    for fn in sig.functions.values():
        if fn.arg_domain is None:
            functions.append(f"{fn.kind.value} {fn.name}: {fn.result_domain}")
        else:
            functions.append(f"{fn.kind.value} {fn.name}: {fn.arg_domain} -> {fn.result_domain}")
    return "domains: " + "; ".join(domains) + "\nfunctions: " + "; ".join(functions)

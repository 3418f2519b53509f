"""Parser for the supported subset of the ASM modeling language.

Supported constructs: asm header, imports (recorded, semantically ignored),
integer-range domains declared ``subsetof Integer`` and defined ``{lo : hi}``,
enumeration domains, monitored/controlled/static/derived functions of arity
at most one, ``par``, ``if-then[-else]-endif``, update rules, zero-parameter
macro rules called ``name[]``, embedded CTLSPEC/LTLSPEC properties, and a
``default init`` section with constant initializers. Everything else in the
full language is rejected with a named unsupported-construct diagnostic.
"""

from __future__ import annotations

from .ast import (
    Apply,
    AsmSpecification,
    Constant,
    CondRule,
    DomainDecl,
    DomainKind,
    FunctionDecl,
    FunctionKind,
    InitDecl,
    Logic,
    MacroCall,
    ParRule,
    PropertyDecl,
    RuleDecl,
    RuleExpr,
    Signature,
    UpdateRule,
    BOOLEAN_DOMAIN,
)
from .errors import ParseError
from .formula_parser import check_logic, parse_formula
from .lexer import Token, TokenStream, tokenize, UNSUPPORTED_KEYWORDS
from .printer import print_formula
from .term_parser import parse_term

_FUNCTION_KINDS = {k.value: k for k in FunctionKind}
_UNBOUNDED_DOMAINS = {"Integer", "Natural", "Real", "String", "Char", "Complex"}


def parse_asm(text: str) -> AsmSpecification:
    """Parse specification text, raising ParseError with positions on failure."""
    return _AsmParser(TokenStream(tokenize(text))).parse()


class _AsmParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts
        self.signature = Signature()
        self.abstract_domains: dict[str, Token] = {}  # declared, awaiting a range definition
        self.macro_rules: list[RuleDecl] = []
        self.main_rule: RuleDecl | None = None
        self.properties: list[PropertyDecl] = []
        self.init: list[InitDecl] = []
        self.init_name = "s0"
        self.static_defs: dict[str, object] = {}

    # -- declarations ------------------------------------------------------

    def parse(self) -> AsmSpecification:
        ts = self.ts
        ts.expect("asm")
        name = ts.expect_ident("specification name").text
        imports = []
        while ts.peek().text == "import" and ts.peek().type == "ident":
            imports.append(self._import())
        ts.expect("signature")
        ts.expect(":")
        while not self._at_section("definitions"):
            self._signature_item()
        ts.expect("definitions")
        ts.expect(":")
        while not self._at_section("default") and not ts.at_eof():
            self._definitions_item()
        if ts.accept("default"):
            self._init_section()
        if not ts.at_eof():
            ts.fail("unexpected input after specification")
        self._finish_validation()
        return AsmSpecification(
            name=name,
            imports=tuple(imports),
            signature=self.signature,
            macro_rules=tuple(self.macro_rules),
            main_rule=self.main_rule,
            properties=tuple(self.properties),
            init=tuple(self.init),
            init_name=self.init_name,
        )

    def _import(self) -> str:
        tok = self.ts.expect("import")
        parts = []
        while not self.ts.at_eof() and self.ts.peek().line == tok.line:
            parts.append(self.ts.advance().text)
        if not parts:
            self.ts.fail("expected import target", tok)
        return "".join(parts)

    def _at_section(self, keyword: str) -> bool:
        tok = self.ts.peek()
        return tok.type == "ident" and tok.text == keyword

    def _declare_domain(self, decl: DomainDecl, tok: Token) -> None:
        if decl.name in self.signature.domains or decl.name == BOOLEAN_DOMAIN:
            raise ParseError.single(
                "duplicate-declaration", f"domain '{decl.name}' declared twice", tok.span
            )
        self.signature.domains[decl.name] = decl

    def _signature_item(self) -> None:
        ts = self.ts
        tok = ts.peek()
        if tok.type != "ident":
            ts.fail("expected a signature declaration")
        if tok.text in UNSUPPORTED_KEYWORDS:
            ts.fail_unsupported(tok)
        if tok.text == "domain":
            ts.advance()
            name_tok = ts.expect_ident("domain name")
            ts.expect("subsetof")
            base = ts.expect_ident("base domain").text
            if base != "Integer":
                raise ParseError.single(
                    "unsupported-construct", f"unsupported construct: subsetof {base}", name_tok.span
                )
            # Concrete bounds come from the definitions section.
            self.abstract_domains[name_tok.text] = name_tok
            return
        if tok.text == "enum":
            ts.advance()
            ts.expect("domain")
            name_tok = ts.expect_ident("domain name")
            ts.expect("=")
            ts.expect("{")
            values = [ts.expect_ident("enumeration value").text]
            while ts.accept("|") or ts.accept(","):
                values.append(ts.expect_ident("enumeration value").text)
            ts.expect("}")
            if len(set(values)) != len(values):
                raise ParseError.single(
                    "duplicate-declaration",
                    f"enumeration '{name_tok.text}' repeats a value",
                    name_tok.span,
                )
            self._declare_domain(
                DomainDecl(name_tok.text, DomainKind.ENUM, values=tuple(values), span=name_tok.span),
                name_tok,
            )
            return
        if tok.text in _FUNCTION_KINDS:
            kind = _FUNCTION_KINDS[ts.advance().text]
            name_tok = ts.expect_ident("function name")
            ts.expect(":")
            first_tok = ts.expect_ident("domain name")
            if ts.peek().text == "(":
                raise ParseError.single(
                    "unsupported-construct",
                    "unsupported construct: function over a product domain (arity > 1)",
                    first_tok.span,
                )
            arg_domain = None
            result = first_tok.text
            if ts.accept("->"):
                arg_domain = first_tok.text
                result = ts.expect_ident("result domain").text
            for dom, where in ((arg_domain, "argument"), (result, "result")):
                if dom in _UNBOUNDED_DOMAINS:
                    raise ParseError.single(
                        "unbounded-domain",
                        f"unbounded {where} domain '{dom}' for function '{name_tok.text}'",
                        name_tok.span,
                    )
            if name_tok.text in self.signature.functions:
                raise ParseError.single(
                    "duplicate-declaration",
                    f"function '{name_tok.text}' declared twice",
                    name_tok.span,
                )
            self.signature.functions[name_tok.text] = FunctionDecl(
                name=name_tok.text,
                kind=kind,
                result_domain=result,
                arg_domain=arg_domain,
                span=name_tok.span,
            )
            return
        ts.fail("expected a domain or function declaration")

    # -- definitions -------------------------------------------------------

    def _definitions_item(self) -> None:
        ts = self.ts
        tok = ts.peek()
        if tok.type != "ident":
            ts.fail("expected a definition")
        if tok.text in UNSUPPORTED_KEYWORDS:
            ts.fail_unsupported(tok)
        if tok.text == "domain":
            ts.advance()
            name_tok = ts.expect_ident("domain name")
            ts.expect("=")
            ts.expect("{")
            lo = ts.expect_int()
            ts.expect(":")
            hi = ts.expect_int()
            ts.expect("}")
            if name_tok.text not in self.abstract_domains:
                raise ParseError.single(
                    "undeclared-domain",
                    f"domain '{name_tok.text}' defined but not declared in the signature",
                    name_tok.span,
                )
            if name_tok.text in self.signature.domains:
                raise ParseError.single(
                    "duplicate-declaration", f"domain '{name_tok.text}' defined twice", name_tok.span
                )
            if lo > hi:
                raise ParseError.single(
                    "invalid-range", f"domain '{name_tok.text}': {lo} > {hi}", name_tok.span
                )
            self._declare_domain(
                DomainDecl(name_tok.text, DomainKind.RANGE, lo=lo, hi=hi, span=name_tok.span),
                name_tok,
            )
            return
        if tok.text == "macro":
            ts.advance()
            ts.expect("rule")
            decl = self._rule_decl()
            if any(m.name == decl.name for m in self.macro_rules):
                raise ParseError.single(
                    "duplicate-declaration", f"macro rule '{decl.name}' declared twice", tok.span
                )
            self.macro_rules.append(decl)
            return
        if tok.text == "main":
            ts.advance()
            ts.expect("rule")
            decl = self._rule_decl()
            if self.main_rule is not None:
                raise ParseError.single(
                    "duplicate-declaration", "more than one main rule", tok.span
                )
            self.main_rule = decl
            return
        if tok.text == "function":
            ts.advance()
            name_tok = ts.expect_ident("function name")
            if ts.peek().text == "(":
                raise ParseError.single(
                    "unsupported-construct",
                    "unsupported construct: parameterized function definition",
                    name_tok.span,
                )
            ts.expect("=")
            self.static_defs[name_tok.text] = (name_tok, parse_term(self.ts))
            return
        if tok.text in ("CTLSPEC", "LTLSPEC"):
            ts.advance()
            logic = Logic.CTL if tok.text == "CTLSPEC" else Logic.LTL
            formula = parse_formula(ts, lenient=True)
            check_logic(formula, logic)
            self.properties.append(
                PropertyDecl(
                    logic=logic,
                    formula=formula,
                    source_text=print_formula(formula, style="call"),
                    span=tok.span,
                )
            )
            return
        ts.fail("expected a definition (domain, rule, function, or property)")

    def _rule_decl(self) -> RuleDecl:
        name_tok = self.ts.expect_ident("rule name")
        self.ts.expect("=")
        body = self._rule()
        return RuleDecl(name_tok.text, body, span=name_tok.span)

    def _rule(self) -> RuleExpr:
        ts = self.ts
        tok = ts.peek()
        if tok.type != "ident":
            ts.fail("expected a rule")
        if tok.text in UNSUPPORTED_KEYWORDS:
            ts.fail_unsupported(tok)
        if tok.text == "par":
            ts.advance()
            rules = [self._rule()]
            while not (ts.peek().text == "endpar" and ts.peek().type == "ident"):
                if ts.at_eof():
                    ts.fail("expected 'endpar'")
                rules.append(self._rule())
            ts.expect("endpar")
            return ParRule(tuple(rules), span=tok.span)
        if tok.text == "if":
            ts.advance()
            guard = parse_term(ts)
            ts.expect("then")
            then = self._rule()
            otherwise = None
            if ts.peek().text == "else" and ts.peek().type == "ident":
                ts.advance()
                otherwise = self._rule()
            ts.expect("endif")
            return CondRule(guard, then, otherwise, span=tok.span)
        name_tok = ts.expect_ident("rule")
        if ts.accept("["):
            ts.expect("]")
            return MacroCall(name_tok.text, span=name_tok.span)
        arg = None
        if ts.accept("("):
            arg = parse_term(ts)
            ts.expect(")")
        ts.expect(":=", "in update rule")
        value = parse_term(ts)
        target = Apply(name_tok.text, arg, span=name_tok.span)
        return UpdateRule(target, value, span=name_tok.span)

    # -- init --------------------------------------------------------------

    def _init_section(self) -> None:
        ts = self.ts
        ts.expect("init")
        self.init_name = ts.expect_ident("init name").text
        ts.expect(":")
        while ts.peek().text == "function" and ts.peek().type == "ident":
            ts.advance()
            name_tok = ts.expect_ident("function name")
            ts.expect("=")
            self.init.append(InitDecl(name_tok.text, self._constant(), span=name_tok.span))

    def _constant(self) -> Constant:
        tok = self.ts.peek()
        if tok.type == "int":
            self.ts.advance()
            return Constant(int(tok.text), span=tok.span)
        if tok.type == "ident" and tok.text in ("true", "false"):
            self.ts.advance()
            return Constant(tok.text == "true", span=tok.span)
        if tok.type == "ident":
            self.ts.advance()
            return Constant(tok.text, span=tok.span)  # enumeration constant
        self.ts.fail("expected a constant value", tok)

    # -- final validation ----------------------------------------------------

    def _finish_validation(self) -> None:
        for name, tok in self.abstract_domains.items():
            if name not in self.signature.domains:
                raise ParseError.single(
                    "unbounded-domain",
                    f"domain '{name}' has no finite definition",
                    tok.span,
                )
        if self.main_rule is None:
            raise ParseError.single("syntax-error", "specification has no main rule")
        if any(m.name == self.main_rule.name for m in self.macro_rules):
            raise ParseError.single(
                "duplicate-declaration",
                f"rule name '{self.main_rule.name}' used for both a macro and the main rule",
            )
        overlap = set(self.signature.domains) & set(self.signature.functions)
        if overlap:
            raise ParseError.single(
                "duplicate-declaration",
                f"name used for both a domain and a function: {sorted(overlap)[0]}",
            )
        for name, (tok, term) in self.static_defs.items():
            decl = self.signature.functions.get(name)
            if decl is None:
                raise ParseError.single(
                    "undeclared-function",
                    f"definition for undeclared function '{name}'",
                    tok.span,
                )
            if decl.kind not in (FunctionKind.STATIC, FunctionKind.DERIVED):
                raise ParseError.single(
                    "invalid-definition",
                    f"function '{name}' is {decl.kind.value}; only static and derived functions take definitions",
                    tok.span,
                )
            self.signature.functions[name] = FunctionDecl(
                name=decl.name,
                kind=decl.kind,
                result_domain=decl.result_domain,
                arg_domain=decl.arg_domain,
                definition=term,
                span=decl.span,
            )
        for decl in self.signature.functions.values():
            if decl.kind in (FunctionKind.STATIC, FunctionKind.DERIVED) and decl.definition is None:
                raise ParseError.single(
                    "missing-definition",
                    f"{decl.kind.value} function '{decl.name}' has no definition",
                    decl.span,
                )

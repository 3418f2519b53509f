"""Operational semantics of the ASM subset.

A state is a valuation of all controlled and monitored locations (a location
is a function name plus an optional argument value). Monitored functions are
part of the state and are re-chosen nondeterministically at every step, so a
step yields one successor per monitored valuation. States and update sets are
immutable values; everything here is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .lang.ast import (
    Apply,
    Arith,
    AsmSpecification,
    AvallaScenario,
    BoolOp,
    CheckCmd,
    Compare,
    CondRule,
    Constant,
    FunctionKind,
    MacroCall,
    ParRule,
    RuleExpr,
    SetCmd,
    Signature,
    StepCmd,
    Term,
    UpdateRule,
    Value,
)
from .lang.printer import print_term
from .signature import extract_signature, typecheck_scenario

Location = tuple[str, Value | None]


class AsmRuntimeError(Exception):
    """Base class for evaluation-time faults."""


class InconsistentUpdateError(AsmRuntimeError):
    def __init__(self, location: Location, first: Value, second: Value):
        self.location = location
        self.values = (first, second)
        super().__init__(
            f"inconsistent update: {_loc_text(location)} receives both {first} and {second}"
        )


class ModByZeroError(AsmRuntimeError):
    def __init__(self, term: Term):
        self.term = term
        super().__init__(f"mod by zero in '{print_term(term)}'")


class DomainViolationError(AsmRuntimeError):
    def __init__(self, location: Location, value: Value, domain: str):
        self.location = location
        self.value = value
        super().__init__(f"update writes {value} to {_loc_text(location)}, outside domain {domain}")


class ArgumentOutOfDomainError(AsmRuntimeError):
    def __init__(self, function: str, arg: Value, domain: str):
        self.function = function
        self.arg = arg
        super().__init__(f"argument {arg} of '{function}' is outside domain {domain}")


class MissingInitError(AsmRuntimeError):
    def __init__(self, function: str):
        self.function = function
        super().__init__(f"missing init for controlled function '{function}'")


class ScenarioError(AsmRuntimeError):
    def __init__(self, code: str, message: str, command_index: int | None = None):
        self.code = code
        self.command_index = command_index
        super().__init__(message)


def _loc_text(loc: Location) -> str:
    name, arg = loc
    return name if arg is None else f"{name}({arg})"


class State:
    """Immutable valuation of all controlled and monitored locations."""

    __slots__ = ("controlled", "monitored", "_key")

    def __init__(self, controlled: dict[Location, Value], monitored: dict[Location, Value]):
        self.controlled = dict(controlled)
        self.monitored = dict(monitored)
        self._key = (
            tuple(sorted(self.controlled.items())),
            tuple(sorted(self.monitored.items())),
        )

    def value(self, name: str, arg: Value | None = None) -> Value:
        loc = (name, arg)
        if loc in self.controlled:
            return self.controlled[loc]
        if loc in self.monitored:
            return self.monitored[loc]
        raise KeyError(f"no such location: {_loc_text(loc)}")

    def with_updates(self, updates: dict[Location, Value]) -> "State":
        new_controlled = dict(self.controlled)
        new_controlled.update(updates)
        return State(new_controlled, self.monitored)

    def with_monitored(self, monitored: dict[Location, Value]) -> "State":
        return State(self.controlled, monitored)

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        parts = [f"{_loc_text(l)}={v}" for l, v in self._key[0] + self._key[1]]
        return f"State({', '.join(parts)})"


@dataclass(frozen=True)
class UpdateSet:
    """Consistent set of location updates (conflicts rejected at build time)."""

    updates: tuple[tuple[Location, Value], ...]

    def as_dict(self) -> dict[Location, Value]:
        return dict(self.updates)

    def __len__(self) -> int:
        return len(self.updates)


@dataclass
class ScenarioResult:
    passed: bool
    steps_executed: int
    failed_check: tuple[int, Term, State] | None
    trace: list[State]


class Interpreter:
    """Evaluation context for one specification (symbol caches precomputed)."""

    def __init__(self, spec: AsmSpecification):
        self.spec = spec
        self.sig: Signature = extract_signature(spec)
        self.macros = {m.name: m for m in spec.macro_rules}
        self.enum_values = self.sig.enum_values()
        self.controlled_locs: list[Location] = []
        self.monitored_locs: list[Location] = []
        for fn in self.sig.functions.values():
            if fn.kind not in (FunctionKind.CONTROLLED, FunctionKind.MONITORED):
                continue
            args: list[Value | None]
            if fn.arg_domain is None:
                args = [None]
            else:
                args = list(self.sig.domain(fn.arg_domain).value_list())
            locs = [(fn.name, a) for a in args]
            if fn.kind is FunctionKind.CONTROLLED:
                self.controlled_locs.extend(locs)
            else:
                self.monitored_locs.extend(locs)
        # Monitored valuations enumerate lexicographically by function name,
        # then in domain order; the first location varies slowest.
        self.monitored_locs.sort(key=lambda loc: (loc[0], str(loc[1])))
        self._monitored_domains = [
            self.sig.domain(self.sig.functions[name].result_domain).value_list()
            for name, _ in self.monitored_locs
        ]

    # -- evaluation --------------------------------------------------------

    def eval_term(self, term: Term, state: State) -> Value:
        if isinstance(term, Constant):
            return term.value
        if isinstance(term, Apply):
            if term.arg is None and term.name in self.enum_values:
                return term.name
            fn = self.sig.functions[term.name]
            if fn.definition is not None:
                return self.eval_term(fn.definition, state)
            arg = None
            if term.arg is not None:
                arg = self.eval_term(term.arg, state)
                if not self.sig.domain(fn.arg_domain).contains(arg):
                    raise ArgumentOutOfDomainError(fn.name, arg, fn.arg_domain)
            return state.value(term.name, arg)
        if isinstance(term, Arith):
            left = self.eval_term(term.left, state)
            right = self.eval_term(term.right, state)
            if term.op == "+":
                return left + right
            if term.op == "-":
                return left - right
            if right == 0:
                raise ModByZeroError(term)
            # Mathematical remainder: result is always non-negative.
            return left % abs(right)
        if isinstance(term, Compare):
            left = self.eval_term(term.left, state)
            right = self.eval_term(term.right, state)
            return {
                "=": left == right,
                "!=": left != right,
                "<": left < right,
                "<=": left <= right,
                ">": left > right,
                ">=": left >= right,
            }[term.op]
        if isinstance(term, BoolOp):
            if term.op == "not":
                return not self.eval_term(term.operands[0], state)
            left = self.eval_term(term.operands[0], state)
            if term.op == "and":
                return left and self.eval_term(term.operands[1], state)
            if term.op == "or":
                return left or self.eval_term(term.operands[1], state)
            right = self.eval_term(term.operands[1], state)
            if term.op == "implies":
                return (not left) or right
            return left == right  # iff
        raise TypeError(f"not a term: {term!r}")

    def _eval_rule(self, rule: RuleExpr, state: State, acc: dict[Location, Value]) -> None:
        if isinstance(rule, UpdateRule):
            arg = None
            if rule.target.arg is not None:
                arg = self.eval_term(rule.target.arg, state)
                fn = self.sig.functions[rule.target.name]
                if not self.sig.domain(fn.arg_domain).contains(arg):
                    raise ArgumentOutOfDomainError(fn.name, arg, fn.arg_domain)
            value = self.eval_term(rule.value, state)
            loc = (rule.target.name, arg)
            if loc in acc and acc[loc] != value:
                raise InconsistentUpdateError(loc, acc[loc], value)
            acc[loc] = value
        elif isinstance(rule, ParRule):
            for r in rule.rules:
                self._eval_rule(r, state, acc)
        elif isinstance(rule, CondRule):
            if self.eval_term(rule.guard, state):
                self._eval_rule(rule.then, state, acc)
            elif rule.otherwise is not None:
                self._eval_rule(rule.otherwise, state, acc)
        elif isinstance(rule, MacroCall):
            self._eval_rule(self.macros[rule.name].body, state, acc)
        else:
            raise TypeError(f"not a rule: {rule!r}")

    # -- operations --------------------------------------------------------

    def initial_controlled(self) -> dict[Location, Value]:
        given = {e.function: e.value.value for e in self.spec.init}
        out: dict[Location, Value] = {}
        names = {name for name, _ in self.controlled_locs}
        for name in names:
            if name not in given:
                raise MissingInitError(name)
        for name, arg in self.controlled_locs:
            out[(name, arg)] = given[name]
        return out

    def monitored_valuations(self):
        """Deterministic enumeration of all monitored valuations."""
        if not self.monitored_locs:
            yield {}
            return
        for combo in itertools.product(*self._monitored_domains):
            yield dict(zip(self.monitored_locs, combo))

    def initial_states(self) -> list[State]:
        controlled = self.initial_controlled()
        return [State(controlled, m) for m in self.monitored_valuations()]

    def update_set(self, state: State) -> UpdateSet:
        acc: dict[Location, Value] = {}
        self._eval_rule(self.spec.main_rule.body, state, acc)
        return UpdateSet(tuple(sorted(acc.items())))

    def apply_updates(self, state: State, updates: UpdateSet) -> dict[Location, Value]:
        new_controlled = dict(state.controlled)
        for loc, value in updates.updates:
            fn = self.sig.functions[loc[0]]
            dom = self.sig.domain(fn.result_domain)
            if not dom.contains(value):
                raise DomainViolationError(loc, value, fn.result_domain)
            new_controlled[loc] = value
        return new_controlled

    def successors(self, state: State) -> list[State]:
        updates = self.update_set(state)
        new_controlled = self.apply_updates(state, updates)
        return [State(new_controlled, m) for m in self.monitored_valuations()]

    def step_with_choice(self, state: State, choice: dict[Location, Value]) -> State:
        """Apply the main rule once, then fix the monitored valuation."""
        updates = self.update_set(state)
        return State(self.apply_updates(state, updates), choice)

    # -- scenarios -----------------------------------------------------------

    def default_monitored(self) -> dict[Location, Value]:
        return {
            loc: dom[0] for loc, dom in zip(self.monitored_locs, self._monitored_domains)
        }

    def run_scenario(self, scenario: AvallaScenario) -> ScenarioResult:
        diags = typecheck_scenario(scenario, self.sig)
        if diags.has_errors():
            first = diags.entries[0]
            raise ScenarioError(first.code, first.message)
        current = State(self.initial_controlled(), self.default_monitored())
        trace = [current]
        steps = 0
        for i, cmd in enumerate(scenario.commands):
            if isinstance(cmd, SetCmd):
                monitored = dict(current.monitored)
                monitored[(cmd.function, None)] = cmd.value.value
                current = current.with_monitored(monitored)
            elif isinstance(cmd, StepCmd):
                updates = self.update_set(current)
                current = State(self.apply_updates(current, updates), current.monitored)
                trace.append(current)
                steps += 1
            elif isinstance(cmd, CheckCmd):
                if not self.eval_term(cmd.term, current):
                    return ScenarioResult(
                        passed=False,
                        steps_executed=steps,
                        failed_check=(i, cmd.term, current),
                        trace=trace,
                    )
            else:
                raise TypeError(f"not a scenario command: {cmd!r}")
        return ScenarioResult(passed=True, steps_executed=steps, failed_check=None, trace=trace)


# Module-level convenience wrappers (each builds a fresh evaluation context).

def initial_states(spec: AsmSpecification) -> list[State]:
    return Interpreter(spec).initial_states()


def compute_update_set(spec: AsmSpecification, state: State) -> UpdateSet:
    return Interpreter(spec).update_set(state)


def successors(spec: AsmSpecification, state: State) -> list[State]:
    return Interpreter(spec).successors(state)


def run_scenario(spec: AsmSpecification, scenario: AvallaScenario) -> ScenarioResult:
    return Interpreter(spec).run_scenario(scenario)

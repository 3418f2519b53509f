"""Compilation of a specification into array-encoded form for the kernels.

States become int64 vectors with one slot per location (controlled locations
first, in declaration order, then monitored locations in the interpreter's
enumeration order). Range values are stored raw, enumeration values as
indices, booleans as 0/1. A full valuation packs into a single mixed-radix
code, which dense exploration uses directly as a row index.

Terms and the main rule compile to small register programs shared by the
numba and numpy execution paths; see kernels.py for the instruction set
execution. Mod-by-zero faults are gated on the guard under which the term
is actually evaluated, matching the reference interpreter's lazy branches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..interpreter import Interpreter, Location, State
from ..lang.ast import (
    Apply,
    Arith,
    AsmSpecification,
    BoolOp,
    Compare,
    CondRule,
    Constant,
    DomainKind,
    MacroCall,
    ParRule,
    RuleExpr,
    Term,
    UpdateRule,
    Value,
)
from ..signature import resolve_term

OP_LOC = 0
OP_CONST = 1
OP_ADD = 2
OP_SUB = 3
OP_MOD = 4
OP_EQ = 5
OP_NE = 6
OP_LT = 7
OP_LE = 8
OP_GT = 9
OP_GE = 10
OP_AND = 11
OP_OR = 12
OP_NOT = 13
OP_FLAGERR = 14  # a=value reg, b=active guard reg, c=error code: flag where guard and a == 0
OP_ITE = 15  # a=cond reg, b=then reg, c=else reg

_CMP_OPS = {"=": OP_EQ, "!=": OP_NE, "<": OP_LT, "<=": OP_LE, ">": OP_GT, ">=": OP_GE}

ERR_NONE = 0
ERR_MOD_ZERO = 1
ERR_CONFLICT = 2
ERR_DOMAIN = 3
ERR_ARG = 4


@dataclass
class Program:
    """Register program: instructions are (op, a, b, c, dest) rows."""

    code: np.ndarray  # (n_instr, 5) int64
    consts: np.ndarray  # int64
    n_regs: int
    result_reg: int  # for term programs; unused by the step program


@dataclass
class StepProgram:
    program: Program
    upd_loc: np.ndarray  # int64, controlled-location index per guarded update
    upd_guard: np.ndarray  # int64, guard register per update
    upd_value: np.ndarray  # int64, value register per update


class _Builder:
    def __init__(self) -> None:
        self.instrs: list[tuple[int, int, int, int, int]] = []
        self.consts: list[int] = []
        self._const_index: dict[int, int] = {}
        self.n_regs = 0

    def new_reg(self) -> int:
        self.n_regs += 1
        return self.n_regs - 1

    def emit(self, op: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        dest = self.new_reg()
        self.instrs.append((op, a, b, c, dest))
        return dest

    def flag_err(self, value_reg: int, guard_reg: int, err_code: int) -> None:
        self.instrs.append((OP_FLAGERR, value_reg, guard_reg, err_code, 0))

    def const(self, value: int) -> int:
        if value not in self._const_index:
            self._const_index[value] = len(self.consts)
            self.consts.append(value)
        return self.emit(OP_CONST, self._const_index[value])

    def finish(self, result_reg: int = 0) -> Program:
        code = np.array(self.instrs, dtype=np.int64).reshape(-1, 5)
        consts = np.array(self.consts if self.consts else [0], dtype=np.int64)
        return Program(code=code, consts=consts, n_regs=max(self.n_regs, 1), result_reg=result_reg)


class CompiledSpec:
    """Array encoding of one type-checked specification."""

    def __init__(self, spec: AsmSpecification):
        self.spec = spec
        self.interp = Interpreter(spec)
        sig = self.interp.sig
        self.locs: list[Location] = list(self.interp.controlled_locs) + list(
            self.interp.monitored_locs
        )
        self.n_controlled = len(self.interp.controlled_locs)
        self.n_monitored = len(self.interp.monitored_locs)
        self.loc_index = {loc: i for i, loc in enumerate(self.locs)}
        self._domains = []
        for name, _ in self.locs:
            self._domains.append(sig.domain(sig.functions[name].result_domain))
        self.sizes = np.array([d.size() for d in self._domains], dtype=np.int64)
        # Raw-value bounds per location (enum values live at indices 0..k-1).
        self.lo = np.array(
            [d.lo if d.kind is DomainKind.RANGE else 0 for d in self._domains], dtype=np.int64
        )
        self.hi = self.lo + self.sizes - 1
        # Mixed-radix strides; location 0 is the most significant digit.
        strides = np.ones(len(self.locs), dtype=np.int64)
        for i in range(len(self.locs) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.sizes[i + 1]
        self.strides = strides
        self.n_full = int(np.prod(self.sizes.astype(object))) if len(self.locs) else 1
        monitored_rows = [
            [self.encode_value(self.n_controlled + j, v) for j, v in enumerate(val.values())]
            for val in self.interp.monitored_valuations()
        ]
        self.monitored_vals = np.array(monitored_rows, dtype=np.int64).reshape(
            -1, self.n_monitored
        )
        self.n_valuations = self.monitored_vals.shape[0]
        self.step = _compile_rule(self)
        self._atom_programs: dict[str, Program] = {}

    # -- value coding --------------------------------------------------------

    def encode_value(self, loc_idx: int, value: Value) -> int:
        dom = self._domains[loc_idx]
        if dom.kind is DomainKind.RANGE:
            return int(value)
        if dom.kind is DomainKind.ENUM:
            return dom.values.index(value)
        return int(bool(value))

    def decode_value(self, loc_idx: int, raw: int) -> Value:
        dom = self._domains[loc_idx]
        if dom.kind is DomainKind.RANGE:
            return int(raw)
        if dom.kind is DomainKind.ENUM:
            return dom.values[int(raw)]
        return bool(raw)

    def encode_const(self, value: Value) -> int:
        """Encode a constant independent of location: ints raw, bools 0/1,
        enum constants as the index within their owning domain."""
        if isinstance(value, bool):
            return int(value)
        if isinstance(value, int):
            return int(value)
        owner = self.interp.sig.enum_values()[value]
        return self.interp.sig.domain(owner).values.index(value)

    def state_to_row(self, state: State) -> np.ndarray:
        row = np.empty(len(self.locs), dtype=np.int64)
        for i, (name, arg) in enumerate(self.locs):
            row[i] = self.encode_value(i, state.value(name, arg))
        return row

    def row_to_state(self, row: np.ndarray) -> State:
        controlled = {}
        monitored = {}
        for i, loc in enumerate(self.locs):
            value = self.decode_value(i, int(row[i]))
            if i < self.n_controlled:
                controlled[loc] = value
            else:
                monitored[loc] = value
        return State(controlled, monitored)

    def pack(self, rows: np.ndarray) -> np.ndarray:
        """Mixed-radix codes for full-valuation rows (vectorized)."""
        digits = rows - self.lo
        return digits @ self.strides

    def unpack(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty((codes.shape[0], len(self.locs)), dtype=np.int64)
        for i in range(len(self.locs)):
            out[:, i] = (codes // self.strides[i]) % self.sizes[i] + self.lo[i]
        return out

    def atom_program(self, term: Term) -> tuple[str, Program]:
        """Compile a Boolean term into a cached program; key is canonical text."""
        from ..lang.printer import print_term

        resolved = resolve_term(term, self.interp.sig)
        key = print_term(resolved)
        if key not in self._atom_programs:
            b = _Builder()
            true_reg = b.const(1)
            reg = _compile_term(resolved, self, b, true_reg)
            self._atom_programs[key] = b.finish(reg)
        return key, self._atom_programs[key]


def _compile_term(term: Term, cs: CompiledSpec, b: _Builder, guard_reg: int) -> int:
    if isinstance(term, Constant):
        return b.const(cs.encode_const(term.value))
    if isinstance(term, Apply):
        fn = cs.interp.sig.functions[term.name]
        if term.arg is None:
            return b.emit(OP_LOC, cs.loc_index[(term.name, None)])
        if isinstance(term.arg, Constant):
            return b.emit(OP_LOC, cs.loc_index[(term.name, term.arg.value)])
        arg_reg = _compile_term(term.arg, cs, b, guard_reg)
        dom = cs.interp.sig.domain(fn.arg_domain)
        values = dom.value_list()
        hits = [b.emit(OP_EQ, arg_reg, b.const(cs.encode_const(values[0])))]
        result = b.emit(OP_LOC, cs.loc_index[(term.name, values[0])])
        for v in values[1:]:
            hit = b.emit(OP_EQ, arg_reg, b.const(cs.encode_const(v)))
            hits.append(hit)
            result = b.emit(OP_ITE, hit, b.emit(OP_LOC, cs.loc_index[(term.name, v)]), result)
        any_hit = hits[0]
        for h in hits[1:]:
            any_hit = b.emit(OP_OR, any_hit, h)
        b.flag_err(any_hit, guard_reg, ERR_ARG)
        return result
    if isinstance(term, Arith):
        left = _compile_term(term.left, cs, b, guard_reg)
        right = _compile_term(term.right, cs, b, guard_reg)
        if term.op == "+":
            return b.emit(OP_ADD, left, right)
        if term.op == "-":
            return b.emit(OP_SUB, left, right)
        b.flag_err(right, guard_reg, ERR_MOD_ZERO)
        return b.emit(OP_MOD, left, right)
    if isinstance(term, Compare):
        left = _compile_term(term.left, cs, b, guard_reg)
        right = _compile_term(term.right, cs, b, guard_reg)
        return b.emit(_CMP_OPS[term.op], left, right)
    if isinstance(term, BoolOp):
        if term.op == "not":
            return b.emit(OP_NOT, _compile_term(term.operands[0], cs, b, guard_reg))
        left = _compile_term(term.operands[0], cs, b, guard_reg)
        right = _compile_term(term.operands[1], cs, b, guard_reg)
        if term.op == "and":
            return b.emit(OP_AND, left, right)
        if term.op == "or":
            return b.emit(OP_OR, left, right)
        if term.op == "implies":
            return b.emit(OP_OR, b.emit(OP_NOT, left), right)
        return b.emit(OP_EQ, left, right)  # iff on 0/1 values
    raise TypeError(f"not a term: {term!r}")


def _compile_rule(cs: CompiledSpec) -> StepProgram:
    b = _Builder()
    true_reg = b.const(1)
    updates: list[tuple[int, int, int]] = []
    macros = cs.interp.macros
    sig = cs.interp.sig

    def walk(rule: RuleExpr, guard_reg: int) -> None:
        if isinstance(rule, UpdateRule):
            value_term = resolve_term(rule.value, sig)
            if rule.target.arg is None or isinstance(rule.target.arg, Constant):
                arg = rule.target.arg.value if rule.target.arg is not None else None
                loc_idx = cs.loc_index[(rule.target.name, arg)]
                value_reg = _compile_term(value_term, cs, b, guard_reg)
                updates.append((loc_idx, guard_reg, value_reg))
                return
            arg_term = resolve_term(rule.target.arg, sig)
            arg_reg = _compile_term(arg_term, cs, b, guard_reg)
            value_reg = _compile_term(value_term, cs, b, guard_reg)
            fn = sig.functions[rule.target.name]
            hits = []
            for v in sig.domain(fn.arg_domain).value_list():
                hit = b.emit(OP_EQ, arg_reg, b.const(cs.encode_const(v)))
                hits.append(hit)
                sub_guard = b.emit(OP_AND, guard_reg, hit)
                updates.append((cs.loc_index[(rule.target.name, v)], sub_guard, value_reg))
            any_hit = hits[0]
            for h in hits[1:]:
                any_hit = b.emit(OP_OR, any_hit, h)
            b.flag_err(any_hit, guard_reg, ERR_ARG)
        elif isinstance(rule, ParRule):
            for r in rule.rules:
                walk(r, guard_reg)
        elif isinstance(rule, CondRule):
            guard_term = resolve_term(rule.guard, sig)
            g = _compile_term(guard_term, cs, b, guard_reg)
            then_guard = b.emit(OP_AND, guard_reg, g)
            walk(rule.then, then_guard)
            if rule.otherwise is not None:
                else_guard = b.emit(OP_AND, guard_reg, b.emit(OP_NOT, g))
                walk(rule.otherwise, else_guard)
        elif isinstance(rule, MacroCall):
            walk(macros[rule.name].body, guard_reg)
        else:
            raise TypeError(f"not a rule: {rule!r}")

    walk(cs.spec.main_rule.body, true_reg)
    if updates:
        upd_loc = np.array([u[0] for u in updates], dtype=np.int64)
        upd_guard = np.array([u[1] for u in updates], dtype=np.int64)
        upd_value = np.array([u[2] for u in updates], dtype=np.int64)
    else:
        upd_loc = np.empty(0, dtype=np.int64)
        upd_guard = np.empty(0, dtype=np.int64)
        upd_value = np.empty(0, dtype=np.int64)
    return StepProgram(program=b.finish(), upd_loc=upd_loc, upd_guard=upd_guard, upd_value=upd_value)

"""CTL model checking by fixpoint labeling over the adequate basis {EX, EU, EG}.

All other operators are rewritten through the classical dualities:
AX p = !EX !p, AG p = !E[true U !p], AF p = !EG !p, EF p = E[true U p],
A[p U q] = !(E[!q U (!p & !q)] | EG !q).

Counterexamples are extracted for failing AG/AX/AF/AU top levels and
witnesses for holding EF/EX/EU/EG top levels; nested path evidence is not
produced. AG counterexamples are BFS-shortest; when the refuted invariant
embeds a next-step obligation (an AX consequent), the trace is extended by
one step so the violation is visible in the final state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..interpreter import State
from ..lang.ast import Atom, Conn, Formula, Logic, Temporal, Term
from ..signature import TypedFormula
from . import kernels
from .kripke import KripkeStructure


@dataclass
class CheckStats:
    states_explored: int
    seconds: float


@dataclass
class Trace:
    """Finite path or lasso through the state graph.

    ``monitored_choices[i]`` is the monitored valuation of ``states[i]``: the
    inputs in force when the step from ``states[i]`` to ``states[i+1]`` fires.
    """

    states: list[State]
    monitored_choices: list[dict]
    loop_start: int | None = None

    @property
    def kind(self) -> str:
        return "lasso" if self.loop_start is not None else "finite-path"

    def __len__(self) -> int:
        return len(self.states)


@dataclass
class Verdict:
    holds: bool
    evidence: Trace | None
    stats: CheckStats
    bound: int | None = None  # set when only a bounded search was performed


class _Labeler:
    """Memoized satisfaction sets for every subformula over one structure."""

    def __init__(self, ks: KripkeStructure):
        self.ks = ks
        self.memo: dict[Formula, np.ndarray] = {}

    def sat(self, f: Formula) -> np.ndarray:
        found = self.memo.get(f)
        if found is not None:
            return found
        result = self._compute(f)
        self.memo[f] = result
        return result

    def _compute(self, f: Formula) -> np.ndarray:
        ks = self.ks
        if isinstance(f, Atom):
            return ks.atom_sat(f.term)
        if isinstance(f, Conn):
            ops = [self.sat(o) for o in f.operands]
            if f.op == "not":
                return ~ops[0]
            if f.op == "and":
                return ops[0] & ops[1]
            if f.op == "or":
                return ops[0] | ops[1]
            if f.op == "implies":
                return ~ops[0] | ops[1]
            return ops[0] == ops[1]  # iff
        if isinstance(f, Temporal):
            if f.op == "EX":
                return kernels.ex_step(ks.succ, self.sat(f.operands[0]))
            if f.op == "AX":
                return ~kernels.ex_step(ks.succ, ~self.sat(f.operands[0]))
            if f.op == "EF":
                return self._eu(self._true(), self.sat(f.operands[0]))[0]
            if f.op == "AG":
                return ~self._eu(self._true(), ~self.sat(f.operands[0]))[0]
            if f.op == "EG":
                return self._eg(self.sat(f.operands[0]))
            if f.op == "AF":
                return ~self._eg(~self.sat(f.operands[0]))
            if f.op == "EU":
                return self._eu(self.sat(f.operands[0]), self.sat(f.operands[1]))[0]
            if f.op == "AU":
                p, q = (self.sat(o) for o in f.operands)
                eu_part = self._eu(~q, ~p & ~q)[0]
                return ~(eu_part | self._eg(~q))
            raise ValueError(f"not a CTL operator: {f.op}")
        raise TypeError(f"not a formula: {f!r}")

    def _true(self) -> np.ndarray:
        return np.ones(self.ks.n_states, dtype=bool)

    def _eu(self, p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        indptr, pred = self.ks.predecessors()
        return kernels.eu_fixpoint(indptr, pred, p, q)

    def _eg(self, p: np.ndarray) -> np.ndarray:
        indptr, pred = self.ks.predecessors()
        return kernels.eg_fixpoint(self.ks.succ, indptr, pred, p)


def label_states(ks: KripkeStructure, formula: Formula) -> np.ndarray:
    """Satisfaction array of `formula` over every state of `ks`."""
    return _Labeler(ks).sat(formula)


def check_ctl(ks: KripkeStructure, typed: TypedFormula) -> Verdict:
    """Decide a CTL formula: holds iff every initial state satisfies it."""
    if typed.logic is not Logic.CTL:
        raise ValueError(f"check_ctl needs a CTL formula, got {typed.logic.value}")
    t0 = time.perf_counter()
    labeler = _Labeler(ks)
    sat = labeler.sat(typed.formula)
    holds = bool(sat[ks.initial].all())
    evidence = _extract_evidence(ks, labeler, typed.formula, sat, holds)
    stats = CheckStats(ks.n_states, time.perf_counter() - t0)
    return Verdict(holds=holds, evidence=evidence, stats=stats)


def check_invariant(ks: KripkeStructure, term: Term) -> Verdict:
    """Reachability scan for AG(term); failing yields a BFS-shortest trace."""
    t0 = time.perf_counter()
    sat = ks.atom_sat(term)
    holds = bool(sat.all())
    evidence = None
    if not holds:
        target = int(np.flatnonzero(~sat)[0])
        evidence = trace_from_indices(ks, ks.shortest_path_to(target))
    stats = CheckStats(ks.n_states, time.perf_counter() - t0)
    return Verdict(holds=holds, evidence=evidence, stats=stats)


# ---------------------------------------------------------------------------
# Evidence

def trace_from_indices(ks: KripkeStructure, indices: list[int], loop_start: int | None = None) -> Trace:
    states = [ks.state(i) for i in indices]
    choices = [dict(s.monitored) for s in states[:-1]]
    return Trace(states=states, monitored_choices=choices, loop_start=loop_start)


def _first_succ_where(ks: KripkeStructure, idx: int, mask: np.ndarray) -> int | None:
    row = ks.succ[idx]
    hits = mask[row]
    if not hits.any():
        return None
    return int(row[int(np.argmax(hits))])


def _extract_evidence(
    ks: KripkeStructure, labeler: _Labeler, formula: Formula, sat: np.ndarray, holds: bool
) -> Trace | None:
    if holds:
        return _witness(ks, labeler, formula)
    return _counterexample(ks, labeler, formula, sat)


def _counterexample(
    ks: KripkeStructure, labeler: _Labeler, formula: Formula, sat: np.ndarray
) -> Trace | None:
    bad_initial = int(ks.initial[int(np.argmax(~sat[ks.initial]))])
    if isinstance(formula, Temporal) and formula.op == "AG":
        inner = formula.operands[0]
        violating = ~labeler.sat(inner)
        target = int(np.flatnonzero(violating)[0])
        path = ks.shortest_path_to(target)
        extension = _one_step_extension(ks, labeler, inner, target)
        if extension is not None:
            path = path + [extension]
        return trace_from_indices(ks, path)
    if isinstance(formula, Temporal) and formula.op == "AX":
        bad_succ = _first_succ_where(ks, bad_initial, ~labeler.sat(formula.operands[0]))
        if bad_succ is not None:
            return trace_from_indices(ks, [bad_initial, bad_succ])
        return None
    if isinstance(formula, Temporal) and formula.op == "AF":
        return _eg_lasso(ks, labeler, Conn("not", (formula.operands[0],)), bad_initial)
    if isinstance(formula, Temporal) and formula.op == "AU":
        p, q = formula.operands
        not_q = Conn("not", (q,))
        bad_both = Conn("and", (Conn("not", (p,)), not_q))
        eu_sat, eu_dist = labeler._eu(labeler.sat(not_q), labeler.sat(bad_both))
        if eu_sat[bad_initial]:
            path = _eu_walk(ks, bad_initial, labeler.sat(bad_both), eu_dist)
            return trace_from_indices(ks, path)
        return _eg_lasso(ks, labeler, not_q, bad_initial)
    return None


def _witness(ks: KripkeStructure, labeler: _Labeler, formula: Formula) -> Trace | None:
    if isinstance(formula, Temporal) and formula.op == "EF":
        target_sat = labeler.sat(formula.operands[0])
        target = int(np.flatnonzero(target_sat)[0])
        return trace_from_indices(ks, ks.shortest_path_to(target))
    if isinstance(formula, Temporal) and formula.op == "EX":
        start = int(ks.initial[0])
        succ = _first_succ_where(ks, start, labeler.sat(formula.operands[0]))
        if succ is not None:
            return trace_from_indices(ks, [start, succ])
        return None
    if isinstance(formula, Temporal) and formula.op == "EU":
        p, q = formula.operands
        _, dist = labeler._eu(labeler.sat(p), labeler.sat(q))
        start = int(ks.initial[0])
        path = _eu_walk(ks, start, labeler.sat(q), dist)
        return trace_from_indices(ks, path)
    if isinstance(formula, Temporal) and formula.op == "EG":
        return _eg_lasso(ks, labeler, formula.operands[0], int(ks.initial[0]))
    return None


def _eu_walk(ks: KripkeStructure, start: int, q: np.ndarray, dist: np.ndarray) -> list[int]:
    """Walk distance-decreasing steps from `start` to a q-state."""
    path = [start]
    cur = start
    while not q[cur]:
        row = ks.succ[cur]
        closer = dist[row] == dist[cur] - 1
        cur = int(row[int(np.argmax(closer))])
        path.append(cur)
    return path


def _eg_lasso(ks: KripkeStructure, labeler: _Labeler, inner: Formula, start: int) -> Trace | None:
    """Lasso inside the EG(inner) set, starting from `start`."""
    eg_set = labeler.sat(Temporal("EG", (inner,)))
    if not eg_set[start]:
        return None
    pos: dict[int, int] = {}
    path: list[int] = []
    cur = start
    while cur not in pos:
        pos[cur] = len(path)
        path.append(cur)
        nxt = _first_succ_where(ks, cur, eg_set)
        cur = nxt
    loop_start = pos[cur]
    path.append(cur)
    return trace_from_indices(ks, path, loop_start=loop_start)


def _one_step_extension(
    ks: KripkeStructure, labeler: _Labeler, inner: Formula, violating: int
) -> int | None:
    """Successor demonstrating a violated next-step obligation inside `inner`."""
    if isinstance(inner, Temporal) and inner.op == "AX":
        return _first_succ_where(ks, violating, ~labeler.sat(inner.operands[0]))
    if isinstance(inner, Conn):
        if inner.op == "implies":
            antecedent, consequent = inner.operands
            if labeler.sat(antecedent)[violating] and not labeler.sat(consequent)[violating]:
                return _one_step_extension(ks, labeler, consequent, violating)
        elif inner.op in ("and", "or"):
            for operand in inner.operands:
                if not labeler.sat(operand)[violating]:
                    ext = _one_step_extension(ks, labeler, operand, violating)
                    if ext is not None:
                        return ext
    return None

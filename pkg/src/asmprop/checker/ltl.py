"""Bounded LTL refutation by lasso enumeration.

A property is violated when some infinite path falsifies it; the search
enumerates lasso-shaped paths (stem plus loop, total length up to the bound)
depth-first from each initial state in deterministic order and evaluates the
formula over the induced eventually-periodic word via fixpoint iteration.
Enumeration is exhaustive up to the bound, which keeps Violated verdicts
stable as the bound grows; the cost is exponential in the bound, so bounds
are expected to stay small. ``G`` over a temporal-free operand is decided
exactly as an invariant regardless of the bound.
"""

from __future__ import annotations

import time

import numpy as np

from ..lang.ast import Atom, BoolOp, Conn, Formula, Logic, Temporal, Term
from ..signature import TypedFormula
from .ctl import CheckStats, Verdict, check_invariant, trace_from_indices
from .kripke import KripkeStructure


def _temporal_free_term(f: Formula) -> Term | None:
    """Convert a temporal-free formula back into a Boolean term, else None."""
    if isinstance(f, Atom):
        return f.term
    if isinstance(f, Conn):
        parts = [_temporal_free_term(o) for o in f.operands]
        if any(p is None for p in parts):
            return None
        return BoolOp(f.op, tuple(parts))
    return None


def check_ltl_bounded(ks: KripkeStructure, typed: TypedFormula, bound: int) -> Verdict:
    """Search for a violating lasso with stem+loop length <= bound."""
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    if typed.logic is not Logic.LTL:
        raise ValueError(f"check_ltl_bounded needs an LTL formula, got {typed.logic.value}")
    formula = typed.formula
    if isinstance(formula, Temporal) and formula.op == "G":
        term = _temporal_free_term(formula.operands[0])
        if term is not None:
            return check_invariant(ks, term)

    t0 = time.perf_counter()
    atoms = _atom_arrays(ks, formula)
    found: list[tuple[list[int], int]] = []

    def dfs(path: list[int]) -> bool:
        last = path[-1]
        row = ks.succ[last]
        for loop_to in range(len(path)):
            if np.any(row == path[loop_to]):
                if not _eval_lasso(formula, path, loop_to, atoms):
                    found.append((list(path), loop_to))
                    return True
        if len(path) >= bound:
            return False
        for nxt in row:
            path.append(int(nxt))
            if dfs(path):
                return True
            path.pop()
        return False

    for init in ks.initial:
        if dfs([int(init)]):
            break

    seconds = time.perf_counter() - t0
    stats = CheckStats(ks.n_states, seconds)
    if found:
        path, loop_to = found[0]
        trace = trace_from_indices(ks, path + [path[loop_to]], loop_start=loop_to)
        return Verdict(holds=False, evidence=trace, stats=stats)
    return Verdict(holds=True, evidence=None, stats=stats, bound=bound)


def _atom_arrays(ks: KripkeStructure, formula: Formula) -> dict[Formula, np.ndarray]:
    arrays: dict[Formula, np.ndarray] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            arrays[f] = ks.atom_sat(f.term)
        elif isinstance(f, (Conn, Temporal)):
            for o in f.operands:
                walk(o)

    walk(formula)
    return arrays


def _eval_lasso(
    formula: Formula, path: list[int], loop_to: int, atoms: dict[Formula, np.ndarray]
) -> bool:
    """Truth of `formula` at position 0 of the lasso word path[0..k-1] with
    the successor of position k-1 being position loop_to."""
    k = len(path)
    nxt = list(range(1, k)) + [loop_to]
    memo: dict[Formula, list[bool]] = {}

    def ev(f: Formula) -> list[bool]:
        cached = memo.get(f)
        if cached is not None:
            return cached
        if isinstance(f, Atom):
            arr = atoms[f]
            out = [bool(arr[s]) for s in path]
        elif isinstance(f, Conn):
            ops = [ev(o) for o in f.operands]
            if f.op == "not":
                out = [not v for v in ops[0]]
            elif f.op == "and":
                out = [a and b for a, b in zip(ops[0], ops[1])]
            elif f.op == "or":
                out = [a or b for a, b in zip(ops[0], ops[1])]
            elif f.op == "implies":
                out = [(not a) or b for a, b in zip(ops[0], ops[1])]
            else:
                out = [a == b for a, b in zip(ops[0], ops[1])]
        elif isinstance(f, Temporal):
            if f.op == "X":
                sub = ev(f.operands[0])
                out = [sub[nxt[i]] for i in range(k)]
            elif f.op == "U":
                p, q = ev(f.operands[0]), ev(f.operands[1])
                out = _lfp_until(p, q, nxt)
            elif f.op == "F":
                q = ev(f.operands[0])
                out = _lfp_until([True] * k, q, nxt)
            elif f.op == "G":
                p = ev(f.operands[0])
                out = _gfp_globally(p, nxt)
            else:
                raise ValueError(f"not an LTL operator: {f.op}")
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    return ev(formula)[0]


def _lfp_until(p: list[bool], q: list[bool], nxt: list[int]) -> list[bool]:
    k = len(p)
    v = [False] * k
    for _ in range(k + 1):
        nv = [q[i] or (p[i] and v[nxt[i]]) for i in range(k)]
        if nv == v:
            break
        v = nv
    return v


def _gfp_globally(p: list[bool], nxt: list[int]) -> list[bool]:
    k = len(p)
    v = [True] * k
    for _ in range(k + 1):
        nv = [p[i] and v[nxt[i]] for i in range(k)]
        if nv == v:
            break
        v = nv
    return v

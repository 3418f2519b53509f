"""Hot kernels of the checker with two interchangeable backends.

The default backend JIT-compiles per-state loops with numba; a pure
numpy/vectorized fallback implements identical semantics and is selected by
setting the environment variable ``ASMPROP_NO_NUMBA`` (any non-empty value)
or calling :func:`set_backend`. Both backends must produce bit-identical
results; the test suite and ``benchmarks/bench_checker.py`` compare them.

Kernels: register-program execution (rule stepping and atom evaluation over
state batches), dense BFS reachability with parent/depth trees, backward
least-fixpoint for EU with distances, and greatest-fixpoint pruning for EG.
"""

from __future__ import annotations

import os

import numpy as np

from .compile import (
    ERR_ARG,
    ERR_CONFLICT,
    ERR_DOMAIN,
    ERR_MOD_ZERO,
    OP_ADD,
    OP_AND,
    OP_CONST,
    OP_EQ,
    OP_FLAGERR,
    OP_GE,
    OP_GT,
    OP_ITE,
    OP_LE,
    OP_LOC,
    OP_LT,
    OP_MOD,
    OP_NE,
    OP_NOT,
    OP_OR,
    OP_SUB,
    Program,
    StepProgram,
)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        return deco if not (args and callable(args[0])) else args[0]


_backend = "numpy" if os.environ.get("ASMPROP_NO_NUMBA") or not _HAVE_NUMBA else "numba"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend: {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name


# ---------------------------------------------------------------------------
# Register-program execution

def _run_program_numpy(program: Program, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Execute the program over a batch; returns (registers, err codes)."""
    n = vals.shape[0]
    regs = np.empty((program.n_regs, n), dtype=np.int64)
    err = np.zeros(n, dtype=np.int8)
    consts = program.consts
    for op, a, b, c, dest in program.code:
        if op == OP_LOC:
            regs[dest] = vals[:, a]
        elif op == OP_CONST:
            regs[dest] = consts[a]
        elif op == OP_ADD:
            regs[dest] = regs[a] + regs[b]
        elif op == OP_SUB:
            regs[dest] = regs[a] - regs[b]
        elif op == OP_MOD:
            divisor = np.abs(regs[b])
            safe = np.where(divisor == 0, 1, divisor)
            regs[dest] = np.where(divisor == 0, 0, regs[a] % safe)
        elif op == OP_EQ:
            regs[dest] = (regs[a] == regs[b]).astype(np.int64)
        elif op == OP_NE:
            regs[dest] = (regs[a] != regs[b]).astype(np.int64)
        elif op == OP_LT:
            regs[dest] = (regs[a] < regs[b]).astype(np.int64)
        elif op == OP_LE:
            regs[dest] = (regs[a] <= regs[b]).astype(np.int64)
        elif op == OP_GT:
            regs[dest] = (regs[a] > regs[b]).astype(np.int64)
        elif op == OP_GE:
            regs[dest] = (regs[a] >= regs[b]).astype(np.int64)
        elif op == OP_AND:
            regs[dest] = ((regs[a] != 0) & (regs[b] != 0)).astype(np.int64)
        elif op == OP_OR:
            regs[dest] = ((regs[a] != 0) | (regs[b] != 0)).astype(np.int64)
        elif op == OP_NOT:
            regs[dest] = (regs[a] == 0).astype(np.int64)
        elif op == OP_FLAGERR:
            mask = (regs[b] != 0) & (regs[a] == 0) & (err == 0)
            err[mask] = c
        elif op == OP_ITE:
            regs[dest] = np.where(regs[a] != 0, regs[b], regs[c])
        else:  # pragma: no cover
            raise ValueError(f"bad opcode {op}")
    return regs, err


@njit(cache=True)
def _exec_one(code, consts, vals_row, regs):  # pragma: no cover - jitted
    err = 0
    for k in range(code.shape[0]):
        op = code[k, 0]
        a = code[k, 1]
        b = code[k, 2]
        c = code[k, 3]
        dest = code[k, 4]
        if op == OP_LOC:
            regs[dest] = vals_row[a]
        elif op == OP_CONST:
            regs[dest] = consts[a]
        elif op == OP_ADD:
            regs[dest] = regs[a] + regs[b]
        elif op == OP_SUB:
            regs[dest] = regs[a] - regs[b]
        elif op == OP_MOD:
            d = regs[b]
            if d < 0:
                d = -d
            if d == 0:
                regs[dest] = 0
            else:
                regs[dest] = regs[a] % d
        elif op == OP_EQ:
            regs[dest] = 1 if regs[a] == regs[b] else 0
        elif op == OP_NE:
            regs[dest] = 1 if regs[a] != regs[b] else 0
        elif op == OP_LT:
            regs[dest] = 1 if regs[a] < regs[b] else 0
        elif op == OP_LE:
            regs[dest] = 1 if regs[a] <= regs[b] else 0
        elif op == OP_GT:
            regs[dest] = 1 if regs[a] > regs[b] else 0
        elif op == OP_GE:
            regs[dest] = 1 if regs[a] >= regs[b] else 0
        elif op == OP_AND:
            regs[dest] = 1 if regs[a] != 0 and regs[b] != 0 else 0
        elif op == OP_OR:
            regs[dest] = 1 if regs[a] != 0 or regs[b] != 0 else 0
        elif op == OP_NOT:
            regs[dest] = 1 if regs[a] == 0 else 0
        elif op == OP_FLAGERR:
            if err == 0 and regs[b] != 0 and regs[a] == 0:
                err = c
        else:  # OP_ITE
            regs[dest] = regs[b] if regs[a] != 0 else regs[c]
    return err


@njit(cache=True)
def _step_numba(
    vals, code, consts, n_regs, upd_loc, upd_guard, upd_value, n_controlled, lo, hi, out, err
):  # pragma: no cover - jitted
    regs = np.empty(n_regs, dtype=np.int64)
    assigned = np.empty(n_controlled, dtype=np.uint8)
    for i in range(vals.shape[0]):
        e = _exec_one(code, consts, vals[i], regs)
        for j in range(n_controlled):
            out[i, j] = vals[i, j]
            assigned[j] = 0
        for u in range(upd_loc.shape[0]):
            if regs[upd_guard[u]] != 0:
                loc = upd_loc[u]
                v = regs[upd_value[u]]
                if assigned[loc] != 0:
                    if out[i, loc] != v and e == 0:
                        e = ERR_CONFLICT
                else:
                    out[i, loc] = v
                    assigned[loc] = 1
                    if (v < lo[loc] or v > hi[loc]) and e == 0:
                        e = ERR_DOMAIN
        err[i] = e


def _step_numpy(step: StepProgram, vals: np.ndarray, n_controlled: int, lo, hi):
    regs, err = _run_program_numpy(step.program, vals)
    n = vals.shape[0]
    out = vals[:, :n_controlled].copy()
    assigned = np.zeros((n, n_controlled), dtype=bool)
    for u in range(step.upd_loc.shape[0]):
        loc = int(step.upd_loc[u])
        g = regs[step.upd_guard[u]] != 0
        v = regs[step.upd_value[u]]
        already = assigned[:, loc]
        conflict = g & already & (out[:, loc] != v) & (err == 0)
        err[conflict] = ERR_CONFLICT
        fresh = g & ~already
        out[fresh, loc] = v[fresh]
        bad = fresh & ((v < lo[loc]) | (v > hi[loc])) & (err == 0)
        err[bad] = ERR_DOMAIN
        assigned[:, loc] |= g
    return out, err


def step_batch(step: StepProgram, vals: np.ndarray, n_controlled: int, lo, hi):
    """Apply the main rule to a batch of states.

    Returns (new controlled values (n, n_controlled), err codes (n,)).
    """
    vals = np.ascontiguousarray(vals, dtype=np.int64)
    if _backend == "numba":
        n = vals.shape[0]
        out = np.empty((n, n_controlled), dtype=np.int64)
        err = np.zeros(n, dtype=np.int8)
        _step_numba(
            vals,
            step.program.code,
            step.program.consts,
            step.program.n_regs,
            step.upd_loc,
            step.upd_guard,
            step.upd_value,
            n_controlled,
            np.ascontiguousarray(lo[:n_controlled]),
            np.ascontiguousarray(hi[:n_controlled]),
            out,
            err,
        )
        return out, err
    return _step_numpy(step, vals, n_controlled, lo[:n_controlled], hi[:n_controlled])


@njit(cache=True)
def _eval_bool_numba(vals, code, consts, n_regs, result_reg, out, err):  # pragma: no cover
    regs = np.empty(n_regs, dtype=np.int64)
    for i in range(vals.shape[0]):
        err[i] = _exec_one(code, consts, vals[i], regs)
        out[i] = regs[result_reg] != 0


def eval_bool_batch(program: Program, vals: np.ndarray) -> np.ndarray:
    """Evaluate a Boolean term program over a batch of states.

    Evaluation faults (mod by zero, bad argument) raise ValueError; atoms are
    expected to be total over reachable states.
    """
    vals = np.ascontiguousarray(vals, dtype=np.int64)
    if _backend == "numba":
        n = vals.shape[0]
        out = np.empty(n, dtype=np.bool_)
        err = np.zeros(n, dtype=np.int8)
        _eval_bool_numba(
            vals, program.code, program.consts, program.n_regs, program.result_reg, out, err
        )
    else:
        regs, err = _run_program_numpy(program, vals)
        out = regs[program.result_reg] != 0
    if err.any():
        code = int(err[err != 0][0])
        kind = {ERR_MOD_ZERO: "mod by zero", ERR_ARG: "argument outside its domain"}.get(
            code, f"error {code}"
        )
        raise ValueError(f"term evaluation failed on {int((err != 0).sum())} state(s): {kind}")
    return out


# ---------------------------------------------------------------------------
# Dense BFS over the packed full state space

@njit(cache=True)
def _bfs_numba(succ_full, init_rows, err_full, max_states):  # pragma: no cover - jitted
    n_full = succ_full.shape[0]
    m = succ_full.shape[1]
    comp = np.full(n_full, -1, dtype=np.int64)
    order = np.empty(n_full, dtype=np.int64)
    parent = np.full(n_full, -1, dtype=np.int64)
    depth = np.zeros(n_full, dtype=np.int64)
    cnt = 0
    for k in range(init_rows.shape[0]):
        row = init_rows[k]
        if comp[row] < 0:
            comp[row] = cnt
            order[cnt] = row
            cnt += 1
    if cnt > max_states:
        return comp, order, parent, depth, cnt, True
    head = 0
    while head < cnt:
        row = order[head]
        if err_full[row] == 0:
            for j in range(m):
                t = succ_full[row, j]
                if comp[t] < 0:
                    if cnt >= max_states:
                        return comp, order, parent, depth, cnt, True
                    comp[t] = cnt
                    order[cnt] = t
                    parent[t] = head
                    depth[t] = depth[row] + 1
                    cnt += 1
        head += 1
    return comp, order, parent, depth, cnt, False


def _bfs_numpy(succ_full, init_rows, err_full, max_states):
    n_full = succ_full.shape[0]
    comp = np.full(n_full, -1, dtype=np.int64)
    order = np.empty(n_full, dtype=np.int64)
    parent = np.full(n_full, -1, dtype=np.int64)
    depth = np.zeros(n_full, dtype=np.int64)
    cnt = 0
    for row in init_rows:
        if comp[row] < 0:
            comp[row] = cnt
            order[cnt] = row
            cnt += 1
    if cnt > max_states:
        return comp, order, parent, depth, cnt, True
    level_start = 0
    while level_start < cnt:
        rows = order[level_start:cnt]
        level_end = cnt
        src = rows[err_full[rows] == 0]
        if src.size:
            cand = succ_full[src].ravel()  # row-major: source order, then choice order
            cand_parent = np.repeat(comp[src], succ_full.shape[1])
            fresh = comp[cand] < 0
            cand = cand[fresh]
            cand_parent = cand_parent[fresh]
            if cand.size:
                uniq, first_pos = np.unique(cand, return_index=True)
                gen_order = np.argsort(first_pos, kind="stable")
                new_rows = uniq[gen_order]
                new_parents = cand_parent[first_pos[gen_order]]
                if cnt + new_rows.size > max_states:
                    room = max_states - cnt
                    take = new_rows[: room + 1]
                    comp[take] = cnt + np.arange(take.size)
                    order[cnt : cnt + take.size] = take
                    return comp, order, parent, depth, cnt + take.size, True
                comp[new_rows] = cnt + np.arange(new_rows.size)
                order[cnt : cnt + new_rows.size] = new_rows
                parent[new_rows] = new_parents
                depth[new_rows] = depth[order[level_start]] + 1
                cnt += new_rows.size
        level_start = level_end
    return comp, order, parent, depth, cnt, False


def bfs_dense(succ_full, init_rows, err_full, max_states):
    """BFS over the packed full space; successors of faulted states are not
    expanded. Returns (comp index per row, rows in BFS order, parent compact
    index per row, depth per row, count, limit_hit)."""
    succ_full = np.ascontiguousarray(succ_full, dtype=np.int64)
    init_rows = np.ascontiguousarray(init_rows, dtype=np.int64)
    err_full = np.ascontiguousarray(err_full, dtype=np.int8)
    if _backend == "numba":
        return _bfs_numba(succ_full, init_rows, err_full, max_states)
    return _bfs_numpy(succ_full, init_rows, err_full, max_states)


# ---------------------------------------------------------------------------
# Predecessor CSR and fixpoint kernels

def build_predecessors(succ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR predecessor lists of the compact graph (deterministic order)."""
    n, m = succ.shape
    dst = succ.ravel()
    src = np.repeat(np.arange(n, dtype=np.int64), m)
    order = np.argsort(dst, kind="stable")
    pred = src[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=indptr[1:])
    return indptr, pred


@njit(cache=True)
def _eu_numba(pred_indptr, pred, p, q):  # pragma: no cover - jitted
    n = p.shape[0]
    sat = np.zeros(n, dtype=np.bool_)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    cnt = 0
    for i in range(n):
        if q[i]:
            sat[i] = True
            dist[i] = 0
            queue[cnt] = i
            cnt += 1
    head = 0
    while head < cnt:
        s = queue[head]
        head += 1
        for k in range(pred_indptr[s], pred_indptr[s + 1]):
            t = pred[k]
            if p[t] and not sat[t]:
                sat[t] = True
                dist[t] = dist[s] + 1
                queue[cnt] = t
                cnt += 1
    return sat, dist


def _eu_numpy(pred_indptr, pred, p, q):
    n = p.shape[0]
    sat = q.copy()
    dist = np.where(q, 0, -1).astype(np.int64)
    frontier = np.flatnonzero(q)
    level = 0
    while frontier.size:
        level += 1
        preds, _ = _gather_csr(pred_indptr, pred, frontier)
        cand = preds[p[preds] & ~sat[preds]]
        if cand.size == 0:
            break
        cand = np.unique(cand)
        sat[cand] = True
        dist[cand] = level
        frontier = cand
    return sat, dist


def _gather_csr(indptr, data, rows):
    """Concatenate CSR slices for `rows`; returns (values, owning row index)."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=data.dtype), np.empty(0, dtype=rows.dtype)
    offsets = np.repeat(np.cumsum(lens) - lens, lens)
    pos = np.arange(total, dtype=np.int64) - offsets + np.repeat(starts, lens)
    return data[pos], np.repeat(rows, lens)


def eu_fixpoint(pred_indptr, pred, p, q):
    """States satisfying E[p U q], with BFS distance-to-q (within p) per state."""
    p = np.ascontiguousarray(p, dtype=np.bool_)
    q = np.ascontiguousarray(q, dtype=np.bool_)
    if _backend == "numba":
        return _eu_numba(pred_indptr, pred, p, q)
    return _eu_numpy(pred_indptr, pred, p, q)


@njit(cache=True)
def _eg_numba(succ, pred_indptr, pred, p):  # pragma: no cover - jitted
    n, m = succ.shape
    alive = p.copy()
    count = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    cnt = 0
    for i in range(n):
        if alive[i]:
            c = 0
            for j in range(m):
                if alive[succ[i, j]]:
                    c += 1
            count[i] = c
            if c == 0:
                queue[cnt] = i
                cnt += 1
    head = 0
    while head < cnt:
        s = queue[head]
        head += 1
        alive[s] = False
        for k in range(pred_indptr[s], pred_indptr[s + 1]):
            t = pred[k]
            if alive[t]:
                count[t] -= 1
                if count[t] == 0:
                    queue[cnt] = t
                    cnt += 1
    return alive


def _eg_numpy(succ, pred_indptr, pred, p):
    alive = p.copy()
    count = np.where(alive, (alive[succ]).sum(axis=1), 0)
    frontier = np.flatnonzero(alive & (count == 0))
    while frontier.size:
        alive[frontier] = False
        preds, _ = _gather_csr(pred_indptr, pred, frontier)
        preds = preds[alive[preds]]
        if preds.size == 0:
            break
        np.subtract.at(count, preds, 1)
        frontier = np.unique(preds[count[preds] <= 0])
        frontier = frontier[alive[frontier] & (count[frontier] <= 0)]
    return alive


def eg_fixpoint(succ, pred_indptr, pred, p):
    """States with an infinite path staying inside p (greatest fixpoint)."""
    p = np.ascontiguousarray(p, dtype=np.bool_)
    if _backend == "numba":
        return _eg_numba(succ, pred_indptr, pred, p)
    return _eg_numpy(succ, pred_indptr, pred, p)


def ex_step(succ, p):
    """States with at least one successor in p (single vectorized gather)."""
    return p[succ].any(axis=1)

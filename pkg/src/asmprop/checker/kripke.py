"""Reachable-state-graph construction from a type-checked specification.

Two strategies produce identical results (BFS indexing, deterministic
successor order): a dense strategy that precomputes the transition of every
valuation in the packed full space and runs BFS over row indices, and a
frontier strategy for specifications whose full space is too large to
materialize, which steps frontier batches and deduplicates by packed code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..diagnostics import Diagnostics
from ..interpreter import AsmRuntimeError, Interpreter, State
from ..lang.ast import AsmSpecification, Term
from ..signature import typecheck_spec
from .compile import CompiledSpec
from . import kernels

_DENSE_MAX_ROWS = 4_000_000
_DENSE_MAX_CELLS = 32_000_000


@dataclass(frozen=True)
class Limits:
    max_states: int = 2_000_000
    max_time: float = 60.0  # seconds


@dataclass
class BuildStats:
    n_states: int
    n_transitions: int
    seconds: float
    strategy: str
    backend: str


class CheckerError(Exception):
    pass


class SpecNotWellTyped(CheckerError):
    def __init__(self, diagnostics: Diagnostics):
        self.diagnostics = diagnostics
        first = diagnostics.entries[0].message if diagnostics.entries else "type errors"
        super().__init__(f"specification does not type-check: {first}")


class StateLimitExceeded(CheckerError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"state limit exceeded: more than {limit} reachable states")


class TimeLimitExceeded(CheckerError):
    def __init__(self, limit: float):
        self.limit = limit
        super().__init__(f"time limit exceeded: build took longer than {limit} s")


@dataclass
class KripkeStructure:
    """Explicit reachable state graph with a total transition relation."""

    spec: AsmSpecification
    compiled: CompiledSpec
    values: np.ndarray  # (n, n_locations) int64, BFS order
    succ: np.ndarray  # (n, n_valuations) int32
    initial: np.ndarray  # int32
    parent: np.ndarray  # (n,) int32, BFS tree edge (-1 for initial states)
    depth: np.ndarray  # (n,) int32
    stats: BuildStats
    atom_cache: dict[str, np.ndarray] = field(default_factory=dict)
    _pred: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    def state(self, index: int) -> State:
        return self.compiled.row_to_state(self.values[index])

    def successors(self, index: int) -> list[int]:
        return [int(j) for j in self.succ[index]]

    def predecessors(self) -> tuple[np.ndarray, np.ndarray]:
        if self._pred is None:
            self._pred = kernels.build_predecessors(self.succ)
        return self._pred

    def atom_sat(self, term: Term) -> np.ndarray:
        """Boolean satisfaction array of a term over all states (cached)."""
        key, program = self.compiled.atom_program(term)
        if key not in self.atom_cache:
            self.atom_cache[key] = kernels.eval_bool_batch(program, self.values)
        return self.atom_cache[key]

    def shortest_path_to(self, index: int) -> list[int]:
        """State indices from an initial state to `index` along BFS tree edges."""
        path = [int(index)]
        while self.parent[path[-1]] >= 0:
            path.append(int(self.parent[path[-1]]))
        path.reverse()
        return path


def build_kripke(spec: AsmSpecification, limits: Limits | None = None) -> KripkeStructure:
    """Explore all reachable states; deterministic BFS indexing."""
    limits = limits or Limits()
    t0 = time.perf_counter()
    diags = typecheck_spec(spec, include_properties=False)
    if diags.has_errors():
        raise SpecNotWellTyped(diags)
    cs = CompiledSpec(spec)
    deadline = t0 + limits.max_time
    dense = cs.n_full <= _DENSE_MAX_ROWS and cs.n_full * (len(cs.locs) + cs.n_valuations) <= _DENSE_MAX_CELLS
    if dense:
        values, succ, initial, parent, depth = _build_dense(cs, limits, deadline)
        strategy = "dense"
    else:
        values, succ, initial, parent, depth = _build_frontier(cs, limits, deadline)
        strategy = "frontier"
    seconds = time.perf_counter() - t0
    stats = BuildStats(
        n_states=values.shape[0],
        n_transitions=int(succ.size),
        seconds=seconds,
        strategy=strategy,
        backend=kernels.get_backend(),
    )
    return KripkeStructure(
        spec=spec,
        compiled=cs,
        values=values,
        succ=succ,
        initial=initial,
        parent=parent,
        depth=depth,
        stats=stats,
    )


def _check_deadline(deadline: float, limits: Limits) -> None:
    if time.perf_counter() > deadline:
        raise TimeLimitExceeded(limits.max_time)


def _raise_runtime_error(cs: CompiledSpec, row: np.ndarray) -> None:
    """Reproduce a kernel-detected fault through the reference interpreter so
    the error carries the precise location and values."""
    state = cs.row_to_state(row)
    interp = Interpreter(cs.spec)
    try:
        interp.successors(state)
    except AsmRuntimeError:
        raise
    raise CheckerError(f"kernel flagged a fault the interpreter does not reproduce in {state!r}")


def _initial_rows(cs: CompiledSpec) -> np.ndarray:
    controlled = cs.interp.initial_controlled()
    base = np.array(
        [cs.encode_value(i, controlled[loc]) for i, loc in enumerate(cs.locs[: cs.n_controlled])],
        dtype=np.int64,
    )
    rows = np.empty((cs.n_valuations, len(cs.locs)), dtype=np.int64)
    rows[:, : cs.n_controlled] = base
    rows[:, cs.n_controlled :] = cs.monitored_vals
    return rows


def _succ_rows_from_ctrl(cs: CompiledSpec, new_ctrl: np.ndarray) -> np.ndarray:
    """Packed codes of all successors (monitored valuations enumerated)."""
    n = new_ctrl.shape[0]
    ctrl_code = (new_ctrl - cs.lo[: cs.n_controlled]) @ cs.strides[: cs.n_controlled]
    mon_codes = (cs.monitored_vals - cs.lo[cs.n_controlled :]) @ cs.strides[cs.n_controlled :]
    return ctrl_code[:, None] + mon_codes[None, :]


def _build_dense(cs: CompiledSpec, limits: Limits, deadline: float):
    n_full = cs.n_full
    codes = np.arange(n_full, dtype=np.int64)
    vals_full = cs.unpack(codes)
    _check_deadline(deadline, limits)
    new_ctrl, err = kernels.step_batch(cs.step, vals_full, cs.n_controlled, cs.lo, cs.hi)
    _check_deadline(deadline, limits)
    succ_full = _succ_rows_from_ctrl(cs, new_ctrl)
    init_rows = cs.pack(_initial_rows(cs))
    comp, order, parent_full, depth_full, count, limit_hit = kernels.bfs_dense(
        succ_full, init_rows, err, limits.max_states
    )
    if limit_hit:
        raise StateLimitExceeded(limits.max_states)
    _check_deadline(deadline, limits)
    reach = order[:count]
    reach_err = err[reach]
    if reach_err.any():
        first = int(np.flatnonzero(reach_err)[0])
        _raise_runtime_error(cs, vals_full[reach[first]])
    values = vals_full[reach]
    succ = comp[succ_full[reach]].astype(np.int32)
    parent = parent_full[reach].astype(np.int32)
    depth = depth_full[reach].astype(np.int32)
    initial = np.arange(min(cs.n_valuations, count), dtype=np.int32)
    return values, succ, initial, parent, depth


def _build_frontier(cs: CompiledSpec, limits: Limits, deadline: float):
    init_vals = _initial_rows(cs)
    init_codes = cs.pack(init_vals)
    code_to_idx: dict[int, int] = {}
    blocks: list[np.ndarray] = []
    parents: list[int] = []
    depths: list[int] = []
    for code in init_codes:
        code_to_idx[int(code)] = len(code_to_idx)
        parents.append(-1)
        depths.append(0)
    blocks.append(init_vals)
    succ_blocks: list[np.ndarray] = []
    frontier = init_vals
    frontier_idx = np.arange(len(init_codes), dtype=np.int64)
    depth_level = 0
    n_states = len(code_to_idx)
    while frontier.shape[0]:
        _check_deadline(deadline, limits)
        depth_level += 1
        new_ctrl, err = kernels.step_batch(cs.step, frontier, cs.n_controlled, cs.lo, cs.hi)
        if err.any():
            bad = int(np.flatnonzero(err)[0])
            _raise_runtime_error(cs, frontier[bad])
        succ_codes = _succ_rows_from_ctrl(cs, new_ctrl)  # (f, M)
        flat = succ_codes.ravel()
        succ_idx = np.empty(flat.shape[0], dtype=np.int32)
        new_rows: list[int] = []
        for k, code in enumerate(flat):
            idx = code_to_idx.get(int(code))
            if idx is None:
                idx = n_states
                if n_states >= limits.max_states:
                    raise StateLimitExceeded(limits.max_states)
                code_to_idx[int(code)] = idx
                parents.append(int(frontier_idx[k // cs.n_valuations]))
                depths.append(depth_level)
                new_rows.append(int(code))
                n_states += 1
            succ_idx[k] = idx
        succ_blocks.append(succ_idx.reshape(succ_codes.shape))
        if new_rows:
            new_vals = cs.unpack(np.array(new_rows, dtype=np.int64))
            blocks.append(new_vals)
            frontier_idx = np.arange(n_states - len(new_rows), n_states, dtype=np.int64)
            frontier = new_vals
        else:
            frontier = np.empty((0, len(cs.locs)), dtype=np.int64)
    values = np.concatenate(blocks, axis=0)
    succ = np.concatenate(succ_blocks, axis=0).astype(np.int32)
    parent = np.array(parents, dtype=np.int32)
    depth = np.array(depths, dtype=np.int32)
    initial = np.arange(min(cs.n_valuations, values.shape[0]), dtype=np.int32)
    return values, succ, initial, parent, depth

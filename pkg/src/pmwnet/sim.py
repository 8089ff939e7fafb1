"""Slotted simulation of a policy on a processing network."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._jit import backend
from .model import (
    ActionVec,
    NetworkSpec,
    NetworkState,
    derive_constants,
    evaluate_action,
    is_feasible,
)
from .policy import FUSION, PolicyParams, decide, edge_level, gate_mode

RNG_ID = "numpy-PCG64/SeedSequence-keyed/inverse-cdf-v2"
BLOCK = 1 << 16


class UnderflowViolation(RuntimeError):
    pass


class BoundViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    slots: int
    seed: int = 0
    q0: tuple[float, ...] | None = None
    trace: bool = False
    check_condition1: bool = False
    floating_buffer: float | tuple[float, ...] | None = None
    check_bounds: bool = True

    def __post_init__(self):
        if self.slots < 0:
            raise ValueError("slots must be >= 0")
        if self.q0 is not None and min(self.q0, default=0) < 0:
            raise ValueError("initial backlog must be nonnegative")


@dataclass(eq=False)
class SimTrace:
    q: np.ndarray  # (T+1, r) backlog at the start of each slot, then the final one
    state_ids: np.ndarray  # (T,)
    D: np.ndarray  # (T, r)
    I: np.ndarray  # (T, N)
    f: np.ndarray  # (T,)
    buffer: np.ndarray | None = None  # (T, r) physical content, floating runs only


@dataclass(eq=False)
class SimMetrics:
    slots: int
    avg_utility: float
    avg_weighted_backlog: float
    max_backlog: np.ndarray
    min_backlog: np.ndarray
    final_q: np.ndarray
    underflow_violations: int = 0
    condition1_max_gap: float = math.nan
    drop_count: float | None = None
    underflow_count: int | None = None
    null_slot_fraction: float | None = None
    trace: SimTrace | None = None
    backend: str = field(default_factory=backend)


@dataclass(frozen=True, eq=False)
class SlotRecord:
    state_index: int
    action: ActionVec
    f: float
    q_next: np.ndarray


class RngStream:
    """One independent generator per random quantity of the network.

    Each quantity draws from a child of ``SeedSequence(seed)`` whose spawn key
    is derived from the quantity's role and owner id, not its position, so
    adding a quantity to a network leaves the others' sequences untouched.
    """

    algorithm = RNG_ID

    def __init__(self, spec: NetworkSpec, seed: int):
        arr = spec.arrays
        self.seed = seed
        self.quantities = arr.quantities
        self.gens = [np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=_key(q))))
                     for q in arr.quantities]
        self.cdfs = []
        for qty in arr.quantities:
            cdf = np.cumsum(qty.dist.probs)
            cdf[-1] = 1.0
            self.cdfs.append(cdf)
        self.radices = np.array(arr.radices, dtype=np.int64)
        self.r, self.n_proc = arr.r, arr.n_proc

    def draw(self, n: int):
        """Next ``n`` states as per-queue / per-processor value blocks plus state ids."""
        R = np.zeros((n, self.r))
        c = np.zeros((n, self.r))
        C = np.zeros((n, self.n_proc))
        p = np.zeros((n, self.n_proc))
        target = {"R": R, "c": c, "C": C, "p": p}
        ids = np.zeros(n, dtype=np.int64)
        for qty, gen, cdf, radix in zip(self.quantities, self.gens, self.cdfs, self.radices):
            k = np.minimum(np.searchsorted(cdf, gen.random(n), side="right"), len(cdf) - 1)
            target[qty.role][:, qty.index] = np.asarray(qty.dist.values)[k]
            ids = ids * radix + k
        return R, c, C, p, ids


def _key(qty) -> tuple[int, int]:
    return ("RcCp".index(qty.role), zlib.crc32(qty.owner.encode()))


def queue_bounds(spec: NetworkSpec, params: PolicyParams) -> np.ndarray:
    """Upper bound on every queue that holds for all slots when started empty."""
    arr = spec.arrays
    theta = params.theta_arr
    if params.kind == FUSION:
        V = params.V
        return np.array([theta[0] - V, theta[1] - V, theta[2] - V + 1])
    k = derive_constants(spec, params.w)
    src = theta - params.V * k.c_min / params.w_arr + k.R_max
    internal = theta + k.M_q_d * k.alpha_max
    return np.where(arr.is_source, src, internal)


def step(spec: NetworkSpec, params: PolicyParams, q, state: NetworkState):
    """One slot through the plain Python path: decide, check underflow, update."""
    q = np.asarray(q, dtype=float)
    action = decide(spec, params, state, q)
    eff = evaluate_action(spec, state, action)
    if not is_feasible(q, eff):
        raise UnderflowViolation(f"action {action} underflows q={q.tolist()}")
    q_next = q - eff.mu + eff.A
    return q_next, SlotRecord(state.index, action, eff.f, q_next)


def _kernel_args(spec: NetworkSpec, params: PolicyParams):
    arr = spec.arrays
    return dict(
        V=float(params.V), theta=params.theta_arr, w=params.w_arr, beta=arr.beta, alpha=arr.alpha,
        alpha_out=arr.alpha_out, is_output=arr.is_output, demand=arr.demand, is_source=arr.is_source,
        gate_mode=gate_mode(params), edge_level=edge_level(spec), family_kind=arr.family_kind,
        family_vecs=arr.family_vecs,
    )


def _initial_q(spec: NetworkSpec, config: SimConfig) -> np.ndarray:
    r = spec.arrays.r
    if config.q0 is None:
        return np.zeros(r)
    q0 = np.asarray(config.q0, dtype=float)
    if q0.shape != (r,):
        raise ValueError(f"q0 needs {r} entries")
    return q0.copy()


def run(spec: NetworkSpec, params: PolicyParams, config: SimConfig) -> SimMetrics:
    """Simulate ``config.slots`` slots; deterministic in (spec, params, seed)."""
    if config.floating_buffer is not None:
        return run_floating(spec, params, config)
    arr = spec.arrays
    r, n_proc = arr.r, arr.n_proc
    q = _initial_q(spec, config)
    kw = _kernel_args(spec, params)
    acc = np.zeros(kernels.N_ACC)
    qmax, qmin = q.copy(), q.copy()
    rng = RngStream(spec, config.seed)
    record = config.trace or config.check_condition1
    table = None
    if config.check_condition1:
        from .oracle import cached_table
        table = cached_table(spec)
    gap = -math.inf
    parts: list = []
    done = 0
    while done < config.slots:
        n = min(BLOCK, config.slots - done)
        R, c, C, p, ids = rng.draw(n)
        if record:
            tq = np.zeros((n, r))
            tD = np.zeros((n, r), dtype=np.int8)
            tI = np.zeros((n, n_proc), dtype=np.int8)
            tf = np.zeros(n)
        else:
            tq = np.zeros((0, r))
            tD = np.zeros((0, r), dtype=np.int8)
            tI = np.zeros((0, n_proc), dtype=np.int8)
            tf = np.zeros(0)
        bad = kernels.simulate_block(q, R, c, C, p, acc=acc, qmax=qmax, qmin=qmin, record=record,
                                     tq=tq, tD=tD, tI=tI, tf=tf, **kw)
        if bad >= 0:
            raise UnderflowViolation(
                f"slot {done + bad}: policy {params.kind} chose an action that underflows q={q.tolist()}")
        if table is not None:
            gap = max(gap, _condition1_gap(spec, params, table, ids, tq, tD, tI, R, c, C, p))
        if config.trace:
            parts.append((tq, ids, tD, tI, tf))
        done += n

    T = config.slots
    metrics = SimMetrics(
        slots=T,
        avg_utility=acc[kernels.ACC_UTIL] / T if T else 0.0,
        avg_weighted_backlog=acc[kernels.ACC_WB] / T if T else 0.0,
        max_backlog=qmax, min_backlog=qmin, final_q=q.copy(),
        condition1_max_gap=gap if config.check_condition1 and T else math.nan,
    )
    if config.trace:
        metrics.trace = _assemble_trace(parts, q, r, n_proc)
    if config.check_bounds:
        check_bounds(spec, params, metrics, config)
    return metrics


def _assemble_trace(parts, q_final, r, n_proc) -> SimTrace:
    if not parts:
        return SimTrace(q_final[None, :].copy(), np.zeros(0, np.int64), np.zeros((0, r), np.int8),
                        np.zeros((0, n_proc), np.int8), np.zeros(0))
    tq, ids, tD, tI, tf = (np.concatenate(x) for x in zip(*parts))
    return SimTrace(np.vstack([tq, q_final]), ids, tD, tI, tf)


def _condition1_gap(spec, params, table, ids, Q, D, I, R, c, C, p) -> float:
    from .oracle import d_star_many
    arr = spec.arrays
    best = d_star_many(table, params, ids, Q)
    A = D * R + I @ arr.alpha
    mu = I @ arr.beta
    # utility recomputed from the drawn state rather than taken from the kernel
    f = (I * p * arr.alpha_out).sum(axis=1) - (D * R * c).sum(axis=1) - (I * C).sum(axis=1)
    chosen = params.V * f + ((Q - params.theta_arr) * params.w_arr * (mu - A)).sum(axis=1)
    return float((best - chosen).max())


def check_bounds(spec: NetworkSpec, params: PolicyParams, metrics: SimMetrics, config: SimConfig) -> None:
    if np.any(metrics.min_backlog < 0):
        raise BoundViolation(f"negative backlog {metrics.min_backlog.tolist()}")
    if config.q0 is not None and any(config.q0):
        return  # the deterministic ceilings assume an empty start
    upper = queue_bounds(spec, params)
    over = metrics.max_backlog > upper
    if np.any(over):
        raise BoundViolation(f"backlog {metrics.max_backlog.tolist()} exceeds bound {upper.tolist()}")


def run_floating(spec: NetworkSpec, params: PolicyParams, config: SimConfig) -> SimMetrics:
    """Simulation with a finite physical buffer and a counter behind every queue."""
    if config.floating_buffer is None:
        raise ValueError("floating_buffer must be set")
    arr = spec.arrays
    r = arr.r
    cap = np.broadcast_to(np.asarray(config.floating_buffer, dtype=float), (r,)).copy()
    if np.any(cap < 1):
        raise ValueError("buffer sizes must be >= 1")
    q = _initial_q(spec, config)
    buf = np.minimum(q, cap)
    kw = _kernel_args(spec, params)
    acc = np.zeros(kernels.N_ACC)
    stats = np.zeros(3)
    qmax, qmin = q.copy(), q.copy()
    rng = RngStream(spec, config.seed)
    parts: list = []
    done = 0
    while done < config.slots:
        n = min(BLOCK, config.slots - done)
        R, c, C, p, ids = rng.draw(n)
        shape = (n, r) if config.trace else (0, r)
        tq, tb = np.zeros(shape), np.zeros(shape)
        bad = kernels.simulate_floating_block(q, buf, cap, R, c, C, p, acc=acc, stats=stats, qmax=qmax,
                                              qmin=qmin, record=config.trace, tq=tq, tb=tb, **kw)
        if bad >= 0:
            raise UnderflowViolation(f"slot {done + bad}: virtual backlog underflow q={q.tolist()}")
        if config.trace:
            parts.append((tq, tb, ids))
        done += n
    T = config.slots
    metrics = SimMetrics(
        slots=T,
        avg_utility=acc[kernels.ACC_UTIL] / T if T else 0.0,
        avg_weighted_backlog=acc[kernels.ACC_WB] / T if T else 0.0,
        max_backlog=qmax, min_backlog=qmin, final_q=q.copy(),
        drop_count=float(stats[kernels.ST_DROPPED]),
        underflow_count=int(stats[kernels.ST_UNDERFLOWS]),
        null_slot_fraction=stats[kernels.ST_NULL_SLOTS] / T if T else 0.0,
    )
    if config.trace:
        if parts:
            tq, tb, ids = (np.concatenate(x) for x in zip(*parts))
        else:
            tq, tb, ids = np.zeros((0, r)), np.zeros((0, r)), np.zeros(0, np.int64)
        empty = np.zeros((len(ids), 0), np.int8)
        metrics.trace = SimTrace(np.vstack([tq, q]), ids, empty, empty, np.zeros(len(ids)), buffer=tb)
    if config.check_bounds:
        check_bounds(spec, params, metrics, config)
    return metrics


def write_trace(path, spec: NetworkSpec, params: PolicyParams, config: SimConfig, trace: SimTrace) -> None:
    """CSV trace: ``#`` header lines, then one row per slot with the post-slot backlog."""
    arr = spec.arrays
    src = arr.source_idx
    qcols = [f"q_{j + 1}" for j in range(arr.r)]
    dcols = [f"D_{j + 1}" for j in src]
    icols = [f"I_{n + 1}" for n in range(arr.n_proc)]
    with open(path, "w", newline="") as fh:
        fh.write(f"# spec_hash={spec.digest()}\n")
        fh.write(f"# seed={config.seed}\n")
        fh.write(f"# rng={RNG_ID}\n")
        fh.write(f"# V={params.V}\n")
        fh.write(f"# policy={params.kind}\n")
        fh.write(f"# theta={','.join(repr(float(x)) for x in params.theta)}\n")
        fh.write(f"# w={','.join(repr(float(x)) for x in params.w)}\n")
        fh.write(f"# queues={','.join(arr.queue_ids)}\n")
        fh.write(f"# processors={','.join(arr.proc_ids)}\n")
        fh.write(f"# q0={','.join(_fmt(x) for x in trace.q[0])}\n")
        fh.write(",".join(["slot", "state_id", *qcols, *dcols, *icols, "f"]) + "\n")
        for t in range(len(trace.state_ids)):
            row = [str(t), str(int(trace.state_ids[t]))]
            row += [_fmt(x) for x in trace.q[t + 1]]
            row += [str(int(trace.D[t, j])) for j in src] if trace.D.shape[1] else []
            row += [str(int(x)) for x in trace.I[t]]
            row.append(_fmt(trace.f[t]))
            fh.write(",".join(row) + "\n")


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)

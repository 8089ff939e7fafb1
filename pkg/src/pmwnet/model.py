"""Processing-network topology, randomness and per-slot effects.

A network is a DAG of queues and processors. Source queues receive exogenous
arrivals; internal queues only receive what internal processors produce.
Every internal processor feeds exactly one demand queue, output processors
deliver to the outside and earn a per-unit profit.

Arrays are aligned to the declaration order of queues and processors. Where a
quantity only exists for a subset (arrivals for sources, profit for output
processors) the remaining entries are zero.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

PROB_TOL = 1e-12
REAL_TOL = 1e-9
MAX_FAMILY_SIZE = 1 << 20

SOURCE, INTERNAL, OUTPUT = "source", "internal", "output"


class SpecError(ValueError):
    """Structural problem with a network description."""


class CyclicTopology(SpecError):
    pass


class DuplicateId(SpecError):
    pass


class UnknownId(SpecError):
    pass


class MultipleDemandQueues(SpecError):
    pass


class UnnormalizedDistribution(SpecError):
    pass


class NotDownwardClosed(SpecError):
    pass


class InvalidSpec(SpecError):
    pass


class DimensionMismatch(ValueError):
    pass


class InvalidActivationVector(ValueError):
    pass


class TooManyProcessorsForExactSearch(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Finite discrete distribution."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    @classmethod
    def constant(cls, value: float) -> Distribution:
        return cls((value,), (1.0,))

    @classmethod
    def of(cls, pairs: Mapping[float, float]) -> Distribution:
        return cls(tuple(pairs), tuple(pairs.values()))

    @property
    def lo(self) -> float:
        return min(self.values)

    @property
    def hi(self) -> float:
        return max(self.values)

    @property
    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class QueueSpec:
    id: str
    kind: str  # "source" | "internal"


@dataclass(frozen=True)
class ProcessorSpec:
    id: str
    kind: str  # "internal" | "output"
    supply: tuple[tuple[str, float], ...]
    demand: tuple[tuple[str, float], ...] = ()
    alpha_out: float | None = None


@dataclass(frozen=True)
class ActivationFamily:
    """Which processor subsets may fire together.

    ``kind`` is ``"all"`` (any subset), ``"explicit"`` (``vectors`` lists the
    0/1 members in processor order) or ``"conflict"`` (at most one processor
    of every group in ``groups`` may be on).
    """

    kind: str = "all"
    vectors: tuple[tuple[int, ...], ...] = ()
    groups: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class StochasticModel:
    arrivals: Mapping[str, Distribution]
    admission_cost: Mapping[str, Distribution] = field(default_factory=dict)
    activation_cost: Mapping[str, Distribution] = field(default_factory=dict)
    output_profit: Mapping[str, Distribution] = field(default_factory=dict)


@dataclass(frozen=True)
class Quantity:
    """One independent random input of a slot."""

    role: str  # "R" | "c" | "C" | "p"
    owner: str
    index: int  # queue index for R/c, processor index for C/p
    dist: Distribution


@dataclass(frozen=True, eq=False)
class NetworkArrays:
    """Dense numeric view of a validated spec, consumed by the kernels."""

    queue_ids: tuple[str, ...]
    proc_ids: tuple[str, ...]
    is_source: np.ndarray  # (r,) bool
    beta: np.ndarray  # (N, r) consumed per activation
    alpha: np.ndarray  # (N, r) produced per activation
    alpha_out: np.ndarray  # (N,) output units per activation
    is_output: np.ndarray  # (N,) bool
    demand: np.ndarray  # (N,) demand queue index, -1 for outputs
    quantities: tuple[Quantity, ...]
    family_kind: int  # 0 all-subsets, 1 enumerated
    family_vecs: np.ndarray  # (m, N) int8, lexicographically sorted

    @property
    def r(self) -> int:
        return len(self.queue_ids)

    @property
    def n_proc(self) -> int:
        return len(self.proc_ids)

    @cached_property
    def source_idx(self) -> np.ndarray:
        return np.flatnonzero(self.is_source)

    @cached_property
    def radices(self) -> tuple[int, ...]:
        return tuple(len(q.dist.values) for q in self.quantities)

    @property
    def n_states(self) -> int:
        return math.prod(self.radices)


@dataclass(frozen=True)
class NetworkSpec:
    queues: tuple[QueueSpec, ...]
    processors: tuple[ProcessorSpec, ...]
    stochastic: StochasticModel
    activation_family: ActivationFamily = ActivationFamily()
    name: str = ""

    def queue(self, qid: str) -> QueueSpec:
        for q in self.queues:
            if q.id == qid:
                return q
        raise UnknownId(f"no queue {qid!r}")

    @property
    def sources(self) -> tuple[QueueSpec, ...]:
        return tuple(q for q in self.queues if q.kind == SOURCE)

    @property
    def internal_processors(self) -> tuple[ProcessorSpec, ...]:
        return tuple(p for p in self.processors if p.kind == INTERNAL)

    @property
    def output_processors(self) -> tuple[ProcessorSpec, ...]:
        return tuple(p for p in self.processors if p.kind == OUTPUT)

    def to_dict(self) -> dict:
        def dist(d: Distribution) -> dict:
            return {"values": list(d.values), "probs": list(d.probs)}

        procs = []
        for p in self.processors:
            entry: dict = {"id": p.id, "kind": p.kind, "supply": dict(p.supply)}
            if p.kind == INTERNAL:
                entry["demand"] = dict(p.demand)
            else:
                entry["alpha_out"] = p.alpha_out
            procs.append(entry)
        fam = self.activation_family
        fam_d: dict = {"kind": fam.kind}
        if fam.kind == "explicit":
            fam_d["vectors"] = [list(v) for v in fam.vectors]
        elif fam.kind == "conflict":
            fam_d["groups"] = [list(g) for g in fam.groups]
        st = self.stochastic
        out = {
            "queues": [{"id": q.id, "kind": q.kind} for q in self.queues],
            "processors": procs,
            "arrivals": {k: dist(v) for k, v in st.arrivals.items()},
            "admission_cost": {k: dist(v) for k, v in st.admission_cost.items()},
            "activation_cost": {k: dist(v) for k, v in st.activation_cost.items()},
            "output_profit": {k: dist(v) for k, v in st.output_profit.items()},
            "activation_family": fam_d,
        }
        if self.name:
            out["name"] = self.name
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @cached_property
    def arrays(self) -> NetworkArrays:
        return _compile(self)

    # Convenience builders, mostly for tests and interactive use.

    def state(self, R=None, c=None, C=None, p=None) -> NetworkState:
        """Build a state from per-id values; single-valued quantities may be omitted."""
        given = {"R": R or {}, "c": c or {}, "C": C or {}, "p": p or {}}
        idx = []
        for qty in self.arrays.quantities:
            vals = qty.dist.values
            if qty.owner in given[qty.role]:
                v = given[qty.role][qty.owner]
                matches = [i for i, x in enumerate(vals) if abs(x - v) <= REAL_TOL]
                if not matches:
                    raise ValueError(f"{qty.role}[{qty.owner}]={v} outside support {vals}")
                idx.append(matches[0])
            elif len(vals) == 1:
                idx.append(0)
            else:
                raise ValueError(f"{qty.role}[{qty.owner}] must be given")
        return state_from_indices(self.arrays, idx)

    def action(self, D: Sequence[int] = (), I: Sequence[int] = ()) -> ActionVec:
        """Build an action from admissions over sources and activations over processors."""
        arr = self.arrays
        d = np.zeros(arr.r, dtype=np.int8)
        if len(D):
            if len(D) != len(arr.source_idx):
                raise DimensionMismatch("D must have one entry per source queue")
            d[arr.source_idx] = np.asarray(D, dtype=np.int8)
        i = np.zeros(arr.n_proc, dtype=np.int8)
        if len(I):
            if len(I) != arr.n_proc:
                raise DimensionMismatch("I must have one entry per processor")
            i[:] = np.asarray(I, dtype=np.int8)
        return ActionVec(d, i)


@dataclass(frozen=True, eq=False)
class NetworkState:
    """Realized randomness of one slot."""

    R: np.ndarray  # (r,) arrivals, zero on internal queues
    c: np.ndarray  # (r,) per-unit admission cost, zero on internal queues
    C: np.ndarray  # (N,) activation cost, zero on output processors
    p: np.ndarray  # (N,) per-unit profit, zero on internal processors
    index: int


@dataclass(frozen=True, eq=False)
class ActionVec:
    D: np.ndarray  # (r,) admission, only meaningful on source queues
    I: np.ndarray  # (N,) activation

    def __eq__(self, other):
        if not isinstance(other, ActionVec):
            return NotImplemented
        return np.array_equal(self.D, other.D) and np.array_equal(self.I, other.I)

    def __repr__(self) -> str:
        return f"ActionVec(D={self.D.tolist()}, I={self.I.tolist()})"


@dataclass(frozen=True, eq=False)
class Effects:
    A: np.ndarray
    mu: np.ndarray
    f: float


@dataclass(frozen=True)
class DerivedConstants:
    N_p: int
    N_p_in: int
    N_p_o: int
    N_q: int
    N_q_s: int
    N_q_in: int
    M_p: int
    M_q_s: int
    M_q_d: int
    beta_max: float
    beta_min: float
    alpha_max: float
    R_max: float
    c_min: float
    c_max: float
    C_min: float
    C_max: float
    p_min: float
    p_max: float
    w_max: float
    w_min: float
    w_sum: float
    nu_max: float
    delta_max: float
    B_general: float
    B_lemma2: float
    C: float


def find_violations(spec: NetworkSpec) -> list[SpecError]:
    """Every structural problem with ``spec``; empty when it is usable."""
    errs: list[SpecError] = []
    qids = [q.id for q in spec.queues]
    pids = [p.id for p in spec.processors]
    for kind, ids in (("queue", qids), ("processor", pids)):
        for dup in sorted({i for i in ids if ids.count(i) > 1}):
            errs.append(DuplicateId(f"{kind} id {dup!r} declared more than once"))
    clash = set(qids) & set(pids)
    for cid in sorted(clash):
        errs.append(DuplicateId(f"id {cid!r} names both a queue and a processor"))
    if not spec.queues:
        errs.append(InvalidSpec("network has no queues"))
    qset = set(qids)
    for q in spec.queues:
        if q.kind not in (SOURCE, INTERNAL):
            errs.append(InvalidSpec(f"queue {q.id!r}: unknown kind {q.kind!r}"))

    for p in spec.processors:
        if p.kind not in (INTERNAL, OUTPUT):
            errs.append(InvalidSpec(f"processor {p.id!r}: unknown kind {p.kind!r}"))
            continue
        if not p.supply:
            errs.append(InvalidSpec(f"processor {p.id!r} has no supply queue"))
        seen = set()
        for qid, b in p.supply:
            if qid not in qset:
                errs.append(UnknownId(f"processor {p.id!r} supplied by unknown queue {qid!r}"))
            if qid in seen:
                errs.append(DuplicateId(f"processor {p.id!r} lists supply {qid!r} twice"))
            seen.add(qid)
            if not b > 0:
                errs.append(InvalidSpec(f"processor {p.id!r}: beta for {qid!r} must be > 0"))
        if p.kind == INTERNAL:
            if len(p.demand) != 1:
                errs.append(MultipleDemandQueues(
                    f"internal processor {p.id!r} needs exactly one demand queue, got {len(p.demand)}"))
            for qid, a in p.demand:
                if qid not in qset:
                    errs.append(UnknownId(f"processor {p.id!r} feeds unknown queue {qid!r}"))
                elif spec.queue(qid).kind == SOURCE:
                    errs.append(InvalidSpec(f"processor {p.id!r} feeds source queue {qid!r}"))
                if not a > 0:
                    errs.append(InvalidSpec(f"processor {p.id!r}: alpha for {qid!r} must be > 0"))
            if p.alpha_out is not None:
                errs.append(InvalidSpec(f"internal processor {p.id!r} cannot have alpha_out"))
        else:
            if p.demand:
                errs.append(InvalidSpec(f"output processor {p.id!r} cannot have demand queues"))
            if p.alpha_out is None or not p.alpha_out > 0:
                errs.append(InvalidSpec(f"output processor {p.id!r} needs alpha_out > 0"))

    errs.extend(_stochastic_violations(spec))
    if not any(isinstance(e, (UnknownId, DuplicateId)) for e in errs):
        cyc = _find_cycle(spec)
        if cyc:
            errs.append(CyclicTopology("cycle " + " -> ".join(cyc)))
    errs.extend(_family_violations(spec))
    return errs


def _stochastic_violations(spec: NetworkSpec) -> list[SpecError]:
    errs: list[SpecError] = []
    st = spec.stochastic
    src = {q.id for q in spec.sources}
    internal_p = {p.id for p in spec.internal_processors}
    output_p = {p.id for p in spec.output_processors}
    tables = (
        ("arrivals", st.arrivals, src, True),
        ("admission_cost", st.admission_cost, src, False),
        ("activation_cost", st.activation_cost, internal_p, False),
        ("output_profit", st.output_profit, output_p, True),
    )
    for name, table, owners, required in tables:
        for key in table:
            if key not in owners:
                errs.append(UnknownId(f"{name} given for {key!r}, which is not a valid owner"))
        if required:
            for key in sorted(owners - set(table)):
                errs.append(InvalidSpec(f"{name} missing for {key!r}"))
        for key, d in table.items():
            if len(d.values) != len(d.probs) or not d.values:
                errs.append(InvalidSpec(f"{name}[{key}]: values/probs length mismatch"))
                continue
            if any(p < 0 for p in d.probs) or abs(math.fsum(d.probs) - 1.0) > PROB_TOL:
                errs.append(UnnormalizedDistribution(
                    f"{name}[{key}]: probabilities {list(d.probs)} do not sum to 1"))
            if name == "arrivals" and any(v < 0 for v in d.values):
                errs.append(InvalidSpec(f"arrivals[{key}]: negative arrival value"))
    return errs


def _find_cycle(spec: NetworkSpec) -> list[str] | None:
    graph: dict[str, list[str]] = {q.id: [] for q in spec.queues}
    for p in spec.processors:
        graph[p.id] = [qid for qid, _ in p.demand]
        for qid, _ in p.supply:
            graph[qid].append(p.id)
    color = dict.fromkeys(graph, 0)
    stack_path: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = 1
        stack_path.append(node)
        for nxt in graph[node]:
            if color[nxt] == 1:
                return stack_path[stack_path.index(nxt):] + [nxt]
            if color[nxt] == 0:
                found = visit(nxt)
                if found:
                    return found
        color[node] = 2
        stack_path.pop()
        return None

    for node in graph:
        if color[node] == 0:
            found = visit(node)
            if found:
                return found
    return None


def _family_violations(spec: NetworkSpec) -> list[SpecError]:
    fam = spec.activation_family
    n = len(spec.processors)
    if fam.kind == "all":
        return []
    if fam.kind == "conflict":
        pids = {p.id for p in spec.processors}
        return [UnknownId(f"conflict group names unknown processor {x!r}")
                for g in fam.groups for x in g if x not in pids]
    if fam.kind != "explicit":
        return [InvalidSpec(f"unknown activation family kind {fam.kind!r}")]
    errs: list[SpecError] = []
    members = set()
    for v in fam.vectors:
        if len(v) != n or any(x not in (0, 1) for x in v):
            errs.append(InvalidSpec(f"activation vector {list(v)} is not a 0/1 vector of length {n}"))
        members.add(tuple(v))
    if errs:
        return errs
    if not members:
        return [NotDownwardClosed("explicit activation family is empty")]
    for v in sorted(members):
        for k, bit in enumerate(v):
            if bit:
                smaller = v[:k] + (0,) + v[k + 1:]
                if smaller not in members:
                    errs.append(NotDownwardClosed(
                        f"{list(v)} is allowed but {list(smaller)} is not"))
    return errs


def validate_spec(spec: NetworkSpec) -> NetworkSpec:
    """Return ``spec`` unchanged if it is well formed, else raise.

    The raised error is the first violation found; all of them are attached
    as ``err.violations``.
    """
    errs = find_violations(spec)
    if errs:
        first = errs[0]
        first.violations = errs
        raise first
    return spec


def _compile(spec: NetworkSpec) -> NetworkArrays:
    qidx = {q.id: j for j, q in enumerate(spec.queues)}
    r, n = len(spec.queues), len(spec.processors)
    beta = np.zeros((n, r))
    alpha = np.zeros((n, r))
    alpha_out = np.zeros(n)
    is_output = np.zeros(n, dtype=np.bool_)
    demand = np.full(n, -1, dtype=np.int64)
    for i, p in enumerate(spec.processors):
        for qid, b in p.supply:
            beta[i, qidx[qid]] = b
        if p.kind == OUTPUT:
            is_output[i] = True
            alpha_out[i] = p.alpha_out
        else:
            (qid, a), = p.demand
            alpha[i, qidx[qid]] = a
            demand[i] = qidx[qid]
    is_source = np.array([q.kind == SOURCE for q in spec.queues], dtype=np.bool_)

    st = spec.stochastic
    zero = Distribution.constant(0.0)
    quantities = []
    for j, q in enumerate(spec.queues):
        if q.kind == SOURCE:
            quantities.append(Quantity("R", q.id, j, st.arrivals[q.id]))
    for j, q in enumerate(spec.queues):
        if q.kind == SOURCE:
            quantities.append(Quantity("c", q.id, j, st.admission_cost.get(q.id, zero)))
    for i, p in enumerate(spec.processors):
        if p.kind == INTERNAL:
            quantities.append(Quantity("C", p.id, i, st.activation_cost.get(p.id, zero)))
    for i, p in enumerate(spec.processors):
        if p.kind == OUTPUT:
            quantities.append(Quantity("p", p.id, i, st.output_profit[p.id]))

    fam = spec.activation_family
    if fam.kind == "all":
        kind, vecs = 0, np.zeros((0, n), dtype=np.int8)
    else:
        kind, vecs = 1, family_matrix(spec)
    return NetworkArrays(
        queue_ids=tuple(q.id for q in spec.queues),
        proc_ids=tuple(p.id for p in spec.processors),
        is_source=is_source, beta=beta, alpha=alpha, alpha_out=alpha_out,
        is_output=is_output, demand=demand, quantities=tuple(quantities),
        family_kind=kind, family_vecs=vecs,
    )


def family_matrix(spec: NetworkSpec) -> np.ndarray:
    """All members of the activation family as rows, in lexicographic order."""
    fam = spec.activation_family
    n = len(spec.processors)
    if fam.kind == "explicit":
        rows = sorted(set(tuple(v) for v in fam.vectors))
        return np.array(rows, dtype=np.int8).reshape(len(rows), n)
    if n > 20:
        raise TooManyProcessorsForExactSearch(
            f"{n} processors: enumerating 2^{n} activation vectors exceeds the 2^20 cap")
    cand = itertools.product((0, 1), repeat=n)
    if fam.kind == "conflict":
        pidx = {p.id: i for i, p in enumerate(spec.processors)}
        groups = [[pidx[x] for x in g] for g in fam.groups]
        cand = (v for v in cand if all(sum(v[i] for i in g) <= 1 for g in groups))
    return np.array(list(cand), dtype=np.int8).reshape(-1, n)


def in_family(arrays: NetworkArrays, I: np.ndarray) -> bool:
    if np.any((I != 0) & (I != 1)):
        return False
    if arrays.family_kind == 0:
        return True
    return bool(np.any(np.all(arrays.family_vecs == I, axis=1)))


def state_from_indices(arrays: NetworkArrays, idx: Sequence[int]) -> NetworkState:
    """Assemble the state whose k-th random quantity takes its ``idx[k]``-th value."""
    R = np.zeros(arrays.r)
    c = np.zeros(arrays.r)
    C = np.zeros(arrays.n_proc)
    p = np.zeros(arrays.n_proc)
    target = {"R": R, "c": c, "C": C, "p": p}
    index = 0
    for qty, k, radix in zip(arrays.quantities, idx, arrays.radices):
        target[qty.role][qty.index] = qty.dist.values[k]
        index = index * radix + int(k)
    return NetworkState(R, c, C, p, index)


def iter_states(arrays: NetworkArrays) -> Iterable[tuple[NetworkState, float]]:
    """Every state with its probability, in state-index order."""
    probs = [q.dist.probs for q in arrays.quantities]
    for idx in itertools.product(*(range(k) for k in arrays.radices)):
        pi = math.prod(pr[k] for pr, k in zip(probs, idx))
        yield state_from_indices(arrays, idx), pi


def derive_constants(spec: NetworkSpec, w: Sequence[float]) -> DerivedConstants:
    """Network-wide constants used by the theta rule and the performance bounds."""
    arr = spec.arrays
    w = np.asarray(w, dtype=float)
    if w.shape != (arr.r,):
        raise DimensionMismatch(f"weight vector has shape {w.shape}, expected ({arr.r},)")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    supply = arr.beta > 0
    M_p = int(supply.sum(axis=1).max()) if arr.n_proc else 0
    M_q_s = int(supply.sum(axis=0).max()) if arr.n_proc else 0
    M_q_d = int((arr.alpha > 0).sum(axis=0).max()) if arr.n_proc else 0
    betas = arr.beta[supply]
    alphas = np.concatenate([arr.alpha[arr.alpha > 0], arr.alpha_out[arr.is_output]])
    beta_max = float(betas.max()) if betas.size else 0.0
    beta_min = float(betas.min()) if betas.size else 0.0
    alpha_max = float(alphas.max()) if alphas.size else 0.0

    st = spec.stochastic
    zero = Distribution.constant(0.0)

    def span(dists):
        dists = list(dists)
        if not dists:
            return 0.0, 0.0
        return min(d.lo for d in dists), max(d.hi for d in dists)

    R_max = span(st.arrivals[q.id] for q in spec.sources)[1]
    c_min, c_max = span(st.admission_cost.get(q.id, zero) for q in spec.sources)
    C_min, C_max = span(st.activation_cost.get(p.id, zero) for p in spec.internal_processors)
    p_min, p_max = span(st.output_profit[p.id] for p in spec.output_processors)

    N_p = arr.n_proc
    N_p_o = int(arr.is_output.sum())
    N_p_in = N_p - N_p_o
    N_q = arr.r
    N_q_s = int(arr.is_source.sum())
    N_q_in = N_q - N_q_s
    w_max, w_min = float(w.max()), float(w.min())

    nu_max = max(M_q_d * alpha_max, R_max, M_q_s * beta_max)
    delta_max = max(nu_max, N_p_o * p_max * alpha_max, N_q_s * R_max * c_max + N_p_in * C_max)
    B_general = w_max * (N_q * (M_q_s * beta_max) ** 2 + N_q_s * R_max ** 2
                         + N_q_in * (M_q_d * alpha_max) ** 2) / 2
    w_sum = math.fsum(w)
    return DerivedConstants(
        N_p=N_p, N_p_in=N_p_in, N_p_o=N_p_o, N_q=N_q, N_q_s=N_q_s, N_q_in=N_q_in,
        M_p=M_p, M_q_s=M_q_s, M_q_d=M_q_d,
        beta_max=beta_max, beta_min=beta_min, alpha_max=alpha_max,
        R_max=R_max, c_min=c_min, c_max=c_max, C_min=C_min, C_max=C_max,
        p_min=p_min, p_max=p_max, w_max=w_max, w_min=w_min, w_sum=w_sum,
        nu_max=nu_max, delta_max=delta_max, B_general=B_general,
        B_lemma2=delta_max ** 2 * w_sum,
        C=N_p * w_max * M_p * nu_max * beta_max,
    )


def evaluate_action(spec: NetworkSpec, state: NetworkState, action: ActionVec) -> Effects:
    """Arrivals, service and utility of ``action`` in ``state``; underflow is not checked."""
    arr = spec.arrays
    I = np.asarray(action.I)
    if I.shape != (arr.n_proc,) or not in_family(arr, I):
        raise InvalidActivationVector(f"{I.tolist()} is not in the activation family")
    D = np.where(arr.is_source, action.D, 0)
    admitted = D * state.R
    A = admitted + I @ arr.alpha
    mu = I @ arr.beta
    f = (float(np.sum(I * state.p * arr.alpha_out))
         - float(np.sum(admitted * state.c))
         - float(np.sum(I * state.C)))
    return Effects(A, mu, f)


def is_feasible(q: Sequence[float], effects: Effects) -> bool:
    """True iff every queue holds at least what the action consumes from it."""
    return bool(np.all(np.asarray(q, dtype=float) >= effects.mu))

"""Upper bound on achievable average utility.

Ignoring underflow, any stable policy induces per-state mixtures over actions
whose mean arrivals equal mean service on every queue. The best such mixture
is a finite LP over the enumerated (state, action) table; its Lagrangian dual
separates into one small maximization per state. Both routes are here, plus
the slackness LP and the per-slot brute-force optimum used to audit the
policy's decisions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import simplex
from .model import NetworkSpec, family_matrix, iter_states
from .policy import PolicyParams

DEFAULT_CAP = 10**6


class TableTooLarge(ValueError):
    pass


class Infeasible(RuntimeError):
    pass


class IterationLimit(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class StateActionTable:
    """Distinct action effects per state, stored as one flat row list.

    Rows ``ptr[s]:ptr[s+1]`` belong to state ``s``. ``eps = A - mu``.
    ``D`` and ``I`` hold the first enumerated action producing each row.
    """

    pi: np.ndarray
    ptr: np.ndarray
    A: np.ndarray
    mu: np.ndarray
    f: np.ndarray
    D: np.ndarray
    I: np.ndarray
    raw_actions: int

    @property
    def eps(self) -> np.ndarray:
        return self.A - self.mu

    @property
    def n_states(self) -> int:
        return len(self.pi)

    @property
    def n_rows(self) -> int:
        return len(self.f)

    @property
    def r(self) -> int:
        return self.A.shape[1]

    def rows(self, s: int) -> slice:
        return slice(int(self.ptr[s]), int(self.ptr[s + 1]))

    @property
    def row_state(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_states), np.diff(self.ptr))


@dataclass(frozen=True, eq=False)
class BoundResult:
    f_star_av: float
    mixture: np.ndarray  # weight per table row
    residuals: np.ndarray  # mean arrival minus mean service per queue
    balance_duals: np.ndarray
    iterations: int

    def phi_star(self, V: float) -> float:
        return V * self.f_star_av


@dataclass(frozen=True, eq=False)
class DualPoint:
    gamma: np.ndarray
    g_value: float
    maximizers: np.ndarray  # table row chosen in each state
    iterations: int = 0
    converged: bool = True


@dataclass(frozen=True, eq=False)
class SlacknessEstimate:
    eta: float
    mixture: np.ndarray
    margins: np.ndarray  # mean arrival minus mean service per queue under the mixture


def enumerate_state_actions(spec: NetworkSpec, cap: int = DEFAULT_CAP) -> StateActionTable:
    arr = spec.arrays
    n_src = len(arr.source_idx)
    fam = family_matrix(spec) if arr.family_kind else None
    if fam is None:
        if arr.n_proc > 20:
            raise TableTooLarge(f"2^{arr.n_proc} activation vectors")
        fam = np.array(list(itertools.product((0, 1), repeat=arr.n_proc)), dtype=np.int8).reshape(-1, arr.n_proc)
    raw = (1 << n_src) * len(fam)
    if arr.n_states * raw > cap:
        raise TableTooLarge(f"{arr.n_states} states x {raw} actions exceeds the cap of {cap}")

    dsub = np.array(list(itertools.product((0, 1), repeat=n_src)), dtype=np.int8).reshape(-1, n_src)
    Dmat = np.zeros((len(dsub), arr.r), dtype=np.int8)
    Dmat[:, arr.source_idx] = dsub
    A_I = fam @ arr.alpha
    mu_I = fam @ arr.beta
    n_d, n_i = len(Dmat), len(fam)
    Dall = np.repeat(Dmat, n_i, axis=0)
    Iall = np.tile(fam, (n_d, 1))
    mu_all = np.tile(mu_I, (n_d, 1))

    pis, ptr, As, mus, fs, Ds, Is = [], [0], [], [], [], [], []
    for state, pi in iter_states(arr):
        adm = Dmat * state.R
        A = (adm[:, None, :] + A_I[None, :, :]).reshape(-1, arr.r)
        f = (-(adm @ state.c))[:, None] + (fam @ (state.p * arr.alpha_out - state.C))[None, :]
        f = f.reshape(-1)
        key = np.column_stack([A, mu_all, f])
        _, first = np.unique(key, axis=0, return_index=True)
        keep = np.sort(first)
        pis.append(pi)
        ptr.append(ptr[-1] + len(keep))
        As.append(A[keep])
        mus.append(mu_all[keep])
        fs.append(f[keep])
        Ds.append(Dall[keep])
        Is.append(Iall[keep])
    return StateActionTable(
        pi=np.array(pis), ptr=np.array(ptr), A=np.vstack(As), mu=np.vstack(mus),
        f=np.concatenate(fs), D=np.vstack(Ds), I=np.vstack(Is), raw_actions=raw,
    )


def _mixture_constraints(table: StateActionTable) -> sparse.csr_matrix:
    """Rows: one per-state probability row per state, then one balance row per queue."""
    n = table.n_rows
    pick = sparse.csr_matrix((np.ones(n), (table.row_state, np.arange(n))), shape=(table.n_states, n))
    return sparse.vstack([pick, sparse.csr_matrix(table.eps.T)]).tocsr()


def solve_utility_bound(table: StateActionTable, tol: float = 1e-9) -> BoundResult:
    """Best average utility of any balanced state-wise mixture (V = 1)."""
    A = _mixture_constraints(table)
    b = np.concatenate([table.pi, np.zeros(table.r)])
    res = simplex.solve(-table.f, A, b, tol=tol)
    if res.status == simplex.INFEASIBLE:
        raise Infeasible("balance LP infeasible; the all-zero action should always be feasible")
    if res.status != simplex.OPTIMAL:
        raise IterationLimit(f"balance LP stopped with status {res.status}")
    y = res.x
    return BoundResult(
        f_star_av=float(table.f @ y),
        mixture=y,
        residuals=table.eps.T @ y,
        balance_duals=-res.duals[table.n_states:],
        iterations=res.iterations,
    )


def _segment_argmax(values: np.ndarray, ptr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    starts = ptr[:-1]
    best = np.maximum.reduceat(values, starts)
    counts = np.diff(ptr)
    hit = values == np.repeat(best, counts)
    idx = np.where(hit, np.arange(len(values)), len(values))
    return best, np.minimum.reduceat(idx, starts)


def eval_dual(table: StateActionTable, gamma, V: float) -> DualPoint:
    gamma = np.asarray(gamma, dtype=float)
    vals = V * table.f - table.eps @ gamma
    best, arg = _segment_argmax(vals, table.ptr)
    return DualPoint(gamma=gamma, g_value=float(table.pi @ best), maximizers=arg)


def dual_subgradient(table: StateActionTable, point: DualPoint) -> np.ndarray:
    return -(table.pi @ table.eps[point.maximizers])


def minimize_dual(table: StateActionTable, V: float, tolerance: float, *,
                  certify: float | None = None, max_iter: int = 20_000,
                  gamma0=None) -> DualPoint:
    """Subgradient descent on the dual function.

    The step length starts at ``V`` times the largest per-row effect size and
    is halved whenever ``patience`` iterations pass without improving the best
    value found. If ``certify`` (the primal optimum, already scaled by V) is
    given, the search stops as soon as the best dual value is within
    ``tolerance`` of it. Returns the best point; ``converged`` is False if the
    iteration budget ran out first.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    gamma = np.zeros(table.r) if gamma0 is None else np.asarray(gamma0, dtype=float).copy()
    scale = max(1.0, float(np.abs(table.eps).max(initial=0.0)), float(np.abs(table.f).max(initial=0.0)))
    step = V * scale
    patience = 25
    point = eval_dual(table, gamma, V)
    best = point
    stale = 0
    for k in range(1, max_iter + 1):
        if certify is not None and best.g_value - certify <= tolerance:
            return DualPoint(best.gamma, best.g_value, best.maximizers, k - 1, True)
        s = dual_subgradient(table, point)
        norm = float(np.linalg.norm(s))
        if norm == 0.0:
            return DualPoint(point.gamma, point.g_value, point.maximizers, k - 1, True)
        gamma = point.gamma - step * s / norm
        point = eval_dual(table, gamma, V)
        if point.g_value < best.g_value - 1e-12:
            best = point
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                step *= 0.5
                stale = 0
                point = best
        if certify is None and step < tolerance * 1e-3 / max(1.0, norm):
            return DualPoint(best.gamma, best.g_value, best.maximizers, k, True)
    return DualPoint(best.gamma, best.g_value, best.maximizers, max_iter, False)


def estimate_slackness(table: StateActionTable, tol: float = 1e-9) -> SlacknessEstimate:
    """Largest eta such that a state-wise mixture drains every queue by at least eta."""
    n, r = table.n_rows, table.r
    base = _mixture_constraints(table)
    # columns: mixture weights, eta, one slack per queue
    eta_col = sparse.csr_matrix(np.concatenate([np.zeros(table.n_states), np.ones(r)])[:, None])
    slack = sparse.vstack([sparse.csr_matrix((table.n_states, r)), sparse.identity(r, format="csr")])
    A = sparse.hstack([base, eta_col, slack]).tocsr()
    b = np.concatenate([table.pi, np.zeros(r)])
    c = np.zeros(n + 1 + r)
    c[n] = -1.0
    res = simplex.solve(c, A, b, tol=tol)
    if res.status != simplex.OPTIMAL:
        raise IterationLimit(f"slackness LP stopped with status {res.status}")
    y = res.x[:n]
    return SlacknessEstimate(eta=float(res.x[n]), mixture=y, margins=table.eps.T @ y)


def d_values(table: StateActionTable, params: PolicyParams, state_index: int, q) -> np.ndarray:
    rows = table.rows(state_index)
    pressure = params.w_arr * (np.asarray(q, dtype=float) - params.theta_arr)
    return params.V * table.f[rows] - table.eps[rows] @ pressure


def d_star(table: StateActionTable, params: PolicyParams, state_index: int, q) -> float:
    """Largest drift-plus-penalty score of any action in the state, underflow ignored."""
    return float(d_values(table, params, state_index, q).max())


def d_star_many(table: StateActionTable, params: PolicyParams, state_ids, Q) -> np.ndarray:
    """``d_star`` for many (state, backlog) pairs at once, grouped by state."""
    state_ids = np.asarray(state_ids)
    Q = np.asarray(Q, dtype=float)
    out = np.empty(len(state_ids))
    P = (Q - params.theta_arr) * params.w_arr
    order = np.argsort(state_ids, kind="stable")
    uniq, starts = np.unique(state_ids[order], return_index=True)
    bounds = list(starts[1:]) + [len(order)]
    for s, lo, hi in zip(uniq, starts, bounds):
        idx = order[lo:hi]
        rows = table.rows(int(s))
        scores = params.V * table.f[rows][None, :] - P[idx] @ table.eps[rows].T
        out[idx] = scores.max(axis=1)
    return out


_TABLES: dict[str, StateActionTable] = {}
_BOUNDS: dict[str, tuple[BoundResult, SlacknessEstimate]] = {}


def cached_table(spec: NetworkSpec) -> StateActionTable:
    key = spec.digest()
    if key not in _TABLES:
        _TABLES[key] = enumerate_state_actions(spec)
    return _TABLES[key]


def cached_bounds(spec: NetworkSpec) -> tuple[BoundResult, SlacknessEstimate]:
    key = spec.digest()
    if key not in _BOUNDS:
        table = cached_table(spec)
        _BOUNDS[key] = (solve_utility_bound(table), estimate_slackness(table))
    return _BOUNDS[key]


def corollary_backlog_bound(B: float, C: float, V: float, delta_max: float, eta: float,
                            theta_weighted: float) -> float:
    """(B + C + 2 V delta_max) / eta + sum_j w_j theta_j."""
    return math.inf if eta <= 0 else (B + C + 2 * V * delta_max) / eta + theta_weighted


LP_ROW_CAP = 250_000


def utility_upper_bound(spec: NetworkSpec, lp_row_cap: int = LP_ROW_CAP) -> tuple[float, str]:
    """Best available upper bound on average utility and the method that produced it.

    Small tables go through the LP ("lp"). Larger ones use the minimized dual at
    V = 1 ("dual"), which bounds the LP value from above whether or not the
    subgradient search converged. Raises TableTooLarge if the table cannot be
    enumerated at all.
    """
    table = cached_table(spec)
    if table.n_rows <= lp_row_cap:
        return cached_bounds(spec)[0].f_star_av, "lp"
    return minimize_dual(table, 1.0, tolerance=1e-6).g_value, "dual"

"""Perturbed Max-Weight decisions.

Each slot the policy admits arrivals whose perturbed backlog is low enough,
scores every processor by its perturbed backpressure plus profit (or minus
cost), and fires the best family member among processors whose queue-edge
gates hold. The gates keep every activation feasible without ever looking at
the underflow constraint directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    ActionVec,
    DerivedConstants,
    NetworkSpec,
    NetworkState,
    derive_constants,
    evaluate_action,
    is_feasible,
)
from .weights import compute_weights

GENERAL, FUSION, CUSTOM = "general-pmw", "fusion-pmw", "custom-theta-pmw"


class WrongTopology(ValueError):
    pass


@dataclass(frozen=True)
class PolicyParams:
    V: float
    theta: tuple[float, ...]
    w: tuple[float, ...]
    kind: str = GENERAL

    def __post_init__(self):
        if not self.V >= 1:
            raise ValueError(f"V must be >= 1, got {self.V}")
        if len(self.theta) != len(self.w):
            raise ValueError("theta and w must have one entry per queue")
        if self.kind not in (GENERAL, FUSION, CUSTOM):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == GENERAL and (min(self.theta) <= 0 or min(self.w) <= 0):
            raise ValueError("general PMW needs strictly positive theta and w")

    @property
    def theta_arr(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)

    @property
    def w_arr(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)


@dataclass(frozen=True, eq=False)
class ProcessorWeights:
    """Clamped processor scores and queue-edge eligibility, in processor order."""

    W: np.ndarray
    eligible: np.ndarray
    is_output: np.ndarray

    @property
    def W_in(self) -> np.ndarray:
        return self.W[~self.is_output]

    @property
    def W_out(self) -> np.ndarray:
        return self.W[self.is_output]


def uniform_theta(constants: DerivedConstants, V: float) -> float:
    """Smallest common perturbation for which the queue-edge gates lose at most C."""
    k = constants
    return max(V * k.alpha_max * k.p_max / (k.w_min * k.beta_min),
               V * k.c_min / k.w_min + k.M_q_s * k.beta_max)


def edge_level(spec: NetworkSpec) -> float:
    arr = spec.arrays
    if not arr.n_proc:
        return 0.0
    return float((arr.beta > 0).sum(axis=0).max() * arr.beta.max())


def pmw_params(spec: NetworkSpec, V: float, w=None) -> PolicyParams:
    if w is None:
        w = compute_weights(spec).w
    theta = uniform_theta(derive_constants(spec, w), V)
    return PolicyParams(V=V, theta=(theta,) * len(w), w=tuple(float(x) for x in w), kind=GENERAL)


def fusion_params(V: float) -> PolicyParams:
    return PolicyParams(V=V, theta=(2.0 * V, 2.0 * V, 3.0 * V), w=(1.0, 1.0, 1.0), kind=FUSION)


def custom_params(spec: NetworkSpec, V: float, theta, w=None) -> PolicyParams:
    r = len(spec.queues)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (r,))
    if w is None:
        w = compute_weights(spec).w
    return PolicyParams(V=V, theta=tuple(theta.tolist()), w=tuple(float(x) for x in w), kind=CUSTOM)


def gate_mode(params: PolicyParams) -> int:
    return kernels.GATE_UNDERFLOW if params.kind == FUSION else kernels.GATE_EDGE


def admission_rule(spec: NetworkSpec, state: NetworkState, q, params: PolicyParams) -> np.ndarray:
    """D_j = 1 iff V*c_j + w_j*(q_j - theta_j) < 0; zero on internal queues."""
    arr = spec.arrays
    D = np.zeros(arr.r, dtype=np.int8)
    kernels.admission(np.asarray(q, dtype=float), state.R, state.c, float(params.V),
                      params.theta_arr, params.w_arr, arr.is_source, D)
    return D


def processor_weights(spec: NetworkSpec, state: NetworkState, q, params: PolicyParams) -> ProcessorWeights:
    arr = spec.arrays
    W = np.zeros(arr.n_proc)
    elig = np.zeros(arr.n_proc, dtype=np.bool_)
    kernels.processor_weights(np.asarray(q, dtype=float), state.C, state.p, float(params.V),
                              params.theta_arr, params.w_arr, arr.beta, arr.alpha, arr.alpha_out,
                              arr.is_output, arr.demand, gate_mode(params), edge_level(spec), W, elig)
    return ProcessorWeights(W, elig, arr.is_output)


def select_activation(weights: ProcessorWeights, spec: NetworkSpec) -> np.ndarray:
    arr = spec.arrays
    I = np.zeros(arr.n_proc, dtype=np.int8)
    kernels.select_activation(weights.W, weights.eligible, arr.family_kind, arr.family_vecs, I)
    return I


def pmw_decide(spec: NetworkSpec, params: PolicyParams, state: NetworkState, q) -> ActionVec:
    q = np.asarray(q, dtype=float)
    action = ActionVec(admission_rule(spec, state, q, params),
                       select_activation(processor_weights(spec, state, q, params), spec))
    assert is_feasible(q, evaluate_action(spec, state, action)), "PMW chose an infeasible action"
    return action


def _check_fusion_shape(spec: NetworkSpec) -> None:
    arr = spec.arrays
    ok = (
        arr.r == 3 and arr.n_proc == 2
        and arr.is_source.tolist() == [True, True, False]
        and arr.is_output.tolist() == [False, True]
        and arr.beta.tolist() == [[1, 1, 0], [0, 0, 1]]
        and arr.alpha.tolist() == [[0, 0, 1], [0, 0, 0]]
        and arr.alpha_out[1] == 1
        and arr.family_kind == 0
    )
    if not ok:
        raise WrongTopology("fusion policy needs two sources fused into one queue served by one output")


def fusion_decide(spec: NetworkSpec, V: float, state: NetworkState, q) -> ActionVec:
    """Two-stage fusion rules with theta = (2V, 2V, 3V)."""
    _check_fusion_shape(spec)
    q1, q2, q3 = (float(x) for x in q)
    t1, t2, t3 = 2 * V, 2 * V, 3 * V
    D = np.array([q1 - t1 + V < 0, q2 - t2 + V < 0, 0], dtype=np.int8)
    p = state.p[1]
    I = np.array([
        q1 >= 1 and q2 >= 1 and (q1 - t1) + (q2 - t2) - (q3 - t3) > 0,
        q3 >= 1 and q3 - t3 + p * V > 0,
    ], dtype=np.int8)
    return ActionVec(D, I)


def decide(spec: NetworkSpec, params: PolicyParams, state: NetworkState, q) -> ActionVec:
    if params.kind == FUSION:
        return fusion_decide(spec, params.V, state, q)
    return pmw_decide(spec, params, state, q)


def d_value(spec: NetworkSpec, params: PolicyParams, state: NetworkState, q, action: ActionVec) -> float:
    """V*f + sum_j w_j (q_j - theta_j)(mu_j - A_j) for any action in the family."""
    eff = evaluate_action(spec, state, action)
    q = np.asarray(q, dtype=float)
    return params.V * eff.f + float(np.sum(params.w_arr * (q - params.theta_arr) * (eff.mu - eff.A)))

from __future__ import annotations

import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmwnet import kernels
from pmwnet.model import (
    ActivationFamily,
    derive_constants,
    evaluate_action,
    is_feasible,
    iter_states,
    state_from_indices,
)
from pmwnet.oracle import d_star, enumerate_state_actions
from pmwnet.policy import (
    FUSION,
    PolicyParams,
    ProcessorWeights,
    WrongTopology,
    admission_rule,
    custom_params,
    d_value,
    decide,
    edge_level,
    fusion_decide,
    fusion_params,
    pmw_decide,
    pmw_params,
    processor_weights,
    select_activation,
    uniform_theta,
)
from pmwnet.sim import queue_bounds
from pmwnet.weights import compute_weights


def gstate(spec, R=(0, 0, 0, 0), C=(1, 1, 1), p=(3, 3)):
    return spec.state(R=dict(zip(("q1", "q2", "q3", "q5"), R)),
                      C=dict(zip(("P1", "P2", "P3"), C)), p=dict(zip(("P4", "P5"), p)))


def test_theta_general(general):
    k = derive_constants(general, compute_weights(general).w)
    assert uniform_theta(k, 10) == 60
    assert pmw_params(general, 10).theta == (60.0,) * 6


def test_theta_fusion(fusion):
    k = derive_constants(fusion, (1, 1, 1))
    assert uniform_theta(k, 10) == max(30, 10 + 1) == 30


def test_theta_degenerate(general):
    k = dataclasses.replace(derive_constants(general, compute_weights(general).w), p_max=0.0, c_min=0.0)
    assert uniform_theta(k, 10) == k.M_q_s * k.beta_max == 2


def test_params_validation():
    with pytest.raises(ValueError):
        PolicyParams(V=0.5, theta=(1.0,), w=(1.0,))
    with pytest.raises(ValueError):
        PolicyParams(V=2, theta=(0.0,), w=(1.0,))
    PolicyParams(V=2, theta=(0.0,), w=(1.0,), kind="custom-theta-pmw")


@pytest.mark.parametrize("q1, admit", [(10, 1), (60, 0)])
def test_admission_general(general, q1, admit):
    params = pmw_params(general, 10)
    s = gstate(general, R=(2, 2, 2, 2))
    q = np.zeros(6)
    q[0] = q1
    assert admission_rule(general, s, q, params)[0] == admit


def test_admission_fusion_style(fusion):
    params = custom_params(fusion, 10, 30.0, w=(1, 1, 1))
    s = fusion.state(R={"q1": 1, "q2": 1}, p={"P2": 1})
    assert admission_rule(fusion, s, (25, 25, 0), params).tolist() == [0, 0, 0]


def test_internal_queues_never_admit(general):
    D = admission_rule(general, gstate(general, R=(2, 2, 2, 2)), np.zeros(6), pmw_params(general, 10))
    assert D[3] == 0 and D[5] == 0


@pytest.mark.parametrize("q4, W", [(40, 20), (10, 0)])
def test_output_weight(general, q4, W):
    q = np.array([0, 0, 0, q4, 0, 0], dtype=float)
    pw = processor_weights(general, gstate(general), q, pmw_params(general, 10))
    assert pw.W[3] == W


def test_internal_weight(general):
    q = np.array([0, 70, 70, 30, 0, 0], dtype=float)
    pw = processor_weights(general, gstate(general), q, pmw_params(general, 10))
    assert pw.W[0] == 190
    assert pw.eligible[0]
    assert pw.W_in.shape == (3,) and pw.W_out.shape == (2,)


def test_select_all_subsets(general):
    pw = ProcessorWeights(np.array([190.0, 0, 0, 20, 0]), np.ones(5, bool), general.arrays.is_output)
    assert select_activation(pw, general).tolist() == [1, 0, 0, 1, 0]


def test_select_conflict_group(general):
    spec = dataclasses.replace(general, activation_family=ActivationFamily("conflict", groups=(("P1", "P3"),)))
    pw = ProcessorWeights(np.array([5.0, 0, 7, 0, 0]), np.ones(5, bool), spec.arrays.is_output)
    assert select_activation(pw, spec).tolist() == [0, 0, 1, 0, 0]


def test_select_conflict_tie_is_lexicographic(general):
    spec = dataclasses.replace(general, activation_family=ActivationFamily("conflict", groups=(("P1", "P3"),)))
    pw = ProcessorWeights(np.array([7.0, 0, 7, 0, 0]), np.ones(5, bool), spec.arrays.is_output)
    # [0,0,1,0,0] sorts before [1,0,0,0,0]
    assert select_activation(pw, spec).tolist() == [0, 0, 1, 0, 0]


def test_ineligible_stays_off(general):
    elig = np.ones(5, bool)
    elig[0] = False
    pw = ProcessorWeights(np.array([100.0, 0, 0, 0, 0]), elig, general.arrays.is_output)
    assert select_activation(pw, general)[0] == 0


def test_demand_gate(general):
    # P1 has a big weight but its demand queue q4 sits above theta
    params = custom_params(general, 10, 60.0)
    q = np.array([0, 500, 500, 61, 0, 0], dtype=float)
    pw = processor_weights(general, gstate(general), q, params)
    assert pw.W[0] > 0 and not pw.eligible[0]


def test_edge_level(general, fusion):
    assert edge_level(general) == 2
    assert edge_level(fusion) == 1


def test_cold_start(general):
    params = pmw_params(general, 10)
    for state, _ in itertools.islice(iter_states(general.arrays), 0, 512, 37):
        a = pmw_decide(general, params, state, np.zeros(6))
        assert a.D.tolist() == [1, 1, 1, 0, 1, 0]
        assert not a.I.any()


def test_p1_fires(general):
    params = pmw_params(general, 10)
    s = gstate(general)
    q = np.array([70, 70, 70, 30, 70, 0], dtype=float)
    a = pmw_decide(general, params, s, q)
    assert a.I[0] == 1
    table = enumerate_state_actions(general)
    gap = d_star(table, params, s.index, q) - d_value(general, params, s, q, a)
    assert 0 <= gap <= derive_constants(general, params.w).C


def test_feasibility_on_random_pairs(general):
    params = pmw_params(general, 10)
    arr = general.arrays
    ub = queue_bounds(general, params)
    rng = np.random.default_rng(7)
    states = list(s for s, _ in iter_states(arr))
    D = np.zeros(arr.r, np.int8)
    I = np.zeros(arr.n_proc, np.int8)
    W = np.zeros(arr.n_proc)
    elig = np.zeros(arr.n_proc, np.bool_)
    n = 100_000
    Q = rng.integers(0, ub.astype(int) + 1, size=(n, arr.r)).astype(float)
    S = rng.integers(0, len(states), size=n)
    mu = np.zeros((n, arr.r))
    for t in range(n):
        s = states[S[t]]
        kernels.decide(Q[t], s.R, s.c, s.C, s.p, params.V, params.theta_arr, params.w_arr, arr.beta,
                       arr.alpha, arr.alpha_out, arr.is_output, arr.demand, arr.is_source, 0,
                       2.0, arr.family_kind, arr.family_vecs, D, I, W, elig)
        mu[t] = I @ arr.beta
    assert np.all(Q >= mu)


@pytest.mark.parametrize("q, R, p, D, I", [
    ((0, 0, 0), (1, 1), 1, (1, 1), (0, 0)),
    ((5, 5, 5), (1, 1), 3, (1, 1), (0, 1)),
    ((9, 9, 5), (1, 1), 1, (1, 1), (1, 0)),
])
def test_fusion_decide(fusion, q, R, p, D, I):
    s = fusion.state(R={"q1": R[0], "q2": R[1]}, p={"P2": p})
    a = fusion_decide(fusion, 10, s, q)
    assert a.D[:2].tolist() == list(D) and a.I.tolist() == list(I)


def test_fusion_wrong_topology(general):
    with pytest.raises(WrongTopology):
        fusion_decide(general, 10, gstate(general), np.zeros(6))


def test_fusion_kernel_matches_rules(fusion):
    # the literal fusion rules and the kernel's underflow-gate mode must agree everywhere
    params = fusion_params(10)
    for state, _ in iter_states(fusion.arrays):
        for q in itertools.product(range(0, 12), range(0, 12), range(0, 22, 3)):
            a = fusion_decide(fusion, 10, state, q)
            b = pmw_decide(fusion, params, state, np.array(q, dtype=float))
            assert a == b


def test_d_value_examples(fusion):
    params = fusion_params(10)
    s = fusion.state(R={"q1": 1, "q2": 1}, p={"P2": 3})
    q = (9, 9, 5)
    assert d_value(fusion, params, s, q, fusion.action(D=(1, 1), I=(1, 1))) == 10
    assert d_value(fusion, params, s, q, fusion.action()) == 0
    assert d_value(fusion, params, s, q, fusion.action(D=(0, 0), I=(0, 1))) == 5


def test_d_star_fusion_example(fusion):
    params = fusion_params(10)
    s = fusion.state(R={"q1": 1, "q2": 1}, p={"P2": 3})
    table = enumerate_state_actions(fusion)
    q = (9, 9, 5)
    assert d_star(table, params, s.index, q) == 10
    assert d_value(fusion, params, s, q, fusion_decide(fusion, 10, s, q)) == 10


def test_decide_dispatch(fusion, general):
    s = fusion.state(R={"q1": 1, "q2": 1}, p={"P2": 3})
    assert fusion_params(10).kind == FUSION
    assert decide(fusion, fusion_params(10), s, (5, 5, 5)) == fusion_decide(fusion, 10, s, (5, 5, 5))
    assert decide(general, pmw_params(general, 10), gstate(general), np.zeros(6)).D.sum() == 4


EXACT_SCALES = st.one_of(st.integers(1, 64).map(float), st.integers(-3, 6).map(lambda k: 2.0 ** k))


@settings(max_examples=60, deadline=None)
@given(lam=EXACT_SCALES, qs=st.lists(st.integers(0, 70), min_size=6, max_size=6),
       sid=st.integers(0, 511))
def test_argmax_invariance(general, lam, qs, sid):
    # scaling w and V together (theta fixed) multiplies every comparison by lam; lam is drawn so the
    # products stay exact, otherwise exact ties at zero can round either way
    base = custom_params(general, 10, 60.0)
    scaled = PolicyParams(V=10 * lam, theta=base.theta, w=tuple(lam * x for x in base.w), kind=base.kind)
    arr = general.arrays
    idx, rem = [], sid
    for radix in reversed(arr.radices):
        idx.append(rem % radix)
        rem //= radix
    state = state_from_indices(arr, idx[::-1])
    assert state.index == sid
    q = np.array(qs, dtype=float)
    assert pmw_decide(general, base, state, q) == pmw_decide(general, scaled, state, q)


def test_chosen_action_is_feasible_and_in_table(general):
    params = pmw_params(general, 10)
    s = gstate(general, R=(2, 0, 2, 0))
    q = np.array([3, 70, 1, 2, 5, 1], dtype=float)
    a = pmw_decide(general, params, s, q)
    assert is_feasible(q, evaluate_action(general, s, a))

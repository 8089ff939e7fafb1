from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings

from netgen import acyclic_specs
from pmwnet.model import (
    Distribution,
    NetworkSpec,
    ProcessorSpec,
    QueueSpec,
    StochasticModel,
    validate_spec,
)
from pmwnet.weights import ZeroFinalWeight, compute_weights, longest_path_to_output, verify_weight_condition


def test_general_weights(general):
    t = compute_weights(general)
    assert t.w == (2, 4, 4, 2, 2, 1)
    assert t.K == 3
    assert t.level_sets == (
        frozenset({"q4", "q5", "q6"}),
        frozenset({"q1", "q2", "q3", "q4", "q5"}),
        frozenset({"q2", "q3"}),
    )
    assert all(isinstance(x, Fraction) for x in t.exact)


def test_fusion_weights(fusion):
    t = compute_weights(fusion)
    assert t.w == (1, 1, 1) and t.K == 2


def test_single_queue():
    spec = validate_spec(NetworkSpec(
        queues=(QueueSpec("q", "source"),),
        processors=(ProcessorSpec("out", "output", (("q", 1.0),), alpha_out=1.0),),
        stochastic=StochasticModel(arrivals={"q": Distribution.constant(1.0)},
                                   output_profit={"out": Distribution.constant(1.0)}),
    ))
    t = compute_weights(spec)
    assert t.w == (1,) and t.K == 1


def test_zero_final_weight():
    spec = NetworkSpec(
        queues=(QueueSpec("q", "source"), QueueSpec("dead", "source")),
        processors=(ProcessorSpec("out", "output", (("q", 1.0),), alpha_out=1.0),),
        stochastic=StochasticModel(arrivals={"q": Distribution.constant(1.0), "dead": Distribution.constant(1.0)},
                                   output_profit={"out": Distribution.constant(1.0)}),
    )
    with pytest.raises(ZeroFinalWeight):
        compute_weights(spec)


def test_condition_holds_on_builtins(fusion, general):
    assert verify_weight_condition(general, compute_weights(general).w) == []
    assert verify_weight_condition(fusion, (1, 1, 1)) == []


def test_unit_weights_fail_on_general(general):
    bad = verify_weight_condition(general, (1,) * 6)
    assert any(v.startswith("P1:") for v in bad)


def test_history_is_monotone(general):
    hist = compute_weights(general).history
    for prev, cur in zip(hist, hist[1:]):
        assert all(b >= a for a, b in zip(prev, cur))


def test_rational_ratios():
    # alpha/beta = 3/2 twice in a chain: w should be exactly 9/4 at the head
    spec = validate_spec(NetworkSpec(
        queues=(QueueSpec("a", "source"), QueueSpec("b", "internal"), QueueSpec("c", "internal")),
        processors=(
            ProcessorSpec("P1", "internal", (("a", 2.0),), demand=(("b", 3.0),)),
            ProcessorSpec("P2", "internal", (("b", 2.0),), demand=(("c", 3.0),)),
            ProcessorSpec("P3", "output", (("c", 1.0),), alpha_out=1.0),
        ),
        stochastic=StochasticModel(arrivals={"a": Distribution.constant(1.0)},
                                   output_profit={"P3": Distribution.constant(1.0)}),
    ))
    t = compute_weights(spec)
    assert t.exact == (Fraction(9, 4), Fraction(3, 2), Fraction(1))


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(acyclic_specs())
def test_random_acyclic_specs(spec):
    validate_spec(spec)
    t = compute_weights(spec)
    assert verify_weight_condition(spec, t.w) == []
    assert t.K == longest_path_to_output(spec)
    assert t.K <= len(spec.processors)
    assert min(t.w) > 0


def test_weights_do_not_mutate_spec(general):
    before = dataclasses.asdict(general)
    compute_weights(general)
    assert dataclasses.asdict(general) == before

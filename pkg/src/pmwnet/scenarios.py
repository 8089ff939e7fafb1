"""Built-in networks: the two-stage data-fusion example and a six-queue assembly network."""

from __future__ import annotations

from .model import (
    ActivationFamily,
    Distribution,
    NetworkSpec,
    ProcessorSpec,
    QueueSpec,
    StochasticModel,
    validate_spec,
)


class UnknownScenario(KeyError):
    pass


def fusion() -> NetworkSpec:
    # q1, q2 -> P1 -> q3 -> P2 -> output
    half = Distribution((0.0, 1.0), (0.5, 0.5))
    return NetworkSpec(
        name="fusion",
        queues=(QueueSpec("q1", "source"), QueueSpec("q2", "source"), QueueSpec("q3", "internal")),
        processors=(
            ProcessorSpec("P1", "internal", supply=(("q1", 1.0), ("q2", 1.0)), demand=(("q3", 1.0),)),
            ProcessorSpec("P2", "output", supply=(("q3", 1.0),), alpha_out=1.0),
        ),
        stochastic=StochasticModel(
            arrivals={"q1": half, "q2": half},
            admission_cost={"q1": Distribution.constant(1.0), "q2": Distribution.constant(1.0)},
            activation_cost={"P1": Distribution.constant(0.0)},
            output_profit={"P2": Distribution((1.0, 3.0), (0.5, 0.5))},
        ),
        activation_family=ActivationFamily("all"),
    )


def general() -> NetworkSpec:
    """Six queues, three internal and two output processors.

    Every processor takes one unit from each supply queue and makes two
    units. Sources are q1, q2, q3, q5; q4 and q6 are internal.
    """
    arrive = Distribution((0.0, 2.0), (0.5, 0.5))
    cost = Distribution((1.0, 10.0), (0.3, 0.7))
    profit = Distribution((1.0, 3.0), (0.6, 0.4))
    sources = ("q1", "q2", "q3", "q5")
    return NetworkSpec(
        name="general",
        queues=tuple(QueueSpec(f"q{j}", "source" if f"q{j}" in sources else "internal")
                     for j in range(1, 7)),
        processors=(
            ProcessorSpec("P1", "internal", supply=(("q2", 1.0), ("q3", 1.0)), demand=(("q4", 2.0),)),
            ProcessorSpec("P2", "internal", supply=(("q1", 1.0), ("q5", 1.0)), demand=(("q6", 2.0),)),
            ProcessorSpec("P3", "internal", supply=(("q4", 1.0),), demand=(("q6", 2.0),)),
            ProcessorSpec("P4", "output", supply=(("q4", 1.0),), alpha_out=2.0),
            ProcessorSpec("P5", "output", supply=(("q5", 1.0), ("q6", 1.0)), alpha_out=2.0),
        ),
        stochastic=StochasticModel(
            arrivals={q: arrive for q in sources},
            admission_cost={q: Distribution.constant(0.0) for q in sources},
            activation_cost={p: cost for p in ("P1", "P2", "P3")},
            output_profit={p: profit for p in ("P4", "P5")},
        ),
        activation_family=ActivationFamily("all"),
    )


BUILTINS = {"fusion": fusion, "general": general}


def builtin_scenario(name: str) -> NetworkSpec:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {sorted(BUILTINS)}") from None
    return validate_spec(factory())

"""Random acyclic networks for property tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from pmwnet.model import (
    ActivationFamily,
    Distribution,
    NetworkSpec,
    ProcessorSpec,
    QueueSpec,
    StochasticModel,
)

AMOUNTS = (1.0, 2.0, 3.0)


def random_acyclic_spec(rng: random.Random, max_queues: int = 10, max_procs: int = 8) -> NetworkSpec:
    """Queues are numbered so every internal processor feeds a higher-numbered queue.

    Every queue ends up supplying some processor whose demand queue (if any)
    has a larger index, so every queue has a path to an output processor.
    """
    r = rng.randint(1, max_queues)
    n_proc = rng.randint(1, max_procs)
    n_out = rng.randint(1, n_proc)
    procs = []  # (kind, supply {index: beta}, (demand index, alpha) or None)
    for n in range(n_proc):
        if n < n_out or r == 1:
            supply = rng.sample(range(r), rng.randint(1, min(r, 3)))
            procs.append(("output", {j: rng.choice(AMOUNTS) for j in supply}, None))
        else:
            h = rng.randint(1, r - 1)
            supply = rng.sample(range(h), rng.randint(1, min(h, 3)))
            procs.append(("internal", {j: rng.choice(AMOUNTS) for j in supply}, (h, rng.choice(AMOUNTS))))
    for j in range(r):
        if not any(j in p[1] for p in procs):
            hosts = [p for p in procs if p[2] is None or p[2][0] > j]
            rng.choice(hosts)[1][j] = rng.choice(AMOUNTS)

    qids = [f"q{j}" for j in range(r)]
    demanded = {p[2][0] for p in procs if p[2] is not None}
    queues = tuple(QueueSpec(q, "internal" if j in demanded else "source") for j, q in enumerate(qids))
    processors = []
    for n, (kind, supply, dem) in enumerate(procs):
        sup = tuple((qids[j], b) for j, b in sorted(supply.items()))
        if kind == "output":
            processors.append(ProcessorSpec(f"P{n}", "output", sup, alpha_out=1.0))
        else:
            processors.append(ProcessorSpec(f"P{n}", "internal", sup, demand=((qids[dem[0]], dem[1]),)))
    coin = Distribution((0.0, 1.0), (0.5, 0.5))
    return NetworkSpec(
        queues=queues,
        processors=tuple(processors),
        stochastic=StochasticModel(
            arrivals={q.id: coin for q in queues if q.kind == "source"},
            output_profit={p.id: Distribution.constant(1.0) for p in processors if p.kind == "output"},
        ),
        activation_family=ActivationFamily("all"),
    )


def acyclic_specs(max_queues: int = 10, max_procs: int = 8):
    return st.builds(random_acyclic_spec, st.randoms(use_true_random=False),
                     st.just(max_queues), st.just(max_procs))

"""Queue weights that make every internal processor's supply side outweigh its output.

The iteration walks the DAG backwards from the output processors. Level 1 is
every queue that feeds an output processor; level k is every queue that feeds
a processor whose demand queue sits in level k-1. A queue on level k takes the
largest ``w_demand * alpha / beta`` over the internal processors it feeds, so
that ``w_j * beta_ij >= w_h * alpha_ih`` holds once the walk terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import INTERNAL, OUTPUT, NetworkSpec


class ZeroFinalWeight(ValueError):
    """A queue has no path to any output processor."""


@dataclass(frozen=True)
class WeightTrace:
    K: int
    level_sets: tuple[frozenset[str], ...]
    history: tuple[tuple[Fraction, ...], ...]  # weights after each iteration
    exact: tuple[Fraction, ...]

    @property
    def w(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.exact)


def compute_weights(spec: NetworkSpec) -> WeightTrace:
    qids = [q.id for q in spec.queues]
    pos = {q: j for j, q in enumerate(qids)}
    feeds: dict[str, list] = {q: [] for q in qids}  # queue -> processors it supplies
    for p in spec.processors:
        for qid, b in p.supply:
            feeds[qid].append((p, Fraction(b)))

    level = frozenset(q for q in qids if any(p.kind == OUTPUT for p, _ in feeds[q]))
    w = [Fraction(1) if q in level else Fraction(0) for q in qids]
    levels = [level]
    history = [tuple(w)]
    while True:
        nxt = frozenset(
            q for q in qids
            if any(p.kind == INTERNAL and p.demand[0][0] in levels[-1] for p, _ in feeds[q])
        )
        if not nxt:
            break
        prev = w[:]
        for q in nxt:
            best = prev[pos[q]]
            for p, b in feeds[q]:
                if p.kind != INTERNAL:
                    continue
                h, a = p.demand[0]
                best = max(best, prev[pos[h]] * Fraction(a) / b)
            w[pos[q]] = best
        assert all(x >= y for x, y in zip(w, prev)), "weights decreased"
        levels.append(nxt)
        history.append(tuple(w))
        if len(levels) > len(spec.processors):
            raise RuntimeError("weight iteration did not terminate; is the network acyclic?")

    zero = [q for q, x in zip(qids, w) if x == 0]
    if zero:
        raise ZeroFinalWeight(f"queues {zero} reach no output processor")
    return WeightTrace(K=len(levels), level_sets=tuple(levels), history=tuple(history), exact=tuple(w))


def verify_weight_condition(spec: NetworkSpec, w) -> list[str]:
    """Violations of ``w_j * beta_ij >= w_h * alpha_ih``; empty when none."""
    pos = {q.id: j for j, q in enumerate(spec.queues)}
    bad = []
    for p in spec.internal_processors:
        h, a = p.demand[0]
        rhs = w[pos[h]] * a
        for qid, b in p.supply:
            lhs = w[pos[qid]] * b
            if lhs < rhs:
                bad.append(f"{p.id}: w[{qid}]*beta={lhs} < w[{h}]*alpha={rhs}")
    return bad


def longest_path_to_output(spec: NetworkSpec) -> int:
    """Most processors on any queue-to-output path (0 if there is no output processor)."""
    by_queue: dict[str, list] = {q.id: [] for q in spec.queues}
    for p in spec.processors:
        for qid, _ in p.supply:
            by_queue[qid].append(p)
    memo: dict[str, int] = {}

    def depth(qid: str) -> int:
        if qid not in memo:
            best = 0
            for p in by_queue[qid]:
                if p.kind == OUTPUT:
                    best = max(best, 1)
                else:
                    tail = depth(p.demand[0][0])
                    if tail:
                        best = max(best, 1 + tail)
            memo[qid] = best
        return memo[qid]

    return max((depth(q.id) for q in spec.queues), default=0)

"""Run one simulation per V and tabulate utility and backlog against the bound."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import __version__
from .model import NetworkSpec
from .oracle import TableTooLarge, utility_upper_bound
from .policy import CUSTOM, FUSION, GENERAL, PolicyParams, custom_params, fusion_params, pmw_params
from .policy import _check_fusion_shape
from .sim import RNG_ID, SimConfig, run

POLICY_NAMES = {"pmw": GENERAL, "fusion-pmw": FUSION, "custom": CUSTOM}


@dataclass(frozen=True)
class SweepRow:
    V: float
    slots: int
    seed: int
    avg_utility: float
    avg_weighted_backlog: float
    f_star_av: float
    cond1_max_gap: float
    max_q: tuple[float, ...]

    @property
    def utility_gap(self) -> float:
        return self.f_star_av - self.avg_utility


@dataclass(frozen=True)
class SweepResult:
    spec_hash: str
    policy: str
    rows: tuple[SweepRow, ...]

    def header(self) -> list[str]:
        r = len(self.rows[0].max_q) if self.rows else 0
        return ["V", "slots", "seed", "avg_utility", "avg_weighted_backlog", "f_star_av",
                "utility_gap", "cond1_max_gap", *[f"max_q_{j + 1}" for j in range(r)]]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# spec_hash={self.spec_hash}\n")
        out.write(f"# rng={RNG_ID}\n")
        out.write(f"# tool=pmwnet {__version__}\n")
        out.write(f"# policy={self.policy}\n")
        out.write(",".join(self.header()) + "\n")
        for row in self.rows:
            cells = [row.V, row.slots, row.seed, row.avg_utility, row.avg_weighted_backlog,
                     row.f_star_av, row.utility_gap, row.cond1_max_gap, *row.max_q]
            out.write(",".join(fmt(x) for x in cells) + "\n")
        return out.getvalue()


def fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def read_csv(text: str) -> tuple[dict[str, str], list[dict[str, float]]]:
    """Parse a sweep CSV back into header metadata and float rows."""
    meta: dict[str, str] = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif line:
            lines.append(line.split(","))
    cols = lines[0]
    return meta, [dict(zip(cols, (float(x) for x in cells))) for cells in lines[1:]]


def make_params(spec: NetworkSpec, V: float, policy: str = "pmw", theta=None) -> PolicyParams:
    kind = POLICY_NAMES.get(policy, policy)
    if kind == FUSION:
        _check_fusion_shape(spec)
        return fusion_params(V)
    if kind == CUSTOM:
        if theta is None:
            raise ValueError("custom policy needs theta")
        return custom_params(spec, V, theta)
    if kind == GENERAL:
        return pmw_params(spec, V)
    raise ValueError(f"unknown policy {policy!r}")


def f_star_or_nan(spec: NetworkSpec) -> float:
    try:
        return utility_upper_bound(spec)[0]
    except TableTooLarge:
        return math.nan


def sweep(spec: NetworkSpec, Vs, slots: int, seed: int = 0, policy: str = "pmw", *,
          theta=None, check_condition1: bool = False, jobs: int = 1) -> SweepResult:
    """One independent run per V, all from the same seed; rows come back sorted by V."""
    Vs = sorted(float(v) for v in Vs)
    params = [make_params(spec, V, policy, theta) for V in Vs]
    f_star = f_star_or_nan(spec)

    def one(p: PolicyParams) -> SweepRow:
        m = run(spec, p, SimConfig(slots=slots, seed=seed, check_condition1=check_condition1))
        return SweepRow(V=p.V, slots=slots, seed=seed, avg_utility=m.avg_utility,
                        avg_weighted_backlog=m.avg_weighted_backlog, f_star_av=f_star,
                        cond1_max_gap=m.condition1_max_gap,
                        max_q=tuple(float(x) for x in m.max_backlog))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, params))
    else:
        rows = [one(p) for p in params]
    return SweepResult(spec_hash=spec.digest(), policy=params[0].kind if params else str(policy),
                       rows=tuple(rows))

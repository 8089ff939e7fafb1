"""Compare the compiled simulation kernel with its pure-Python fallback.

    python3 benchmarks/bench_kernels.py --scenario general --slots 20000

Both paths run the same slots from the same draws; the script checks that
they end in the same state and prints slots per second for each.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pmwnet import kernels
from pmwnet._jit import NUMBA_ENABLED, backend
from pmwnet.policy import fusion_params, pmw_params
from pmwnet.scenarios import builtin_scenario
from pmwnet.sim import RngStream, _kernel_args


def run_once(fn, spec, kw, draws):
    arr = spec.arrays
    q = np.zeros(arr.r)
    acc = np.zeros(kernels.N_ACC)
    qmax, qmin = q.copy(), q.copy()
    empty_q = np.zeros((0, arr.r))
    empty_d = np.zeros((0, arr.r), np.int8)
    empty_i = np.zeros((0, arr.n_proc), np.int8)
    start = time.perf_counter()
    fn(q, *draws[:4], acc=acc, qmax=qmax, qmin=qmin, record=False, tq=empty_q, tD=empty_d, tI=empty_i,
       tf=np.zeros(0), **kw)
    return time.perf_counter() - start, q, acc


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--scenario", default="general", choices=["fusion", "general"])
    ap.add_argument("--V", type=float, default=50.0)
    ap.add_argument("--slots", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    spec = builtin_scenario(args.scenario)
    params = fusion_params(args.V) if args.scenario == "fusion" else pmw_params(spec, args.V)
    kw = _kernel_args(spec, params)
    draws = RngStream(spec, 0).draw(args.slots)

    paths = [("python", kernels.simulate_block.py_func)]
    if NUMBA_ENABLED:
        run_once(kernels.simulate_block, spec, kw, RngStream(spec, 1).draw(10))  # compile outside the timing
        paths.insert(0, (backend(), kernels.simulate_block))

    results = {}
    for name, fn in paths:
        best = min(run_once(fn, spec, kw, draws)[0] for _ in range(args.repeat))
        _, q, acc = run_once(fn, spec, kw, draws)
        results[name] = (best, q, acc)
        print(f"{name:>14}: {args.slots / best:>14,.0f} slots/s  ({best * 1e3:.1f} ms)")

    (t0, q0, a0), *rest = results.values()
    for t, q, a in rest:
        assert np.array_equal(q0, q) and np.array_equal(a0, a), "paths disagree"
        print(f"{'speedup':>14}: {t / t0:.1f}x, identical final state")


if __name__ == "__main__":
    main()

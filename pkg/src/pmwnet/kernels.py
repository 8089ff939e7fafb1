"""Per-slot decision and simulation loops.

Everything here sticks to the numba-compatible subset: flat numpy arrays,
scalars, no Python objects. ``_jit.njit`` compiles them unless numba is
disabled, in which case they run as ordinary Python over numpy arrays.

Gate modes for processor eligibility:
  0  queue-edge gates: every supply queue holds at least ``edge_level`` and an
     internal processor's demand queue is at most its theta
  1  plain underflow gates: every supply queue holds at least what the
     processor itself consumes (sufficient when no queue feeds two processors)
"""

from __future__ import annotations

import numpy as np

from ._jit import njit

GATE_EDGE = 0
GATE_UNDERFLOW = 1

# Slots of the accumulator vector shared by the loops.
ACC_UTIL, ACC_UTIL_C, ACC_WB, ACC_WB_C = 0, 1, 2, 3
N_ACC = 4
# Floating-queue counters.
ST_DROPPED, ST_UNDERFLOWS, ST_NULL_SLOTS = 0, 1, 2


@njit
def _kahan_add(acc, i, x):
    y = x - acc[i + 1]
    t = acc[i] + y
    acc[i + 1] = (t - acc[i]) - y
    acc[i] = t


@njit
def admission(q, R, c, V, theta, w, is_source, D):
    for j in range(q.shape[0]):
        if is_source[j] and V * c[j] + w[j] * (q[j] - theta[j]) < 0.0:
            D[j] = 1
        else:
            D[j] = 0


@njit
def processor_weights(q, C, p, V, theta, w, beta, alpha, alpha_out, is_output, demand,
                      gate_mode, edge_level, W, elig):
    n_proc, r = beta.shape
    for n in range(n_proc):
        s = 0.0
        ok = True
        for j in range(r):
            b = beta[n, j]
            if b > 0.0:
                s += w[j] * (q[j] - theta[j]) * b
                if gate_mode == GATE_EDGE:
                    if q[j] < edge_level:
                        ok = False
                elif q[j] < b:
                    ok = False
        if is_output[n]:
            s += V * p[n] * alpha_out[n]
        else:
            h = demand[n]
            s -= w[h] * (q[h] - theta[h]) * alpha[n, h] + V * C[n]
            if gate_mode == GATE_EDGE and q[h] > theta[h]:
                ok = False
        W[n] = s if s > 0.0 else 0.0
        elig[n] = ok


@njit
def select_activation(W, elig, family_kind, family_vecs, I):
    n_proc = W.shape[0]
    if family_kind == 0:
        for n in range(n_proc):
            I[n] = 1 if (elig[n] and W[n] > 0.0) else 0
        return
    best = -1.0
    best_row = -1
    for m in range(family_vecs.shape[0]):
        s = 0.0
        ok = True
        for n in range(n_proc):
            if family_vecs[m, n]:
                if not elig[n]:
                    ok = False
                    break
                s += W[n]
        # rows are sorted, so the first strict improvement is the smallest maximizer
        if ok and s > best:
            best = s
            best_row = m
    for n in range(n_proc):
        I[n] = family_vecs[best_row, n]


@njit
def decide(q, R, c, C, p, V, theta, w, beta, alpha, alpha_out, is_output, demand, is_source,
           gate_mode, edge_level, family_kind, family_vecs, D, I, W, elig):
    admission(q, R, c, V, theta, w, is_source, D)
    processor_weights(q, C, p, V, theta, w, beta, alpha, alpha_out, is_output, demand,
                      gate_mode, edge_level, W, elig)
    select_activation(W, elig, family_kind, family_vecs, I)


@njit
def effects(D, I, R, c, C, p, beta, alpha, alpha_out, is_output, A, mu):
    """Fill ``A`` and ``mu``; return the slot utility."""
    n_proc, r = beta.shape
    f = 0.0
    for j in range(r):
        a = D[j] * R[j]
        A[j] = a
        mu[j] = 0.0
        f -= a * c[j]
    for n in range(n_proc):
        if I[n]:
            for j in range(r):
                mu[j] += beta[n, j]
                A[j] += alpha[n, j]
            if is_output[n]:
                f += p[n] * alpha_out[n]
            else:
                f -= C[n]
    return f


@njit
def simulate_block(q, Rb, cb, Cb, pb, V, theta, w, beta, alpha, alpha_out, is_output, demand,
                   is_source, gate_mode, edge_level, family_kind, family_vecs,
                   acc, qmax, qmin, record, tq, tD, tI, tf):
    """Advance ``q`` in place over the slots of one block.

    Returns -1, or the slot offset of the first underflow (the loop stops
    there and ``q`` is left at the offending slot's start).
    """
    n_proc, r = beta.shape
    D = np.zeros(r, dtype=np.int8)
    I = np.zeros(n_proc, dtype=np.int8)
    W = np.zeros(n_proc)
    elig = np.zeros(n_proc, dtype=np.bool_)
    A = np.zeros(r)
    mu = np.zeros(r)
    for t in range(Rb.shape[0]):
        R = Rb[t]
        c = cb[t]
        C = Cb[t]
        p = pb[t]
        decide(q, R, c, C, p, V, theta, w, beta, alpha, alpha_out, is_output, demand, is_source,
               gate_mode, edge_level, family_kind, family_vecs, D, I, W, elig)
        f = effects(D, I, R, c, C, p, beta, alpha, alpha_out, is_output, A, mu)
        for j in range(r):
            if q[j] < mu[j]:
                return t
        wb = 0.0
        for j in range(r):
            wb += w[j] * q[j]
        _kahan_add(acc, ACC_WB, wb)
        _kahan_add(acc, ACC_UTIL, f)
        if record:
            for j in range(r):
                tq[t, j] = q[j]
                tD[t, j] = D[j]
            for n in range(n_proc):
                tI[t, n] = I[n]
            tf[t] = f
        for j in range(r):
            q[j] = q[j] - mu[j] + A[j]
            if q[j] > qmax[j]:
                qmax[j] = q[j]
            if q[j] < qmin[j]:
                qmin[j] = q[j]
    return -1


@njit
def simulate_floating_block(q, buf, cap, Rb, cb, Cb, pb, V, theta, w, beta, alpha, alpha_out,
                            is_output, demand, is_source, gate_mode, edge_level, family_kind,
                            family_vecs, acc, stats, qmax, qmin, record, tq, tb):
    """Like ``simulate_block`` with a finite physical buffer behind every queue.

    ``q`` is the virtual backlog the policy sees and follows the unbuffered
    dynamics exactly; ``buf`` is the physical content, ``q - buf`` the
    counter. A processor whose supply buffers cannot cover it is nulled for
    the slot: nothing physical moves and it earns or pays nothing, while the
    counters absorb its virtual consumption and production.
    """
    n_proc, r = beta.shape
    D = np.zeros(r, dtype=np.int8)
    I = np.zeros(n_proc, dtype=np.int8)
    W = np.zeros(n_proc)
    elig = np.zeros(n_proc, dtype=np.bool_)
    A = np.zeros(r)
    mu = np.zeros(r)
    inflow = np.zeros(r)
    for t in range(Rb.shape[0]):
        R = Rb[t]
        c = cb[t]
        C = Cb[t]
        p = pb[t]
        decide(q, R, c, C, p, V, theta, w, beta, alpha, alpha_out, is_output, demand, is_source,
               gate_mode, edge_level, family_kind, family_vecs, D, I, W, elig)
        effects(D, I, R, c, C, p, beta, alpha, alpha_out, is_output, A, mu)
        for j in range(r):
            if q[j] < mu[j]:
                return t
        wb = 0.0
        for j in range(r):
            wb += w[j] * q[j]
        _kahan_add(acc, ACC_WB, wb)
        if record:
            for j in range(r):
                tq[t, j] = q[j]
                tb[t, j] = buf[j]

        f = 0.0
        nulled = False
        for j in range(r):
            inflow[j] = D[j] * R[j]
            f -= inflow[j] * c[j]
        for n in range(n_proc):
            if not I[n]:
                continue
            covered = True
            for j in range(r):
                if beta[n, j] > 0.0 and buf[j] < beta[n, j]:
                    covered = False
                    break
            if not covered:
                nulled = True
                stats[ST_UNDERFLOWS] += 1.0
                continue
            for j in range(r):
                buf[j] -= beta[n, j]
                inflow[j] += alpha[n, j]
            if is_output[n]:
                f += p[n] * alpha_out[n]
            else:
                f -= C[n]
        for j in range(r):
            room = cap[j] - buf[j]
            put = inflow[j] if inflow[j] <= room else room
            buf[j] += put
            stats[ST_DROPPED] += inflow[j] - put
        if nulled:
            stats[ST_NULL_SLOTS] += 1.0
        _kahan_add(acc, ACC_UTIL, f)

        for j in range(r):
            q[j] = q[j] - mu[j] + A[j]
            if q[j] > qmax[j]:
                qmax[j] = q[j]
            if q[j] < qmin[j]:
                qmin[j] = q[j]
    return -1

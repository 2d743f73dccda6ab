"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the UAVTC_BACKEND
environment variable: "numba" (default when importable) or "numpy".
Both paths run the same arithmetic in the same order, so results are
bit-identical across backends; only speed differs. See
benchmarks/backend_bench.py for a side-by-side timing.
"""

import os
import warnings

import numpy as np

_requested = os.environ.get("UAVTC_BACKEND", "").strip().lower()

_numba_njit = None
if _requested in ("", "auto", "numba"):
    try:
        from numba import njit as _numba_njit
    except ImportError:
        if _requested == "numba":
            warnings.warn("UAVTC_BACKEND=numba but numba is not importable; "
                          "falling back to numpy", RuntimeWarning)

BACKEND = "numba" if _numba_njit is not None else "numpy"

# column layout of the per-node stats block returned by the slot loop
STAT_COLUMNS = (
    "arrivals", "overflow", "deadline", "transmissions", "successes",
    "outages", "queued_end", "ring_overflow",
    "m_gate", "m_arrivals", "m_overflow", "m_deadline",
    "m_transmissions", "m_successes", "m_outages",
)


def _interference_accumulate(out, xm, hit, beta, weight):
    """out[i] += weight * xm[i]^2 when xm[i] >= beta and hit[i].

    Grouping (weight * (x*x)) matches the vectorized fallback bit-for-bit.
    """
    for i in range(out.shape[0]):
        if hit[i] and xm[i] >= beta:
            out[i] += weight * (xm[i] * xm[i])


def _interference_accumulate_numpy(out, xm, hit, beta, weight):
    out += weight * (xm * xm) * ((xm >= beta) & hit)


def _slot_loop(n_slots, warmup, arrivals, lengths, len_off,
               best, chan, beta, w, noise, gamma_th,
               t_th_slots, cap_len, saturated, ring_size):
    """Slot-by-slot network simulation over pre-drawn randomness.

    Per slot and node: enqueue arrivals against the length budget, open
    the channel gate when the best fading clears the threshold, transmit
    the head packet on the argmax channel, test SINR against the actual
    co-channel transmitters, then expire packets whose waiting age
    reached the deadline. t_th_slots and cap_len are per-node arrays
    (a negative deadline disables expiry). All randomness (arrival
    counts, packet lengths, fading maxima, channel indices) is drawn by
    the caller, keeping the loop deterministic and backend-independent.
    """
    n_tx = beta.shape[0]
    q_len = np.zeros((n_tx, ring_size))
    q_arr = np.zeros((n_tx, ring_size), dtype=np.int64)
    head = np.zeros(n_tx, dtype=np.int64)
    tail = np.zeros(n_tx, dtype=np.int64)
    occ = np.zeros(n_tx)
    len_ptr = len_off[:-1].copy()
    tx_now = np.zeros(n_tx, dtype=np.bool_)
    stats = np.zeros((n_tx, 15), dtype=np.int64)

    for t in range(n_slots):
        measured = t >= warmup
        # arrivals and the transmission decision
        for i in range(n_tx):
            if not saturated:
                for _ in range(arrivals[i, t]):
                    L = lengths[len_ptr[i]]
                    len_ptr[i] += 1
                    stats[i, 0] += 1
                    if measured:
                        stats[i, 9] += 1
                    if occ[i] + L > cap_len[i]:
                        stats[i, 1] += 1
                        if measured:
                            stats[i, 10] += 1
                    elif tail[i] - head[i] >= ring_size:
                        stats[i, 7] += 1
                    else:
                        p = tail[i] % ring_size
                        q_len[i, p] = L
                        q_arr[i, p] = t
                        tail[i] += 1
                        occ[i] += L
            gate = best[i, t] >= beta[i]
            if gate and measured:
                stats[i, 8] += 1
            tx_now[i] = gate and (saturated or head[i] < tail[i])
        # SINR per transmitting node at its own receiver
        for i in range(n_tx):
            if not tx_now[i]:
                continue
            interference = 0.0
            for m in range(n_tx):
                if m != i and tx_now[m] and chan[m, t] == chan[i, t]:
                    interference += w[m, i] * best[m, t] * best[m, t]
            sinr = w[i, i] * best[i, t] * best[i, t] / (noise + interference)
            failed = sinr < gamma_th
            stats[i, 3] += 1
            if measured:
                stats[i, 12] += 1
            if failed:
                stats[i, 5] += 1
                if measured:
                    stats[i, 14] += 1
            else:
                stats[i, 4] += 1
                if measured:
                    stats[i, 13] += 1
            if not saturated:
                p = head[i] % ring_size
                occ[i] -= q_len[i, p]
                head[i] += 1
        # deadline scan over waiting packets
        if not saturated:
            for i in range(n_tx):
                if t_th_slots[i] < 0:
                    continue
                while head[i] < tail[i]:
                    p = head[i] % ring_size
                    if t - q_arr[i, p] >= t_th_slots[i]:
                        occ[i] -= q_len[i, p]
                        head[i] += 1
                        stats[i, 2] += 1
                        if measured:
                            stats[i, 11] += 1
                    else:
                        break
    for i in range(n_tx):
        stats[i, 6] = tail[i] - head[i]
    return stats


if BACKEND == "numba":
    interference_accumulate = _numba_njit(cache=True)(_interference_accumulate)
    slot_loop = _numba_njit(cache=True)(_slot_loop)
else:
    interference_accumulate = _interference_accumulate_numpy
    slot_loop = _slot_loop

# exposed for the benchmark and the backend-equivalence tests
slot_loop_python = _slot_loop
interference_accumulate_python = _interference_accumulate
interference_accumulate_numpy = _interference_accumulate_numpy

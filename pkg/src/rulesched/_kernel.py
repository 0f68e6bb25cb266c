"""Compiled batch decoder.

Mirrors the stepwise rules in :mod:`rulesched.rules` exactly; the test
suite cross-checks the two on random inputs.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def decode_batch(rules, u, ptr, ids, covers, costs, order, grades, demand,
                 k_cheapest, w_p, band_weights):
    """Decode ``rules`` (K, n) with per-nurse uniforms ``u`` (K, n).

    Returns assignments (K, n), preference costs (K,) and undercover totals (K,).
    """
    n_strings, n = rules.shape
    n_slots, p = demand.shape
    assign = np.empty((n_strings, n), dtype=np.int64)
    pref = np.zeros(n_strings)
    under = np.zeros(n_strings, dtype=np.int64)
    rem = np.empty((n_slots, p), dtype=np.int64)
    slot_w = np.empty(n_slots)

    for b in range(n_strings):
        rem[:, :] = demand
        total = 0.0
        for i in range(n):
            lo = ptr[i]
            size = ptr[i + 1] - lo
            g = grades[i] - 1
            rule = rules[b, i]
            if rule == 1:
                pos = lo + min(int(u[b, i] * size), size - 1)
            elif rule == 2:
                kk = min(k_cheapest, size)
                pos = lo + order[lo + min(int(u[b, i] * kk), kk - 1)]
            elif rule == 3:
                active = -1
                for s in range(g, p):
                    for k in range(n_slots):
                        if rem[k, s] > 0:
                            active = s
                            break
                    if active >= 0:
                        break
                pos = lo + order[lo]
                if active >= 0:
                    best = -1
                    for t in range(size):
                        q = lo + order[lo + t]
                        score = 0
                        for k in range(n_slots):
                            if covers[q, k] and rem[k, active] > 0:
                                score += 1
                        if score > best:
                            best = score
                            pos = q
            else:
                for k in range(n_slots):
                    w = 0.0
                    for s in range(g, p):
                        if rem[k, s] > 0:
                            w += band_weights[s]
                    slot_w[k] = w
                best_score = -np.inf
                pos = lo
                for q in range(lo, lo + size):
                    score = 0.0
                    for k in range(n_slots):
                        score += covers[q, k] * slot_w[k]
                    score += w_p * (100.0 - costs[q])
                    if score > best_score:
                        best_score = score
                        pos = q
            assign[b, i] = ids[pos]
            total += costs[pos]
            for k in range(n_slots):
                if covers[pos, k]:
                    for s in range(g, p):
                        rem[k, s] -= 1
        pref[b] = total
        missing = 0
        for k in range(n_slots):
            for s in range(p):
                if rem[k, s] > 0:
                    missing += rem[k, s]
        under[b] = missing
    return assign, pref, under

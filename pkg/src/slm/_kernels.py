"""Compiled threshold-search kernels.

Both kernels bin samples against the exact candidate edge values, then scan
candidates over prefix sums, so the loss at every candidate is computed from
the same sample partition a direct per-candidate pass would produce.  They
release the GIL, which is what makes thread-based candidate evaluation scale.

Tie rule: strict `<` while scanning candidates in ascending threshold order,
so equal-loss candidates resolve to the smallest threshold.
"""

import math

import numpy as np
from numba import njit

NOT_FOUND = (np.nan, np.inf, 0, 0, False)


@njit(nogil=True, cache=True)
def _fill_edges(lo, hi, bins, edges):
    width = hi - lo
    for k in range(1, bins):
        edges[k - 1] = lo + (k * width) / bins


@njit(nogil=True, cache=True)
def _bin_index(edges, n_edges, v):
    # number of edges <= v, via upper-bound binary search
    lo = 0
    hi = n_edges
    while lo < hi:
        mid = (lo + hi) >> 1
        if edges[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(nogil=True, cache=True)
def split_classification(values, labels, n_classes, bins, min_leaf):
    n = values.shape[0]
    lo = values[0]
    hi = values[0]
    for i in range(1, n):
        v = values[i]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    if hi == lo:
        return NOT_FOUND

    n_edges = bins - 1
    edges = np.empty(n_edges, dtype=np.float64)
    _fill_edges(lo, hi, bins, edges)

    counts = np.zeros((bins, n_classes), dtype=np.int64)
    bin_totals = np.zeros(bins, dtype=np.int64)
    for i in range(n):
        b = _bin_index(edges, n_edges, values[i])
        counts[b, labels[i]] += 1
        bin_totals[b] += 1

    total = np.zeros(n_classes, dtype=np.int64)
    for b in range(bins):
        for c in range(n_classes):
            total[c] += counts[b, c]

    left = np.zeros(n_classes, dtype=np.int64)
    nl = 0
    best_thr = np.nan
    best_loss = np.inf
    best_nl = 0
    best_nr = 0
    found = False
    for k in range(1, bins):
        for c in range(n_classes):
            left[c] += counts[k - 1, c]
        nl += bin_totals[k - 1]
        nr = n - nl
        if nl < min_leaf or nr < min_leaf:
            continue
        hl = 0.0
        hr = 0.0
        for c in range(n_classes):
            cnt = left[c]
            if cnt > 0:
                p = cnt / nl
                hl = hl - p * math.log2(p)
            cnt = total[c] - left[c]
            if cnt > 0:
                p = cnt / nr
                hr = hr - p * math.log2(p)
        wl = nl / n
        wr = nr / n
        val = wl * hl + wr * hr
        if val < best_loss:
            best_loss = val
            best_thr = edges[k - 1]
            best_nl = nl
            best_nr = nr
            found = True
    return best_thr, best_loss, best_nl, best_nr, found


@njit(nogil=True, cache=True)
def split_regression(values, targets, bins, min_leaf):
    n = values.shape[0]
    lo = values[0]
    hi = values[0]
    for i in range(1, n):
        v = values[i]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    if hi == lo:
        return NOT_FOUND

    n_edges = bins - 1
    edges = np.empty(n_edges, dtype=np.float64)
    _fill_edges(lo, hi, bins, edges)

    bin_n = np.zeros(bins, dtype=np.int64)
    bin_s = np.zeros(bins, dtype=np.float64)
    bin_ss = np.zeros(bins, dtype=np.float64)
    for i in range(n):
        b = _bin_index(edges, n_edges, values[i])
        t = targets[i]
        bin_n[b] += 1
        bin_s[b] += t
        bin_ss[b] += t * t

    tot_s = 0.0
    tot_ss = 0.0
    for b in range(bins):
        tot_s += bin_s[b]
        tot_ss += bin_ss[b]

    nl = 0
    sl = 0.0
    ssl = 0.0
    best_thr = np.nan
    best_loss = np.inf
    best_nl = 0
    best_nr = 0
    found = False
    for k in range(1, bins):
        nl += bin_n[k - 1]
        sl += bin_s[k - 1]
        ssl += bin_ss[k - 1]
        nr = n - nl
        if nl < min_leaf or nr < min_leaf:
            continue
        ml = sl / nl
        msel = ssl / nl - ml * ml
        if msel < 0.0:
            msel = 0.0
        mr = (tot_s - sl) / nr
        mser = (tot_ss - ssl) / nr - mr * mr
        if mser < 0.0:
            mser = 0.0
        wl = nl / n
        wr = nr / n
        val = wl * msel + wr * mser
        if val < best_loss:
            best_loss = val
            best_thr = edges[k - 1]
            best_nl = nl
            best_nr = nr
            found = True
    return best_thr, best_loss, best_nl, best_nr, found

"""Compiled lattice-point kernels.

Points are indexed by integer vectors i with reduced value
q(i) = sum_j i_j^2 * w_j, where w_j = 1 / a_j^2.  Every kernel takes the
weights already permuted into iteration order: w[0] is the outermost
coordinate (split into slabs), w[-1] is the coordinate resolved by a
closed-form floor.

Quadrant modes: 0 = full lattice Z^n, 1 = positive N^n, 2 = non-negative.
"""

import numpy as np
from numba import njit, prange

FULL = 0
POSITIVE = 1
NONNEGATIVE = 2


@njit(cache=True, nogil=True)
def _last_extent(s, w, T):
    """Largest m >= 0 with s + m*m*w <= T, or -1 if even m = 0 fails."""
    if s > T:
        return -1
    r = (T - s) / w
    m = np.int64(np.sqrt(r)) if r > 0 else np.int64(0)
    while s + (m + 1) * (m + 1) * w <= T:
        m += 1
    while m > 0 and s + m * m * w > T:
        m -= 1
    return m


@njit(cache=True, nogil=True)
def _base_count(m, mode):
    if m < 0:
        return np.int64(0)
    if mode == POSITIVE:
        return np.int64(m)
    if mode == NONNEGATIVE:
        return np.int64(m + 1)
    return np.int64(2 * m + 1)


@njit(cache=True, nogil=True)
def _count_tail(w, s0, mult0, T, mode):
    """Count points whose outermost coordinate is fixed with partial value s0."""
    n = w.shape[0]
    if n == 2:
        return mult0 * _base_count(_last_extent(s0, w[1], T), mode)
    depth = n - 2
    start = 1 if mode == POSITIVE else 0
    idx = np.empty(depth, dtype=np.int64)
    part = np.empty(depth + 1, dtype=np.float64)
    mult = np.empty(depth + 1, dtype=np.int64)
    part[0] = s0
    mult[0] = mult0
    level = 0
    idx[0] = start
    total = np.int64(0)
    while True:
        i = idx[level]
        s = part[level] + i * i * w[level + 1]
        if s <= T:
            m = mult[level]
            if mode == FULL and i != 0:
                m = 2 * m
            if level == depth - 1:
                total += m * _base_count(_last_extent(s, w[n - 1], T), mode)
                idx[level] += 1
            else:
                part[level + 1] = s
                mult[level + 1] = m
                level += 1
                idx[level] = start
        else:
            if level == 0:
                break
            level -= 1
            idx[level] += 1
    return total


@njit(cache=True, nogil=True)
def _outer_extent(w0, T, mode):
    start = 1 if mode == POSITIVE else 0
    m = _last_extent(0.0, w0, T)
    return start, m


@njit(cache=True, nogil=True)
def count_serial(w, T, mode):
    n = w.shape[0]
    if n == 1:
        return _base_count(_last_extent(0.0, w[0], T), mode)
    start, m = _outer_extent(w[0], T, mode)
    total = np.int64(0)
    for i in range(start, m + 1):
        mult = np.int64(2) if (mode == FULL and i != 0) else np.int64(1)
        total += _count_tail(w, i * i * w[0], mult, T, mode)
    return total


@njit(cache=True, nogil=True, parallel=True)
def count_parallel(w, T, mode):
    n = w.shape[0]
    if n == 1:
        return _base_count(_last_extent(0.0, w[0], T), mode)
    start, m = _outer_extent(w[0], T, mode)
    total = np.int64(0)
    for i in prange(start, m + 1):
        mult = np.int64(2) if (mode == FULL and i != 0) else np.int64(1)
        total += _count_tail(w, i * i * w[0], mult, T, mode)
    return total


@njit(cache=True, nogil=True)
def _fill_tail(w, s0, mult0, T, mode, out, pos):
    """Write the values of points with fixed outermost coordinate; returns new pos.

    Full-lattice points are written once per sign pattern.
    """
    n = w.shape[0]
    depth = n - 2
    start = 1 if mode == POSITIVE else 0
    wl = w[n - 1]
    if n == 2:
        m = _last_extent(s0, wl, T)
        for j in range(start, m + 1):
            v = s0 + j * j * wl
            reps = mult0 * (2 if (mode == FULL and j != 0) else 1)
            for _ in range(reps):
                out[pos] = v
                pos += 1
        return pos
    idx = np.empty(depth, dtype=np.int64)
    part = np.empty(depth + 1, dtype=np.float64)
    mult = np.empty(depth + 1, dtype=np.int64)
    part[0] = s0
    mult[0] = mult0
    level = 0
    idx[0] = start
    while True:
        i = idx[level]
        s = part[level] + i * i * w[level + 1]
        if s <= T:
            mm = mult[level]
            if mode == FULL and i != 0:
                mm = 2 * mm
            if level == depth - 1:
                m = _last_extent(s, wl, T)
                for j in range(start, m + 1):
                    v = s + j * j * wl
                    reps = mm * (2 if (mode == FULL and j != 0) else 1)
                    for _ in range(reps):
                        out[pos] = v
                        pos += 1
                idx[level] += 1
            else:
                part[level + 1] = s
                mult[level + 1] = mm
                level += 1
                idx[level] = start
        else:
            if level == 0:
                break
            level -= 1
            idx[level] += 1
    return pos


@njit(cache=True, nogil=True, parallel=True)
def enumerate_values(w, T, mode):
    """All reduced values <= T with multiplicity, unsorted but in a fixed order."""
    n = w.shape[0]
    start, m = _outer_extent(w[0], T, mode)
    if n == 1:
        size = _base_count(m, mode)
        out = np.empty(size, dtype=np.float64)
        pos = 0
        for i in range(start, m + 1):
            v = i * i * w[0]
            reps = 2 if (mode == FULL and i != 0) else 1
            for _ in range(reps):
                out[pos] = v
                pos += 1
        return out
    nslab = max(m + 1 - start, 0)
    counts = np.zeros(nslab, dtype=np.int64)
    for k in prange(nslab):
        i = start + k
        mult = np.int64(2) if (mode == FULL and i != 0) else np.int64(1)
        counts[k] = _count_tail(w, i * i * w[0], mult, T, mode)
    offsets = np.zeros(nslab + 1, dtype=np.int64)
    for k in range(nslab):
        offsets[k + 1] = offsets[k] + counts[k]
    out = np.empty(offsets[nslab], dtype=np.float64)
    for k in prange(nslab):
        i = start + k
        mult = np.int64(2) if (mode == FULL and i != 0) else np.int64(1)
        _fill_tail(w, i * i * w[0], mult, T, mode, out, offsets[k])
    return out

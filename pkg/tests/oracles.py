"""Independent brute-force references used by the tests.

None of these touch the package's lattice kernels.
"""

import itertools
import math

import numpy as np


def naive_count(sides, t, quadrant):
    """Nested-loop count of integer points with sum i_j^2/a_j^2 <= t^2."""
    t2 = t * t * (1.0 + 4.0 * np.finfo(float).eps)
    ranges = []
    for a in sides:
        m = int(math.floor(t * a)) + 1
        if quadrant == "positive":
            ranges.append(range(1, m + 1))
        elif quadrant == "nonnegative":
            ranges.append(range(0, m + 1))
        else:
            ranges.append(range(-m, m + 1))
    total = 0
    for idx in itertools.product(*ranges):
        if sum(i * i / (a * a) for i, a in zip(idx, sides)) <= t2:
            total += 1
    return total


def naive_values(sides, q_max, first):
    """All reduced values <= q_max with indices starting at ``first``, sorted."""
    grids = [np.arange(first, int(math.floor(math.sqrt(q_max) * a)) + 1) for a in sides]
    mesh = np.meshgrid(*grids, indexing="ij")
    q = sum(m.astype(float) ** 2 / (a * a) for m, a in zip(mesh, sides)).ravel()
    return np.sort(q[q <= q_max * (1 + 1e-15)])


def planar_kth_on_grid(k, dirichlet, a_grid, chunk=1000):
    """k-th reduced eigenvalue of the rectangle (a, 1/a) for every a in a_grid.

    Per chunk, an upper bound Q on the k-th value comes from two explicit
    families of at least k points (one index fixed at its first value, or a
    small square box); only indices with i^2/a^2 <= Q, j^2 a^2 <= Q are kept.
    """
    first = 1 if dirichlet else 0
    rank = k if dirichlet else k + 1
    m = first + int(math.ceil(math.sqrt(rank))) - 1
    out = np.empty(len(a_grid))
    for s in range(0, len(a_grid), chunk):
        a = np.asarray(a_grid[s:s + chunk], dtype=float)
        line = first**2 / a**2 + (first + rank - 1) ** 2 * a**2
        box = m * m * (1.0 / a**2 + a**2)
        q = float(np.max(np.minimum(line, box))) * (1 + 1e-12)
        i = np.arange(first, int(math.floor(a.max() * math.sqrt(q))) + 1, dtype=float)
        j = np.arange(first, int(math.floor(math.sqrt(q) / a.min())) + 1, dtype=float)
        ii, jj = np.meshgrid(i, j, indexing="ij")
        vals = (ii**2).ravel()[None, :] / a[:, None] ** 2 + (jj**2).ravel()[None, :] * a[:, None] ** 2
        out[s:s + chunk] = np.partition(vals, rank - 1, axis=1)[:, rank - 1]
    return out


def planar_grid_optimum(k, dirichlet, points=100_001, lo=0.2):
    """Dense grid on a in [lo, 1] plus a golden-section polish around the best cell."""
    a = np.linspace(lo, 1.0, points)
    v = planar_kth_on_grid(k, dirichlet, a)
    sign = 1.0 if dirichlet else -1.0
    i = int(np.argmin(sign * v))
    step = a[1] - a[0]
    left, right = max(lo, a[i] - step), min(1.0, a[i] + step)
    g = (math.sqrt(5) - 1) / 2
    f = lambda x: sign * planar_kth_on_grid(k, dirichlet, np.array([x]))[0]
    best = sign * v[i]
    c, d = right - g * (right - left), left + g * (right - left)
    fc, fd = f(c), f(d)
    for _ in range(80):
        best = min(best, fc, fd)
        if fc <= fd:
            right, d, fd = d, c, fc
            c = right - g * (right - left)
            fc = f(c)
        else:
            left, c, fc = c, d, fd
            d = left + g * (right - left)
            fd = f(d)
    return sign * best


def oned_direct(lam, dirichlet):
    """sum (lam - k^2)_+ over k >= 1 (Dirichlet) or k >= 0 (Neumann), term by term."""
    m = int(math.floor(math.sqrt(lam)))
    ks = np.arange(1 if dirichlet else 0, m + 1, dtype=float)
    return math.fsum(np.maximum(lam - ks * ks, 0.0))


def naive_count_vec(sides, t, quadrant):
    """Same count as naive_count, by full box enumeration with numpy; one axis at a time."""
    t2 = t * t * (1.0 + 4.0 * np.finfo(float).eps)
    axes = []
    for a in sides:
        m = int(math.floor(t * a)) + 1
        lo = {"positive": 1, "nonnegative": 0}.get(quadrant, -m)
        i = np.arange(lo, m + 1, dtype=float)
        axes.append(i * i / (a * a))
    # summed left to right like naive_count, so boundary rounding matches
    partial = np.zeros(1)
    for terms in axes[:-1]:
        partial = (partial[:, None] + terms[None, :]).ravel()
        partial = partial[partial <= t2]
    return int(np.count_nonzero(partial[:, None] + axes[-1][None, :] <= t2))

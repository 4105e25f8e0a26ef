"""Extremal unit-measure cuboids for eigenvalues, Riesz means and averages.

Shapes are parametrised by log-sides: v in R^{n-1} is extended by
-sum(v) so the product of the sides is one.  The general search is a
Sobol prescreen, multi-start Nelder-Mead and a coordinate-wise
golden-section polish.  One-parameter problems (n = 2, or n = 3 with a
fixed ratio a_2 = c a_1) use a dense grid instead of the simplex.

For n = 2 the k-th eigenvalue has an exact solver.  With sides
(sqrt(u), 1/sqrt(u)) a lattice point (i, j) has reduced value
i^2/u + j^2 u, which is <= q on an explicit u-interval.  The best
lambda_k is the least q whose intervals reach depth k somewhere in the
feasible u-range; the best mu_k is the largest q whose open intervals
leave a point covered at most k times.  Both are found by bisection on q.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .core import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    Cuboid,
    InvalidInputError,
    make_unit_cuboid,
    perimeter,
)
from .lattice import EllipsoidQuery, count_points, enumerate_values
from .spectrum import (
    PI2,
    RieszSpec,
    _riesz_from_values,
    eigenvalue,
    eigenvalue_average,
    first_reduced_values,
    kth_reduced_value,
    riesz_mean,
)

TARGETS = ("lambda_k", "mu_k", "riesz", "average")
TIE_RTOL = 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class CheckpointMismatchError(InvalidInputError):
    """A checkpoint belongs to a different configuration."""


@dataclass
class OptimizeOptions:
    starts: int = 8
    budget: int = 2000  # objective evaluations per start
    seed: int = 0xC0FFEE
    warm_start: Cuboid | None = None
    ratio: float | None = None  # n = 3 only: sorted a_2 = ratio * a_1
    exact_planar: bool = True
    grid_size: int | None = None
    prescreen: int = 64
    box: float = 8.0  # sides searched in [1/box, box]
    refine_rounds: int = 3


@dataclass
class OptimizationResult:
    target: str
    bc: BoundaryCondition
    n: int
    k: int | None
    threshold: float | None
    gamma: float | None
    optimal_cuboid: Cuboid
    optimal_value: float
    value_at_cube: float
    evaluations: int
    multistart_spread: float
    flags: tuple[str, ...] = ()
    method: str = "multistart"

    @property
    def delta(self) -> float:
        return self.optimal_cuboid.longest - 1.0

    @property
    def perimeter_defect(self) -> float:
        return perimeter(self.optimal_cuboid) - 2.0 * self.n

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "bc": self.bc.value,
            "n": self.n,
            "k": self.k,
            "threshold": self.threshold,
            "gamma": self.gamma,
            "sides": list(self.optimal_cuboid.sides),
            "value": self.optimal_value,
            "value_at_cube": self.value_at_cube,
            "delta": self.delta,
            "perimeter_defect": self.perimeter_defect,
            "evaluations": self.evaluations,
            "multistart_spread": self.multistart_spread,
            "flags": list(self.flags),
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# parametrisation and objective bookkeeping


def sides_from_params(v: Sequence[float], n: int, ratio: float | None = None) -> Cuboid:
    v = np.asarray(v, dtype=float)
    if ratio is not None:
        x = math.exp(float(v[0]))
        return make_unit_cuboid((x, ratio * x, 1.0 / (ratio * x * x)))
    logs = np.append(v, -v.sum())
    return make_unit_cuboid(np.exp(logs))


def params_from_cuboid(R: Cuboid, ratio: float | None = None) -> np.ndarray:
    logs = np.log(np.asarray(R.sides))
    if ratio is not None:
        return logs[:1].copy()
    return logs[:-1].copy()


class _Objective:
    """Minimisation wrapper: sign * value(cuboid), memoised per parameter vector."""

    def __init__(self, n: int, value: Callable[[Cuboid], float], sign: float, ratio: float | None, box: float = math.inf):
        self.n = n
        self.value = value
        self.sign = sign
        self.ratio = ratio
        self.box = box
        self.evaluations = 0
        self._memo: dict[tuple, float] = {}

    def cuboid(self, v) -> Cuboid:
        return sides_from_params(v, self.n, self.ratio)

    def __call__(self, v) -> float:
        key = tuple(float(x) for x in np.atleast_1d(v))
        hit = self._memo.get(key)
        if hit is None:
            R = self.cuboid(key)
            # only n - 1 log-sides are box-bounded; the dependent side can leave the box
            if R.shortest * self.box < 1.0 or R.longest > self.box:
                hit = math.inf
            else:
                self.evaluations += 1
                hit = self.sign * self.value(R)
            self._memo[key] = hit
        return hit


def _golden(f: Callable[[float], float], a: float, b: float, iterations: int = 60) -> tuple[float, float]:
    """Golden-section search on [a, b]; returns the best evaluated point."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = (fc, c) if fc <= fd else (fd, d)
    for _ in range(iterations):
        if b - a <= 1e-13 * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
            if fc < best[0]:
                best = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
            if fd < best[0]:
                best = (fd, d)
    return best[1], best[0]


def _coordinate_refine(obj: _Objective, x: np.ndarray, lo: np.ndarray, hi: np.ndarray, rounds: int) -> np.ndarray:
    x = x.copy()
    fx = obj(x)
    width = 0.02
    for _ in range(rounds):
        for i in range(len(x)):
            a, b = max(lo[i], x[i] - width), min(hi[i], x[i] + width)

            def line(t, i=i):
                y = x.copy()
                y[i] = t
                return obj(y)

            t, ft = _golden(line, a, b, 40)
            if ft < fx:
                x[i], fx = t, ft
        width /= 4.0
    return x


def _select(candidates: list[tuple[float, Cuboid]]) -> tuple[float, Cuboid]:
    """Best value; near-ties go to the smallest perimeter, then smallest sides."""
    best = min(v for v, _ in candidates)
    tol = TIE_RTOL * max(abs(best), 1e-300)
    close = [(perimeter(R), v, R) for v, R in candidates if v <= best + tol]
    # perimeters equal up to rounding count as a tie; the better value then decides
    p_min = min(p for p, _, _ in close)
    close = [c for c in close if c[0] <= p_min * (1.0 + 1e-12)]
    for _, v, R in close:
        if R.is_cube():
            return v, R
    close.sort(key=lambda t: (t[1], t[2].sides))
    _, v, R = close[0]
    return v, R


# ---------------------------------------------------------------------------
# objectives


def _eigen_objective(bc: BoundaryCondition, k: int) -> Callable[[Cuboid], float]:
    return lambda R: PI2 * kth_reduced_value(R, bc, k)


def _riesz_objective(bc: BoundaryCondition, gamma: float, threshold: float) -> Callable[[Cuboid], float]:
    q = threshold / PI2

    def value(R: Cuboid) -> float:
        if gamma == 0:
            return float(count_points(EllipsoidQuery.from_radius_sq(R, q, bc.quadrant)))
        vals = PI2 * enumerate_values(EllipsoidQuery.from_radius_sq(R, q, bc.quadrant), sort=False)
        return _riesz_from_values(np.sort(vals), gamma, threshold)

    return value


def _average_objective(bc: BoundaryCondition, k: int) -> Callable[[Cuboid], float]:
    count = k if bc is DIRICHLET else k + 1

    def value(R: Cuboid) -> float:
        return PI2 * math.fsum(first_reduced_values(R, bc, count)) / k

    return value


# ---------------------------------------------------------------------------
# generic search


def _one_dim_bounds(n: int, opts: OptimizeOptions) -> tuple[float, float]:
    if opts.ratio is not None:
        # keep a_3 = 1/(c x^2) >= a_2 = c x so the constraint stays on sorted sides
        return -math.log(opts.box), -2.0 / 3.0 * math.log(opts.ratio)
    return -math.log(opts.box), 0.0


def _search_one_dim(obj: _Objective, opts: OptimizeOptions, k_hint: int) -> tuple[list, set]:
    lo, hi = _one_dim_bounds(obj.n, opts)
    size = opts.grid_size or int(min(20000, max(400, 60 * math.sqrt(max(k_hint, 1)))))
    grid = np.linspace(lo, hi, size)
    vals = np.array([obj(np.array([t])) for t in grid])
    flags = set()
    if vals.max() == vals.min():
        flags.add("flat-objective")
    order = np.argsort(vals, kind="stable")[: max(1, opts.starts)]
    step = (hi - lo) / (size - 1)
    finals = []
    for idx in order:
        a, b = max(lo, grid[idx] - step), min(hi, grid[idx] + step)
        t, ft = _golden(lambda s: obj(np.array([s])), a, b, 60)
        if vals[idx] <= ft:
            t, ft = grid[idx], vals[idx]
        finals.append((ft, obj.cuboid([t])))
    # the end of the range is the most symmetric shape; keep it in the tie pool
    finals.append((obj(np.array([hi])), obj.cuboid([hi])))
    return finals, flags


def _search_multi(obj: _Objective, opts: OptimizeOptions) -> tuple[list, set]:
    dim = obj.n - 1
    span = math.log(opts.box)
    lo, hi = -span * np.ones(dim), span * np.ones(dim)
    sampler = qmc.Sobol(d=dim, scramble=True, seed=opts.seed)
    pts = sampler.random(opts.prescreen)
    inner = math.log(1.5)
    screen = np.vstack([lo + (hi - lo) * pts, inner * (2.0 * pts - 1.0)])
    screen_vals = np.array([obj(p) for p in screen])
    flags = set()
    starts = [np.zeros(dim)]
    if opts.warm_start is not None and opts.warm_start.dim == obj.n:
        starts.append(np.clip(params_from_cuboid(opts.warm_start), lo, hi))
    for idx in np.argsort(screen_vals, kind="stable"):
        if len(starts) >= opts.starts:
            break
        starts.append(screen[idx])
    if screen_vals.max() == screen_vals.min() and obj(np.zeros(dim)) == screen_vals.min():
        flags.add("flat-objective")
    # the cube start point itself stays in the pool; the simplex may drift off it along a flat direction
    finals = [(obj(np.zeros(dim)), obj.cuboid(np.zeros(dim)))]
    for x0 in starts:
        simplex = np.vstack([x0] + [x0 + 0.08 * e for e in np.eye(dim)])
        f0 = obj(x0)
        res = minimize(
            obj,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={
                "maxfev": opts.budget,
                "initial_simplex": simplex,
                "xatol": 1e-9,
                "fatol": 1e-12 * max(abs(f0), 1.0),
            },
        )
        if res.nfev >= opts.budget:
            flags.add("budget-exhausted")
        x = _coordinate_refine(obj, np.asarray(res.x), lo, hi, opts.refine_rounds)
        finals.append((obj(x), obj.cuboid(x)))
    return finals, flags


def _run_search(obj: _Objective, opts: OptimizeOptions, k_hint: int) -> tuple[float, Cuboid, float, set]:
    if obj.ratio is not None or obj.n == 2:
        finals, flags = _search_one_dim(obj, opts, k_hint)
    else:
        finals, flags = _search_multi(obj, opts)
    value, R = _select(finals)
    values = [v for v, _ in finals]
    spread = (max(values) - min(values)) * 1.0
    return obj.sign * value, R, abs(spread), flags


def _check_common(n: int, opts: OptimizeOptions) -> None:
    if n < 2:
        raise InvalidInputError("optimisation needs n >= 2")
    if opts.ratio is not None and (n != 3 or not opts.ratio >= 1.0):
        raise InvalidInputError("the ratio constraint is available for n = 3 with ratio >= 1")
    if opts.starts < 1 or opts.budget < 1:
        raise InvalidInputError("starts and budget must be positive")


# ---------------------------------------------------------------------------
# exact planar eigenvalue optimisation


def _interior_pairs(q: float) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) >= 1 with 2 i j <= q."""
    i_max = int(q // 2)
    if i_max < 1:
        return np.zeros(0), np.zeros(0)
    i = np.arange(1, i_max + 1)
    jmax = np.floor(q / (2.0 * i)).astype(np.int64)
    keep = jmax > 0
    i, jmax = i[keep], jmax[keep]
    ii = np.repeat(i, jmax).astype(float)
    offsets = np.repeat(np.cumsum(jmax) - jmax, jmax)
    jj = (np.arange(int(jmax.sum())) - offsets + 1).astype(float)
    return ii, jj


def _pair_intervals(q: float) -> tuple[np.ndarray, np.ndarray]:
    ii, jj = _interior_pairs(q)
    root = np.sqrt(np.maximum(q * q - 4.0 * ii * ii * jj * jj, 0.0))
    return 2.0 * ii * ii / (q + root), (q + root) / (2.0 * jj * jj)


def _dirichlet_depth(q: float, u_lo: float, u_hi: float = 1.0):
    """Candidate u values in [u_lo, u_hi] and the number of values <= q there."""
    starts, ends = _pair_intervals(q)
    keep = (starts <= u_hi) & (ends >= u_lo)
    starts, ends = np.sort(starts[keep]), np.sort(ends[keep])
    inside = starts[(starts >= u_lo) & (starts <= u_hi)]
    cand = np.unique(np.concatenate(([u_lo, u_hi], inside)))
    depth = np.searchsorted(starts, cand, side="right") - np.searchsorted(ends, cand, side="left")
    return cand, depth, ends


def _neumann_depth(q: float, u_lo: float, u_hi: float = 1.0):
    """Candidate u values in [u_lo, u_hi] and the number of values < q there."""
    starts, ends = _pair_intervals(q)
    strict = starts < ends
    starts, ends = starts[strict], ends[strict]
    # axis points: (i, 0) needs i^2 < q u, (0, j) needs j^2 u < q
    ia = np.arange(1, int(math.sqrt(q)) + 2, dtype=float)
    ia = ia[ia * ia < q]
    ja = np.arange(1, int(math.sqrt(q / u_lo)) + 2, dtype=float)
    ja = ja[ja * ja * u_lo < q]
    starts = np.concatenate((starts, ia * ia / q, np.zeros(len(ja))))
    ends = np.concatenate((ends, np.full(len(ia), np.inf), q / (ja * ja)))
    keep = (starts < u_hi) & (ends > u_lo)
    starts, ends = np.sort(starts[keep]), np.sort(ends[keep])
    events = np.concatenate((starts, ends))
    events = np.unique(np.concatenate(([u_lo, u_hi], events[(events >= u_lo) & (events <= u_hi)])))
    cand = np.concatenate((events, 0.5 * (events[1:] + events[:-1])))
    # open intervals: (s, e) holds x when s < x < e; the origin is always below q
    depth = 1 + np.searchsorted(starts, cand, side="left") - np.searchsorted(ends, cand, side="right")
    return cand, depth


def _bisect(feasible: Callable[[float], bool], good: float, bad: float) -> tuple[float, float, int]:
    it = 0
    while abs(good - bad) > 1e-13 * max(abs(good), abs(bad)) and it < 200:
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
        it += 1
    return good, bad, it


def _component(cand: np.ndarray, ok: np.ndarray, lo: float, hi: float) -> tuple[float, float]:
    """Bracket of the feasible run that contains the largest feasible candidate."""
    order = np.argsort(cand, kind="stable")
    c, f = cand[order], ok[order]
    j = int(np.flatnonzero(f)[-1])
    i = j
    while i > 0 and f[i - 1]:
        i -= 1
    left = float(c[i - 1]) if i > 0 else lo
    right = float(c[j + 1]) if j + 1 < len(c) else hi
    return left, right


def _planar_dirichlet(k: int) -> tuple[float, int]:
    """Optimal u for lambda_k with sides (sqrt u, 1/sqrt u); returns (u, iterations).

    After the global bisection, the near-optimal set at q*(1 + 1e-9) is
    scanned for the component closest to the square, and the bisection is
    repeated inside it so the returned shape is that component's optimum.
    """
    q_cube = kth_reduced_value(Cuboid.cube(2), DIRICHLET, k)
    u_lo = 1.0 / q_cube

    def feasible(q, lo=u_lo, hi=1.0):
        return _dirichlet_depth(q, lo, hi)[1].max() >= k

    good, bad, it = _bisect(feasible, q_cube, 4.0 * k / math.pi)
    cand, depth, _ = _dirichlet_depth(good * (1.0 + TIE_RTOL), u_lo)
    left, right = _component(cand, depth >= k, u_lo, 1.0)
    good, _, it2 = _bisect(lambda q: feasible(q, left, right), good * (1.0 + TIE_RTOL), bad)
    cand, depth, ends = _dirichlet_depth(good, left, right)
    ok = depth >= k
    if right == 1.0 and ok[cand == 1.0].any():
        return 1.0, it + it2
    x = float(cand[ok].max())
    j = np.searchsorted(ends, x, side="left")
    e = min(float(ends[j]) if j < len(ends) else right, right)
    return 0.5 * (x + e), it + it2


def _planar_neumann(k: int) -> tuple[float, int]:
    """Optimal u for mu_k; same two-stage bisection with the inequality reversed."""
    q_cube = kth_reduced_value(Cuboid.cube(2), NEUMANN, k)
    u_lo = min(1.0, q_cube / (k * k))

    def feasible(q, lo=u_lo, hi=1.0):
        return _neumann_depth(q, lo, hi)[1].min() <= k

    bad = 4.0 * k / math.pi
    while feasible(bad):
        bad *= 1.0 + 1e-9
    good, bad, it = _bisect(feasible, q_cube, bad)
    cand, depth = _neumann_depth(good * (1.0 - TIE_RTOL), u_lo)
    left, right = _component(cand, depth <= k, u_lo, 1.0)
    good, _, it2 = _bisect(lambda q: feasible(q, left, right), good * (1.0 - TIE_RTOL), bad)
    cand, depth = _neumann_depth(good, left, right)
    ok = depth <= k
    if right == 1.0 and ok[cand == 1.0].any():
        return 1.0, it + it2
    return float(cand[ok].max()), it + it2


def _planar_cuboid(u: float) -> Cuboid:
    if u == 1.0:
        return Cuboid.cube(2)
    a = math.sqrt(u)
    return make_unit_cuboid((a, 1.0 / a))


# ---------------------------------------------------------------------------
# public operations


def optimize_eigenvalue(n: int, bc: BoundaryCondition | str, k: int, opts: OptimizeOptions | None = None) -> OptimizationResult:
    """Minimise lambda_k (Dirichlet) or maximise mu_k (Neumann) over unit cuboids."""
    bc = BoundaryCondition.parse(bc)
    opts = opts or OptimizeOptions()
    _check_common(n, opts)
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    target = "lambda_k" if bc is DIRICHLET else "mu_k"
    cube_value = eigenvalue(Cuboid.cube(n), bc, k)
    if n == 2 and opts.exact_planar and opts.ratio is None:
        u, iters = (_planar_dirichlet if bc is DIRICHLET else _planar_neumann)(k)
        R = _planar_cuboid(u)
        value = PI2 * kth_reduced_value(R, bc, k)
        return OptimizationResult(target, bc, n, k, None, None, R, value, cube_value, iters, 0.0, (), "planar-exact")
    sign = 1.0 if bc is DIRICHLET else -1.0
    obj = _Objective(n, _eigen_objective(bc, k), sign, opts.ratio, opts.box)
    value, R, spread, flags = _run_search(obj, opts, k)
    return OptimizationResult(target, bc, n, k, None, None, R, value, cube_value, obj.evaluations, spread, tuple(sorted(flags)))


def optimize_riesz(n: int, bc: BoundaryCondition | str, gamma: float, threshold: float, opts: OptimizeOptions | None = None) -> OptimizationResult:
    """Maximise the Dirichlet or minimise the Neumann Riesz mean at a fixed threshold."""
    bc = BoundaryCondition.parse(bc)
    opts = opts or OptimizeOptions()
    _check_common(n, opts)
    if not gamma >= 0 or not threshold > 0:
        raise InvalidInputError("need gamma >= 0 and threshold > 0")
    cube_value = riesz_mean(Cuboid.cube(n), RieszSpec(gamma, threshold, bc))
    sign = -1.0 if bc is DIRICHLET else 1.0
    obj = _Objective(n, _riesz_objective(bc, gamma, threshold), sign, opts.ratio, opts.box)
    count_hint = max(1, int(threshold / (4.0 * math.pi)))
    value, R, spread, flags = _run_search(obj, opts, count_hint)
    return OptimizationResult("riesz", bc, n, None, threshold, gamma, R, value, cube_value, obj.evaluations, spread, tuple(sorted(flags)))


def optimize_average(n: int, k: int, opts: OptimizeOptions | None = None, bc: BoundaryCondition | str = DIRICHLET) -> OptimizationResult:
    """Minimise the Dirichlet average of the first k eigenvalues.

    A Neumann average (mu_0 + ... + mu_k)/k is maximised on request; it is
    flagged exploratory because no boundedness theory backs it.
    """
    bc = BoundaryCondition.parse(bc)
    opts = opts or OptimizeOptions()
    _check_common(n, opts)
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    cube_value = eigenvalue_average(Cuboid.cube(n), bc, k)
    sign = 1.0 if bc is DIRICHLET else -1.0
    obj = _Objective(n, _average_objective(bc, k), sign, opts.ratio, opts.box)
    value, R, spread, flags = _run_search(obj, opts, k)
    if bc is NEUMANN:
        flags.add("exploratory")
    return OptimizationResult("average", bc, n, k, None, None, R, value, cube_value, obj.evaluations, spread, tuple(sorted(flags)))


def optimize_target(target: str, n: int, bc, k: int | None = None, gamma: float | None = None,
                    threshold: float | None = None, opts: OptimizeOptions | None = None) -> OptimizationResult:
    """Dispatch on the target name used by the CLI and sweeps."""
    bc = BoundaryCondition.parse(bc)
    if target in ("lambda_k", "mu_k"):
        expected = DIRICHLET if target == "lambda_k" else NEUMANN
        if bc is not expected:
            raise InvalidInputError(f"target {target} needs bc={expected.value}")
        return optimize_eigenvalue(n, bc, int(k), opts)
    if target == "riesz":
        if gamma is None or threshold is None:
            raise InvalidInputError("riesz needs gamma and a threshold")
        return optimize_riesz(n, bc, gamma, threshold, opts)
    if target == "average":
        return optimize_average(n, int(k), opts, bc)
    raise InvalidInputError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")


# ---------------------------------------------------------------------------
# sweeps


def csv_columns(n: int) -> list[str]:
    return (
        ["k", "n", "bc", "target"]
        + [f"a_{i}" for i in range(1, n + 1)]
        + ["value", "value_at_cube", "delta", "perimeter_defect", "evaluations", "multistart_spread"]
    )


def fmt(x: float) -> str:
    return f"{x:.12g}"


def csv_row(res: OptimizationResult) -> list[str]:
    return (
        [str(res.k), str(res.n), res.bc.value, res.target]
        + [fmt(a) for a in res.optimal_cuboid.sides]
        + [fmt(res.optimal_value), fmt(res.value_at_cube), fmt(res.delta), fmt(res.perimeter_defect),
           str(res.evaluations), fmt(res.multistart_spread)]
    )


def checkpoint_path(out: str) -> str:
    return out + ".ckpt.json"


def _load_checkpoint(out: str, config_hash: str) -> dict | None:
    path = checkpoint_path(out)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        state = json.load(fh)
    if state.get("config_hash") != config_hash:
        raise CheckpointMismatchError(
            f"checkpoint {path} has config hash {state.get('config_hash')}, current run is {config_hash}"
        )
    return state


def _save_checkpoint(out: str, config_hash: str, k: int, R: Cuboid) -> None:
    path = checkpoint_path(out)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"config_hash": config_hash, "last_k": k, "last_optimum": list(R.sides)}, fh)
    os.replace(tmp, path)


def sweep(
    target: str,
    n: int,
    bc,
    ks: Iterable[int],
    opts: OptimizeOptions | None = None,
    out: str | None = None,
    header: str | None = None,
    config_hash: str | None = None,
    on_result: Callable[[OptimizationResult], None] | None = None,
) -> list[OptimizationResult]:
    """Optimise ``target`` for each k, warm-starting from the previous optimum.

    With ``out`` set, rows stream to a CSV file and a checkpoint is kept
    next to it; rerunning with the same ``config_hash`` resumes after the
    last finished k.
    """
    bc = BoundaryCondition.parse(bc)
    opts = opts or OptimizeOptions()
    ks = [int(k) for k in ks]
    if not ks or any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidInputError("sweep needs a non-empty increasing k grid")
    warm = opts.warm_start
    done_k = None
    fh = writer = None
    if out is not None:
        if config_hash is None:
            raise InvalidInputError("streaming sweeps need a config hash")
        state = _load_checkpoint(out, config_hash)
        if state is not None and os.path.exists(out):
            done_k = int(state["last_k"])
            warm = Cuboid(tuple(state["last_optimum"]))
            fh = open(out, "a", newline="")
        else:
            fh = open(out, "w", newline="")
            if header:
                fh.write(header + "\n")
            csv.writer(fh, lineterminator="\n").writerow(csv_columns(n))
        writer = csv.writer(fh, lineterminator="\n")
    results: list[OptimizationResult] = []
    try:
        for k in ks:
            if done_k is not None and k <= done_k:
                continue
            res = optimize_target(target, n, bc, k=k, opts=replace(opts, warm_start=warm))
            warm = res.optimal_cuboid
            results.append(res)
            if writer is not None:
                writer.writerow(csv_row(res))
                fh.flush()
                _save_checkpoint(out, config_hash, k, res.optimal_cuboid)
            if on_result is not None:
                on_result(res)
    finally:
        if fh is not None:
            fh.close()
    return results

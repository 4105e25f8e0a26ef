"""Two-term Weyl formulas and power-law fits for remainders and rates."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    DEFAULT_THETA,
    DIRICHLET,
    BoundaryCondition,
    Cuboid,
    InvalidInputError,
    ThetaTable,
    perimeter,
    semiclassical_constant,
    unit_ball_volume,
    weyl_constant,
)
from .lattice import count_many
from .spectrum import PI2

MIN_FIT_SAMPLES = 8
MIN_BLOCKS = 3
REMAINDER_MODES = ("full-lattice", "counting-D", "counting-N")


@dataclass
class FitReport:
    series_id: str
    sample_count: int
    fitted_exponent: float
    fitted_constant: float
    r_squared: float
    reference_exponent: float
    window: dict
    notes: list[str] = field(default_factory=list)
    dropped_zeros: int = 0
    degenerate: bool = False

    @property
    def valid(self) -> bool:
        return not self.degenerate and self.sample_count >= MIN_FIT_SAMPLES

    def to_dict(self) -> dict:
        def clean(x):
            return None if isinstance(x, float) and not math.isfinite(x) else x

        return {
            "series_id": self.series_id,
            "sample_count": self.sample_count,
            "fitted_exponent": clean(self.fitted_exponent),
            "fitted_constant": clean(self.fitted_constant),
            "r_squared": clean(self.r_squared),
            "reference_exponent": self.reference_exponent,
            "window": self.window,
            "notes": self.notes,
            "dropped_zeros": self.dropped_zeros,
            "degenerate": self.degenerate,
            "valid": self.valid,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def two_term_counting(R: Cuboid, bc: BoundaryCondition | str, threshold):
    """L_{0,n}|R| lam^{n/2} -/+ (L_{0,n-1}/4)|dR| lam^{(n-1)/2} (minus for Dirichlet)."""
    bc = BoundaryCondition.parse(bc)
    lam = np.asarray(threshold, dtype=float)
    if np.any(lam < 0):
        raise InvalidInputError("threshold must be non-negative")
    n = R.dim
    sign = -1.0 if bc is DIRICHLET else 1.0
    out = semiclassical_constant(0.0, n) * R.measure * lam ** (0.5 * n)
    out = out + sign * 0.25 * semiclassical_constant(0.0, n - 1) * perimeter(R) * lam ** (0.5 * (n - 1))
    return float(out) if out.ndim == 0 else out


def second_eigenvalue_coefficient(n: int) -> float:
    return 2.0 * math.pi * math.exp((1.0 + 1.0 / n) * math.lgamma(0.5 * n + 1.0) - math.lgamma(0.5 * (n + 1))) / n


def two_term_eigenvalue(R: Cuboid, bc: BoundaryCondition | str, k):
    """Two-term asymptotic value of lambda_k (+) or mu_k (-).

    The formula is stated for unit measure; other measures go through the
    scaling lambda_k(tR) = lambda_k(R) / t^2.
    """
    bc = BoundaryCondition.parse(bc)
    k = np.asarray(k, dtype=float)
    if np.any(k < 1):
        raise InvalidInputError("k must be >= 1")
    n = R.dim
    t = R.measure ** (1.0 / n)
    unit = R.scaled(1.0 / t) if t != 1.0 else R
    sign = 1.0 if bc is DIRICHLET else -1.0
    out = weyl_constant(n) * k ** (2.0 / n) + sign * second_eigenvalue_coefficient(n) * perimeter(unit) * k ** (1.0 / n)
    out = out / (t * t)
    return float(out) if out.ndim == 0 else out


def invert_two_term_counting(R: Cuboid, bc: BoundaryCondition | str, k: float) -> float:
    """Threshold at which the two-term counting formula equals k."""
    bc = BoundaryCondition.parse(bc)
    hi = 4.0 * weyl_constant(R.dim) * (k / R.measure) ** (2.0 / R.dim) + 100.0
    lo = 0.0
    if bc is DIRICHLET:
        # the Dirichlet formula is negative below its positive root; bracket from there
        lo = (semiclassical_constant(0.0, R.dim - 1) * perimeter(R) / (4 * semiclassical_constant(0.0, R.dim) * R.measure)) ** 2
    f = lambda lam: two_term_counting(R, bc, lam) - k
    return brentq(f, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=200)


# ---------------------------------------------------------------------------
# fitting


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    lx, ly = np.log(x), np.log(y)
    if np.ptp(ly) == 0.0:
        return 0.0, float(y[0]), 1.0
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = intercept + slope * lx
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(math.exp(intercept)), min(max(r2, 0.0), 1.0)


def default_t_grid(t_min: float, t_max: float, per_block: int = 256) -> np.ndarray:
    """Geometric grid with ``per_block`` points in every factor-two block."""
    if not (0 < t_min < t_max):
        raise InvalidInputError("need 0 < t_min < t_max")
    blocks = math.log2(t_max / t_min)
    return np.geomspace(t_min, t_max, max(2, int(math.ceil(blocks * per_block)) + 1))


def block_max_fit(
    x: np.ndarray, values: np.ndarray, reference: float, series_id: str, notes=None, block_factor: float = 2.0
) -> FitReport:
    """Fit |values| ~ C x^p through the maximum of each block [b^m, b^(m+1)) x_min.

    ``block_factor`` 4 on a lam axis gives blocks that are dyadic in t.
    """
    x = np.asarray(x, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if len(x) < 2 or np.any(x <= 0):
        raise InvalidInputError("need at least two positive abscissae")
    block = np.floor(np.log(x / x.min()) / math.log(block_factor) + 1e-12).astype(int)
    xs, ms = [], []
    for b in np.unique(block):
        sel = block == b
        if sel.sum() < 2:  # a lone end point (t_max on a block edge) is not a block
            continue
        i = np.flatnonzero(sel)[np.argmax(v[sel])]
        if v[i] > 0:
            xs.append(x[i])
            ms.append(v[i])
    if len(xs) < MIN_BLOCKS:
        raise InvalidInputError(f"need at least {MIN_BLOCKS} dyadic blocks with nonzero remainder, got {len(xs)}")
    p, c, r2 = _loglog_fit(np.array(xs), np.array(ms))
    window = {"x_min": float(x.min()), "x_max": float(x.max()), "blocks": len(xs)}
    return FitReport(series_id, int(len(x)), p, c, r2, reference, window, list(notes or []))


def remainder_series(R: Cuboid, mode: str, t_grid: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """(abscissa, remainder) pairs; abscissa is t for full-lattice, lam = pi^2 t^2 otherwise."""
    t = np.asarray(t_grid, dtype=float)
    if mode == "full-lattice":
        counts = count_many(R, t * t, "full")
        return t, counts - unit_ball_volume(R.dim) * t**R.dim * R.measure
    if mode in ("counting-D", "counting-N"):
        bc = BoundaryCondition.parse(mode[-1])
        counts = count_many(R, t * t, bc.quadrant)
        lam = PI2 * t * t
        return lam, counts - two_term_counting(R, bc, lam)
    raise InvalidInputError(f"unknown remainder mode {mode!r}; expected one of {', '.join(REMAINDER_MODES)}")


def fit_remainder_exponent(R: Cuboid, mode: str, t_grid: Sequence[float], theta: ThetaTable = DEFAULT_THETA) -> FitReport:
    """Block-max power-law fit of a lattice remainder.

    full-lattice: #(Z^n in E) - omega_n t^n |R| against t, reference theta_n.
    counting-D/N: N(lam) minus the two Weyl terms against lam, reference theta_n / 2.
    """
    n = R.dim
    x, rem = remainder_series(R, mode, t_grid)
    ref = theta[n] if mode == "full-lattice" else 0.5 * theta[n]
    notes = []
    if theta.open_ended(n):
        notes.append(f"theta_{n} = {theta[n]:.6g} stands for any value above it (the bound carries +epsilon)")
    # blocks are dyadic in t, i.e. factor four on the lam axis
    report = block_max_fit(x, rem, ref, f"remainder:{mode}", notes, 2.0 if mode == "full-lattice" else 4.0)
    report.window["variable"] = "t" if mode == "full-lattice" else "lambda"
    return report


def reference_rate(kind: str, n: int, theta: ThetaTable = DEFAULT_THETA) -> float:
    if kind == "delta":
        return (theta[n] - (n - 1)) / (2.0 * n)
    if kind == "stability":
        return (theta[n] - (n - 2)) / n
    raise InvalidInputError(f"unknown rate series {kind!r}")


def fit_convergence_rate(
    series: Iterable[tuple[float, float]],
    kind: str = "delta",
    n: int = 2,
    theta: ThetaTable = DEFAULT_THETA,
    window: str = "upper-half",
) -> FitReport:
    """Log-log least squares of a (k, value) series, zeros dropped and counted.

    ``window`` is "upper-half" (the later half of the series by index, but
    never fewer than 8 positive points) or "all".
    """
    pts = np.array([(float(k), float(v)) for k, v in series], dtype=float).reshape(-1, 2)
    ref = reference_rate(kind, n, theta)
    notes = []
    if theta.open_ended(n):
        notes.append(f"theta_{n} = {theta[n]:.6g} stands for any value above it (the bound carries +epsilon)")
    if len(pts) < MIN_FIT_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_FIT_SAMPLES} points, got {len(pts)}")
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    vals = np.abs(pts[:, 1])
    if window == "upper-half":
        sub = pts[len(pts) // 2 :]
    elif window == "all":
        sub = pts
    else:
        raise InvalidInputError(f"unknown window {window!r}")
    positive_all = pts[vals > 0]
    if len(positive_all) == 0:
        return FitReport(
            f"rate:{kind}", 0, math.nan, math.nan, math.nan, ref,
            {"k_min": float(pts[0, 0]), "k_max": float(pts[-1, 0]), "mode": window},
            notes + ["cube always optimal on window"], dropped_zeros=len(pts), degenerate=True,
        )
    used = sub[np.abs(sub[:, 1]) > 0]
    dropped = len(sub) - len(used)
    if len(used) < MIN_FIT_SAMPLES:
        used = positive_all[-MIN_FIT_SAMPLES:]
        dropped = int(np.sum((pts[:, 0] >= used[0, 0]) & (vals == 0)))
    if len(used) < MIN_FIT_SAMPLES:
        raise InvalidInputError(f"only {len(used)} positive points; need {MIN_FIT_SAMPLES}")
    p, c, r2 = _loglog_fit(used[:, 0], np.abs(used[:, 1]))
    win = {"k_min": float(used[0, 0]), "k_max": float(used[-1, 0]), "mode": window}
    return FitReport(f"rate:{kind}", int(len(used)), p, c, r2, ref, win, notes, dropped_zeros=dropped)


def window_median(ks: Sequence[float], values: Sequence[float], k_lo: float, k_hi: float) -> float:
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    sel = (ks >= k_lo) & (ks <= k_hi)
    if not sel.any():
        raise InvalidInputError(f"no samples with k in [{k_lo}, {k_hi}]")
    return float(np.median(values[sel]))


def stability_trend(ks: Sequence[float], gaps: Sequence[float]) -> dict:
    """Compare the last quarter of a gap series with the rest.

    ``no_growth`` (last-quartile max <= global max) holds for every series;
    the ratio of the last-quartile max to the max of the first three
    quartiles is the informative number.
    """
    ks = np.asarray(ks, dtype=float)
    g = np.abs(np.asarray(gaps, dtype=float))
    order = np.argsort(ks, kind="stable")
    ks, g = ks[order], g[order]
    cut = len(g) - max(1, len(g) // 4)
    head, tail = g[:cut], g[cut:]
    head_max = float(head.max()) if len(head) else 0.0
    tail_max = float(tail.max())
    return {
        "global_max": float(g.max()),
        "last_quartile_max": tail_max,
        "head_max": head_max,
        "tail_to_head_ratio": tail_max / head_max if head_max > 0 else math.inf,
        "no_growth": tail_max <= float(g.max()),
    }


def read_sweep_csv(path: str) -> dict[str, np.ndarray | list]:
    """Columns of a sweep CSV (comment lines skipped); numeric columns as arrays."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise InvalidInputError(f"{path} has no header")
    head, body = rows[0], rows[1:]
    out: dict = {}
    for j, name in enumerate(head):
        col = [r[j] for r in body]
        try:
            out[name] = np.array([float(c) for c in col])
        except ValueError:
            out[name] = col
    return out

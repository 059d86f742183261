"""Model-agnostic fidelity numerics and critical-scaling fits.

Conventions shared with the model modules: the metric extracted from a
fidelity function is g = 2(1 - F)/delta^2 in the limit of small step, and a
smooth fidelity family obeys F = 1 - (g/2) delta^2 + O(delta^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoiseFloorError
from .eightvertex import MetricTensor2

# 1 - F below this is indistinguishable from rounding noise in the overlap sums
_NOISE_FLOOR = 100.0 * np.finfo(np.float64).eps


def fidelity_overlap(p, q) -> float:
    """Overlap F = sum_i sqrt(p_i q_i) of two distributions on one index set.

    Args:
        p, q: nonnegative arrays of the same shape, each summing to 1
            within 1e-10.

    Returns:
        F in [0, 1]; 1 exactly when p = q, 0 for disjoint support.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"index sets differ: shapes {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("distributions must be nonnegative")
    for name, dist in (("p", p), ("q", q)):
        total = float(dist.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"{name} is not normalized: sums to {total!r}")
    return float(np.sum(np.sqrt(p * q)))


@dataclass(frozen=True)
class FdMetric:
    """Finite-difference metric estimate along one direction.

    g is the order-delta^2 estimate 2*q(delta) - q(2*delta) built from the
    one-sided quotients q(h) = 2(1 - F(point, point + h*dir))/h^2 (the
    raw quotient carries an O(delta) error from the third cumulant and is
    kept as g_raw). convergence_ratio compares successive halvings of the
    estimator and approaches 4 for a second-order scheme; it is NaN when the
    differences are below rounding noise.
    """

    g: float
    g_raw: float
    delta: float
    convergence_ratio: float


def finite_difference_metric(
    fid, point, direction, delta: float, scheme: str = "richardson"
) -> FdMetric:
    """Extract the metric along ``direction`` from a fidelity function.

    Args:
        fid: callable (point_a, point_b) -> overlap in (0, 1]; it is
            evaluated only on the segment [point, point + 2*delta*direction].
        point, direction: parameter vectors (scalars are promoted).
        delta: base step, > 0.
        scheme: "richardson" (default, O(delta^2)) or "forward" (the raw
            one-sided quotient, O(delta)).

    Raises:
        NoiseFloorError: if 1 - F at the base step is below 100x the
            floating-point epsilon, where the quotient would be noise.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if scheme not in ("richardson", "forward"):
        raise ValueError(f"unknown scheme {scheme!r}")
    p0 = np.atleast_1d(np.asarray(point, dtype=np.float64))
    e = np.atleast_1d(np.asarray(direction, dtype=np.float64))
    if p0.shape != e.shape:
        raise ValueError("point and direction must have the same shape")

    def q(h: float) -> float:
        f = float(fid(p0, p0 + h * e))
        return 2.0 * (1.0 - f) / (h * h)

    one_minus = 1.0 - float(fid(p0, p0 + delta * e))
    if abs(one_minus) < _NOISE_FLOOR:
        raise NoiseFloorError(
            f"1 - F = {one_minus:.3e} at delta={delta} is below the noise floor; "
            "increase delta"
        )

    q_quarter = q(0.25 * delta)
    q_half = q(0.5 * delta)
    q_base = q(delta)
    q_double = q(2.0 * delta)
    if scheme == "forward":
        est = (q_quarter, q_half, q_base)
    else:
        est = (
            2.0 * q_quarter - q_half,
            2.0 * q_half - q_base,
            2.0 * q_base - q_double,
        )
    num = abs(est[2] - est[1])
    den = abs(est[1] - est[0])
    ratio = num / den if den > 0 else float("nan")
    return FdMetric(g=est[2], g_raw=q_base, delta=delta, convergence_ratio=ratio)


def fd_metric_tensor(fid, point, delta: float, scheme: str = "richardson") -> MetricTensor2:
    """Full 2-parameter metric tensor from directional finite differences.

    Diagonal entries use the axis directions; the cross term comes from the
    (1,1) direction by polarization, g_xy = g_diag - g_xx - g_yy, which is
    the doubled off-diagonal convention used by the fluctuation formulas
    (the quadratic form along (1,1) is g_xx + g_yy + 2*(g_xy/2)).
    """
    g_xx = finite_difference_metric(fid, point, (1.0, 0.0), delta, scheme).g
    g_yy = finite_difference_metric(fid, point, (0.0, 1.0), delta, scheme).g
    g_diag = finite_difference_metric(fid, point, (1.0, 1.0), delta, scheme).g
    return MetricTensor2(g_cc=g_xx, g_dd=g_yy, g_cd=g_diag - g_xx - g_yy)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of a divergence law.

    model "log_divergence": g = amplitude * ln|beta_c/beta - 1| + offset.
    model "power_law": g = amplitude * x^exponent (fit in log-log form,
    offset = ln amplitude). Standard errors are the usual linear-regression
    ones; exponent fields are None for the log model.
    """

    model: str
    amplitude: float
    amplitude_stderr: float
    offset: float
    exponent: float | None
    exponent_stderr: float | None
    r_squared: float
    n_points: int
    window: tuple[float, float]


def _linfit(x: np.ndarray, y: np.ndarray):
    """Slope/intercept with standard errors and R^2 for y = a*x + b."""
    n = x.size
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx <= 0:
        raise ValueError("degenerate design matrix: all regressor values equal")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    rss = float(np.sum(resid**2))
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    if n > 2:
        s2 = rss / (n - 2)
        slope_se = math.sqrt(s2 / sxx)
        intercept_se = math.sqrt(s2 * (1.0 / n + x.mean() ** 2 / sxx))
    else:
        slope_se = 0.0
        intercept_se = 0.0
    return slope, intercept, slope_se, intercept_se, r2


def _window_filter(x: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    lo, hi = float(window[0]), float(window[1])
    if not (0 < lo < hi):
        raise ValueError(f"window must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return (x >= lo) & (x <= hi)


def fit_log_divergence(samples, beta_c: float, window: tuple[float, float]) -> ScalingFit:
    """Fit g = A ln|beta_c/beta - 1| + B on samples (beta, g).

    ``window`` is the kept interval of |beta - beta_c| (lo > 0 keeps the
    critical point itself out of the fit).
    """
    arr = np.asarray(list(samples), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (beta, g) pairs")
    beta, g = arr[:, 0], arr[:, 1]
    if np.any(beta == beta_c):
        raise ValueError("samples at beta = beta_c are not admissible")
    keep = _window_filter(np.abs(beta - beta_c), window)
    beta, g = beta[keep], g[keep]
    if beta.size < 3:
        raise ValueError(f"need >= 3 samples inside the window, have {beta.size}")
    x = np.log(np.abs(beta_c / beta - 1.0))
    slope, intercept, slope_se, _, r2 = _linfit(x, g)
    return ScalingFit(
        model="log_divergence",
        amplitude=slope,
        amplitude_stderr=slope_se,
        offset=intercept,
        exponent=None,
        exponent_stderr=None,
        r_squared=r2,
        n_points=int(beta.size),
        window=(float(window[0]), float(window[1])),
    )


def fit_power_law(samples, window: tuple[float, float]) -> ScalingFit:
    """Fit g = A x^e in log-log form on samples (x, g) with x, g > 0.

    ``window`` is the kept interval of x.
    """
    arr = np.asarray(list(samples), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (distance, g) pairs")
    x, g = arr[:, 0], arr[:, 1]
    if np.any(x <= 0) or np.any(g <= 0):
        raise ValueError("power-law fit needs positive distances and values")
    keep = _window_filter(x, window)
    x, g = x[keep], g[keep]
    if x.size < 3:
        raise ValueError(f"need >= 3 samples inside the window, have {x.size}")
    lx, lg = np.log(x), np.log(g)
    slope, intercept, slope_se, intercept_se, r2 = _linfit(lx, lg)
    amplitude = math.exp(intercept)
    return ScalingFit(
        model="power_law",
        amplitude=amplitude,
        amplitude_stderr=amplitude * intercept_se,
        offset=intercept,
        exponent=slope,
        exponent_stderr=slope_se,
        r_squared=r2,
        n_points=int(x.size),
        window=(float(window[0]), float(window[1])),
    )


@dataclass(frozen=True)
class PeakPoint:
    """Interpolated maximum of one finite-size curve."""

    L: int
    beta_peak: float
    beta_peak_stderr: float
    height: float
    height_stderr: float


@dataclass(frozen=True)
class PeakScanResult:
    """Per-size peaks plus the regression of height on ln L."""

    peaks: tuple[PeakPoint, ...]
    slope: float
    slope_stderr: float
    intercept: float
    r_squared: float


def _parabola_vertex(xs, ys):
    """Vertex of the parabola through three points (x1 is the sample max)."""
    x0, x1, x2 = xs
    y0, y1, y2 = ys
    d01 = (x1 - x0) * (y1 - y2)
    d21 = (x1 - x2) * (y1 - y0)
    denom = 2.0 * (d01 - d21)
    if denom == 0:
        return x1, y1
    x_star = x1 - ((x1 - x0) * d01 - (x1 - x2) * d21) / denom
    # evaluate the Lagrange parabola at the vertex
    y_star = (
        y0 * (x_star - x1) * (x_star - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x_star - x0) * (x_star - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x_star - x0) * (x_star - x1) / ((x2 - x0) * (x2 - x1))
    )
    return float(x_star), float(y_star)


def peak_scan(curves) -> PeakScanResult:
    """Locate per-size maxima and regress peak height on ln L.

    Args:
        curves: mapping L -> (beta_values, heights) or
            (beta_values, heights, height_errors). Each curve needs >= 5
            points with its sample maximum in the interior; the peak is the
            vertex of the parabola through the 3 points around the maximum.
            When errors are given they are propagated linearly to the peak
            location and height.
    """
    if len(curves) < 2:
        raise ValueError("peak scan needs at least 2 sizes")
    peaks = []
    for L in sorted(curves):
        entry = curves[L]
        beta = np.asarray(entry[0], dtype=np.float64)
        height = np.asarray(entry[1], dtype=np.float64)
        errs = np.asarray(entry[2], dtype=np.float64) if len(entry) > 2 else None
        if beta.size != height.size or (errs is not None and errs.size != beta.size):
            raise ValueError(f"curve for L={L} has mismatched arrays")
        if beta.size < 5:
            raise ValueError(f"curve for L={L} needs >= 5 points, has {beta.size}")
        if np.any(np.diff(beta) <= 0):
            raise ValueError(f"curve for L={L} must have strictly increasing beta")
        i = int(np.argmax(height))
        if i == 0 or i == beta.size - 1:
            raise ValueError(f"curve for L={L} has no interior maximum")
        xs = beta[i - 1 : i + 2]
        ys = height[i - 1 : i + 2].copy()
        b_star, h_star = _parabola_vertex(xs, ys)
        b_se = h_se = 0.0
        if errs is not None:
            grad_b = np.zeros(3)
            grad_h = np.zeros(3)
            for j in range(3):
                step = max(errs[i - 1 + j], 1e-12) * 1e-4
                ys[j] += step
                bp, hp = _parabola_vertex(xs, ys)
                ys[j] -= 2 * step
                bm, hm = _parabola_vertex(xs, ys)
                ys[j] += step
                grad_b[j] = (bp - bm) / (2 * step)
                grad_h[j] = (hp - hm) / (2 * step)
            sig = errs[i - 1 : i + 2]
            b_se = float(np.sqrt(np.sum((grad_b * sig) ** 2)))
            h_se = float(np.sqrt(np.sum((grad_h * sig) ** 2)))
        peaks.append(PeakPoint(int(L), b_star, b_se, h_star, h_se))
    ln_l = np.array([math.log(p.L) for p in peaks])
    heights = np.array([p.height for p in peaks])
    slope, intercept, slope_se, _, r2 = _linfit(ln_l, heights)
    return PeakScanResult(
        peaks=tuple(peaks),
        slope=slope,
        slope_stderr=slope_se,
        intercept=intercept,
        r_squared=r2,
    )

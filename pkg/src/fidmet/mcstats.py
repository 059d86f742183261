"""Error analysis for correlated Monte Carlo series.

Integrated autocorrelation times use the standard self-consistent window
(accumulate rho(t) until t >= 6*tau). Errors of means, variances and
covariances come from delete-one-block jackknife with block length tied to
the autocorrelation time, so correlated sweeps do not fake small error bars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class McEstimate:
    """One Monte Carlo observable: value, error bar and provenance."""

    mean: float
    std_error: float
    tau_int: float
    n_samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.tau_int < 0.5:
            raise ValueError("tau_int is at least 0.5 by definition")


def integrated_autocorr_time(series) -> float:
    """Integrated autocorrelation time of a scalar series, in sweep units.

    Returns 0.5 for uncorrelated data (the sum convention tau = 1/2 + sum rho).
    """
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n < 8:
        return 0.5
    x = x - x.mean()
    var0 = float(np.dot(x, x))
    if var0 == 0.0:
        return 0.5
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n]
    rho = acov / acov[0]
    tau = 0.5
    for t in range(1, n // 2):
        tau += float(rho[t])
        if t >= 6.0 * tau:
            break
    return max(tau, 0.5)


def _blocked(x: np.ndarray, block_len: int):
    n_blocks = x.size // block_len
    if n_blocks < 2:
        raise ValueError(
            f"series of length {x.size} too short for block length {block_len}"
        )
    trimmed = x[: n_blocks * block_len]
    return trimmed, trimmed.reshape(n_blocks, block_len), n_blocks


def _jackknife_error(replicates: np.ndarray) -> float:
    j = replicates.size
    center = replicates.mean()
    return math.sqrt((j - 1) / j * float(np.sum((replicates - center) ** 2)))


def jackknife_mean(series, block_len: int) -> tuple[float, float]:
    """Mean of the series and its blocked-jackknife standard error."""
    x = np.asarray(series, dtype=np.float64)
    trimmed, blocks, nb = _blocked(x, block_len)
    n = trimmed.size
    total = trimmed.sum()
    reps = (total - blocks.sum(axis=1)) / (n - block_len)
    return float(trimmed.mean()), _jackknife_error(reps)


def jackknife_variance(series, block_len: int) -> tuple[float, float]:
    """Plug-in variance <x^2> - <x>^2 and its jackknife standard error."""
    x = np.asarray(series, dtype=np.float64)
    trimmed, blocks, nb = _blocked(x, block_len)
    n = trimmed.size
    s = trimmed.sum()
    q = float(np.dot(trimmed, trimmed))
    sb = blocks.sum(axis=1)
    qb = (blocks * blocks).sum(axis=1)
    m_del = (s - sb) / (n - block_len)
    reps = (q - qb) / (n - block_len) - m_del**2
    full = q / n - (s / n) ** 2
    return float(full), _jackknife_error(reps)


def jackknife_covariance(series_x, series_y, block_len: int) -> tuple[float, float]:
    """Plug-in covariance and its jackknife standard error."""
    x = np.asarray(series_x, dtype=np.float64)
    y = np.asarray(series_y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("covariance needs series of equal length")
    tx, bx, nb = _blocked(x, block_len)
    ty, by, _ = _blocked(y, block_len)
    n = tx.size
    sx, sy = tx.sum(), ty.sum()
    p = float(np.dot(tx, ty))
    sxb, syb = bx.sum(axis=1), by.sum(axis=1)
    pb = (bx * by).sum(axis=1)
    mx_del = (sx - sxb) / (n - block_len)
    my_del = (sy - syb) / (n - block_len)
    reps = (p - pb) / (n - block_len) - mx_del * my_del
    full = p / n - (sx / n) * (sy / n)
    return float(full), _jackknife_error(reps)


def _block_length(tau: float, n: int) -> int:
    b = 2 * math.ceil(tau)
    return max(1, min(b, n // 2))


def estimate_mean(series, seed: int) -> McEstimate:
    """McEstimate of the series mean with autocorrelation-aware error."""
    x = np.asarray(series, dtype=np.float64)
    tau = integrated_autocorr_time(x)
    mean, err = jackknife_mean(x, _block_length(tau, x.size))
    return McEstimate(mean, err, tau, x.size, seed)


def estimate_variance(series, seed: int) -> McEstimate:
    """McEstimate of Var(x); blocking follows the squared-deviation series."""
    x = np.asarray(series, dtype=np.float64)
    dev2 = (x - x.mean()) ** 2
    tau = max(integrated_autocorr_time(x), integrated_autocorr_time(dev2))
    var, err = jackknife_variance(x, _block_length(tau, x.size))
    return McEstimate(var, err, tau, x.size, seed)


def estimate_covariance(series_x, series_y, seed: int) -> McEstimate:
    """McEstimate of Cov(x, y); blocking follows the product-deviation series."""
    x = np.asarray(series_x, dtype=np.float64)
    y = np.asarray(series_y, dtype=np.float64)
    prod = (x - x.mean()) * (y - y.mean())
    tau = max(
        integrated_autocorr_time(x),
        integrated_autocorr_time(y),
        integrated_autocorr_time(prod),
    )
    cov, err = jackknife_covariance(x, y, _block_length(tau, x.size))
    return McEstimate(cov, err, tau, x.size, seed)

"""Autocorrelation and jackknife error machinery on synthetic series."""

import math

import numpy as np
import pytest

from fidmet.mcstats import (
    McEstimate,
    estimate_covariance,
    estimate_mean,
    estimate_variance,
    integrated_autocorr_time,
    jackknife_covariance,
    jackknife_mean,
    jackknife_variance,
)


def _ar1(n, phi, seed, sigma=1.0):
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = rng.normal()
    noise = rng.normal(size=n, scale=sigma)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + noise[i]
    return x


def test_tau_of_iid_is_half():
    rng = np.random.default_rng(7)
    x = rng.normal(size=50_000)
    tau = integrated_autocorr_time(x)
    assert 0.45 <= tau <= 0.65


def test_tau_of_ar1_matches_theory():
    # rho(t) = phi^t gives tau = 1/2 + phi/(1 - phi)
    phi = 0.8
    x = _ar1(200_000, phi, seed=3)
    tau = integrated_autocorr_time(x)
    expected = 0.5 + phi / (1.0 - phi)
    assert abs(tau - expected) / expected < 0.2


def test_tau_edge_cases():
    assert integrated_autocorr_time([1.0, 2.0, 3.0]) == 0.5  # too short
    assert integrated_autocorr_time(np.ones(100)) == 0.5  # zero variance


def test_jackknife_mean_error_matches_iid_formula():
    rng = np.random.default_rng(11)
    x = rng.normal(loc=2.0, scale=3.0, size=40_000)
    mean, err = jackknife_mean(x, block_len=1)
    assert abs(mean - 2.0) < 5 * err
    naive = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(err - naive) / naive < 0.02


def test_jackknife_variance_against_gaussian():
    rng = np.random.default_rng(13)
    sigma = 1.7
    x = rng.normal(scale=sigma, size=60_000)
    var, err = jackknife_variance(x, block_len=1)
    assert abs(var - sigma**2) < 5 * err
    # for a Gaussian, SE of the sample variance is sigma^2 sqrt(2/n)
    expected_err = sigma**2 * math.sqrt(2.0 / x.size)
    assert abs(err - expected_err) / expected_err < 0.1


def test_jackknife_covariance_consistency():
    rng = np.random.default_rng(17)
    x = rng.normal(size=30_000)
    assert jackknife_covariance(x, x, 1)[0] == pytest.approx(jackknife_variance(x, 1)[0])
    y = rng.normal(size=30_000)
    cov, err = jackknife_covariance(x, y, 1)
    assert abs(cov) < 4 * err


def test_blocking_inflates_error_for_correlated_series():
    x = _ar1(100_000, 0.9, seed=5)
    _, err1 = jackknife_mean(x, block_len=1)
    _, err40 = jackknife_mean(x, block_len=40)
    # tau ~ 9.5, so honest errors are several times the naive ones
    assert err40 / err1 > 2.0


def test_estimate_mean_uses_autocorrelation():
    x = _ar1(50_000, 0.9, seed=19)
    est = estimate_mean(x, seed=19)
    naive = x.std(ddof=1) / math.sqrt(x.size)
    assert est.std_error > 2.0 * naive
    assert est.tau_int > 4.0
    assert est.n_samples == x.size
    assert est.seed == 19
    assert abs(est.mean) < 5 * est.std_error


def test_estimate_variance_and_covariance_iid():
    rng = np.random.default_rng(23)
    x = rng.normal(scale=2.0, size=40_000)
    y = 0.5 * x + rng.normal(size=40_000)
    vx = estimate_variance(x, seed=0)
    assert abs(vx.mean - 4.0) < 5 * vx.std_error
    cxy = estimate_covariance(x, y, seed=0)
    assert abs(cxy.mean - 2.0) < 5 * cxy.std_error


def test_short_series_rejected_by_blocking():
    with pytest.raises(ValueError, match="too short"):
        jackknife_mean([1.0, 2.0, 3.0], block_len=2)


def test_covariance_length_mismatch():
    with pytest.raises(ValueError, match="equal length"):
        jackknife_covariance([1.0, 2.0], [1.0, 2.0, 3.0], 1)


def test_mcestimate_validation():
    with pytest.raises(ValueError):
        McEstimate(0.0, -1.0, 0.5, 10, 0)
    with pytest.raises(ValueError):
        McEstimate(0.0, 1.0, 0.1, 10, 0)
    with pytest.raises(ValueError):
        McEstimate(0.0, 1.0, 0.5, 0, 0)

"""End-to-end acceptance checks, one test per shipped guarantee.

Each test prints a single [PASS]/[FAIL] line (written past pytest's capture
so the lines show up in plain `pytest -v` output) and enforces its runtime
budget. MC settings (seeds, grids, sweep counts) are rehearsed values frozen
for determinism; the chains are exactly reproducible per seed.
"""

from __future__ import annotations

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from fidmet import (
    BETA_C,
    fidelity8v,
    finite_difference_metric,
    fd_metric_tensor,
    fit_log_divergence,
    fit_power_law,
    ising_partition_enum,
    mc_sample_vertices,
    mc_specific_heat,
    metric_fluctuation,
    metric_fluctuations,
    metric_from_specific_heat,
    onsager_specific_heat,
    partition_function,
    peak_scan,
    scaling_exponent,
    z8v,
    VertexWeights,
)
from fidmet import eightvertex, ising, smf
from fidmet.cli import main as cli_main


def _emit(capman, msg: str) -> None:
    # write past pytest's fd-level capture so the line shows without -s
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print(msg, flush=True)
    else:
        print(msg, flush=True)


@pytest.fixture
def criterion(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    @contextmanager
    def run(tag: str, budget_s: float | None = None):
        t0 = time.perf_counter()
        try:
            yield
        except Exception:
            _emit(capman, f"[FAIL] {tag}")
            raise
        elapsed = time.perf_counter() - t0
        if budget_s is not None:
            assert elapsed < budget_s, f"{tag}: {elapsed:.1f} s over the {budget_s:.0f} s budget"
        _emit(capman, f"[PASS] {tag} ({elapsed:.2f} s)")

    return run


@pytest.fixture(scope="module", autouse=True)
def _warm_kernels():
    # compile the jit kernels before any timed budget starts
    ising.mc_sample_energy(0.3, 4, 1, 8, 1, sampler="wolff")
    ising.mc_sample_energy(0.3, 4, 1, 8, 1, sampler="metropolis")
    mc_sample_vertices(1.1, 0.9, 2, 1, 8, 1)
    partition_function(0.1, 2)
    z8v(VertexWeights(1.0, 1.0), 2)


def test_a01_mapping_identity_against_bruteforce(criterion):
    with criterion("1 deformed-code partition maps onto doubled spin sum", budget_s=10.0):
        for L in (2, 3, 4):
            for beta in (0.1, 0.3, 0.44, 0.7):
                z_ising = ising_partition_enum(beta, L)
                rel = abs(2.0 * partition_function(beta, L) - z_ising) / z_ising
                assert rel <= 1e-12, f"L={L} beta={beta}: rel={rel:.2e}"


def test_a02_three_metric_routes_agree(criterion):
    with criterion("2 fluctuation, heat-capacity and fd metric routes agree", budget_s=10.0):
        for L in (2, 3):
            for beta in (0.2, 0.44):
                g_fluct = metric_fluctuation(beta, L)
                g_cv = metric_from_specific_heat(beta, L)
                assert abs(g_fluct - g_cv) / abs(g_fluct) <= 1e-10

                def fid(a, b, L=L):
                    return smf.fidelity(float(a[0]), float(b[0]), L)

                err = {
                    d: abs(finite_difference_metric(fid, (beta,), (1.0,), d).g - g_fluct)
                    for d in (1e-2, 5e-3)
                }
                ratio = err[1e-2] / err[5e-3]
                assert 3.2 <= ratio <= 4.8, f"L={L} beta={beta}: shrink {ratio:.3f}"


def test_a03_zero_coupling_metric_is_four_exactly(criterion):
    with criterion("3 zero-coupling metric equals 4 from the 8-state oracle"):
        # canonical flip subsets for L=2: site 0 pinned out, so the 8 subsets
        # of sites {1,2,3}; bonds of the 2x2 torus listed explicitly
        bonds = [(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3), (2, 0), (3, 1)]
        energies = []
        for bits in itertools.product((1, -1), repeat=3):
            spin = (1,) + bits
            energies.append(-sum(spin[a] * spin[b] for a, b in bonds))
        assert sorted(energies) == [-8, 0, 0, 0, 0, 0, 0, 8]
        var = sum(e * e for e in energies) / 8.0  # mean energy is 0 at beta=0
        assert var / 4.0 == 4.0
        assert metric_fluctuation(0.0, 2) == 4.0


# rehearsed 9-point windows around each finite-size peak; seed 17 throughout
_PEAK_GRIDS = {
    8: (np.linspace(0.38, 0.50, 9), 20_000),
    16: (np.linspace(0.40, 0.48, 9), 15_000),
    32: (np.linspace(0.42, 0.465, 9), 10_000),
    64: (np.linspace(0.428, 0.452, 9), 8_000),
}


def test_a04_peak_heights_grow_logarithmically(criterion):
    with criterion("4 cluster-MC heat-capacity peaks scale like ln L", budget_s=600.0):
        curves = {}
        for L, (betas, n_sweeps) in _PEAK_GRIDS.items():
            est = [mc_specific_heat(b, L, 300, n_sweeps, 17) for b in betas]
            curves[L] = (betas, [e.mean for e in est], [e.std_error for e in est])
        scan = peak_scan(curves)
        assert scan.slope > 0.0
        assert scan.slope_stderr < scan.slope
        assert scan.r_squared > 0.95
        # peak locations approach the critical coupling monotonically
        # within error bars
        assert abs(BETA_C - 0.5 * math.log(1.0 + math.sqrt(2.0))) == 0.0
        dists = [abs(p.beta_peak - BETA_C) for p in scan.peaks]
        sigmas = [p.beta_peak_stderr for p in scan.peaks]
        for i in range(len(dists) - 1):
            slack = 2.0 * (sigmas[i] + sigmas[i + 1])
            assert dists[i + 1] <= dists[i] + slack, (
                f"L={scan.peaks[i + 1].L}: {dists[i + 1]:.4f} vs {dists[i]:.4f} + {slack:.4f}"
            )


def test_a05_sampled_heat_capacity_matches_closed_form(criterion):
    with criterion("5 sampled heat capacity at L=64 matches the closed form"):
        for beta in (0.2, 0.3, 0.4):
            est = mc_specific_heat(beta, 64, 300, 12_000, 29)
            exact = onsager_specific_heat(beta)
            pull = abs(est.mean - exact) / est.std_error
            assert pull < 3.0, f"beta={beta}: pull={pull:.2f}"


def test_a06_arrow_enumeration_counts_and_symmetry(criterion):
    with criterion("6 arrow-configuration counts and weight-swap symmetry", budget_s=30.0):
        assert len(eightvertex.enumerate_arrow_configs(2)) == 32
        assert len(eightvertex._enumeration(3)[0]) == 1024
        assert z8v(VertexWeights(1.0, 1.0), 2) == 32.0
        rng = np.random.default_rng(123)
        for _ in range(5):
            c, d = rng.uniform(0.2, 3.0, size=2)
            for L in (2, 3):
                za = z8v(VertexWeights(c, d), L)
                zb = z8v(VertexWeights(d, c), L)
                assert abs(za - zb) / za <= 1e-12


def test_a07_tensor_from_fluctuations_matches_fd(criterion):
    with criterion("7 polarization tensor: fluctuations vs fd, PSD"):
        for point in ((1.0, 1.0), (1.2, 0.8), (0.6, 2.4)):
            tensor = metric_fluctuations(point[0], point[1], 2)
            assert tensor.min_eigenvalue() >= -1e-12
            exact = {"g_cc": tensor.g_cc, "g_dd": tensor.g_dd, "g_cd": tensor.g_cd}

            def fid(a, b):
                return fidelity8v((float(a[0]), float(a[1])), (float(b[0]), float(b[1])), 2)

            fd_big = fd_metric_tensor(fid, point, 1e-2)
            fd_small = fd_metric_tensor(fid, point, 5e-3)
            for name, g in exact.items():
                e1 = abs(getattr(fd_big, name) - g)
                e2 = abs(getattr(fd_small, name) - g)
                assert e2 / abs(g) <= 1e-3, f"{point} {name}: fd off by {e2:.2e}"
                ratio = e1 / e2
                # a vanishing quadratic error term shows up as a larger
                # shrink factor with the error already far below g*delta^2
                quadratic = 3.2 <= ratio <= 4.8
                super_quadratic = ratio > 4.8 and e1 <= abs(g) * 1e-4
                assert quadratic or super_quadratic, f"{point} {name}: shrink {ratio:.3f}"


def test_a08_divergence_exponent_formula_and_classes(criterion):
    with criterion("8 divergence exponent: exact points and class map", budget_s=1.0):
        res = scaling_exponent(1.0, 1.0)
        assert res.exponent == 0.0 and res.divergence_class == "logarithmic"
        for u, v in ((1.0, 3.0), (3.0, 1.0), (1.5, 2.0)):
            res = scaling_exponent(u, v)
            assert res.exponent == -0.5 and res.divergence_class == "power_law"
            assert not res.integer_exponent
        for u, v in ((1.0, 1.0 / 3.0), (1.0 / 3.0, 1.0), (0.5, 2.0 / 3.0)):
            res = scaling_exponent(u, v)
            assert res.exponent == 1.0 and res.integer_exponent
            assert res.divergence_class == "non_divergent"
        grid = np.linspace(0.2, 3.0, 50)
        for u in grid:
            for v in grid:
                res = scaling_exponent(u, v)
                mu = 2.0 * math.atan(math.sqrt(u * v))
                direct = math.pi / mu - 2.0
                if abs(u * v - 1.0) <= 1e-12:
                    want = "logarithmic"
                elif direct < 0.0:
                    want = "power_law"
                else:
                    want = "non_divergent"
                assert res.divergence_class == want, f"({u}, {v})"
                assert res.integer_exponent == (abs(direct - round(direct)) <= 1e-12)


def test_a09_vertex_chain_matches_enumeration_for_five_seeds(criterion):
    with criterion("9 arrow chain reproduces exact moments, 5 seeds"):
        mean_c, mean_d, var_c, var_d, cov_cd = eightvertex._vertex_moments(1.2, 0.8, 2)
        for seed in (3, 13, 30, 33, 36):
            s = mc_sample_vertices(1.2, 0.8, 2, n_therm=200, n_sweeps=2000, seed=seed)
            for est, truth in (
                (s.n_c, mean_c),
                (s.n_d, mean_d),
                (s.var_c, var_c),
                (s.var_d, var_d),
                (s.cov_cd, cov_cd),
            ):
                pull = abs(est.mean - truth) / est.std_error
                assert pull < 3.0, f"seed={seed}: pull={pull:.2f}"


def test_a10_fit_recovery_noiseless_and_noisy(criterion):
    with criterion("10 divergence fits recover synthetic ground truth"):
        amp, off, center = -1.8, 0.7, 0.44
        betas = np.concatenate(
            [center + np.geomspace(0.002, 0.05, 12), center - np.geomspace(0.002, 0.05, 12)]
        )
        clean = amp * np.log(np.abs(center / betas - 1.0)) + off
        fit = fit_log_divergence(zip(betas, clean), center, (0.001, 0.06))
        assert abs(fit.amplitude - amp) <= 1e-10
        assert abs(fit.offset - off) <= 1e-10

        a_pl, e_pl = 1.3, -0.75
        x = np.geomspace(0.01, 0.4, 30)
        fit = fit_power_law(zip(x, a_pl * x**e_pl), (0.005, 0.5))
        assert abs(fit.amplitude - a_pl) <= 1e-10
        assert abs(fit.exponent - e_pl) <= 1e-10

        rng = np.random.default_rng(22)
        noisy = clean * np.exp(rng.normal(scale=0.01, size=clean.size))
        fit = fit_log_divergence(zip(betas, noisy), center, (0.001, 0.06))
        assert abs(fit.amplitude - amp) <= fit.amplitude_stderr

        rng = np.random.default_rng(22)
        noisy = a_pl * x**e_pl * np.exp(rng.normal(scale=0.01, size=x.size))
        fit = fit_power_law(zip(x, noisy), (0.005, 0.5))
        assert abs(fit.amplitude - a_pl) <= fit.amplitude_stderr
        assert abs(fit.exponent - e_pl) <= fit.exponent_stderr


def test_a11_repeated_runs_are_byte_identical(criterion, tmp_path, capsys):
    with criterion("11 selftest and seeded sweeps rerun byte-identically"):
        s1, s2 = tmp_path / "selftest1.csv", tmp_path / "selftest2.csv"
        assert cli_main(["selftest", "--out", str(s1)]) == 0
        assert cli_main(["selftest", "--out", str(s2)]) == 0
        assert s1.read_bytes() == s2.read_bytes()

        w1, w2 = tmp_path / "sweep1.csv", tmp_path / "sweep2.csv"
        argv = [
            "8v-sweep", "--method", "mc", "--u", "1.1", "1.3", "--v", "0.7", "0.9",
            "--u-steps", "2", "--v-steps", "2", "--sizes", "2", "--seed", "5,6",
            "--n-therm", "50", "--n-sweeps", "200",
        ]
        assert cli_main(argv + ["--out", str(w1)]) == 0
        assert cli_main(argv + ["--out", str(w2), "--threads", "3"]) == 0
        assert w1.read_bytes() == w2.read_bytes()
        capsys.readouterr()

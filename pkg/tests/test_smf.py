"""Deformed-code wavefunction: enumeration, fidelity and metric routes.

The 2x2 lattice is small enough to redo everything by hand, so most checks
here compare against an oracle built inside the test from first principles
(explicit bond list, explicit subsets) rather than against the library's own
enumeration kernel.
"""

import itertools
import math

import numpy as np
import pytest

from fidmet import (
    BudgetExceededError,
    StarSubset,
    bond_spins,
    build_torus,
    fidelity,
    ground_state,
    magnetization,
    metric_fluctuation,
    metric_from_specific_heat,
    partition_function,
    smf_energy,
)
from fidmet.smf import energy_histogram, log_partition_function
from fidmet import ising

# hand-listed bonds of the 2x2 torus (pairs of sites); rows are doubled bonds
_L2_BONDS = [(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3), (2, 0), (3, 1)]


def _l2_energy(members):
    theta = [1, 1, 1, 1]
    for s in members:
        theta[s] = -1
    return sum(theta[a] * theta[b] for a, b in _L2_BONDS)


def _l2_energy_multiset():
    # canonical representatives: subsets of {1, 2, 3}
    return sorted(
        _l2_energy(sub)
        for r in range(4)
        for sub in itertools.combinations((1, 2, 3), r)
    )


def test_l2_energy_histogram_matches_hand_enumeration():
    energies, counts = energy_histogram(2)
    lib = sorted(
        e for e, c in zip(energies, counts) for _ in range(int(c))
    )
    assert lib == _l2_energy_multiset() == [-8, 0, 0, 0, 0, 0, 0, 8]


def test_smf_energy_and_bond_spins_on_explicit_subsets():
    lat = build_torus(2)
    for members in ([], [1], [2, 3], [1, 2, 3]):
        g = StarSubset(lat, frozenset(members))
        assert smf_energy(g) == _l2_energy(members)
        spins = bond_spins(g)
        assert spins.shape == (8,)
        assert set(np.unique(spins)).issubset({-1, 1})


def test_complement_canonicalization():
    lat = build_torus(2)
    g = StarSubset(lat, frozenset({0}))
    assert g.members == frozenset({1, 2, 3})
    g2 = StarSubset(lat, frozenset({0, 1}))
    assert g2.members == frozenset({2, 3})
    # complement pairs carry the same bond spins
    assert np.array_equal(
        bond_spins(StarSubset(lat, frozenset({1}))),
        bond_spins(StarSubset(lat, frozenset({0, 2, 3}))),
    )


def test_star_subset_range_check():
    lat = build_torus(2)
    with pytest.raises(ValueError, match="out of range"):
        StarSubset(lat, frozenset({4}))


@pytest.mark.parametrize("beta", [0.0, 0.2, 0.5])
def test_partition_function_l2_closed_form(beta):
    # from the hand multiset: Z = e^{8 beta} + e^{-8 beta} + 6
    want = math.exp(8 * beta) + math.exp(-8 * beta) + 6.0
    assert partition_function(beta, 2) == pytest.approx(want, rel=1e-12)


def test_log_partition_is_overflow_safe():
    # at beta=100 the dominant term is e^{800}, far above float range; the
    # minimum energy -8 comes from the unique checkerboard pattern, so
    # log Z -> 800 with corrections of order e^{-800}
    lp = log_partition_function(100.0, 2)
    assert math.isfinite(lp)
    assert lp == pytest.approx(800.0, abs=1e-9)


@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("beta", [0.1, 0.3, 0.44, 0.7])
def test_mapping_to_full_spin_model(L, beta):
    # the full 2^(L^2) spin sum double-counts the two global sectors
    z_smf = partition_function(beta, L)
    z_full = ising.ising_partition_enum(beta, L)
    assert abs(2.0 * z_smf - z_full) / z_full <= 1e-12


def test_fidelity_basic_properties():
    assert fidelity(0.3, 0.3, 2) == 1.0
    assert fidelity(0.1, 0.4, 3) == fidelity(0.4, 0.1, 3)
    assert 0.0 < fidelity(0.0, 1.0, 2) < 1.0


def test_fidelity_frozen_value():
    # independently derived from the L=2 closed form:
    # Z(b) = e^{8b} + e^{-8b} + 6, F = Z(0.1)/sqrt(Z(0) Z(0.2))
    assert fidelity(0.0, 0.2, 2) == pytest.approx(0.9182999746114759, rel=1e-13)
    z = lambda b: math.exp(8 * b) + math.exp(-8 * b) + 6.0
    want = z(0.1) / math.sqrt(z(0.0) * z(0.2))
    assert fidelity(0.0, 0.2, 2) == pytest.approx(want, rel=1e-13)


def test_fidelity_matches_ground_state_overlap():
    for b1, b2, L in ((0.0, 0.2, 2), (0.15, 0.6, 3)):
        gs1 = ground_state(b1, L)
        gs2 = ground_state(b2, L)
        dot = float(np.dot(gs1.amplitudes, gs2.amplitudes))
        assert fidelity(b1, b2, L) == pytest.approx(dot, rel=1e-12)


def test_metric_at_zero_coupling_is_four():
    # uniform superposition: E in {+8, -8, 0x6}, Var = 16, g = 4
    assert metric_fluctuation(0.0, 2) == 4.0


def test_metric_routes_agree():
    for beta, L in ((0.2, 2), (0.44, 3), (0.3, 4)):
        g1 = metric_fluctuation(beta, L)
        g2 = metric_from_specific_heat(beta, L)
        assert abs(g1 - g2) / g1 < 1e-12


def test_metric_from_specific_heat_rejects_nonpositive_beta():
    with pytest.raises(ValueError):
        metric_from_specific_heat(0.0, 2)


def test_metric_matches_fidelity_curvature():
    # F(b, b + d) = 1 - (g/2) d^2 + O(d^3)
    beta, L, d = 0.3, 2, 1e-4
    g = metric_fluctuation(beta, L)
    f = fidelity(beta, beta + d, L)
    assert 2.0 * (1.0 - f) / d**2 == pytest.approx(g, rel=1e-3)


def test_magnetization_limits():
    assert magnetization(0.0, 2) == 0.0
    # strong coupling selects the E = -8 representative: m -> -1
    assert magnetization(3.0, 2) == pytest.approx(-1.0, abs=1e-3)


def test_ground_state_amplitudes():
    gs = ground_state(0.25, 2)
    assert gs.norm_squared() == pytest.approx(1.0, rel=1e-12)
    lat = gs.lattice
    z = partition_function(0.25, 2)
    for members in ([], [1], [1, 2], [0]):
        g = StarSubset(lat, frozenset(members))
        want = math.exp(-0.25 * smf_energy(g) / 2.0) / math.sqrt(z)
        assert gs.amplitude(g) == pytest.approx(want, rel=1e-12)


def test_budgets():
    with pytest.raises(BudgetExceededError):
        energy_histogram(6)
    with pytest.raises(BudgetExceededError):
        ground_state(0.1, 5)
    # the enumeration budget itself is one step looser than materialization
    assert partition_function(0.1, 5) > 0

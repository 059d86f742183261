"""Classical eight-vertex model on the torus and the quantum state built on it.

Arrow configurations live on the bonds of a TorusLattice. The reference
orientation points every horizontal arrow along +column and every vertical
arrow against +row ("right/up"); a configuration stores one reversal bit per
bond. Validity demands an even number of inward arrows at every site, which
is equivalent to the reversal bits forming a cycle of the lattice graph, so
there are exactly 2^(L^2+1) valid configurations.

Vertex classes follow the standard labeling by inward-arrow pattern:

* a: in-arrows {W,S} or {E,N} (straight through, reference-like),
* b: in-arrows {W,N} or {E,S} (the other straight-through pair),
* c: in-arrows {W,E} or {S,N} (both horizontal or both vertical in),
* d: no in-arrows or all four (source/sink pair).

Classical weights are 1 per a/b vertex and c, d per c/d vertex. The quantum
ground state has psi_C^2 = u^n_c v^n_d / Z(u, v) with u = c^2, v = d^2, so
all fidelity-metric quantities reduce to (n_c, n_d) moments, and the joint
count histogram per L is the only cached object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import vertex_mc_series
from .errors import BudgetExceededError
from .lattice import TorusLattice, build_torus
from .mcstats import McEstimate, estimate_covariance, estimate_mean, estimate_variance

ENUM_BUDGET_L_MAX = 3

# in-arrow bitcode (W + 2E + 4S + 8N) -> class index 0:a 1:b 2:c 3:d
_CLASS_OF_CODE = {5: 0, 10: 0, 9: 1, 6: 1, 3: 2, 12: 2, 0: 3, 15: 3}


def _check_budget(L: int) -> None:
    if L > ENUM_BUDGET_L_MAX:
        raise BudgetExceededError(
            f"arrow enumeration is limited to L <= {ENUM_BUDGET_L_MAX}, got L={L}"
        )


def _site_codes(lat: TorusLattice, masks: np.ndarray) -> np.ndarray:
    """In-arrow bitcodes, shape (n_masks, n_sites), from reversal bitmasks."""
    L = lat.L
    n = lat.n_sites
    codes = np.zeros((masks.size, n), dtype=np.uint8)
    for s in range(n):
        r, c = divmod(s, L)
        left_h = r * L + (c - 1) % L
        up_v = n + ((r - 1) % L) * L + c
        w_in = 1 - ((masks >> left_h) & 1)
        e_in = (masks >> s) & 1
        s_in = 1 - ((masks >> (n + s)) & 1)
        n_in = (masks >> up_v) & 1
        codes[:, s] = w_in + 2 * e_in + 4 * s_in + 8 * n_in
    return codes


_POPCOUNT4 = np.array([bin(i).count("1") for i in range(16)], dtype=np.uint8)


@dataclass(frozen=True)
class ArrowConfig:
    """One valid configuration: reversal bits plus its vertex-class counts."""

    lattice: TorusLattice
    reversed_bonds: np.ndarray
    n_a: int
    n_b: int
    n_c: int
    n_d: int

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.n_a, self.n_b, self.n_c, self.n_d)


def _mask_of_config(config: ArrowConfig) -> int:
    mask = 0
    for i, bit in enumerate(config.reversed_bonds):
        if bit:
            mask |= 1 << i
    return mask


def classify_vertices(config: ArrowConfig) -> tuple[int, int, int, int]:
    """(n_a, n_b, n_c, n_d) for one configuration; rejects invalid parity."""
    lat = config.lattice
    mask = np.array([_mask_of_config(config)], dtype=np.int64)
    codes = _site_codes(lat, mask)[0]
    if np.any(_POPCOUNT4[codes] % 2 != 0):
        raise ValueError("invalid configuration: odd in-degree at some site")
    counts = [0, 0, 0, 0]
    for code in codes:
        counts[_CLASS_OF_CODE[int(code)]] += 1
    return tuple(counts)


@lru_cache(maxsize=None)
def _enumeration(L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(valid masks, n_c per mask, n_d per mask) by brute-force parity screen."""
    _check_budget(L)
    lat = build_torus(L)
    masks = np.arange(1 << lat.n_bonds, dtype=np.int64)
    codes = _site_codes(lat, masks)
    valid = np.all(_POPCOUNT4[codes] % 2 == 0, axis=1)
    vmasks = masks[valid]
    vcodes = codes[valid]
    n_c = np.sum((vcodes == 3) | (vcodes == 12), axis=1).astype(np.int64)
    n_d = np.sum((vcodes == 0) | (vcodes == 15), axis=1).astype(np.int64)
    for a in (vmasks, n_c, n_d):
        a.setflags(write=False)
    return vmasks, n_c, n_d


def enumerate_arrow_configs(L: int) -> list[ArrowConfig]:
    """All 2^(L^2+1) valid configurations, in ascending bitmask order."""
    lat = build_torus(L)
    vmasks, _, _ = _enumeration(L)
    configs = []
    for mask in vmasks:
        bits = ((int(mask) >> np.arange(lat.n_bonds)) & 1).astype(bool)
        bits.setflags(write=False)
        cfg = ArrowConfig(lat, bits, 0, 0, 0, 0)
        n_a, n_b, n_c, n_d = classify_vertices(cfg)
        configs.append(ArrowConfig(lat, bits, n_a, n_b, n_c, n_d))
    return configs


@lru_cache(maxsize=None)
def _joint_histogram(L: int) -> np.ndarray:
    """H[n_c, n_d] = number of valid configurations with those counts."""
    _, n_c, n_d = _enumeration(L)
    n = L * L
    hist = np.zeros((n + 1, n + 1), dtype=np.int64)
    np.add.at(hist, (n_c, n_d), 1)
    hist.setflags(write=False)
    return hist


@dataclass(frozen=True)
class VertexWeights:
    """Boltzmann weights of the c and d classes (a and b are fixed at 1)."""

    c: float
    d: float

    def __post_init__(self) -> None:
        if self.c < 0 or self.d < 0:
            raise ValueError(f"weights must be nonnegative, got c={self.c}, d={self.d}")


def _z_uv(u: float, v: float, L: int) -> float:
    """sum over configs of u^n_c * v^n_d (0^0 = 1)."""
    hist = _joint_histogram(L)
    n = L * L
    pow_u = np.power(float(u), np.arange(n + 1, dtype=np.float64))
    pow_v = np.power(float(v), np.arange(n + 1, dtype=np.float64))
    return float(pow_u @ hist @ pow_v)


def z8v(weights: VertexWeights, L: int) -> float:
    """Classical partition function Z(c, d) = sum_C c^n_c d^n_d."""
    return _z_uv(weights.c, weights.d, L)


@dataclass(frozen=True)
class QuantumState8v:
    """Normalized amplitudes aligned with enumerate_arrow_configs order."""

    L: int
    u: float
    v: float
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.dot(self.amplitudes, self.amplitudes))


def quantum_amplitudes(u: float, v: float, L: int) -> QuantumState8v:
    """psi_C = c^n_c d^n_d / sqrt(Z_Q) with c = sqrt(u), d = sqrt(v).

    The squared amplitudes are the classical weights at (u, v), so the
    normalization is the classical partition function with squared weights.
    """
    if u < 0 or v < 0:
        raise ValueError(f"u, v must be nonnegative, got ({u}, {v})")
    _, n_c, n_d = _enumeration(L)
    weight = np.power(float(u), n_c) * np.power(float(v), n_d)
    z = weight.sum()
    if z == 0.0:
        raise ValueError(
            f"degenerate state: no configuration carries weight at (u, v) = ({u}, {v})"
        )
    amps = np.sqrt(weight / z)
    amps.setflags(write=False)
    return QuantumState8v(L, float(u), float(v), amps)


def fidelity8v(point1, point2, L: int) -> float:
    """Overlap of ground states at (u, v) and (u', v').

    Equals Z(sqrt(u u'), sqrt(v v')) / sqrt(Z(u, v) Z(u', v')), the
    Bhattacharyya coefficient of the two classical distributions.
    """
    u1, v1 = (float(x) for x in point1)
    u2, v2 = (float(x) for x in point2)
    for val in (u1, v1, u2, v2):
        if val < 0:
            raise ValueError("parameters must be nonnegative")
    z1 = _z_uv(u1, v1, L)
    z2 = _z_uv(u2, v2, L)
    if z1 == 0.0 or z2 == 0.0:
        raise ValueError("degenerate state: zero normalization")
    zm = _z_uv(math.sqrt(u1 * u2), math.sqrt(v1 * v2), L)
    return min(zm / math.sqrt(z1 * z2), 1.0)


@dataclass(frozen=True)
class MetricTensor2:
    """Symmetric 2x2 fidelity metric in the (u, v) = (c^2, d^2) coordinates.

    g_cd is reported in the doubled convention (the quadratic form carries
    g_cd/2 off-diagonal), matching the fluctuation formula Cov/(2uv).
    """

    g_cc: float
    g_dd: float
    g_cd: float

    def as_matrix(self) -> np.ndarray:
        return np.array(
            [[self.g_cc, 0.5 * self.g_cd], [0.5 * self.g_cd, self.g_dd]], dtype=float
        )

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.as_matrix())[0])


def _vertex_moments(u: float, v: float, L: int):
    hist = _joint_histogram(L)
    n = L * L
    idx = np.arange(n + 1, dtype=np.float64)
    w = np.power(float(u), idx)[:, None] * np.power(float(v), idx)[None, :] * hist
    w /= w.sum()
    wc = w.sum(axis=1)
    wd = w.sum(axis=0)
    mean_c = float(wc @ idx)
    mean_d = float(wd @ idx)
    var_c = float(wc @ (idx - mean_c) ** 2)
    var_d = float(wd @ (idx - mean_d) ** 2)
    cov = float((idx - mean_c) @ w @ (idx - mean_d))
    return mean_c, mean_d, var_c, var_d, cov


def metric_fluctuations(u: float, v: float, L: int) -> MetricTensor2:
    """Metric entries from vertex-count fluctuations:

    g_cc = Var(n_c)/(4u^2), g_dd = Var(n_d)/(4v^2), g_cd = Cov/(2uv),
    averaged under the classical distribution with weights (u, v).
    """
    if u <= 0 or v <= 0:
        raise ValueError(
            f"fluctuation metric needs u, v > 0 (boundary lines unsupported), got ({u}, {v})"
        )
    _, _, var_c, var_d, cov = _vertex_moments(u, v, L)
    return MetricTensor2(
        g_cc=var_c / (4.0 * u * u),
        g_dd=var_d / (4.0 * v * v),
        g_cd=cov / (2.0 * u * v),
    )


@dataclass(frozen=True)
class VertexSample:
    """Monte Carlo moments of (n_c, n_d) for one (u, v, L, seed)."""

    u: float
    v: float
    L: int
    n_c: McEstimate
    n_d: McEstimate
    var_c: McEstimate
    var_d: McEstimate
    cov_cd: McEstimate


def mc_sample_vertices(
    u: float, v: float, L: int, n_therm: int, n_sweeps: int, seed: int
) -> VertexSample:
    """Metropolis chain over valid configurations.

    Proposals pick uniformly among the L^2 face reversals, the 2L winding
    loops (a full row of horizontal bonds or column of vertical bonds), and
    one lazy no-op that keeps the chain aperiodic at the free point where
    every move is accepted; the winding moves reach all four topological
    sectors. One sweep is L^2 + 2L + 1 slots. Deterministic for a given seed.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if u <= 0 or v <= 0:
        raise ValueError(f"u, v must be positive, got ({u}, {v})")
    if n_therm < 0:
        raise ValueError("n_therm must be >= 0")
    if n_sweeps < 8:
        raise ValueError("n_sweeps must be >= 8 for error analysis")
    nc, nd = vertex_mc_series(
        L, float(u), float(v), n_therm, n_sweeps,
        np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF),
    )
    return VertexSample(
        u=float(u),
        v=float(v),
        L=L,
        n_c=estimate_mean(nc, seed),
        n_d=estimate_mean(nd, seed),
        var_c=estimate_variance(nc, seed),
        var_d=estimate_variance(nd, seed),
        cov_cd=estimate_covariance(nc, nd, seed),
    )


@dataclass(frozen=True)
class ScalingExponent:
    """Crossover parameter and predicted divergence of the metric density."""

    mu: float
    exponent: float
    divergence_class: str
    integer_exponent: bool


def scaling_exponent(u: float, v: float) -> ScalingExponent:
    """mu = 2 arctan(sqrt(u v)); predicted scaling power pi/mu - 2.

    The metric density diverges as a power law for u v > 1, logarithmically
    on u v = 1 (within 1e-12), and stays finite for u v < 1. Integer pi/mu
    picks up an extra logarithmic factor and is flagged.
    """
    if u <= 0 or v <= 0:
        raise ValueError(f"u, v must be positive, got ({u}, {v})")
    uv = u * v
    mu = 2.0 * math.atan(math.sqrt(uv))
    ratio = math.pi / mu
    exponent = ratio - 2.0
    if abs(uv - 1.0) <= 1e-12:
        div_class = "logarithmic"
    elif uv > 1.0:
        div_class = "power_law"
    else:
        div_class = "non_divergent"
    return ScalingExponent(
        mu=mu,
        exponent=exponent,
        divergence_class=div_class,
        integer_exponent=abs(ratio - round(ratio)) <= 1e-12,
    )


@dataclass(frozen=True)
class PhasePoint:
    """Phase label of a (u, v) point and its distance to the critical lines."""

    label: str
    distance: float


def phase_classifier(u: float, v: float) -> PhasePoint:
    """Classify (u, v): topological for |v - u| < 2, ordered beyond,
    critical on |v - u| = 2 (within 1e-12); distance = ||v - u| - 2|."""
    if u < 0 or v < 0:
        raise ValueError(f"u, v must be nonnegative, got ({u}, {v})")
    gap = abs(v - u)
    distance = abs(gap - 2.0)
    if distance <= 1e-12:
        label = "critical"
    elif gap < 2.0:
        label = "topological"
    elif v > u:
        label = "ordered-d"
    else:
        label = "ordered-c"
    return PhasePoint(label=label, distance=distance)

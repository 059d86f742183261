"""Ground-state fidelity metrics for two exactly solvable lattice models.

The package computes overlaps and fidelity-metric tensors for a
deformed-code wavefunction (smf) and an arrow-vertex wavefunction
(eightvertex), checks them against the classical partition functions they
map onto (ising, eightvertex), and provides generic finite-difference and
critical-scaling tools (analysis), Monte Carlo error analysis (mcstats),
parameter sweeps with a fixed CSV schema (sweep) and a CLI (fidmet).
"""

__version__ = "0.1.0"

from .errors import BudgetExceededError, FidmetError, NoiseFloorError
from .lattice import TorusLattice, build_torus, incidence
from .mcstats import (
    McEstimate,
    estimate_covariance,
    estimate_mean,
    estimate_variance,
    integrated_autocorr_time,
    jackknife_covariance,
    jackknife_mean,
    jackknife_variance,
)
from .smf import (
    SmfGroundState,
    StarSubset,
    bond_spins,
    energy_histogram,
    fidelity,
    ground_state,
    log_partition_function,
    magnetization,
    metric_fluctuation,
    metric_from_specific_heat,
    partition_function,
    smf_energy,
)
from .ising import (
    BETA_C,
    IsingEnergySample,
    ising_partition_enum,
    mc_sample_energy,
    mc_specific_heat,
    onsager_specific_heat,
    specific_heat_exact,
)
from .eightvertex import (
    ArrowConfig,
    MetricTensor2,
    PhasePoint,
    QuantumState8v,
    ScalingExponent,
    VertexSample,
    VertexWeights,
    classify_vertices,
    enumerate_arrow_configs,
    fidelity8v,
    mc_sample_vertices,
    metric_fluctuations,
    phase_classifier,
    quantum_amplitudes,
    scaling_exponent,
    z8v,
)
from .analysis import (
    FdMetric,
    PeakPoint,
    PeakScanResult,
    ScalingFit,
    fd_metric_tensor,
    fidelity_overlap,
    finite_difference_metric,
    fit_log_divergence,
    fit_power_law,
    peak_scan,
)
from .sweep import (
    SweepResult,
    SweepRow,
    SweepSpec,
    emit_plot_script,
    read_sweep_csv,
    run_sweep,
    write_sweep_csv,
)

__all__ = [
    "__version__",
    "FidmetError",
    "BudgetExceededError",
    "NoiseFloorError",
    "TorusLattice",
    "build_torus",
    "incidence",
    "McEstimate",
    "estimate_mean",
    "estimate_variance",
    "estimate_covariance",
    "integrated_autocorr_time",
    "jackknife_mean",
    "jackknife_variance",
    "jackknife_covariance",
    "StarSubset",
    "SmfGroundState",
    "bond_spins",
    "smf_energy",
    "energy_histogram",
    "partition_function",
    "log_partition_function",
    "fidelity",
    "metric_fluctuation",
    "metric_from_specific_heat",
    "magnetization",
    "ground_state",
    "BETA_C",
    "IsingEnergySample",
    "ising_partition_enum",
    "specific_heat_exact",
    "onsager_specific_heat",
    "mc_sample_energy",
    "mc_specific_heat",
    "ArrowConfig",
    "VertexWeights",
    "QuantumState8v",
    "MetricTensor2",
    "VertexSample",
    "ScalingExponent",
    "PhasePoint",
    "classify_vertices",
    "enumerate_arrow_configs",
    "z8v",
    "quantum_amplitudes",
    "fidelity8v",
    "metric_fluctuations",
    "mc_sample_vertices",
    "scaling_exponent",
    "phase_classifier",
    "fidelity_overlap",
    "FdMetric",
    "finite_difference_metric",
    "fd_metric_tensor",
    "ScalingFit",
    "fit_log_divergence",
    "fit_power_law",
    "PeakPoint",
    "PeakScanResult",
    "peak_scan",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "write_sweep_csv",
    "read_sweep_csv",
    "emit_plot_script",
]

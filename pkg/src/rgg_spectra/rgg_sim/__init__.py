"""Monte Carlo simulation of Poisson geometric graphs and their length power functionals."""

from .diagnostics import (
    BandComparison,
    DifferenceSeries,
    NoiseDiagnostic,
    check_difference_convergence,
    check_noise_decomposition,
    compare_band,
    limit_matrix,
    noise_target_variance,
    torus_covariance,
)
from .experiment import (
    ANALYTIC,
    EMPIRICAL_MEAN,
    PER_REPLICATION,
    SHARED,
    CovarianceEstimate,
    ExperimentConfig,
    Schedule,
    jackknife_cov_se,
    run_experiment,
    sample_covariance,
    thread_count,
)
from .functionals import (
    EdgeList,
    FunctionalSample,
    analytic_mean,
    cloud_functionals,
    enumerate_edges,
    length_power,
    normalize,
    normalizer,
)
from .window import HARD_WINDOW, TORUS, PointCloud, WindowSpec, sample_poisson

__all__ = [
    "ANALYTIC",
    "EMPIRICAL_MEAN",
    "HARD_WINDOW",
    "PER_REPLICATION",
    "SHARED",
    "TORUS",
    "BandComparison",
    "CovarianceEstimate",
    "DifferenceSeries",
    "EdgeList",
    "ExperimentConfig",
    "FunctionalSample",
    "NoiseDiagnostic",
    "PointCloud",
    "Schedule",
    "WindowSpec",
    "analytic_mean",
    "check_difference_convergence",
    "check_noise_decomposition",
    "cloud_functionals",
    "compare_band",
    "enumerate_edges",
    "jackknife_cov_se",
    "length_power",
    "limit_matrix",
    "noise_target_variance",
    "normalize",
    "normalizer",
    "run_experiment",
    "sample_covariance",
    "sample_poisson",
    "thread_count",
    "torus_covariance",
]

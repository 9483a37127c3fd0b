"""Exact and estimated mixing quantities of finite-state Markov chains."""

from .chain import (
    ProbabilityVector,
    SpectralSummary,
    StochasticMatrix,
    dobrushin_coefficient,
    is_ergodic,
    lp_quasi_norm,
    spectral_summary,
    stationary_distribution,
    tv_distance,
)
from .mixing import (
    BetaProfile,
    MixingReport,
    PairMatrix,
    entropic_sup,
    entropic_term,
    exact_beta,
    exact_worst_distance,
    mixing_times,
    nonstationary_beta,
    pair_matrix,
    spectral_avg_mixing_bound,
    uniform_beta_envelope,
)
from .estimation import (
    EstimationResult,
    SkippedCounts,
    Trajectory,
    avg_mixing_time_hat,
    beta_hat,
    beta_hat_at,
    confidence_interval,
    coverage_experiment,
    mad_experiment,
    sample_trajectory,
    skipped_counts,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

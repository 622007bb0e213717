"""Exact moments and simulation for Poisson k-flat processes in a ball window.

A stationary, isotropic Poisson process of k-dimensional affine flats in
``R^d`` is observed through a centred ball of radius ``rho``.  Each flat
meets the window in a lower-dimensional ball, and summing an intrinsic
volume of those sections over the process yields a random variable whose
moments, cumulants, and large-window behaviour are available in closed
form.  This package computes those closed forms, verifies them against
independent numerical quadrature, and cross-checks both against a
reproducible Monte Carlo simulator.

The main entry points:

* :class:`~kflats.geometry.ProcessParams` — process and window description
* :mod:`kflats.moments` — exact moments, cumulants, asymptotics, bounds
* :mod:`kflats.simulator` — deterministic, parallel Monte Carlo engine
* :mod:`kflats.stats` — estimators with standard errors, normality tests
* ``kflats`` (console script) — CSV/JSON reports from the command line
"""

from .combinatorics import (
    cumulants_from_moments,
    double_factorial,
    enumerate_singleton_free_partitions,
    moments_from_cumulants,
    partition_count,
    singleton_free_partition_total,
)
from .errors import (
    BudgetExceeded,
    DegenerateVariance,
    DimensionError,
    InsufficientData,
    KFlatsError,
    OrderOutOfRange,
    QuadratureNonConvergence,
)
from .geometry import (
    MeasureConvention,
    ProcessParams,
    ball_hit_measure,
    cross_functional_ball,
    functional_A_ball,
    functional_A_quadrature,
    intrinsic_volume_ball,
    unit_ball_volume,
)
from .moments import (
    MomentReport,
    asymptotic_cumulant,
    asymptotic_moment,
    berry_esseen_bound,
    central_moment_exact,
    central_moment_sequence,
    covariance_matrix,
    cumulant_exact,
    cumulant_sequence,
    expected_intrinsic_volume,
    moment_report,
    normalized_moment_limit,
)
from .simulator import (
    BACKEND,
    SampleAccumulator,
    run_monte_carlo,
    sample_intrinsic_volumes,
    sample_realization,
)
from .stats import (
    clt_rate_fit,
    kolmogorov_distance_to_normal,
    sample_central_moments,
    sample_covariance_matrix,
    sample_cumulants,
    sample_means,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "DegenerateVariance",
    "DimensionError",
    "InsufficientData",
    "KFlatsError",
    "MeasureConvention",
    "MomentReport",
    "OrderOutOfRange",
    "ProcessParams",
    "QuadratureNonConvergence",
    "SampleAccumulator",
    "__version__",
    "asymptotic_cumulant",
    "asymptotic_moment",
    "ball_hit_measure",
    "berry_esseen_bound",
    "central_moment_exact",
    "central_moment_sequence",
    "clt_rate_fit",
    "covariance_matrix",
    "cross_functional_ball",
    "cumulant_exact",
    "cumulant_sequence",
    "cumulants_from_moments",
    "double_factorial",
    "enumerate_singleton_free_partitions",
    "expected_intrinsic_volume",
    "functional_A_ball",
    "functional_A_quadrature",
    "intrinsic_volume_ball",
    "kolmogorov_distance_to_normal",
    "moment_report",
    "moments_from_cumulants",
    "normalized_moment_limit",
    "partition_count",
    "run_monte_carlo",
    "sample_central_moments",
    "sample_covariance_matrix",
    "sample_cumulants",
    "sample_intrinsic_volumes",
    "sample_means",
    "sample_realization",
    "singleton_free_partition_total",
    "unit_ball_volume",
]

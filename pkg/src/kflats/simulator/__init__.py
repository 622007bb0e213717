"""Monte Carlo simulator for Poisson k-flat processes in a ball window."""

from ._backend import BACKEND
from .accumulator import (
    CROSS_TERMS,
    BlockSums,
    SampleAccumulator,
    from_samples,
    merge,
    n_pairs,
    pair_index,
)
from .engine import (
    BLOCK_SIZE,
    DEFAULT_FLAT_BUDGET,
    MAX_ACCUMULATED_ORDER,
    Flat,
    Realization,
    intrinsic_volume_vector,
    mean_flat_count,
    run_monte_carlo,
    sample_distances,
    sample_flat_count,
    sample_intrinsic_volumes,
    sample_realization,
)

__all__ = [
    "BACKEND",
    "BLOCK_SIZE",
    "CROSS_TERMS",
    "DEFAULT_FLAT_BUDGET",
    "MAX_ACCUMULATED_ORDER",
    "BlockSums",
    "Flat",
    "Realization",
    "SampleAccumulator",
    "from_samples",
    "intrinsic_volume_vector",
    "mean_flat_count",
    "merge",
    "n_pairs",
    "pair_index",
    "run_monte_carlo",
    "sample_distances",
    "sample_flat_count",
    "sample_intrinsic_volumes",
    "sample_realization",
]

"""Replication sampling of Poisson k-flat processes in a ball window.

Only the flat distances enter the intrinsic volumes of the intersections,
so the replication loop samples a Poisson flat count and the distance law
of the chosen measure convention; directional frames are sampled lazily
and only for realization export.

Random streams are derived per fixed-size replication block from
(seed, block index) through numpy's counter-based Philox generator, so any
worker can produce any block independently; partial sums are reduced in
ascending block order. Results for a fixed (seed, n_reps, block_size) are
therefore bit-identical for every worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceeded, DimensionError, OrderOutOfRange
from ..geometry import (
    MeasureConvention,
    ProcessParams,
    ball_hit_measure,
    intrinsic_volume_ball,
)
from ..moments import expected_intrinsic_volume
from ._backend import BACKEND, kernel
from .accumulator import CROSS_TERMS, BlockSums, SampleAccumulator, n_pairs

BLOCK_SIZE = 4096
MAX_ACCUMULATED_ORDER = 12
DEFAULT_FLAT_BUDGET = 1_000_000


def mean_flat_count(p: ProcessParams) -> float:
    """Expected number of flats hitting the window."""
    return p.intensity * ball_hit_measure(p)


def sample_flat_count(p: ProcessParams, rng: np.random.Generator) -> int:
    """Poisson number of flats hitting the window."""
    return int(rng.poisson(mean_flat_count(p)))


def sample_distances(p: ProcessParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Distances from the origin of n flats conditioned to hit the window.

    Signed-distance convention: the absolute value of a uniform signed
    offset on [-rho, rho]. Invariant convention: rho * U**(1/(d-k)), the
    radial law of a uniform point in the (d-k)-ball of the orthogonal
    complement. The two laws agree when d - k = 1.
    """
    u = rng.random(n)
    e = p.measure_exponent
    if e == 1:
        return p.radius * u
    return p.radius * u ** (1.0 / e)


def _sample_frame(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal spanning vectors (rows) of a uniform k-subspace of R^d."""
    if k == 0:
        return np.zeros((0, d))
    while True:
        g = rng.standard_normal((d, k))
        q, r = np.linalg.qr(g)
        diag = np.diagonal(r)
        if np.min(np.abs(diag)) > 1e-12:
            return (q * np.sign(diag)).T.copy()


def _sample_offset_direction(frame: np.ndarray, d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector in the orthogonal complement of the frame's span."""
    while True:
        z = rng.standard_normal(d)
        if frame.shape[0]:
            z = z - frame.T @ (frame @ z)
        norm = np.linalg.norm(z)
        if norm > 1e-9:
            return z / norm


@dataclass(frozen=True)
class Flat:
    """One flat of a realization: its distance from the origin and,
    optionally, an orthonormal direction frame plus the unit offset
    direction in the frame's orthogonal complement."""

    distance: float
    frame: np.ndarray | None = None
    offset_direction: np.ndarray | None = None


@dataclass(frozen=True)
class Realization:
    """All flats of one realization hitting the window."""

    params: ProcessParams
    flats: tuple[Flat, ...]


def sample_realization(
    p: ProcessParams, rng: np.random.Generator, with_frames: bool = True
) -> Realization:
    """Draw one full realization.

    Distances always; frames only when requested, since no intrinsic
    volume of an intersection depends on them.
    """
    n = sample_flat_count(p, rng)
    distances = sample_distances(p, n, rng)
    flats = []
    for t in distances:
        frame = offset = None
        if with_frames:
            frame = _sample_frame(p.d, p.k, rng)
            offset = _sample_offset_direction(frame, p.d, rng)
        flats.append(Flat(float(t), frame, offset))
    return Realization(p, tuple(flats))


def intrinsic_volume_vector(r: Realization, p: ProcessParams | None = None) -> np.ndarray:
    """Vector (V_0, ..., V_k) of total intrinsic volumes of the realization.

    Entry 0 counts the flats, since V_0 of each nonempty intersection is 1.
    """
    if p is None:
        p = r.params
    out = np.zeros(p.k + 1)
    rho2 = p.radius * p.radius
    for flat in r.flats:
        sec = math.sqrt(max(rho2 - flat.distance * flat.distance, 0.0))
        for j in range(p.k + 1):
            out[j] += intrinsic_volume_ball(p.k, j, sec)
    return out


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("KFLATS_WORKERS", "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _run_blocks(
    p: ProcessParams,
    j_max: int,
    n_reps: int,
    max_order: int,
    seed: int,
    workers: int | None,
    block_size: int,
    collect_samples: bool,
    max_flats_per_rep: float,
    kernel_module=None,
) -> tuple[SampleAccumulator, np.ndarray | None]:
    if not 0 <= j_max <= p.k:
        raise DimensionError(f"j_max must satisfy 0 <= j_max <= k, got {j_max}")
    if n_reps < 1:
        raise ValueError(f"replication count must be >= 1, got {n_reps}")
    if not 1 <= max_order <= MAX_ACCUMULATED_ORDER:
        raise OrderOutOfRange(
            f"accumulated order must lie in [1, {MAX_ACCUMULATED_ORDER}], got {max_order}"
        )
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    if block_size < 1:
        raise ValueError(f"block size must be >= 1, got {block_size}")
    mean = mean_flat_count(p)
    if mean > max_flats_per_rep:
        raise BudgetExceeded(
            f"projected {mean:.6g} flats per replication exceeds the cap {max_flats_per_rep:.6g}"
        )
    workers = _resolve_workers(workers)
    impl = kernel_module if kernel_module is not None else kernel

    ncomp = j_max + 1
    coeffs = np.array([intrinsic_volume_ball(p.k, j, 1.0) for j in range(ncomp)])
    shift = np.array([expected_intrinsic_volume(p, j) for j in range(ncomp)])
    radius = p.radius
    e = p.measure_exponent
    n_blocks = -(-n_reps // block_size)
    samples = np.empty((n_reps, ncomp)) if collect_samples else None

    def task(b: int) -> tuple[int, BlockSums]:
        lo = b * block_size
        nrep = min(block_size, n_reps - lo)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, b))))
        counts = rng.poisson(mean, size=nrep).astype(np.int64, copy=False)
        u = rng.random(int(counts.sum()))
        dist = radius * u if e == 1 else radius * u ** (1.0 / e)
        power = np.zeros((ncomp, max_order))
        cross = np.zeros((n_pairs(ncomp), len(CROSS_TERMS)))
        block_samples = samples[lo : lo + nrep] if samples is not None else None
        impl.accumulate_block(
            dist, counts, coeffs, shift, radius, max_order, power, cross, block_samples
        )
        return b, BlockSums(nrep, power, cross)

    acc = SampleAccumulator(ncomp, max_order, shift)
    if workers == 1 or n_blocks == 1:
        for b in range(n_blocks):
            acc.add_block(*task(b))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for b, sums in pool.map(task, range(n_blocks)):
                acc.add_block(b, sums)
    return acc, samples


def run_monte_carlo(
    p: ProcessParams,
    j_max: int,
    n_reps: int,
    max_order: int,
    seed: int,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
    max_flats_per_rep: float = DEFAULT_FLAT_BUDGET,
    kernel_module=None,
) -> SampleAccumulator:
    """Accumulate power and cross sums of (V_0, ..., V_{j_max}) over n_reps
    independent realizations.

    The worker count never affects the result; kernel_module is a hook for
    benchmarking one backend against the other.
    """
    acc, _ = _run_blocks(
        p, j_max, n_reps, max_order, seed, workers, block_size,
        collect_samples=False, max_flats_per_rep=max_flats_per_rep,
        kernel_module=kernel_module,
    )
    return acc


def sample_intrinsic_volumes(
    p: ProcessParams,
    j_max: int,
    n_reps: int,
    seed: int,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
    max_flats_per_rep: float = DEFAULT_FLAT_BUDGET,
    kernel_module=None,
) -> np.ndarray:
    """Per-replication component vectors, shape (n_reps, j_max + 1).

    Shares the stream derivation of run_monte_carlo, so the same seed
    reproduces the same realizations.
    """
    _, samples = _run_blocks(
        p, j_max, n_reps, 2, seed, workers, block_size,
        collect_samples=True, max_flats_per_rep=max_flats_per_rep,
        kernel_module=kernel_module,
    )
    assert samples is not None
    return samples

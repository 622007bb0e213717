"""Mergeable accumulation of power sums and cross sums over replication blocks.

Per-block partial sums are kept separate inside the accumulator and only
collapsed, in ascending block order, when a total is read. That makes
merging a disjoint dictionary union, hence exactly associative and
commutative at the bit level, and makes every reported total independent
of how blocks were distributed over workers.

Power sums are accumulated about a fixed shift vector (normally the exact
component means), which keeps high-order sums well conditioned; central
moments are shift-invariant so downstream estimates are unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientData

# Cross-sum columns accumulated for every component pair i < j, as powers
# (p, q) of (V_i - shift_i)^p (V_j - shift_j)^q. The first column is the
# plain product sum; the higher ones feed the delta-method standard error
# of the sample correlation.
CROSS_TERMS: tuple[tuple[int, int], ...] = ((1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3))


def n_pairs(ncomp: int) -> int:
    return ncomp * (ncomp - 1) // 2


def pair_index(i: int, j: int, ncomp: int) -> int:
    """Index of the (i, j) pair, i < j, in lexicographic pair order."""
    if not 0 <= i < j < ncomp:
        raise IndexError(f"need 0 <= i < j < {ncomp}, got ({i}, {j})")
    return i * (2 * ncomp - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class BlockSums:
    """Partial sums contributed by one replication block."""

    count: int
    power_sums: np.ndarray  # (ncomp, max_order), orders 1..max_order
    cross_sums: np.ndarray  # (n_pairs, len(CROSS_TERMS))


@dataclass
class SampleAccumulator:
    """Streaming power sums of the component vector over replications.

    blocks maps a block index to that block's partial sums. The exposed
    count / power_sums / cross_sums properties collapse the blocks in
    ascending index order, the deterministic reduction order of the
    simulator contract.
    """

    ncomp: int
    max_order: int
    shift: np.ndarray
    blocks: dict[int, BlockSums] = field(default_factory=dict)

    def add_block(self, index: int, sums: BlockSums) -> None:
        if index in self.blocks:
            raise ValueError(f"block {index} already accumulated")
        self.blocks[index] = sums

    @property
    def block_index(self) -> int:
        """Lowest block index present (0 for a fully assembled run)."""
        return min(self.blocks) if self.blocks else 0

    @property
    def count(self) -> int:
        return sum(self.blocks[b].count for b in sorted(self.blocks))

    @property
    def power_sums(self) -> np.ndarray:
        total = np.zeros((self.ncomp, self.max_order))
        for b in sorted(self.blocks):
            total += self.blocks[b].power_sums
        return total

    @property
    def cross_sums(self) -> np.ndarray:
        total = np.zeros((n_pairs(self.ncomp), len(CROSS_TERMS)))
        for b in sorted(self.blocks):
            total += self.blocks[b].cross_sums
        return total

    def tobytes(self) -> bytes:
        """Deterministic byte serialization (used to assert determinism)."""
        parts = [
            np.asarray([self.ncomp, self.max_order, self.count], dtype=np.int64).tobytes(),
            np.ascontiguousarray(self.shift, dtype=np.float64).tobytes(),
        ]
        for b in sorted(self.blocks):
            blk = self.blocks[b]
            parts.append(np.asarray([b, blk.count], dtype=np.int64).tobytes())
            parts.append(np.ascontiguousarray(blk.power_sums).tobytes())
            parts.append(np.ascontiguousarray(blk.cross_sums).tobytes())
        return b"".join(parts)


def merge(a: SampleAccumulator, b: SampleAccumulator) -> SampleAccumulator:
    """Merge two accumulators covering disjoint block sets.

    Union of the per-block partials, so the operation is associative and
    commutative bit-for-bit; overlapping block indices or mismatched
    configuration raise ValueError.
    """
    if a.ncomp != b.ncomp or a.max_order != b.max_order:
        raise ValueError("cannot merge accumulators with different configurations")
    if not np.array_equal(a.shift, b.shift):
        raise ValueError("cannot merge accumulators with different shifts")
    overlap = a.blocks.keys() & b.blocks.keys()
    if overlap:
        raise ValueError(f"overlapping blocks {sorted(overlap)}")
    merged = dict(a.blocks)
    merged.update(b.blocks)
    return SampleAccumulator(a.ncomp, a.max_order, a.shift, merged)


def from_samples(
    values: np.ndarray, max_order: int, shift: np.ndarray | None = None
) -> SampleAccumulator:
    """Build a single-block accumulator directly from sample vectors.

    values has shape (n,) for one component or (n, ncomp). Mainly a
    convenience for feeding externally generated samples to the statistics
    layer; the simulator assembles accumulators block by block instead.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] < 1:
        raise InsufficientData("need a non-empty 1-D or 2-D sample array")
    n, ncomp = v.shape
    if shift is None:
        # centring near the data keeps the high-order power sums conditioned
        shift = v.mean(axis=0)
    shift = np.asarray(shift, dtype=np.float64)
    x = v - shift
    power = np.empty((ncomp, max_order))
    xp = x.copy()
    power[:, 0] = xp.sum(axis=0)
    for q in range(1, max_order):
        xp *= x
        power[:, q] = xp.sum(axis=0)
    cross = np.empty((n_pairs(ncomp), len(CROSS_TERMS)))
    for i in range(ncomp):
        for j in range(i + 1, ncomp):
            a_, b_ = x[:, i], x[:, j]
            row = pair_index(i, j, ncomp)
            for col, (pw, qw) in enumerate(CROSS_TERMS):
                cross[row, col] = (a_**pw * b_**qw).sum()
    acc = SampleAccumulator(ncomp, max_order, shift)
    acc.add_block(0, BlockSums(n, power, cross))
    return acc

"""Numpy implementation of the block accumulation kernel.

Fallback used when the compiled extension (simulator/_kernel.pyx) is not
available, and reference for its semantics. Both backends consume the same
random draws and agree to floating-point accumulation order differences,
roughly fourteen significant digits; each backend on its own is exactly
deterministic for a fixed block decomposition.
"""

from __future__ import annotations

import numpy as np


def accumulate_block(
    dist: np.ndarray,
    counts: np.ndarray,
    coeffs: np.ndarray,
    shift: np.ndarray,
    rho: float,
    max_order: int,
    power_sums: np.ndarray,
    cross_sums: np.ndarray,
    samples: np.ndarray | None = None,
) -> None:
    """Accumulate one block of replications into power_sums and cross_sums.

    dist holds the flat distances of all replications in the block
    concatenated; counts the number of flats of each replication. Component
    j of a replication is coeffs[j] * sum over its flats of r**j with
    r = sqrt(rho^2 - distance^2). Power sums of orders 1..max_order of the
    shift-centred components are added to power_sums (ncomp, max_order),
    cross-product sums to cross_sums (see accumulator.CROSS_TERMS). When
    samples is given the raw component vectors are written to samples[rep].
    """
    ncomp = coeffs.shape[0]
    nrep = counts.shape[0]
    if dist.shape[0] != int(counts.sum()):
        raise ValueError("distance array does not match the flat counts")

    r = np.sqrt(np.maximum(rho * rho - dist * dist, 0.0))
    powers = np.vander(r, ncomp, increasing=True)  # columns r^0 .. r^(ncomp-1)
    rep_ids = np.repeat(np.arange(nrep), counts)
    v = np.empty((nrep, ncomp))
    for c in range(ncomp):
        v[:, c] = coeffs[c] * np.bincount(rep_ids, weights=powers[:, c], minlength=nrep)

    if samples is not None:
        samples[...] = v

    x = v - shift
    xp = x.copy()
    power_sums[:, 0] += xp.sum(axis=0)
    for q in range(1, max_order):
        xp *= x
        power_sums[:, q] += xp.sum(axis=0)

    row = 0
    for i in range(ncomp):
        a = x[:, i]
        for j in range(i + 1, ncomp):
            b = x[:, j]
            ab = a * b
            cross_sums[row, 0] += ab.sum()
            cross_sums[row, 1] += (ab * a).sum()
            cross_sums[row, 2] += (ab * b).sum()
            cross_sums[row, 3] += (ab * ab).sum()
            cross_sums[row, 4] += (ab * a * a).sum()
            cross_sums[row, 5] += (ab * b * b).sum()
            row += 1

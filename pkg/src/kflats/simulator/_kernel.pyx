# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled block accumulation kernel.

Must stay in semantic lockstep with simulator/_kernel_py.py: per
replication the flats are folded in sampled order, then power and cross
sums are accumulated over the replications of the block.
"""

from libc.math cimport sqrt

# Stack buffers bound the component count; d up to 64 ambient dimensions
# is far beyond anything double precision supports downstream anyway.
MAX_COMPONENTS = 64


def accumulate_block(const double[::1] dist, const long[::1] counts,
                     const double[::1] coeffs, const double[::1] shift,
                     double rho, int max_order,
                     double[:, ::1] power_sums, double[:, ::1] cross_sums,
                     double[:, ::1] samples=None):
    """See simulator/_kernel_py.accumulate_block for the contract."""
    cdef Py_ssize_t nrep = counts.shape[0]
    cdef Py_ssize_t ncomp = coeffs.shape[0]
    cdef Py_ssize_t rep, c, i, j, q, row, idx = 0
    cdef long f, nf
    cdef double rho2 = rho * rho
    cdef double r2, r, rp, xp, a, b, ab
    cdef double v[64]
    cdef double x[64]
    cdef bint want_samples = samples is not None
    cdef long total = 0

    if ncomp > 64:
        raise ValueError("too many components for the compiled kernel")
    for rep in range(nrep):
        total += counts[rep]
    if dist.shape[0] != total:
        raise ValueError("distance array does not match the flat counts")

    with nogil:
        for rep in range(nrep):
            for c in range(ncomp):
                v[c] = 0.0
            nf = counts[rep]
            for f in range(nf):
                r2 = rho2 - dist[idx] * dist[idx]
                r = sqrt(r2) if r2 > 0.0 else 0.0
                rp = 1.0
                for c in range(ncomp):
                    v[c] += coeffs[c] * rp
                    rp *= r
                idx += 1
            if want_samples:
                for c in range(ncomp):
                    samples[rep, c] = v[c]
            for c in range(ncomp):
                x[c] = v[c] - shift[c]
                xp = x[c]
                power_sums[c, 0] += xp
                for q in range(1, max_order):
                    xp *= x[c]
                    power_sums[c, q] += xp
            row = 0
            for i in range(ncomp):
                a = x[i]
                for j in range(i + 1, ncomp):
                    b = x[j]
                    ab = a * b
                    cross_sums[row, 0] += ab
                    cross_sums[row, 1] += ab * a
                    cross_sums[row, 2] += ab * b
                    cross_sums[row, 3] += ab * ab
                    cross_sums[row, 4] += ab * a * a
                    cross_sums[row, 5] += ab * b * b
                    row += 1

"""Singleton-free set partitions, double factorials, and the conversion
between centred moments and cumulants.

Moment and cumulant sequences are plain sequences of floats indexed by
order starting at 1: ``seq[0]`` holds the order-1 value (always 0 for a
centred quantity) and ``seq[m - 1]`` the order-m value.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import OrderOutOfRange

# Hard cap on the partition order. Exact tables stay cheap well past this
# point, but double precision downstream does not, so there is no reason
# to enumerate further.
MAX_PARTITION_ORDER = 24


def double_factorial(n: int) -> int:
    """Product n (n-2) (n-4) ... ending at 1 or 2, with n in {-1, 0, 1} -> 1."""
    if n < -1:
        raise OrderOutOfRange(f"double factorial needs n >= -1, got {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _partitions_parts_ge2(m: int, largest: int) -> Iterator[tuple[int, ...]]:
    """Yield the non-increasing integer partitions of m with every part >= 2."""
    if m == 0:
        yield ()
        return
    for first in range(min(m, largest), 1, -1):
        rest = m - first
        if rest == 1:
            # a remainder of 1 would force a singleton block
            continue
        for tail in _partitions_parts_ge2(rest, first):
            yield (first,) + tail


def partition_count(sizes: Sequence[int]) -> int:
    """Number of set partitions of sum(sizes) labelled elements whose block
    sizes are exactly the given multiset.

    This is m! / (prod_i sizes_i! * prod_s mult_s!), where mult_s counts how
    often the size s repeats. The second product is what distinguishes the
    count from a plain multinomial coefficient: blocks of equal size are
    unordered, so arrangements that merely permute them collapse.
    """
    m = sum(sizes)
    count = math.factorial(m)
    for s in sizes:
        count //= math.factorial(s)
    for mult in Counter(sizes).values():
        count //= math.factorial(mult)
    return count


@lru_cache(maxsize=None)
def enumerate_singleton_free_partitions(
    m: int,
) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Block-size table of the set partitions of {1..m} with all blocks >= 2.

    Returns a tuple of ``(sizes, count)`` entries where ``sizes`` is a
    non-increasing tuple of block sizes summing to m and ``count`` is the
    exact number of set partitions with those block sizes. Entries are
    sorted lexicographically descending, so the single-block signature
    comes first and, for even m, the all-pairs signature last.
    """
    if m < 2 or m > MAX_PARTITION_ORDER:
        raise OrderOutOfRange(
            f"partition order must lie in [2, {MAX_PARTITION_ORDER}], got {m}"
        )
    sizes_list = sorted(_partitions_parts_ge2(m, m), reverse=True)
    return tuple((sizes, partition_count(sizes)) for sizes in sizes_list)


def singleton_free_partition_total(m: int) -> int:
    """Total number of singleton-free set partitions of an m-element set."""
    return sum(count for _, count in enumerate_singleton_free_partitions(m))


def cumulants_from_moments(mu: Sequence[float]) -> list[float]:
    """Cumulants of orders 1..M from centred moments of orders 1..M.

    Inverts the standard recursion
    gamma_m = mu_m - sum_{i=1}^{m-1} C(m-1, i-1) gamma_i mu_{m-i}.
    """
    if len(mu) >= 1 and mu[0] != 0.0:
        raise ValueError("moment sequence must be centred (order-1 entry 0)")
    gamma: list[float] = []
    for m in range(1, len(mu) + 1):
        acc = mu[m - 1]
        for i in range(1, m):
            acc -= math.comb(m - 1, i - 1) * gamma[i - 1] * mu[m - i - 1]
        gamma.append(acc)
    return gamma


def moments_from_cumulants(gamma: Sequence[float]) -> list[float]:
    """Centred moments of orders 1..M from cumulants of orders 1..M.

    Exact inverse of :func:`cumulants_from_moments`:
    mu_m = gamma_m + sum_{i=1}^{m-1} C(m-1, i-1) gamma_i mu_{m-i}.
    """
    if len(gamma) >= 1 and gamma[0] != 0.0:
        raise ValueError("cumulant sequence must be centred (order-1 entry 0)")
    mu: list[float] = []
    for m in range(1, len(gamma) + 1):
        acc = gamma[m - 1]
        for i in range(1, m):
            acc += math.comb(m - 1, i - 1) * gamma[i - 1] * mu[m - i - 1]
        mu.append(acc)
    return mu

"""Exact moments, cumulants, asymptotics, a Berry-Esseen style bound, and
the limiting correlation matrix for the total intrinsic volumes induced by
a Poisson flat process in a ball window.

Throughout, V_j denotes the sum of the j-th intrinsic volumes of all
flat-window intersections and moments are central. Order-indexed return
values follow the package convention: ``seq[m - 1]`` is the order-m value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import (
    cumulants_from_moments,
    double_factorial,
    enumerate_singleton_free_partitions,
)
from .errors import OrderOutOfRange
from .geometry import (
    FunctionalValue,
    ProcessParams,
    functional_A_ball,
    log_unit_ball_volume,
)


def expected_intrinsic_volume(p: ProcessParams, j: int) -> float:
    """Mean of V_j: intensity times the first-power hit functional."""
    return p.intensity * functional_A_ball(p, j, 1).value


def cumulant_exact(p: ProcessParams, j: int, m: int) -> float:
    """Exact order-m cumulant of V_j.

    For a Poisson integral of a deterministic kernel every cumulant is the
    intensity times the hit functional of the matching power, so this is
    intensity * A(j, m). Order 1 refers to the centred variable and is 0.
    """
    if m < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {m}")
    if m == 1:
        return 0.0
    return p.intensity * functional_A_ball(p, j, m).value


def central_moment_exact(p: ProcessParams, j: int, m: int) -> float:
    """Exact order-m central moment of V_j.

    Sums over the singleton-free set partitions of {1..m}: each signature
    contributes its partition count times intensity^(#blocks) times the
    product of the per-block hit functionals. Orders up to 24 are supported.
    """
    if m < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {m}")
    if m == 1:
        return 0.0
    a_cache: dict[int, float] = {}

    def a(power: int) -> float:
        if power not in a_cache:
            a_cache[power] = functional_A_ball(p, j, power).value
        return a_cache[power]

    total = 0.0
    for sizes, count in enumerate_singleton_free_partitions(m):
        term = float(count) * p.intensity ** len(sizes)
        for s in sizes:
            term *= a(s)
        total += term
    return total


def central_moment_sequence(p: ProcessParams, j: int, max_order: int) -> list[float]:
    """Central moments of orders 1..max_order as a list."""
    return [central_moment_exact(p, j, m) for m in range(1, max_order + 1)]


def cumulant_sequence(p: ProcessParams, j: int, max_order: int) -> list[float]:
    """Cumulants of orders 1..max_order as a list."""
    return [cumulant_exact(p, j, m) for m in range(1, max_order + 1)]


def verify_moment_recursion(p: ProcessParams, j: int, max_order: int) -> list[float]:
    """Relative residuals of the moment recursion for orders 1..max_order.

    The partition-sum moments must satisfy

        mu_m = intensity * sum_{i=1}^{m-1} C(m-1, i) A(i+1) mu_{m-1-i}

    with mu_0 = 1 and mu_1 = 0. Returns
    |mu_m - rhs_m| / max(1, |mu_m|) for each order; a correct engine keeps
    every entry at roundoff level.
    """
    mu = [1.0, 0.0] + [central_moment_exact(p, j, m) for m in range(2, max_order + 1)]
    a = {i: functional_A_ball(p, j, i).value for i in range(2, max_order + 1)}
    residuals = []
    for m in range(1, max_order + 1):
        rhs = 0.0
        for i in range(1, m):
            rhs += math.comb(m - 1, i) * a[i + 1] * mu[m - 1 - i]
        rhs *= p.intensity
        residuals.append(abs(mu[m] - rhs) / max(1.0, abs(mu[m])))
    return residuals


@dataclass(frozen=True)
class AsymptoticTerm:
    """Leading large-radius behaviour coefficient * rho**rho_exponent."""

    rho_exponent: float
    coefficient: float


def asymptotic_cumulant(p: ProcessParams, j: int, m: int) -> AsymptoticTerm:
    """Large-radius form of the order-m cumulant of V_j.

    Cumulants are exactly homogeneous in the radius, so this is not just a
    limit: cumulant(rho) = coefficient * rho**(j m + e) for every rho, with
    e the measure exponent of the convention.
    """
    if m < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {m}")
    e = p.measure_exponent
    if m == 1:
        return AsymptoticTerm(float(j + e), 0.0)
    fv = functional_A_ball(p, j, m)
    return AsymptoticTerm(fv.rho_exponent, p.intensity * fv.coefficient)


def asymptotic_moment(p: ProcessParams, j: int, m: int) -> AsymptoticTerm:
    """Leading large-radius term of the order-m central moment of V_j.

    The partition sum is dominated by the signatures with the most blocks:
    all pairs for even m (Gaussian-style (m-1)!! leading constant), and one
    triple plus pairs for odd m. With e the measure exponent and
    a_i = A(j, i) at rho = 1:

        even m:      (m-1)!! (intensity a_2)^(m/2),       exponent jm + m e / 2
        odd m >= 3:  C(m,3) (m-4)!! intensity^((m-1)/2)
                     a_3 a_2^((m-3)/2),                   exponent jm + (m-1) e / 2
    """
    if m < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {m}")
    e = p.measure_exponent
    if m == 1:
        return AsymptoticTerm(float(j), 0.0)
    a2 = functional_A_ball(p, j, 2).coefficient
    if m % 2 == 0:
        coeff = double_factorial(m - 1) * (p.intensity * a2) ** (m // 2)
        return AsymptoticTerm(float(j * m + m * e / 2), coeff)
    a3 = functional_A_ball(p, j, 3).coefficient
    coeff = (
        math.comb(m, 3)
        * double_factorial(m - 4)
        * p.intensity ** ((m - 1) // 2)
        * a3
        * a2 ** ((m - 3) // 2)
    )
    return AsymptoticTerm(float(j * m + (m - 1) * e / 2), coeff)


def normalized_moment_limit(m: int) -> float:
    """Large-radius limit of mu_m / mu_2^(m/2): the standard normal moments.

    1 at order 2, (m-1)!! for even m, 0 for odd m (order 1 included).
    """
    if m < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {m}")
    if m == 1:
        return 0.0
    if m % 2 == 0:
        return float(double_factorial(m - 1))
    return 0.0


def berry_esseen_bound(p: ProcessParams, j: int) -> float:
    """Upper bound on the Kolmogorov distance between the standardized V_j
    and a standard normal.

    Equals 42 * gamma_3 / gamma_2^(3/2) with the exact cumulants, a
    third-moment ratio bound; it decays like intensity^(-1/2) rho^(-e/2)
    where e is the measure exponent.
    """
    g2 = cumulant_exact(p, j, 2)
    g3 = cumulant_exact(p, j, 3)
    return 42.0 * g3 / g2**1.5


def covariance_matrix(p: ProcessParams) -> np.ndarray:
    """Limiting correlation matrix of (V_0, ..., V_k).

    Entry (i, j) is the cross functional normalized by the marginal second
    functionals. All intrinsic-volume and radius prefactors cancel, leaving

        c_ij = R(i + j) / sqrt(R(2 i) R(2 j)),   R(s) = kappa_{s+e} / kappa_s

    with e the measure exponent, so the matrix is independent of the
    intensity and of the radius. The diagonal is exactly 1.
    """
    e = p.measure_exponent

    def log_ratio(s: int) -> float:
        return log_unit_ball_volume(s + e) - log_unit_ball_volume(s)

    n = p.k + 1
    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            v = math.exp(log_ratio(i + j) - 0.5 * (log_ratio(2 * i) + log_ratio(2 * j)))
            out[i, j] = out[j, i] = v
    return out


@dataclass(frozen=True)
class MomentReport:
    """Exact moment summary for one component V_j."""

    params: ProcessParams
    j: int
    max_order: int
    mean: float
    central_moments: tuple[float, ...]
    cumulants: tuple[float, ...]

    @property
    def variance(self) -> float:
        return self.cumulants[1]


def moment_report(p: ProcessParams, j: int, max_order: int) -> MomentReport:
    """Bundle mean, central moments, and cumulants of orders 1..max_order."""
    mu = central_moment_sequence(p, j, max_order)
    gamma = cumulant_sequence(p, j, max_order)
    # Internal consistency: the recursion route must agree with the direct
    # cumulants at roundoff level. The conversion subtracts quantities of
    # the moments' magnitude, so that is the scale roundoff lives at.
    if max_order >= 2:
        converted = cumulants_from_moments(mu)
        for m in range(2, max_order + 1):
            scale = max(1.0, abs(gamma[m - 1]), abs(mu[m - 1]))
            if abs(converted[m - 1] - gamma[m - 1]) > 1e-9 * scale:
                raise ArithmeticError(
                    f"moment/cumulant routes disagree at order {m}"
                )
    return MomentReport(p, j, max_order, expected_intrinsic_volume(p, j), tuple(mu), tuple(gamma))

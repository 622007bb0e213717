"""Estimation and validation statistics for simulated component vectors.

Estimates are computed from a SampleAccumulator's power sums; standard
errors use the classical delta-method leading terms, which require sample
moments up to twice the reported order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import special

from .combinatorics import cumulants_from_moments
from .errors import DegenerateVariance, InsufficientData
from .geometry import ProcessParams
from .moments import berry_esseen_bound, cumulant_exact, expected_intrinsic_volume
from .simulator.accumulator import CROSS_TERMS, SampleAccumulator, pair_index
from .simulator.engine import sample_intrinsic_volumes


@dataclass(frozen=True)
class SampleMoments:
    """Point estimates of orders 1..M with delta-method standard errors."""

    count: int
    values: tuple[float, ...]
    standard_errors: tuple[float, ...]


def sample_means(acc: SampleAccumulator) -> np.ndarray:
    """Sample means of the raw (unshifted) components."""
    n = acc.count
    if n < 1:
        raise InsufficientData("empty accumulator")
    return acc.shift + acc.power_sums[:, 0] / n


def _central_moments(acc: SampleAccumulator, component: int, upto: int) -> list[float]:
    """Sample central moments of orders 0..upto for one component.

    Power sums are stored about the accumulator shift; central moments are
    shift-invariant, so expanding about the shifted sample mean gives the
    moments about the true sample mean directly.
    """
    n = acc.count
    if n < 2:
        raise InsufficientData(f"need at least 2 samples, have {n}")
    if upto > acc.max_order:
        raise InsufficientData(
            f"accumulator holds orders up to {acc.max_order}, need {upto}"
        )
    sums = acc.power_sums[component]
    raw = [1.0] + [float(sums[q]) / n for q in range(upto)]
    xbar = raw[1]
    mu = [1.0, 0.0]
    for m in range(2, upto + 1):
        s = 0.0
        for i in range(m + 1):
            s += math.comb(m, i) * raw[m - i] * (-xbar) ** i
        mu.append(s)
    return mu


def _moment_covariance(mu: Sequence[float], r: int, s: int, n: int) -> float:
    """Leading-order covariance of the sample central moments m_r and m_s.

    cov(m_r, m_s) = (mu_{r+s} - mu_r mu_s + r s mu_2 mu_{r-1} mu_{s-1}
                     - r mu_{r-1} mu_{s+1} - s mu_{s-1} mu_{r+1}) / n,
    with mu indexed from order 0 (mu[0] = 1, mu[1] = 0).
    """
    return (
        mu[r + s]
        - mu[r] * mu[s]
        + r * s * mu[2] * mu[r - 1] * mu[s - 1]
        - r * mu[r - 1] * mu[s + 1]
        - s * mu[s - 1] * mu[r + 1]
    ) / n


def sample_central_moments(
    acc: SampleAccumulator, max_order: int, component: int = 0
) -> SampleMoments:
    """Sample central moments of orders 1..max_order with standard errors.

    Requires the accumulator to hold powers up to 2 * max_order, since the
    order-m standard error involves sample moments up to order 2m.
    """
    if max_order < 1:
        raise InsufficientData(f"order must be >= 1, got {max_order}")
    if 2 * max_order > acc.max_order:
        raise InsufficientData(
            f"standard errors of order {max_order} need accumulated order "
            f"{2 * max_order}, have {acc.max_order}"
        )
    n = acc.count
    mu = _central_moments(acc, component, 2 * max_order)
    values = [mu[m] for m in range(1, max_order + 1)]
    errors = []
    for m in range(1, max_order + 1):
        var = _moment_covariance(mu, m, m, n)
        errors.append(math.sqrt(max(var, 0.0)))
    return SampleMoments(n, tuple(values), tuple(errors))


def _cumulant_jacobian(mu: Sequence[float], gamma: Sequence[float], max_order: int) -> np.ndarray:
    """d gamma_m / d mu_t for the moments-to-cumulants recursion.

    mu and gamma are indexed from order 0. Order-1 moments are identically
    zero for central moments, so column t = 1 is never used downstream.
    """
    jac = np.zeros((max_order + 1, max_order + 1))
    for m in range(2, max_order + 1):
        for t in range(2, max_order + 1):
            d = 1.0 if m == t else 0.0
            for i in range(1, m):
                c = math.comb(m - 1, i - 1)
                d -= c * jac[i, t] * mu[m - i]
                if m - i == t:
                    d -= c * gamma[i]
            jac[m, t] = d
    return jac


def sample_cumulants(
    acc: SampleAccumulator, max_order: int, component: int = 0
) -> SampleMoments:
    """Plug-in cumulant estimates of orders 1..max_order with standard errors.

    The sample central moments are converted through the exact
    moments-to-cumulants recursion; standard errors propagate the moment
    covariance matrix through the Jacobian of that conversion.
    """
    if max_order < 1:
        raise InsufficientData(f"order must be >= 1, got {max_order}")
    if 2 * max_order > acc.max_order:
        raise InsufficientData(
            f"standard errors of order {max_order} need accumulated order "
            f"{2 * max_order}, have {acc.max_order}"
        )
    n = acc.count
    mu = _central_moments(acc, component, 2 * max_order)
    gamma = [0.0] + cumulants_from_moments([mu[m] for m in range(1, max_order + 1)])
    jac = _cumulant_jacobian(mu, gamma, max_order)
    errors = [0.0]
    for m in range(2, max_order + 1):
        var = 0.0
        for r in range(2, max_order + 1):
            if jac[m, r] == 0.0:
                continue
            for s in range(2, max_order + 1):
                if jac[m, s] == 0.0:
                    continue
                var += jac[m, r] * jac[m, s] * _moment_covariance(mu, r, s, n)
        errors.append(math.sqrt(max(var, 0.0)))
    return SampleMoments(n, tuple(gamma[1:]), tuple(errors))


def kolmogorov_distance_to_normal(samples: np.ndarray, standardize: bool = False) -> float:
    """Exact Kolmogorov distance between the empirical distribution and the
    standard normal.

    Uses the order-statistic form
    D = max_i max(i/n - Phi(x_(i)), Phi(x_(i)) - (i-1)/n). With
    standardize=True the samples are first centred and scaled by their
    sample mean and standard deviation.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = x.size
    if n < 2:
        raise InsufficientData(f"need at least 2 samples, have {n}")
    if standardize:
        sd = x.std(ddof=1)
        if sd == 0.0:
            raise DegenerateVariance("cannot standardize a constant sample")
        x = (x - x.mean()) / sd
    cdf = special.ndtr(x)
    i = np.arange(1, n + 1)
    return float(max((i / n - cdf).max(), (cdf - (i - 1) / n).max()))


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log distance against log radius."""

    slope: float
    intercept: float
    rhos: tuple[float, ...]
    distances: tuple[float, ...]
    bounds: tuple[float, ...]


def clt_rate_fit(
    p: ProcessParams,
    j: int,
    rhos: Sequence[float],
    reps_per_rho: int,
    seed: int,
    workers: int | None = None,
) -> RateFit:
    """Empirical normal-approximation rate over a sweep of window radii.

    For each radius, simulates reps_per_rho replications, standardizes V_j
    with its exact mean and standard deviation, and measures the Kolmogorov
    distance to the normal; then fits log(distance) ~ slope * log(rho).
    The theoretical slope is -e/2 with e the measure exponent.
    """
    values = [float(r) for r in rhos]
    if len(set(values)) < 3:
        raise ValueError("need at least 3 distinct radii for a rate fit")
    if min(values) < 1.0:
        raise ValueError("rate-fit radii must be >= 1")
    if reps_per_rho < 2:
        raise ValueError("need at least 2 replications per radius")
    distances = []
    bounds = []
    for idx, rho in enumerate(values):
        pr = replace(p, radius=rho)
        samples = sample_intrinsic_volumes(
            pr, j_max=j, n_reps=reps_per_rho, seed=seed + idx, workers=workers
        )[:, j]
        mean = expected_intrinsic_volume(pr, j)
        sd = math.sqrt(cumulant_exact(pr, j, 2))
        distances.append(kolmogorov_distance_to_normal((samples - mean) / sd))
        bounds.append(berry_esseen_bound(pr, j))
    slope, intercept = np.polyfit(np.log(values), np.log(distances), 1)
    return RateFit(
        float(slope), float(intercept), tuple(values), tuple(distances), tuple(bounds)
    )


def _central_cross_moment(
    t: "_PairSums", p: int, q: int, xbar: float, ybar: float, n: int
) -> float:
    """Sample central cross moment E[(x - xbar)^p (y - ybar)^q] from the
    shifted raw sums, by the bivariate binomial expansion."""
    s = 0.0
    for a in range(p + 1):
        ca = math.comb(p, a) * (-xbar) ** (p - a)
        for b in range(q + 1):
            s += ca * math.comb(q, b) * (-ybar) ** (q - b) * t(a, b)
    return s / n


class _PairSums:
    """Raw shifted sums T(a, b) = sum x^a y^b for one component pair."""

    def __init__(self, acc: SampleAccumulator, i: int, j: int) -> None:
        self.n = acc.count
        power = acc.power_sums
        flip = i > j
        lo, hi = (j, i) if flip else (i, j)
        cross = acc.cross_sums[pair_index(lo, hi, acc.ncomp)]
        self._power_x = power[i]
        self._power_y = power[j]
        self._cross = {}
        for col, (a, b) in enumerate(CROSS_TERMS):
            key = (b, a) if flip else (a, b)
            self._cross[key] = float(cross[col])

    def __call__(self, a: int, b: int) -> float:
        if a == 0 and b == 0:
            return float(self.n)
        if b == 0:
            return float(self._power_x[a - 1])
        if a == 0:
            return float(self._power_y[b - 1])
        return self._cross[(a, b)]


def sample_covariance_matrix(acc: SampleAccumulator) -> tuple[np.ndarray, np.ndarray]:
    """Sample correlation matrix of the components, with standard errors.

    Returns (matrix, standard_errors); the diagonal is exactly 1 with zero
    standard error. Off-diagonal standard errors use the delta-method
    variance of a sample correlation in terms of bivariate central moments
    up to fourth order, which reduces to the familiar (1 - r^2)^2 / n for
    Gaussian pairs. Requires accumulated order >= 4.
    """
    n = acc.count
    if n < 2:
        raise InsufficientData(f"need at least 2 samples, have {n}")
    if acc.max_order < 4:
        raise InsufficientData(
            f"correlation standard errors need accumulated order 4, have {acc.max_order}"
        )
    ncomp = acc.ncomp
    corr = np.eye(ncomp)
    se = np.zeros((ncomp, ncomp))
    variances = []
    means = []
    for c in range(ncomp):
        mu = _central_moments(acc, c, 2)
        variances.append(mu[2])
        means.append(float(acc.power_sums[c, 0]) / n)
        if mu[2] <= 0.0:
            raise DegenerateVariance(f"component {c} has zero sample variance")
    for i in range(ncomp):
        for j in range(i + 1, ncomp):
            t = _PairSums(acc, i, j)
            xbar, ybar = means[i], means[j]
            mu11 = _central_cross_moment(t, 1, 1, xbar, ybar, n)
            mu20, mu02 = variances[i], variances[j]
            r = mu11 / math.sqrt(mu20 * mu02)
            mu22 = _central_cross_moment(t, 2, 2, xbar, ybar, n)
            mu31 = _central_cross_moment(t, 3, 1, xbar, ybar, n)
            mu13 = _central_cross_moment(t, 1, 3, xbar, ybar, n)
            mu40 = _central_moments(acc, i, 4)[4]
            mu04 = _central_moments(acc, j, 4)[4]
            var = (
                mu22 / (mu20 * mu02)
                + 0.25 * r * r * (
                    mu40 / mu20**2 + mu04 / mu02**2 + 2.0 * mu22 / (mu20 * mu02)
                )
                - (mu11 / (mu20 * mu02)) * (mu31 / mu20 + mu13 / mu02)
            ) / n
            corr[i, j] = corr[j, i] = r
            se[i, j] = se[j, i] = math.sqrt(max(var, 0.0))
    return corr, se

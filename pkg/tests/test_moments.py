"""Tests for exact moments, cumulants, asymptotics, and the covariance matrix."""

import math

import numpy as np
import pytest

from kflats.combinatorics import (
    cumulants_from_moments,
    double_factorial,
    moments_from_cumulants,
)
from kflats.errors import OrderOutOfRange
from kflats.geometry import MeasureConvention, ProcessParams
from kflats.moments import (
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
    verify_moment_recursion,
)

LINE = ProcessParams(2, 1, 1.0, 1.0)


def test_line_process_mean():
    assert expected_intrinsic_volume(LINE, 1) == pytest.approx(math.pi, rel=1e-13)
    # chord length scales with the disc area
    big = ProcessParams(2, 1, 1.0, 3.0)
    assert expected_intrinsic_volume(big, 1) == pytest.approx(9 * math.pi, rel=1e-13)


def test_line_process_low_order_values():
    assert central_moment_exact(LINE, 1, 2) == pytest.approx(16 / 3, rel=1e-13)
    assert central_moment_exact(LINE, 1, 3) == pytest.approx(3 * math.pi, rel=1e-13)
    assert central_moment_exact(LINE, 1, 4) == pytest.approx(102.4, rel=1e-13)
    assert cumulant_exact(LINE, 1, 4) == pytest.approx(256 / 15, rel=1e-13)
    assert cumulant_exact(LINE, 1, 1) == 0.0
    assert central_moment_exact(LINE, 1, 1) == 0.0


def test_first_order_is_centred():
    for p in (LINE, ProcessParams(4, 2, 0.7, 2.0)):
        for j in range(p.k + 1):
            assert central_moment_exact(p, j, 1) == 0.0
            assert cumulant_exact(p, j, 1) == 0.0


def test_moment_routes_agree():
    # partition sum, order recursion, and cumulant-recursion inversion all
    # produce the same moments; differences are measured against the moment
    # scale, which is the scale the recursions subtract at
    p = ProcessParams(3, 2, 1.5, 2.0)
    for j in range(3):
        mu = central_moment_sequence(p, j, 10)
        gamma = cumulant_sequence(p, j, 10)
        np.testing.assert_allclose(
            moments_from_cumulants(gamma), mu, rtol=1e-11, atol=1e-20
        )
        back = cumulants_from_moments(mu)
        for m in range(1, 11):
            scale = max(1.0, abs(mu[m - 1]))
            assert abs(back[m - 1] - gamma[m - 1]) <= 1e-11 * scale
        assert max(verify_moment_recursion(p, j, 10)) < 1e-12


def test_variance_is_second_cumulant():
    for p in (LINE, ProcessParams(4, 1, 2.0, 0.5)):
        for j in range(p.k + 1):
            assert central_moment_exact(p, j, 2) == pytest.approx(
                cumulant_exact(p, j, 2), rel=1e-13
            )


def test_intensity_enters_by_block_count():
    # doubling the intensity doubles every cumulant but not moments
    p1 = ProcessParams(3, 1, 1.0, 1.0)
    p2 = ProcessParams(3, 1, 2.0, 1.0)
    for m in range(2, 8):
        assert cumulant_exact(p2, 1, m) == pytest.approx(
            2 * cumulant_exact(p1, 1, m), rel=1e-12
        )
    assert central_moment_exact(p2, 1, 4) != pytest.approx(
        2 * central_moment_exact(p1, 1, 4), rel=1e-3
    )


def test_normalized_fourth_moment_rule():
    for rho in (1.0, 10.0, 100.0):
        p = ProcessParams(2, 1, 1.0, rho)
        ratio = central_moment_exact(p, 1, 4) / central_moment_exact(p, 1, 2) ** 2
        assert ratio == pytest.approx(3 + 0.6 / rho, rel=1e-12)


def test_normalized_moment_limits():
    assert normalized_moment_limit(1) == 0.0
    assert normalized_moment_limit(2) == 1.0
    assert normalized_moment_limit(3) == 0.0
    assert normalized_moment_limit(4) == 3.0
    assert normalized_moment_limit(6) == 15.0
    assert normalized_moment_limit(8) == 105.0
    assert normalized_moment_limit(7) == 0.0


def test_asymptotic_cumulant_is_exact_rescaling():
    # cumulants are exactly homogeneous in the radius
    p = ProcessParams(3, 2, 1.5, 1.0)
    for m in (2, 3, 5):
        term = asymptotic_cumulant(p, 1, m)
        for rho in (2.0, 7.0):
            pr = ProcessParams(3, 2, 1.5, rho)
            assert cumulant_exact(pr, 1, m) == pytest.approx(
                term.coefficient * rho**term.rho_exponent, rel=1e-12
            )


def test_asymptotic_moment_leading_terms():
    # even order: (m-1)!! (tau a_2)^(m/2); odd order: pair-dominated with
    # a single triple block
    tau = 1.0
    a2, a3 = 16 / 3, 3 * math.pi
    even = asymptotic_moment(LINE, 1, 4)
    assert even.rho_exponent == 4 + 2
    assert even.coefficient == pytest.approx(3 * (tau * a2) ** 2, rel=1e-13)
    odd = asymptotic_moment(LINE, 1, 5)
    assert odd.rho_exponent == 5 + 2
    assert odd.coefficient == pytest.approx(
        math.comb(5, 3) * double_factorial(1) * a3 * a2, rel=1e-13
    )
    assert odd.coefficient == pytest.approx(160 * math.pi, rel=1e-13)


def test_asymptotic_moment_dominates_at_large_radius():
    for m in (4, 5, 6, 7):
        term = asymptotic_moment(LINE, 1, m)
        rho = 1e4
        pr = ProcessParams(2, 1, 1.0, rho)
        exact = central_moment_exact(pr, 1, m)
        assert exact == pytest.approx(
            term.coefficient * rho**term.rho_exponent, rel=1e-3
        )


def test_normalized_moments_approach_gaussian():
    rho = 1e6
    p = ProcessParams(2, 1, 1.0, rho)
    var = central_moment_exact(p, 1, 2)
    for m in (3, 4, 5, 6):
        norm = central_moment_exact(p, 1, m) / var ** (m / 2)
        assert norm == pytest.approx(normalized_moment_limit(m), abs=1e-2)


def test_berry_esseen_bound_value_and_scaling():
    assert berry_esseen_bound(LINE, 1) == pytest.approx(
        42 * 3 * math.pi / (16 / 3) ** 1.5, rel=1e-12
    )
    four_rho = ProcessParams(2, 1, 1.0, 4.0)
    assert berry_esseen_bound(four_rho, 1) == pytest.approx(
        berry_esseen_bound(LINE, 1) / 2, rel=1e-12
    )
    four_tau = ProcessParams(2, 1, 4.0, 1.0)
    assert berry_esseen_bound(four_tau, 1) == pytest.approx(
        berry_esseen_bound(LINE, 1) / 2, rel=1e-12
    )


def test_covariance_matrix_structure():
    p = ProcessParams(3, 2, 1.0, 1.0)
    c = covariance_matrix(p)
    assert c.shape == (3, 3)
    assert np.array_equal(np.diag(c), np.ones(3))
    np.testing.assert_allclose(c, c.T, rtol=0, atol=0)
    assert np.linalg.eigvalsh(c).min() > -1e-10
    assert c[0, 1] == pytest.approx(0.961912, abs=1e-6)
    assert c[0, 2] == pytest.approx(0.912871, abs=1e-6)


def test_covariance_matrix_ignores_intensity_and_radius():
    base = covariance_matrix(ProcessParams(3, 2, 1.0, 1.0))
    for tau, rho in ((0.3, 1.0), (1.0, 9.0), (5.0, 0.25)):
        other = covariance_matrix(ProcessParams(3, 2, tau, rho))
        np.testing.assert_allclose(other, base, rtol=1e-12)


def test_covariance_matrix_depends_on_codimension():
    thin = covariance_matrix(ProcessParams(3, 1, 1.0, 1.0))
    thick = covariance_matrix(ProcessParams(2, 1, 1.0, 1.0))
    assert thin[0, 1] != pytest.approx(thick[0, 1], rel=1e-3)
    sgn = covariance_matrix(
        ProcessParams(3, 1, 1.0, 1.0, MeasureConvention.SIGNED_DISTANCE)
    )
    assert sgn[0, 1] == pytest.approx(thick[0, 1], rel=1e-12)


def test_moment_report_consistency():
    p = ProcessParams(3, 2, 0.8, 1.5)
    rep = moment_report(p, 1, 8)
    assert rep.mean == pytest.approx(expected_intrinsic_volume(p, 1), rel=1e-13)
    assert rep.variance == pytest.approx(cumulant_exact(p, 1, 2), rel=1e-13)
    assert len(rep.central_moments) == 8
    assert len(rep.cumulants) == 8
    assert rep.central_moments[1] == pytest.approx(rep.cumulants[1], rel=1e-13)


def test_order_bounds_are_enforced():
    with pytest.raises(OrderOutOfRange):
        central_moment_exact(LINE, 1, 0)
    with pytest.raises(OrderOutOfRange):
        central_moment_exact(LINE, 1, 25)
    with pytest.raises(OrderOutOfRange):
        cumulant_exact(LINE, 1, 0)

"""Integral representation v(r) of the nonlinearity against the log kernel.

For m = 1 the spherical average of the kernel has the closed form
log(s / max(r, s)), which pins the angular quadrature; the m = 2 standard
solution pins the full pipeline because u - v must be constant.
"""

import math

import numpy as np
import pytest

from polyliouville.represent import (
    KernelCache,
    compute_lap_v,
    compute_v,
    fit_even_polynomial,
    kernel_avg,
    rescale_check,
)
from polyliouville.shooter import shoot, standard_config


def test_kernel_average_m1_closed_form():
    for r, s in [(0.5, 2.0), (2.0, 0.5), (1.3, 1.3), (0.0, 1.0), (3.0, 3.0)]:
        expected = math.log(s / max(r, s))
        assert kernel_avg(r, s, 1) == pytest.approx(expected, abs=1e-10)


def test_kernel_average_weights_normalized():
    cache = KernelCache(2, 96)
    assert np.sum(cache.base_w) == pytest.approx(1.0, rel=1e-13)
    assert np.sum(cache.fine_w) == pytest.approx(1.0, rel=1e-13)


def test_kernel_higher_order_at_origin():
    # the iterated kernel reduces to the power law r^{-2j} when s = 0
    assert kernel_avg(3.0, 0.0, 2, j=1) == pytest.approx(3.0**-2, rel=1e-14)
    assert kernel_avg(2.0, 0.0, 3, j=2) == pytest.approx(2.0**-4, rel=1e-14)
    with pytest.raises(ValueError):
        kernel_avg(0.0, 0.0, 2, j=1)


def test_compute_v_standard_m2(std2):
    traj, _ = std2
    radii = np.linspace(0.0, 20.0, 21)
    prof = compute_v(traj, radii)
    exact = -np.log(1.0 + radii**2)
    err = np.abs(prof.values - exact)
    assert np.max(err) < 5e-6
    # reported bars must cover the actual deviation
    assert np.all(err <= prof.err + 1e-12)


def test_u_minus_v_is_constant(std2):
    traj, _ = std2
    radii = np.linspace(0.0, 20.0, 41)
    prof = compute_v(traj, radii)
    u = np.interp(radii, traj.grid, traj.u)
    gap = u - prof.values
    assert np.max(gap) - np.min(gap) < 1e-4
    assert np.median(gap) == pytest.approx(math.log(2.0), abs=1e-4)


def test_far_field_log_slope(std2):
    traj, rep = std2
    radii = np.array([500.0, 1000.0])
    prof = compute_v(traj, radii)
    slope = (prof.values[1] - prof.values[0]) / math.log(2.0)
    assert slope == pytest.approx(-2.0 * rep.alpha_final, rel=0.01)
    assert prof.values[1] / math.log(1000.0) == pytest.approx(-2.0, rel=0.05)


def test_compute_lap_v_matches_trajectory(std2):
    traj, _ = std2
    radii = np.array([2.0, 5.0, 10.0])
    prof = compute_lap_v(traj, 1, radii)
    w1 = traj.sample_w(1, radii)
    diff = np.abs(prof.values - w1)
    assert np.max(diff) < 5e-6
    assert np.all(diff <= prof.err + 1e-12)


def test_compute_lap_v_validates_order(std2):
    traj, _ = std2
    with pytest.raises(ValueError):
        compute_lap_v(traj, 2, [1.0])
    with pytest.raises(ValueError):
        compute_lap_v(traj, 0, [1.0])


def test_rescale_covariance(std2):
    traj, _ = std2
    assert rescale_check(traj, 1.0) < 1e-14
    assert rescale_check(traj, 2.0) < 1e-8


def test_nonstandard_profile_supported(nonstd2):
    # the source decays faster than any power here; the tail guard must accept
    traj, rep = nonstd2
    radii = np.geomspace(1.0, 400.0, 12)
    prof = compute_v(traj, radii)
    assert np.all(np.isfinite(prof.values))
    u = np.interp(radii, traj.grid, traj.u)
    fit = fit_even_polynomial((radii, u - prof.values), 2)
    assert fit.inferred_degree == 2
    assert fit.leading_coefficient == pytest.approx(
        rep.delta_limits[0].value / 8.0, rel=1e-3
    )


def test_truncated_trajectory_rejected():
    traj, _ = shoot(standard_config(2, r_end=5.0))
    with pytest.raises(ValueError):
        compute_v(traj, [1.0])


def test_fit_wrapper_accepts_pairs():
    r = np.linspace(1.0, 4.0, 10)
    fit = fit_even_polynomial((r, 3.0 - 2.0 * r**2), 4)
    assert fit.inferred_degree == 2
    assert fit.leading_coefficient == pytest.approx(-2.0, rel=1e-10)
    pairs = list(zip(r, 3.0 - 2.0 * r**2))
    fit2 = fit_even_polynomial(pairs, 4)
    assert fit2.inferred_degree == 2

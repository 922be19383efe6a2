"""Radial shooting for (-Delta)^m u = (2m-1)! e^{2mu} on R^{2m}.

The closed-form family u(r) = log(2 lam / (1 + lam^2 r^2)) is the oracle for
every accuracy claim; its conformal volume is 1 and its curvature statistic
equals 2m(2m-1) identically.
"""

import math

import numpy as np
import pytest

from polyliouville.shooter import (
    ShootingConfig,
    conformal_factor_ratio,
    derivs_to_laplacians,
    diagnose,
    scalar_curvature,
    series_start,
    shoot,
    standard_config,
    standard_laplacians,
    standard_solution,
)

LOG2 = math.log(2.0)


class TestStandardSolution:
    def test_closed_form_values(self):
        r = np.array([0.0, 0.5, 1.0, 3.0])
        for m, lam in [(1, 1.0), (2, 0.5), (3, 2.0)]:
            sol = standard_solution(m, lam, r)
            np.testing.assert_allclose(
                sol.u, np.log(2 * lam / (1 + lam**2 * r**2)), rtol=1e-15
            )

    def test_derivative_matches_difference_quotient(self):
        r = np.array([0.5, 1.0, 2.0])
        h = 1e-6
        sol = standard_solution(2, 1.0, r)
        num = (standard_solution(2, 1.0, r + h).u - standard_solution(2, 1.0, r - h).u) / (2 * h)
        np.testing.assert_allclose(sol.du, num, atol=1e-9)

    def test_offset_center(self):
        r = np.array([0.5, 1.0])
        sol = standard_solution(2, 1.0, r, x0_offset=0.25)
        np.testing.assert_allclose(
            sol.u, np.log(2 / (1 + np.abs(r - 0.25) ** 2)), rtol=1e-14
        )

    def test_two_sided_log_asymptotics(self):
        # for lam = 2 the profile sits inside the strip -2 log r +- 0.1 log r
        traj, _ = shoot(standard_config(2, lam=2.0))
        far = traj.grid >= 100.0
        gap = np.abs(traj.u[far] + 2.0 * np.log(traj.grid[far]))
        assert np.all(gap <= 0.1 * np.log(traj.grid[far]))


class TestInitialData:
    def test_standard_laplacians_hand_values(self):
        assert standard_laplacians(1, 1.0) == pytest.approx((LOG2,))
        assert standard_laplacians(2, 1.0) == pytest.approx((LOG2, -8.0))
        assert standard_laplacians(3, 1.0) == pytest.approx((LOG2, -12.0, 192.0))

    def test_derivs_to_laplacians(self):
        assert derivs_to_laplacians(1, (0.3,)) == pytest.approx((0.3,))
        assert derivs_to_laplacians(2, (LOG2, -2.0)) == pytest.approx((LOG2, -8.0))
        assert derivs_to_laplacians(3, (LOG2, -2.0, 12.0)) == pytest.approx(
            (LOG2, -12.0, 192.0)
        )

    def test_config_rejects_inconsistent_styles(self):
        with pytest.raises(ValueError):
            ShootingConfig(m=2, initial_laplacians=(0.1, 0.2), initial_derivatives=(0.1, 0.2))
        with pytest.raises(ValueError):
            ShootingConfig(m=2)
        with pytest.raises(ValueError):
            ShootingConfig(m=0, initial_laplacians=())
        with pytest.raises(ValueError):
            ShootingConfig(m=2, initial_laplacians=(0.1,))

    def test_series_start_small_radius_expansion(self):
        cfg = ShootingConfig(m=1, initial_laplacians=(0.0,), r_end=10.0)
        r0, state = series_start(cfg)
        # u = -r^2/4 + O(r^4) when u(0) = 0 and m = 1
        assert state[0] == pytest.approx(-(r0**2) / 4, rel=1e-4)
        assert state[1] == pytest.approx(-r0 / 2, rel=1e-4)


class TestStandardShots:
    def test_m2_tracks_closed_form(self, std2):
        traj, rep = std2
        assert rep.termination == "reached_end"
        mask = traj.grid <= 50.0
        exact = standard_solution(2, 1.0, traj.grid[mask]).u
        assert np.max(np.abs(traj.u[mask] - exact)) < 1e-6
        assert abs(rep.alpha_final - 1.0) < 1e-8

    def test_m2_curvature_constant(self, std2):
        traj, _ = std2
        rg = scalar_curvature(traj)
        mask = traj.grid <= 10.0
        assert np.max(np.abs(rg[mask] - 12.0)) < 1e-6

    def test_m3_tracks_closed_form(self, std3):
        traj, rep = std3
        mask = traj.grid <= 50.0
        exact = standard_solution(3, 1.0, traj.grid[mask]).u
        assert np.max(np.abs(traj.u[mask] - exact)) < 1e-6
        rg = scalar_curvature(traj)
        assert np.max(np.abs(rg[traj.grid <= 10.0] - 30.0)) < 1e-4

    def test_m1_volume_sweep(self):
        for lam in (0.5, 1.0, 2.0):
            traj, rep = shoot(standard_config(1, lam=lam))
            assert abs(rep.alpha_final - 1.0) < 1e-3

    def test_alpha_is_nondecreasing(self, std2):
        traj, _ = std2
        assert np.all(np.diff(traj.alpha) >= -1e-15)

    def test_conformal_factor_self_consistency(self, std2):
        traj, _ = std2
        ratio = conformal_factor_ratio(traj)
        assert np.max(np.abs(ratio - 1.0)) < 1e-6

    def test_sample_w_interpolates_laplacian(self, std2):
        traj, _ = std2
        radii = np.array([0.5, 1.0, 2.0])
        # Delta u = -(8 + 4 r^2) / (1 + r^2)^2 for the lam = 1 profile in R^4
        exact = -(8 + 4 * radii**2) / (1 + radii**2) ** 2
        np.testing.assert_allclose(traj.sample_w(1, radii), exact, rtol=1e-6)


class TestNonstandardShot:
    def test_alpha_and_limit_frozen_values(self, nonstd2):
        traj, rep = nonstd2
        assert rep.termination == "reached_end"
        assert rep.alpha_final == pytest.approx(0.21332616180327657, rel=1e-6)
        lim = rep.delta_limits[0]
        assert lim.value == pytest.approx(-7.630864450107209, rel=1e-6)
        assert lim.confidence / abs(lim.value) < 0.01

    def test_curvature_unbounded_below(self, nonstd2):
        traj, _ = nonstd2
        rg = scalar_curvature(traj)
        assert np.min(rg[traj.grid <= 10.0]) < -1e6

    def test_limit_and_curvature_coherent(self, nonstd2):
        # lim Delta u < 0 forces the curvature statistic to blow down
        traj, rep = nonstd2
        assert rep.delta_limits[0].value < -1e-3
        assert np.min(scalar_curvature(traj)) < -1e6


class TestTermination:
    def test_blowup_is_flagged(self):
        cfg = ShootingConfig(
            m=2, initial_laplacians=(LOG2, 2.0), r_end=50.0, blowup_threshold=10.0
        )
        traj, rep = shoot(cfg)
        assert rep.termination == "blowup"
        assert traj.r_max < 2.0
        assert np.all(np.isfinite(traj.w[-1]))

    def test_diagnose_consistent_with_trajectory(self, std2):
        traj, _ = std2
        rep = diagnose(traj)
        assert rep.m == traj.m
        assert rep.r_reached == traj.r_max
        assert rep.alpha_final == traj.alpha_final


class TestTrajectoryCsv:
    def test_header_and_round_numbers(self, tmp_path, std2):
        traj, _ = std2
        path = tmp_path / "traj.csv"
        traj.to_csv(path)
        with open(path) as fh:
            header = fh.readline().strip()
            first = fh.readline().strip()
        assert header == "r,w0,p0,w1,p1,alpha_R,R_scalar"
        assert first.split(",")[0] == "0"

    def test_rescaled_matches_scaled_family(self, std2):
        traj, _ = std2
        resc = traj.rescaled(2.0)
        exact = standard_solution(2, 2.0, resc.grid).u
        # far-field integration error of the underlying shot dominates here
        assert np.max(np.abs(resc.u - exact)) < 5e-6

"""Dynamical variance on the circle: exact bookkeeping, sampling, coboundaries."""
import math

import numpy as np
import pytest

from bvlab.dynamics import (BlaschkeMap, CirclePotential, birkhoff_variance_exact,
                            birkhoff_variance_mc, coboundary_check,
                            ks_uniform_statistic, log_deriv_mean,
                            mean_relation_check, orbit_angles)
from bvlab.errors import ValidationError


class TestExactVariance:
    def test_single_negative_frequency_is_one(self):
        for d in (2, 3, 5):
            phi = CirclePotential.from_map({-(d - 1): 1.0})
            for n in (1, 4, 9):
                assert birkhoff_variance_exact(phi, d, n) == pytest.approx(1.0, abs=1e-15)

    def test_zero_potential(self):
        assert birkhoff_variance_exact(CirclePotential.from_map({}), 2, 5) == 0.0

    def test_mean_zero_required(self):
        with pytest.raises(ValidationError):
            birkhoff_variance_exact(CirclePotential.from_map({0: 1.0}), 2, 3)

    def test_collision_bookkeeping(self):
        # phi = z + z^2 under doubling: frequency 2 collides at n >= 2
        phi = CirclePotential.from_map({1: 1.0, 2: 1.0})
        # S_2 phi has frequencies {1: 1, 2: 1+1, 4: 1}: integral = (1+4+1)/2
        assert birkhoff_variance_exact(phi, 2, 2) == pytest.approx(3.0)

    def test_variance_differences_decay(self):
        rng = np.random.Generator(np.random.Philox(99))
        for d in (2, 3):
            for _ in range(5):
                freqs = rng.choice(np.arange(-5, 6), size=3, replace=False)
                coeffs = {int(m): complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                          for m in freqs if m != 0}
                phi = CirclePotential.from_map(coeffs)
                var = [birkhoff_variance_exact(phi, d, n) for n in (2, 4, 8, 16, 32)]
                gaps = [abs(b - a) for a, b in zip(var, var[1:])]
                assert all(x >= y - 1e-12 for x, y in zip(gaps, gaps[1:]))


class TestMonteCarlo:
    def test_matches_exact_path(self):
        phi = CirclePotential.from_map({-1: 1.0, 1: 1.0})
        exact = birkhoff_variance_exact(phi, 2, 10)
        est, err = birkhoff_variance_mc(phi, BlaschkeMap.power(2), 10, 40000, seed=11)
        assert abs(est - exact) <= 3 * err

    def test_constant_after_mean_removal(self):
        phi = CirclePotential.from_map({0: 2.5})
        est, err = birkhoff_variance_mc(phi, BlaschkeMap.power(2), 5, 1000, seed=3)
        assert est == 0.0 and err == 0.0

    def test_reproducible_under_seed(self):
        phi = CirclePotential.from_map({-1: 0.5, 2: 1.0})
        b = BlaschkeMap((0.3 + 0j,))
        a1 = birkhoff_variance_mc(phi, b, 8, 5000, seed=7)
        a2 = birkhoff_variance_mc(phi, b, 8, 5000, seed=7)
        assert a1 == a2
        a3 = birkhoff_variance_mc(phi, b, 8, 5000, seed=8)
        assert a1 != a3

    def test_nontrivial_blaschke_stable_under_depth(self):
        phi = CirclePotential.from_map({-1: 0.5, 1: 0.5})   # Re z
        b = BlaschkeMap((0.3 + 0j,))
        e1, s1 = birkhoff_variance_mc(phi, b, 16, 60000, seed=5)
        e2, s2 = birkhoff_variance_mc(phi, b, 32, 60000, seed=6)
        assert abs(e1 - e2) <= 3 * (s1 + s2)
        assert e1 > 0


class TestLogDerivative:
    def test_pure_powers_exact(self):
        assert log_deriv_mean(BlaschkeMap.power(2)) == math.log(2)
        assert log_deriv_mean(BlaschkeMap.power(20)) == math.log(20)

    def test_blaschke_positive_and_matches_orbit_average(self):
        b = BlaschkeMap((0.5 + 0j,))
        quad = log_deriv_mean(b)
        assert quad > 0
        # orbit average over the invariant measure
        rng = np.random.Generator(np.random.Philox(123))
        z = np.exp(1j * rng.uniform(0, 2 * math.pi, 200))
        total = []
        for _ in range(400):
            total.append(b.log_abs_derivative(z))
            z = b.apply_circle(z)
        samples = np.concatenate(total)
        mc = float(np.mean(samples))
        stderr = float(np.std(samples) / math.sqrt(400 * 200 / 10.0))  # correlated
        assert abs(mc - quad) <= 3 * stderr

    def test_circle_preserved(self):
        b = BlaschkeMap((0.4 + 0.2j, -0.1 + 0.6j))
        th = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        w = b.apply(np.exp(1j * th))
        assert np.max(np.abs(np.abs(w) - 1.0)) <= 1e-12

    def test_zero_validation(self):
        with pytest.raises(ValidationError):
            BlaschkeMap((1.2 + 0j,))


class TestCoboundary:
    @pytest.mark.parametrize("d", [2, 3, 20])
    def test_identity(self, d):
        check = coboundary_check(d, 12)
        assert check.residual <= 1e-12
        assert check.rhs == pytest.approx(1.0 / math.log(d), rel=1e-15)

    def test_depth_one_already_exact(self):
        check = coboundary_check(2, 1)
        assert check.residual <= 1e-15


class TestMeanRelation:
    def test_left_side_exact(self):
        assert mean_relation_check().lhs == 1.0

    def test_raw_values_decay_geometrically(self):
        check = mean_relation_check()
        assert check.rhs_values[0] == pytest.approx(1.0, abs=1e-1)
        # at R = 1 + 1e-6 the value is within 1e-2 of the limit
        assert abs(check.rhs_values[4] - 1.0) <= 1e-2
        residuals = [abs(v - 1.0) for v in check.rhs_values]
        assert residuals == sorted(residuals, reverse=True)

    def test_extrapolation(self):
        assert mean_relation_check().residual <= 1e-4


class TestInvariance:
    def test_uniform_starts_stay_uniform(self):
        b = BlaschkeMap((0.3 + 0j,))
        angles = orbit_angles(b, steps=8, samples=100000, seed=42)
        stat = ks_uniform_statistic(angles)
        # 1% critical value of the Kolmogorov-Smirnov statistic
        assert stat <= 1.628 / math.sqrt(len(angles))

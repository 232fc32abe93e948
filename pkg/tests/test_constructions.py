"""Shell builders, lacunary/perturbation fields, truncation and periodisation."""
import math

import pytest

from bvlab.annular import (MonomialTerm, PiecewiseField, cauchy_exterior,
                           cauchy_full, fields_allclose)
from bvlab.constructions import (PerturbationSpec, ShellParams,
                                 build_shell, lacunary_vector_field,
                                 periodise, perturbation_block,
                                 perturbation_vector_field,
                                 shell_beurling_series,
                                 shell_cauchy_identity_check,
                                 truncate_to_polynomial)
from bvlab.errors import CapacityError, ValidationError
from bvlab.formulas import optimal_rho0
from bvlab.variance import variance_lacunary
from conftest import circle


class TestShellParams:
    def test_radii_invariant(self):
        p = ShellParams(d=3, rho0=0.2, shells=8)
        for j in range(8):
            n = p.frequency(j)
            r = math.exp(p.log_radius(j))
            assert r ** n == pytest.approx(0.2, abs=1e-12)
        radii = [math.exp(p.log_radius(j)) for j in range(9)]
        assert radii == sorted(radii)

    def test_default_first_frequency(self):
        assert ShellParams(d=2, rho0=0.25).first_frequency == 2
        assert ShellParams(d=7, rho0=0.2).first_frequency == 6

    def test_capacity(self):
        p = ShellParams(d=16, rho0=0.05, shells=40)
        with pytest.raises(CapacityError):
            p.frequencies()

    def test_real_degree_formula_only(self):
        p = ShellParams(d=2.5, rho0=0.3)
        assert p.delta == pytest.approx(0.3 ** (1 / 2.5) - 0.3)
        with pytest.raises(ValidationError):
            p.degree

    def test_deep_shell_log_radii_keep_accuracy(self):
        # near the circle the plain radius is useless: 1 - r is below an ulp,
        # but the log form keeps r^n = rho0 exact
        p = ShellParams(d=16, rho0=optimal_rho0(16), n0=15, shells=14)
        j = 13
        n = p.frequency(j)
        assert math.exp(n * p.log_radius(j)) == pytest.approx(p.rho0, rel=1e-12)
        assert math.exp(p.log_radius(j)) == 1.0  # the collapse the log form avoids


class TestBuildShell:
    def test_degree2_radii_convention(self):
        p = ShellParams(d=2, rho0=0.25, shells=4)
        mu = build_shell(p)
        radii = sorted(t.r_in for t in mu.terms)
        assert radii == pytest.approx([0.25 ** (0.5 ** (j + 1)) for j in range(4)])

    def test_degree3_first_radius(self):
        rho0 = 3.0 ** (-1.5)
        p = ShellParams(d=3, rho0=rho0, shells=3)
        assert math.exp(p.log_radius(0)) == pytest.approx(rho0 ** 0.5)

    def test_no_shells(self):
        assert build_shell(ShellParams(d=3, rho0=0.2, shells=0)).terms == ()

    def test_unit_modulus_everywhere_on_support(self):
        mu = build_shell(ShellParams(d=3, rho0=0.2, shells=5))
        for z in (circle(0.6, 0.3), circle(0.8, 2.0), circle(0.95, 5.1)):
            assert abs(mu.eval(z)) == pytest.approx(1.0, abs=1e-13)


class TestShellCauchyIdentity:
    """C(mu) = -(2d/(d-1)) (rho0^(1/d) - rho0) v on |z| > 1, v the lacunary field."""

    def test_degree3(self):
        params = ShellParams(d=3, rho0=0.2, shells=10)
        res, _ = shell_cauchy_identity_check(params, [circle(1.5, 0.7)])
        assert res <= 1e-10

    def test_large_argument(self):
        mu = build_shell(ShellParams(d=3, rho0=0.2, shells=6))
        lac = lacunary_vector_field(3, 6)
        for R in (10.0, 100.0):
            assert abs(cauchy_exterior(mu).eval(R)) <= 2.0 / R
            assert abs(lac.v.eval(R)) <= 1.0 / R

    def test_degree20_near_circle(self):
        params = ShellParams(d=20, rho0=optimal_rho0(20), shells=4)
        res, tail = shell_cauchy_identity_check(params, [circle(1.05, 2.0)])
        assert res <= tail + 1e-12

    def test_degree2_rejected(self):
        with pytest.raises(ValidationError):
            shell_cauchy_identity_check(ShellParams(d=2, rho0=0.25, shells=4), [2.0])

    def test_transform_coefficients_match_lacunary_derivative(self):
        # S mu and -(2d/(d-1)) delta v' agree coefficient by coefficient,
        # exactly, for the base construction n0 = d - 1
        for d in (3, 5, 20):
            params = ShellParams(d=d, rho0=optimal_rho0(d), shells=6)
            s = shell_beurling_series(params)
            lac = lacunary_vector_field(d, 6)
            scale = -(2.0 * d / (d - 1.0)) * params.delta
            assert set(s.coeffs) == set(lac.v_prime.coeffs)
            for k in s.coeffs:
                assert s.coeffs[k] == pytest.approx(scale * lac.v_prime.coeffs[k],
                                                    rel=1e-13)


class TestLacunaryField:
    def test_functional_equation_residual(self):
        lac = lacunary_vector_field(2, 8)
        for k in range(10):
            z = circle(1.2 + 0.1 * k, 0.5 + 0.6 * k)
            res, bound = lac.functional_equation_residual(z)
            assert res <= bound * (1 + 1e-9) + 1e-15

    def test_degree2_constant(self):
        lac = lacunary_vector_field(2, 5)
        assert lac.constant == pytest.approx(-0.5)
        assert lacunary_vector_field(3, 5).constant == 0

    def test_derivative_variance_formula(self):
        # sigma^2(v') = (d-1)^2 / (d^2 log d)
        for d in (2, 3, 5):
            lac = lacunary_vector_field(d, 12)
            for n in range(12):
                freq = (d - 1) * d**n
                assert abs(lac.v_prime.coeffs.get(freq, 0.0)) == pytest.approx(
                    (freq - 1) / d ** (n + 1), abs=1e-16)
            # the coefficient moduli tend to (d-1)/d; extend by the formula
            moduli = [(d - 1) / d - (1.0 / d ** (n + 1) if n < 300 else 0.0)
                      for n in range(400)]
            est = variance_lacunary(moduli, d)
            expected = (d - 1) ** 2 / (d * d * math.log(d))
            assert est.value == pytest.approx(expected, rel=1e-2)

    def test_empty(self):
        lac = lacunary_vector_field(2, 0)
        assert lac.v.coeffs == {} and lac.v_prime.coeffs == {}


class TestPerturbation:
    def test_linear_polynomial_reproduces_lacunary(self):
        d = 3
        spec = PerturbationSpec(d=d, q_coeffs=(0.0, -1.0), n_terms=7)
        v = perturbation_vector_field(spec)
        lac = lacunary_vector_field(d, 7)
        assert set(v.coeffs) == set(lac.v.coeffs)
        for k in v.coeffs:
            assert v.coeffs[k] == pytest.approx(lac.v.coeffs[k], rel=1e-14)

    def test_zero_polynomial(self):
        spec = PerturbationSpec(d=4, q_coeffs=(), n_terms=5)
        assert perturbation_vector_field(spec).coeffs == {}

    def test_degree4_frequency_enumeration(self):
        spec = PerturbationSpec(d=4, q_coeffs=(1.0, 0.0, 1.0), n_terms=5)
        v = perturbation_vector_field(spec)
        expected = {}
        for k in range(5):
            expected[4**k * 4 - 1] = 1.0 / 4 ** (k + 1)   # constant coefficient of Q
            expected[4**k * 2 - 1] = 1.0 / 4 ** (k + 1)   # quadratic coefficient
        assert set(v.coeffs) == set(expected)
        for f, c in expected.items():
            assert v.coeffs[f] == pytest.approx(c)

    def test_periodicity_relation(self):
        spec = PerturbationSpec(d=4, q_coeffs=(0.5, -1.0j, 2.0), n_terms=6)
        d = spec.d
        for k in range(4):
            vk = perturbation_block(spec, k)
            vk1 = perturbation_block(spec, k + 1)
            for z in (circle(1.05, 0.3), circle(1.2, 2.0)):
                lhs = vk1.eval(z)
                rhs = vk.eval(z**d) / (d * z ** (d - 1))
                assert abs(lhs - rhs) <= 1e-10

    def test_degree_validation(self):
        with pytest.raises(ValidationError):
            PerturbationSpec(d=3, q_coeffs=(1.0, 1.0, 1.0))


class TestTruncation:
    def annulus_field(self) -> PiecewiseField:
        return PiecewiseField.of(MonomialTerm.make(1.0, 1, 0, -1.0, 0.2, 0.5),
                                 MonomialTerm.make(0.5j, 4, 0, -4.0, 0.2, 0.5))

    def test_worked_example_cutoff(self):
        result = truncate_to_polynomial(self.annulus_field(), 0.7, 0.01)
        assert result.cutoff == 17
        assert result.tail_bound <= 0.01

    def test_low_frequency_field_unchanged(self):
        result = truncate_to_polynomial(self.annulus_field(), 0.7, 0.01)
        # all Cauchy content sits at frequencies 2 and 5, below the cutoff
        assert result.correction_bound == 0.0
        assert fields_allclose(result.field, self.annulus_field(), tol=1e-14)

    def test_high_frequencies_cancelled(self):
        mu = PiecewiseField.of(MonomialTerm.make(1.0, 1, 0, -1.0, 0.2, 0.5),
                               MonomialTerm.make(1.0, 24, 0, -24.0, 0.2, 0.5),
                               MonomialTerm.make(0.3, 39, 0, -39.0, 0.2, 0.5))
        result = truncate_to_polynomial(mu, 0.7, 0.01)
        series = cauchy_exterior(result.field)
        assert result.cutoff == 17
        for k, c in series.coeffs.items():
            if k > result.cutoff:
                assert abs(c) <= 1e-12
        assert abs(series.coeffs[2]) > 0
        # the transform value at the origin is preserved
        assert cauchy_full(result.field).eval(0) == pytest.approx(
            cauchy_full(mu).eval(0), abs=1e-14)

    def test_sup_norm_growth_and_rescale(self):
        mu = PiecewiseField.of(MonomialTerm.make(1.0, 24, 0, -24.0, 0.2, 0.5))
        raw = truncate_to_polynomial(mu, 0.7, 0.05)
        assert raw.correction_bound <= 0.05 + 1e-12
        assert raw.field.sup_norm_sampled() <= 1.0 + raw.correction_bound + 1e-9
        scaled = truncate_to_polynomial(mu, 0.7, 0.05, rescale=True)
        assert scaled.rescaled
        assert scaled.field.sup_norm_sampled() <= 1.0 + 1e-9

    def test_perturbation_stays_below_tolerance_pointwise(self):
        mu = PiecewiseField.of(MonomialTerm.make(1.0, 24, 0, -24.0, 0.2, 0.5))
        result = truncate_to_polynomial(mu, 0.7, 0.05)
        diff = result.field.add(mu.scaled(-1.0))
        assert diff.sup_norm_sampled(96, 48) <= 0.05 + 1e-12

    def test_validation(self):
        with pytest.raises(ValidationError):
            truncate_to_polynomial(self.annulus_field(), 0.4, 0.01)


class TestPeriodise:
    def fundamental_block(self, d: int, r0: float) -> PiecewiseField:
        n = 4
        return PiecewiseField.of(MonomialTerm.make(1.0, n - 2, 0, float(2 - n),
                                                   r0, r0 ** (1.0 / d)))

    def test_three_disjoint_copies(self):
        mu = periodise(self.fundamental_block(2, 0.25), 2, 3)
        assert len(mu.terms) == 3
        spans = sorted((t.log_r_in, t.log_r_out) for t in mu.terms)
        for (a1, b1), (a2, _) in zip(spans, spans[1:]):
            assert b1 <= a2 + 1e-15
        assert mu.sup_norm_sampled() == pytest.approx(1.0, abs=1e-12)

    def test_shell_equals_periodised_first_shell(self):
        params = ShellParams(d=3, rho0=0.2, shells=4)
        shell = build_shell(params)
        innermost = min(shell.terms, key=lambda t: t.log_r_in)
        rebuilt = periodise(PiecewiseField.of(innermost), 3, 4)
        assert fields_allclose(shell, rebuilt, tol=1e-12)

    def test_single_copy_identity(self):
        block = self.fundamental_block(2, 0.3)
        assert periodise(block, 2, 1) == block

    def test_overlap_rejected(self):
        too_wide = PiecewiseField.of(MonomialTerm.make(1.0, 2, 0, -2.0, 0.25, 0.9))
        with pytest.raises(ValidationError):
            periodise(too_wide, 2, 3)

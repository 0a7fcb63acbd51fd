"""Nonlinearity families, their Lipschitz certificates and decay rates."""

import math

import numpy as np
import pytest

from skop import (
    check_psi_lipschitz,
    fit_rate_certificate,
    identity_family,
    make_nonlinearity,
    power_family,
    t_w_product,
)
from skop.errors import ConfigError, NumericError
from skop.metrics import fit_rate


class TestIdentityFamily:
    def test_values(self):
        g = identity_family()
        assert g.eval(7.0, 3.5) == 3.5
        assert g.eval(2.0, 0.0) == 0.0

    def test_lipschitz_with_equality(self):
        g = identity_family()
        rng = np.random.default_rng(0)
        us, vs = rng.uniform(-5, 5, 10**4), rng.uniform(-5, 5, 10**4)
        rep = check_psi_lipschitz(g, (1.0, 5.0, 50.0), us, vs)
        assert rep.violations == 0
        np.testing.assert_allclose(rep.max_ratio, 1.0, rtol=1e-12)


class TestPowerFamily:
    def test_warped_branch_value(self):
        g = power_family(0.1)
        np.testing.assert_allclose(g.eval(2.0, 0.25), 0.5, rtol=1e-14)

    def test_identity_outside_branch(self):
        g = power_family(0.1)
        assert g.eval(3.0, 1.0) == 1.0
        assert g.eval(3.0, 0.05) == 0.05
        assert g.eval(3.0, -0.7) == -0.7
        assert g.eval(3.0, 0.0) == 0.0

    def test_parameter_range_enforced(self):
        for bad in (0.0, 1.0 / math.e, 0.5):
            with pytest.raises(ConfigError):
                power_family(bad)
        with pytest.raises(ConfigError):
            make_nonlinearity("power", 0.9)

    def test_deviation_peaks_at_predicted_point(self):
        """argmax of g_w(u) - u on the warped branch sits at ((w-1)/w)^w."""
        g = power_family(0.1)
        us = np.linspace(0.1 + 1e-9, 1.0 - 1e-9, 200001)
        step = us[1] - us[0]
        for w in (2.0, 4.0, 8.0):
            dev = g.eval(w, us) - us
            u_star = us[np.argmax(dev)]
            predicted = ((w - 1.0) / w) ** w
            assert abs(u_star - predicted) <= 2 * step

    def test_max_deviation_value_at_two(self):
        g = power_family(0.1)
        us = np.linspace(0.1 + 1e-9, 1.0 - 1e-9, 200001)
        np.testing.assert_allclose(np.max(g.eval(2.0, us) - us), 0.25, atol=1e-5)

    def test_uniform_convergence_proxy(self):
        g = power_family(0.1)
        us = np.linspace(-2.0, 2.0, 40001)
        devs = [np.abs(g.eval(w, us) - us).max() for w in (25.0, 50.0, 100.0, 200.0, 400.0)]
        assert all(b < a for a, b in zip(devs, devs[1:]))
        assert devs[3] < 1e-2  # w = 200

    def test_lipschitz_away_from_the_jump(self):
        g = power_family(0.1)
        rng = np.random.default_rng(1)
        us = rng.uniform(0.11, 3.0, 10**4)
        vs = rng.uniform(0.11, 3.0, 10**4)
        rep = check_psi_lipschitz(g, (2.0, 4.0, 16.0, 64.0), us, vs)
        assert rep.violations == 0

    def test_jump_straddling_pairs_are_reported(self):
        g = power_family(0.1)
        us = np.full(100, 0.1 + 1e-6)
        vs = np.full(100, 0.1 - 1e-6)
        rep = check_psi_lipschitz(g, (2.0,), us, vs)
        assert rep.violations == 100
        assert rep.max_ratio > 1.0


class TestConstantReproductionDefect:
    def test_identity_is_exact(self):
        g = identity_family()
        grid = np.linspace(0.05, 3.0, 101)
        for w in (1.0, 8.0, 64.0):
            assert t_w_product(g, 0.0, w, grid) == 0.0

    def test_power_sup_at_branch_edge(self):
        g = power_family(0.1)
        grid = np.concatenate([0.1 + np.geomspace(1e-12, 0.89, 4097), [1.5, 2.0]])
        val = t_w_product(g, 0.0, 2.0, grid)
        np.testing.assert_allclose(val, math.sqrt(10.0) - 1.0, atol=1e-5)

    def test_unity_defect_inflates_conservatively(self):
        g = identity_family()
        grid = np.linspace(0.5, 2.0, 11)
        np.testing.assert_allclose(t_w_product(g, 0.1, 3.0, grid), 0.1, rtol=1e-12)

    def test_zero_in_grid_rejected(self):
        with pytest.raises(NumericError):
            t_w_product(identity_family(), 0.0, 2.0, np.array([0.0, 1.0]))

    def test_decay_slope_near_minus_one(self):
        g = power_family(0.1)
        grid = 0.1 + np.geomspace(1e-12, 0.89, 4097)
        pts = [(w, t_w_product(g, 0.0, w, grid)) for w in (8.0, 16.0, 32.0, 64.0)]
        fit = fit_rate(pts)
        assert -1.15 <= fit.slope <= -0.85


class TestRateCertificate:
    def test_exact_power_law(self):
        cert = fit_rate_certificate([(w, 3.0 / w) for w in (2.0, 4.0, 8.0, 16.0, 32.0)])
        np.testing.assert_allclose(cert.exponent, 1.0, atol=1e-9)
        np.testing.assert_allclose(cert.coefficient, 3.0, rtol=1e-9)

    def test_all_zero_short_circuits(self):
        cert = fit_rate_certificate([(w, 0.0) for w in (2.0, 4.0, 8.0, 16.0)])
        assert cert.exact_zero
        assert math.isinf(cert.exponent) and cert.coefficient == 0.0

    def test_too_few_positive_samples(self):
        with pytest.raises(NumericError):
            fit_rate_certificate([(2.0, 0.1), (4.0, 0.05), (8.0, 0.0), (16.0, 0.0)])

    def test_power_family_exponent_and_domination(self):
        g = power_family(0.1)
        grid = 0.1 + np.geomspace(1e-12, 0.89, 4097)
        ws = (8.0, 16.0, 32.0, 64.0, 128.0)
        samples = [(w, t_w_product(g, 0.0, w, grid)) for w in ws]
        cert = fit_rate_certificate(samples)
        assert 0.85 <= cert.exponent <= 1.15
        for w, t in samples:
            model = cert.coefficient * w ** (-cert.exponent)
            assert t <= model * (1 + 1e-12)
            assert model <= t * 1.15  # over-approximation stays within 15%

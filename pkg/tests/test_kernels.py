"""Kernel profiles, moments, partition of unity and tail behavior."""

import math

import numpy as np
import pytest

from skop import (
    KernelProfile,
    bspline,
    bspline_kernel,
    check_partition_of_unity,
    check_tail_condition,
    continuous_moment,
    discrete_moment,
    fejer,
    fejer_kernel,
    l1_norm,
    make_kernel,
    moment_table,
    sinc,
    uniform_scheme,
)
from skop.errors import ConfigError, TruncationError
from skop.quadrature import integrate


class TestFejer:
    def test_value_at_origin(self):
        assert fejer(0.0) == 0.5

    def test_vanishes_at_even_integers(self):
        assert abs(fejer(2.0)) < 1e-30
        assert abs(fejer(-4.0)) < 1e-30

    def test_value_at_one(self):
        np.testing.assert_allclose(fejer(1.0), 2.0 / math.pi**2, rtol=1e-14)

    def test_even_and_nonnegative(self):
        xs = np.linspace(-40, 40, 20001)
        np.testing.assert_allclose(fejer(xs), fejer(-xs), rtol=0, atol=0)
        assert np.all(fejer(xs) >= 0)

    def test_sinc_normalization(self):
        assert sinc(0.0) == 1.0
        np.testing.assert_allclose(sinc(0.5), 2.0 / math.pi, rtol=1e-14)

    def test_unit_mass(self):
        np.testing.assert_allclose(l1_norm(fejer_kernel()), 1.0, atol=1e-4)


class TestBspline:
    def test_order_two_peak(self):
        assert bspline(2, 0.0) == 1.0

    def test_order_three_center(self):
        np.testing.assert_allclose(bspline(3, 0.0), 0.75, rtol=1e-14)

    def test_zero_outside_support(self):
        for n in (1, 2, 3, 4, 5):
            assert bspline(n, n / 2.0 + 1.0) == 0.0
            assert bspline(n, -(n / 2.0) - 0.25) == 0.0

    def test_even_and_nonnegative(self):
        xs = np.linspace(-3, 3, 4001)
        for n in (2, 3, 4):
            vals = bspline(n, xs)
            np.testing.assert_allclose(vals, bspline(n, -xs), atol=1e-14)
            assert np.all(vals >= 0)

    def test_unit_integral(self):
        k3 = bspline_kernel(3)
        total = integrate(k3, -1.5, 1.5, cells=2048, breakpoints=k3.breakpoints)
        np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_rejects_bad_order(self):
        with pytest.raises(ConfigError):
            bspline(0, 0.0)

    def test_matches_iterated_box_convolution(self):
        """Independent oracle: M_{n+1}(x) = integral of M_n over [x-1/2, x+1/2],
        bootstrapped from the box, never from the alternating-sum formula."""

        def box_ind(x):
            x = np.asarray(x, dtype=float)
            return ((x >= -0.5) & (x < 0.5)).astype(float)

        def conv_with_box(g, kinks):
            def out(x):
                xs = np.atleast_1d(np.asarray(x, dtype=float))
                vals = [
                    integrate(g, xv - 0.5, xv + 0.5, cells=64,
                              breakpoints=[k for k in kinks if xv - 0.5 < k < xv + 0.5])
                    for xv in xs
                ]
                return np.array(vals)

            return out

        m2_oracle = conv_with_box(box_ind, (-0.5, 0.5))
        xs = np.linspace(-1.6, 1.6, 41)
        np.testing.assert_allclose(bspline(2, xs), m2_oracle(xs), atol=1e-6)

        m3_oracle = conv_with_box(m2_oracle, (-1.0, 0.0, 1.0))
        xs3 = np.linspace(-1.9, 1.9, 21)
        np.testing.assert_allclose(bspline(3, xs3), m3_oracle(xs3), atol=1e-6)


class TestProfiles:
    def test_signed_profile_rejected(self):
        from skop.kernels import _validate_profile

        with pytest.raises(ConfigError, match="signed"):
            _validate_profile(KernelProfile(name="bad", fn=np.cos, support_bound=3.0))

    def test_table_kernel_roundtrip(self, tmp_path):
        path = tmp_path / "hatk.txt"
        np.savetxt(path, np.array([[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))
        k = make_kernel("table", str(path))
        assert k.support_bound == 1.0
        np.testing.assert_allclose(k(np.array([-0.5, 0.0, 0.25])), [0.5, 1.0, 0.75])
        np.testing.assert_allclose(l1_norm(k), 1.0, atol=1e-12)

    def test_table_kernel_signed_rejected(self, tmp_path):
        path = tmp_path / "signed.txt"
        np.savetxt(path, np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]]))
        with pytest.raises(ConfigError, match="signed"):
            make_kernel("table", str(path))

    def test_unknown_kernel_rejected(self):
        with pytest.raises(ConfigError):
            make_kernel("gaussian")


class TestDiscreteMoments:
    def test_fejer_mass_one(self):
        scheme = uniform_scheme(10**4 + 16)
        m0 = discrete_moment(fejer_kernel(), scheme, 0.0)
        np.testing.assert_allclose(m0, 1.0, atol=1e-3)

    def test_bspline_mass_one(self):
        scheme = uniform_scheme(8)
        m0 = discrete_moment(bspline_kernel(3), scheme, 0.0)
        np.testing.assert_allclose(m0, 1.0, atol=1e-10)

    def test_bspline_first_moment(self):
        # sup_u sum_k M_2(u - k) |u - k| = 2 * u(1-u) at u = 1/2
        scheme = uniform_scheme(8)
        m1 = discrete_moment(bspline_kernel(2), scheme, 1.0)
        np.testing.assert_allclose(m1, 0.5, atol=1e-9)

    def test_stable_under_radius_doubling(self):
        scheme = uniform_scheme(2 * 10**4 + 16)
        a = discrete_moment(fejer_kernel(), scheme, 0.0, radius=10**4)
        b = discrete_moment(fejer_kernel(), scheme, 0.0, radius=2 * 10**4)
        assert abs(a - b) <= 0.01 * abs(b)

    def test_divergent_order_flagged_infinite(self):
        scheme = uniform_scheme(10**4 + 16)
        assert discrete_moment(fejer_kernel(), scheme, 1.0) == math.inf

    def test_insufficient_radius_raises(self):
        scheme = uniform_scheme(128)
        with pytest.raises(TruncationError, match="insufficient truncation radius"):
            discrete_moment(fejer_kernel(), scheme, 0.5, radius=50.0)

    def test_moment_table_flags(self):
        scheme = uniform_scheme(10**4 + 16)
        table = moment_table(fejer_kernel(), scheme, betas=(0.5,), nus=(0.5, 1.0))
        assert table.entry_finite("m_nu", 0.5)
        assert not table.entry_finite("m_nu", 1.0)
        assert math.isfinite(table.m0)


class TestContinuousMoments:
    def test_bspline_zeroth_moment(self):
        np.testing.assert_allclose(continuous_moment(bspline_kernel(2), 0.0), 1.0, atol=1e-10)

    def test_bspline_second_moment(self):
        np.testing.assert_allclose(continuous_moment(bspline_kernel(2), 2.0), 1.0 / 6.0, rtol=1e-10)

    def test_fejer_first_moment_infinite(self):
        assert continuous_moment(fejer_kernel(), 1.0) == math.inf

    def test_fejer_half_moment_radius_agreement(self):
        a = continuous_moment(fejer_kernel(), 0.5, radius=10**3)
        b = continuous_moment(fejer_kernel(), 0.5, radius=10**4)
        assert abs(a - b) / b < 1e-3


class TestPartitionOfUnity:
    def test_bsplines_are_exact(self):
        for n in (2, 3, 4):
            report = check_partition_of_unity(bspline_kernel(n), radius=n)
            assert report.max_deviation <= 1e-12

    def test_fejer_within_truncation_tail(self):
        report = check_partition_of_unity(fejer_kernel(), radius=10**4)
        assert report.max_deviation <= 1e-4
        assert report.max_deviation <= report.tail_bound

    def test_scaled_kernel_reports_defect(self):
        doubled = KernelProfile(
            name="2*bspline(2)",
            fn=lambda x: 2.0 * bspline(2, x),
            support_bound=1.0,
            breakpoints=(-1.0, 0.0, 1.0),
        )
        report = check_partition_of_unity(doubled, radius=2)
        np.testing.assert_allclose(report.max_deviation, 1.0, atol=1e-12)


class TestTailCondition:
    def test_compact_support_is_exactly_zero(self):
        fit = check_tail_condition(bspline_kernel(2), 0.5, (2.0, 4.0, 8.0, 16.0))
        assert fit.exact_zero
        assert all(v == 0.0 for v in fit.values)

    def test_single_scale_beyond_support(self):
        fit = check_tail_condition(bspline_kernel(2), 0.5, (9.0,))
        assert fit.exact_zero

    def test_fejer_fit_near_half(self):
        fit = check_tail_condition(fejer_kernel(), 0.5, (16.0, 32.0, 64.0, 128.0, 256.0))
        assert not fit.exact_zero
        assert -0.6 <= -fit.alpha0_fit <= -0.4
        # inflated coefficient dominates every sample
        for w, v in zip(fit.ws, fit.values):
            assert v <= fit.m1_fit * w ** (-fit.alpha0_fit) * (1 + 1e-12)

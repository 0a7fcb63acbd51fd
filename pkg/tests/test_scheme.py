"""Sampling schemes, built-in signals and Kantorovich cell averages."""

import numpy as np
import pytest

from skop import (
    SamplingScheme,
    Signal,
    box,
    cell_means,
    constant,
    gauss,
    hat,
    jittered_scheme,
    kantorovich_mean,
    make_signal,
    root_bump,
    uniform_scheme,
)
from skop.errors import ConfigError, SchemeWindowError


class TestSignals:
    def test_hat_shape(self):
        h = hat(0, 1)
        np.testing.assert_allclose(h(np.array([-1.5, -1.0, 0.0, 0.5, 2.0])), [0, 0, 1, 0.5, 0])
        assert h.kinks == (-1.0, 0.0, 1.0)

    def test_root_bump_edges(self):
        r = root_bump(0, 1)
        np.testing.assert_allclose(r(0.75), 0.5)
        assert r(1.0) == 0.0 and r(-1.2) == 0.0

    def test_box_and_constant(self):
        b = box(0, 1)
        assert b(0.5) == 1.0 and b(1.5) == 0.0
        c = constant(3.0, -1, 1)
        assert c(0.0) == 3.0 and c(2.0) == 0.0

    def test_gauss_support_negligible(self):
        g = gauss(0, 1)
        lo, hi = g.support
        assert g(hi) < 1e-20

    def test_make_signal_rejects_unknown(self):
        with pytest.raises(ConfigError):
            make_signal("bump", 0, 1)
        with pytest.raises(ConfigError):
            make_signal("hat", 0, -1)


class TestSchemes:
    def test_uniform_nodes_and_gaps(self):
        s = uniform_scheme(8)
        assert s.node(0) == 0.0 and s.node(5) == 5.0
        assert s.delta_lo == 1.0 and s.delta_hi == 1.0
        assert np.all(np.diff(s.nodes) == 1.0)

    def test_jitter_zero_amplitude_is_uniform(self):
        j = jittered_scheme(8, 0.0, seed=3)
        np.testing.assert_array_equal(j.nodes, uniform_scheme(8).nodes)

    def test_jitter_gap_bounds(self):
        j = jittered_scheme(64, 0.25, seed=11)
        gaps = np.diff(j.nodes)
        assert gaps.min() >= 0.5 and gaps.max() <= 1.5

    def test_jitter_deterministic_in_seed(self):
        a = jittered_scheme(32, 0.2, seed=7)
        b = jittered_scheme(32, 0.2, seed=7)
        c = jittered_scheme(32, 0.2, seed=8)
        np.testing.assert_array_equal(a.nodes, b.nodes)
        assert np.any(a.nodes != c.nodes)

    def test_amplitude_bound_enforced(self):
        with pytest.raises(ConfigError):
            jittered_scheme(8, 0.45, seed=0)

    def test_window_errors(self):
        s = uniform_scheme(4)
        with pytest.raises(SchemeWindowError):
            s.node(5)


class TestKantorovichMean:
    def test_constant_is_exact(self):
        s = uniform_scheme(8)
        c = constant(3.7, -5, 5)
        assert kantorovich_mean(c, s, 2.0, 1) == pytest.approx(3.7, abs=1e-12)

    def test_linear_gives_midpoint(self):
        s = uniform_scheme(8)
        ramp = Signal(name="ramp", fn=lambda x: x, support=(-10, 10))
        # cell [2/4, 3/4]: average of identity = midpoint 0.625
        np.testing.assert_allclose(kantorovich_mean(ramp, s, 4.0, 2), 0.625, rtol=1e-14)

    def test_box_cell_average(self):
        s = uniform_scheme(4)
        np.testing.assert_allclose(kantorovich_mean(box(0, 1), s, 1.0, 0), 1.0, atol=1e-9)

    def test_kink_inside_cell(self):
        s = uniform_scheme(4)
        # cell [-1/2, 1/2] contains hat's peak; exact area = 3/4
        np.testing.assert_allclose(kantorovich_mean(hat(0, 1), s, 2.0, -1), 0.75, rtol=1e-12)

    def test_translation_consistency(self):
        s = uniform_scheme(8)
        w, k, shift = 4.0, 2, 0.3
        f = root_bump(0.4, 1.0)
        g = Signal(
            name="shifted",
            fn=lambda x: f.fn(x + shift),
            support=(f.support[0] - shift, f.support[1] - shift),
            kinks=tuple(c - shift for c in f.kinks),
        )
        moved = SamplingScheme(
            kind="custom",
            window=s.window,
            nodes=s.nodes - shift * w,
            delta_lo=1.0,
            delta_hi=1.0,
        )
        np.testing.assert_allclose(
            kantorovich_mean(f, s, w, k), kantorovich_mean(g, moved, w, k), atol=1e-10
        )

    def test_monotone_in_signal(self):
        s = uniform_scheme(8)
        f, g = hat(0, 1), constant(1.0, -4, 4)
        for k in (-2, -1, 0, 1):
            assert kantorovich_mean(f, s, 2.0, k) <= kantorovich_mean(g, s, 2.0, k) + 1e-12

    def test_mean_between_extremes(self):
        s = uniform_scheme(8)
        for sig in (hat(0, 1), root_bump(0, 1), gauss(0, 1)):
            for k in (-2, 0, 3):
                lo, hi = s.node(k) / 2.0, s.node(k + 1) / 2.0
                xs = np.linspace(lo, hi, 2001)
                m = kantorovich_mean(sig, s, 2.0, k)
                assert sig(xs).min() - 1e-12 <= m <= sig(xs).max() + 1e-12

    def test_vectorized_matches_single(self):
        s = uniform_scheme(16)
        sig = root_bump(0.2, 1.3)
        w = 5.0
        means = cell_means(sig, s, w, -8, 7)
        singles = [kantorovich_mean(sig, s, w, k) for k in range(-8, 8)]
        np.testing.assert_allclose(means, singles, atol=1e-10)

    def test_invalid_scale_rejected(self):
        with pytest.raises(ConfigError):
            kantorovich_mean(hat(), uniform_scheme(4), -1.0, 0)

import numpy as np
import pytest

from qfock import check_pushforward, gamma_eval, ode_residual
from qfock.involution import split_quadrature
from qfock.moments import moment_pair_partitions


class TestPointwise:
    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_conventions(self, q, pipeline):
        ctx, _, g = pipeline(q)
        vals = g(np.array([-ctx.L, 0.0, ctx.L]))
        assert np.all(vals == 0.0)
        with pytest.raises(ValueError):
            g(np.array([ctx.L * 1.01]))

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_fixed_points(self, q, pipeline):
        ctx, cdf, g = pipeline(q)
        xr = cdf.inv_cdf(np.array([0.75]))[0]
        assert gamma_eval(xr, g)[0] == pytest.approx(xr, abs=1e-8)
        xl = cdf.inv_cdf(np.array([0.25]))[0]
        assert g(np.array([xl]))[0] == pytest.approx(xl, abs=1e-8)

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_involution_on_grid(self, q, pipeline):
        ctx, _, g = pipeline(q)
        xs = np.linspace(-0.99 * ctx.L, 0.99 * ctx.L, 200)
        assert np.max(np.abs(g(g(xs)) - xs)) < 1e-6

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_oddness(self, q, pipeline):
        ctx, _, g = pipeline(q)
        xs = np.linspace(1e-4 * ctx.L, 0.999 * ctx.L, 157)
        assert np.max(np.abs(g(xs) + g(-xs))) < 1e-8

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_strictly_decreasing_on_each_half(self, q, pipeline):
        ctx, _, g = pipeline(q)
        xs = np.linspace(1e-5 * ctx.L, 0.995 * ctx.L, 300)
        assert np.all(np.diff(g(xs)) < 0.0)
        assert np.all(np.diff(g(-xs[::-1])) < 0.0)

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_jump_at_origin(self, q, pipeline):
        # gamma tends to +-L at 0 from either side: monotone climb past the
        # fixed point, and the defining mass relation holds to full accuracy
        ctx, cdf, g = pipeline(q)
        eps = np.array([1e-6, 1e-9, 1e-12]) * ctx.L
        vals = g(eps)
        assert np.all(np.diff(vals) > 0.0)
        xr = cdf.inv_cdf(np.array([0.75]))[0]
        assert np.all(vals > xr)
        assert np.all(g(-eps) == pytest.approx(-vals, abs=1e-12))

    @pytest.mark.parametrize("q", [0.3, 0.9])
    def test_mass_reflection_identity(self, q, pipeline):
        # F(gamma(x)) + F(x) = 3/2 on the right half, = 1/2 on the left
        ctx, cdf, g = pipeline(q)
        xs = np.linspace(0.02 * ctx.L, 0.97 * ctx.L, 41)
        right = cdf.cdf(g(xs)) + cdf.cdf(xs)
        assert np.max(np.abs(right - 1.5)) < 1e-11
        left = cdf.cdf(g(-xs)) + cdf.cdf(-xs)
        assert np.max(np.abs(left - 0.5)) < 1e-11

    def test_interval_measure_preserved(self, pipeline):
        ctx, cdf, g = pipeline(0.5)
        pairs = [(0.2, 0.9), (0.5, 1.7), (1.0, 2.4)]
        for a, b in pairs:
            lhs = cdf.cdf(np.array([b]))[0] - cdf.cdf(np.array([a]))[0]
            ga, gb = g(np.array([a]))[0], g(np.array([b]))[0]
            rhs = cdf.cdf(np.array([ga]))[0] - cdf.cdf(np.array([gb]))[0]
            assert lhs == pytest.approx(rhs, abs=2e-9)


class TestDerivativeRelation:
    def test_residual_small(self, pipeline):
        ctx, cdf, g = pipeline(0.5)
        assert abs(ode_residual(ctx.L / 2, g, 1e-4)) < 1e-5
        xr = cdf.inv_cdf(np.array([0.75]))[0]
        assert abs(ode_residual(xr, g, 1e-4)) < 1e-5

    def test_slope_at_fixed_point(self, pipeline):
        ctx, cdf, g = pipeline(0.5)
        xr = cdf.inv_cdf(np.array([0.75]))[0]
        h = 1e-5
        slope = (g(np.array([xr + h]))[0] - g(np.array([xr - h]))[0]) / (2 * h)
        assert slope == pytest.approx(-1.0, abs=1e-6)

    def test_second_order_convergence(self, pipeline):
        ctx, _, g = pipeline(0.5)
        r1 = ode_residual(ctx.L / 2, g, 1e-2)
        r2 = ode_residual(ctx.L / 2, g, 5e-3)
        assert 3.0 < abs(r1) / abs(r2) < 5.0

    def test_rejects_bad_steps(self, pipeline):
        ctx, _, g = pipeline(0.5)
        with pytest.raises(ValueError):
            ode_residual(1e-5, g, 1e-4)  # straddles the origin
        with pytest.raises(ValueError):
            ode_residual(ctx.L - 1e-6, g, 1e-4)  # leaves the support
        with pytest.raises(ValueError):
            ode_residual(0.0, g, 1e-4)


class TestPushforward:
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    def test_moments_preserved(self, q, pipeline):
        _, _, g = pipeline(q)
        rep = check_pushforward(g, 8)
        assert rep.max_discrepancy < 1e-7
        by_order = {m: mg for m, mg, _, _ in rep.rows}
        assert abs(by_order[1]) < 1e-9
        assert by_order[2] == pytest.approx(1.0, abs=1e-7)
        assert by_order[4] == pytest.approx(2.0 + q, abs=1e-7)
        # the enumeration oracle fixes every even order
        for m in (2, 4, 6, 8):
            assert by_order[m] == pytest.approx(moment_pair_partitions(m, q), abs=1e-7)

    def test_order_cap(self, pipeline):
        _, _, g = pipeline(0.5)
        with pytest.raises(ValueError):
            check_pushforward(g, 14)

    def test_quadrature_mass(self, pipeline):
        _, _, g = pipeline(0.5)
        _, _, wq = split_quadrature(g, 200)
        assert np.sum(wq) == pytest.approx(1.0, abs=1e-12)

import math

import numpy as np
import pytest
from scipy.integrate import quad

from qfock import (
    DensityModel,
    QContext,
    density,
    hermite_basis,
    hermite_eval,
    inv_cdf,
    cdf,
    q_bracket,
    q_factorial,
    q_factorial_log,
    q_pochhammer,
    quadrature,
)
from qfock.moments import moment_pair_partitions

Q_GRID = [0.1, 0.3, 0.5, 0.7, 0.9]


class TestQArithmetic:
    def test_bracket_hand_values(self):
        assert q_bracket(0, 0.5) == 0.0
        assert q_bracket(1, 0.3) == 1.0
        assert q_bracket(3, 0.5) == pytest.approx(1.75, abs=1e-15)

    @pytest.mark.parametrize("q", [-0.2, 0.0, 1.0, 1.5])
    def test_bracket_rejects_bad_q(self, q):
        with pytest.raises(ValueError):
            q_bracket(2, q)

    def test_factorial_hand_values(self):
        assert q_factorial(0, 0.7) == 1.0
        assert q_factorial(2, 0.5) == pytest.approx(1.5, abs=1e-15)
        assert q_factorial(3, 0.5) == pytest.approx(2.625, abs=1e-15)

    @pytest.mark.parametrize("q", Q_GRID)
    def test_factorial_recursion(self, q):
        for n in range(1, 21):
            assert q_factorial(n, q) == pytest.approx(
                q_bracket(n, q) * q_factorial(n - 1, q), rel=1e-15
            )

    def test_factorial_log_consistent(self):
        for n in (5, 20, 50):
            assert q_factorial_log(n, 0.9) == pytest.approx(math.log(q_factorial(n, 0.9)), rel=1e-12)

    def test_pochhammer_finite(self):
        assert q_pochhammer(0.7, 0.5, 0) == 1.0
        assert q_pochhammer(0.5, 0.5, 2) == pytest.approx(0.375, abs=1e-15)

    def test_pochhammer_infinite(self):
        assert q_pochhammer(0.0, 0.5, None) == 1.0
        # truncated value stable under a much tighter tolerance
        a = q_pochhammer(0.5, 0.5, None, tol=1e-12)
        b = q_pochhammer(0.5, 0.5, None, tol=1e-16)
        assert a == pytest.approx(b, abs=1e-11)
        z = q_pochhammer(0.3 + 0.1j, 0.5, None)
        assert isinstance(z, complex)


class TestContext:
    def test_support_halfwidth(self):
        for q in Q_GRID:
            ctx = QContext(q)
            assert ctx.L == 2.0 / math.sqrt(1.0 - q)
            assert ctx.L > 2.0

    @pytest.mark.parametrize("kwargs", [
        {"q": 0.0}, {"q": 1.0}, {"q": -0.5}, {"q": 0.5, "tol_quad": 0.0},
        {"q": 0.5, "tol_product": -1e-9}, {"q": 0.5, "K": 3}, {"q": 0.5, "N": 2},
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            QContext(**kwargs)


class TestDensity:
    @pytest.mark.parametrize("q", [0.3, 0.7])
    def test_support_and_symmetry(self, q):
        ctx = QContext(q)
        model = DensityModel(ctx)
        assert density(ctx.L + 0.1, model)[0] == 0.0
        assert density(-ctx.L - 0.1, model)[0] == 0.0
        xs = np.linspace(0.0, 0.999 * ctx.L, 250)
        assert np.max(np.abs(model(xs) - model(-xs))) < 1e-15
        assert np.all(model(np.linspace(-ctx.L, ctx.L, 2001)) >= 0.0)

    @pytest.mark.parametrize("q", Q_GRID)
    def test_total_mass_adaptive_oracle(self, q):
        # independent oracle: adaptive quadrature in the angle variable
        ctx = QContext(q)
        model = DensityModel(ctx)
        val, err = quad(lambda t: model.theta_weight(np.array([t]))[0], 0.0, math.pi, limit=200)
        assert err < 1e-9
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_x_space_mass(self):
        ctx = QContext(0.5)
        model = DensityModel(ctx)
        val, _ = quad(lambda x: model(np.array([x]))[0], -ctx.L, ctx.L, limit=400)
        assert val == pytest.approx(1.0, abs=1e-8)


class TestHermite:
    def test_base_cases(self):
        xs = np.linspace(-3, 3, 11)
        assert np.all(hermite_eval(0, xs, 0.4) == 1.0)
        assert np.max(np.abs(hermite_eval(1, xs, 0.4) - xs)) == 0.0
        for q in Q_GRID:
            assert np.max(np.abs(hermite_eval(2, xs, q) - (xs ** 2 - 1.0))) < 1e-12

    @pytest.mark.parametrize("q", [0.2, 0.8])
    def test_three_term_recurrence_residual(self, q):
        ctx = QContext(q)
        xs = np.linspace(-ctx.L, ctx.L, 101)
        H = hermite_basis(xs, 21, q)
        for n in range(1, 20):
            resid = H[:, n + 1] - xs * H[:, n] + q_bracket(n, q) * H[:, n - 1]
            scale = np.maximum(np.abs(H[:, n + 1]), 1.0)
            assert np.max(np.abs(resid) / scale) < 1e-10

    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    def test_orthogonality_against_measure(self, q):
        ctx = QContext(q)
        nodes, weights = quadrature(ctx, 48)
        H = hermite_basis(nodes, 8, q)
        M = H.T @ (weights[:, None] * H)
        expect = np.diag([q_factorial(n, q) for n in range(9)])
        assert np.max(np.abs(M - expect)) < 1e-7

    def test_orthonormal_scaling(self):
        q = 0.6
        xs = np.linspace(-1, 1, 7)
        Hm = hermite_basis(xs, 6, q)
        Ho = hermite_basis(xs, 6, q, orthonormal=True)
        for n in range(7):
            assert Ho[:, n] == pytest.approx(Hm[:, n] / math.sqrt(q_factorial(n, q)), rel=1e-12)


class TestQuadrature:
    @pytest.mark.parametrize("q", Q_GRID)
    def test_moments(self, q):
        ctx = QContext(q)
        nodes, weights = quadrature(ctx, 32)
        assert np.sum(weights) == pytest.approx(1.0, abs=1e-12)
        assert np.all(weights > 0.0)
        assert np.max(np.abs(nodes)) < ctx.L
        assert np.sum(weights * nodes ** 2) == pytest.approx(1.0, abs=1e-10)
        assert np.sum(weights * nodes ** 4) == pytest.approx(2.0 + q, abs=1e-10)
        # cross oracle: enumeration over pair partitions
        assert np.sum(weights * nodes ** 6) == pytest.approx(
            moment_pair_partitions(6, q), abs=1e-8
        )
        for m in (1, 3, 5, 7):
            assert abs(np.sum(weights * nodes ** m)) < 1e-9

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            quadrature(QContext(0.5), 0)


class TestCdf:
    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
    def test_boundary_values(self, q, pipeline):
        ctx, model, _ = pipeline(q)
        assert cdf(0.0, model)[0] == pytest.approx(0.5, abs=1e-9)
        assert cdf(ctx.L, model)[0] == pytest.approx(1.0, abs=1e-8)
        assert cdf(-ctx.L, model)[0] == 0.0
        assert inv_cdf(0.5, model)[0] == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
    def test_monotone_and_roundtrip(self, q, pipeline):
        ctx, model, _ = pipeline(q)
        xs = np.linspace(-0.95 * ctx.L, 0.95 * ctx.L, 201)
        F = model.cdf(xs)
        assert np.all(np.diff(F) > 0.0)
        back = model.inv_cdf(F)
        assert np.max(np.abs(back - xs)) < 1e-6
        ps = np.linspace(1e-4, 1 - 1e-4, 101)
        assert np.max(np.abs(model.cdf(model.inv_cdf(ps)) - ps)) < 1e-9

    def test_rejects_bad_probability(self, pipeline):
        _, model, _ = pipeline(0.5)
        with pytest.raises(ValueError):
            inv_cdf(-0.1, model)
        with pytest.raises(ValueError):
            inv_cdf(1.0001, model)

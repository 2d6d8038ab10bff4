"""q-arithmetic, the q-Gaussian distribution, continuous q-Hermite polynomials,
and Gaussian quadrature for the associated measure.

The central object is the probability density

    nu'(x) = (1/pi) sqrt(1-q) sin(theta) (q; q)_inf |(q e^{2 i theta}; q)_inf|^2,

with 2 cos(theta) = x sqrt(1-q), supported on [-L, L], L = 2/sqrt(1-q).
It is the vacuum spectral distribution of the position operator a + a* under
the deformed commutation relation a a* - q a* a = 1, normalized to unit
variance.  All integrals are evaluated after the substitution x = L cos(theta),
which removes the square-root behaviour at the endpoints; the transformed
integrand is smooth on [0, pi].

Everything here is immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "QContext",
    "DensityModel",
    "CdfModel",
    "q_bracket",
    "q_factorial",
    "q_factorial_log",
    "q_pochhammer",
    "density",
    "hermite_eval",
    "hermite_basis",
    "quadrature",
    "cdf",
    "inv_cdf",
]

MAX_HERMITE_DEGREE = 4096


def _check_q(q: float) -> float:
    q = float(q)
    if not (0.0 < q < 1.0):
        raise ValueError(f"deformation parameter must lie strictly in (0, 1), got {q}")
    return q


@dataclass(frozen=True)
class QContext:
    """Deformation parameter plus every numeric knob used downstream.

    Attributes
    ----------
    q : deformation parameter, strictly inside (0, 1).
    L : support half-width 2/sqrt(1-q), derived.
    tol_product : truncation tolerance for infinite q-products.
    tol_quad : target tolerance for quadrature / root finding.
    K : series cutoff for reflection coefficients.
    N : particle-number cutoff for truncated Fock spaces.
    """

    q: float
    tol_product: float = 1e-14
    tol_quad: float = 1e-9
    K: int = 24
    N: int = 6
    L: float = field(init=False)

    def __post_init__(self):
        _check_q(self.q)
        if self.tol_product <= 0 or self.tol_quad <= 0:
            raise ValueError("tolerances must be positive")
        if self.K < 4:
            raise ValueError(f"series cutoff K must be >= 4, got {self.K}")
        if self.N < 4:
            raise ValueError(f"level cutoff N must be >= 4, got {self.N}")
        object.__setattr__(self, "L", 2.0 / math.sqrt(1.0 - self.q))


def q_bracket(n: int, q: float) -> float:
    """[n]_q = (1 - q^n)/(1 - q); equals 0 at n = 0 and 1 at n = 1."""
    _check_q(q)
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    return (1.0 - q ** n) / (1.0 - q)


def q_factorial(n: int, q: float) -> float:
    """[n]_q! = prod_{j=1..n} [j]_q, with the empty product equal to 1.

    Bounded by (1-q)^{-n}, so safe in double precision for n up to a few
    hundred at moderate q; use :func:`q_factorial_log` beyond that.
    """
    _check_q(q)
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    out = 1.0
    for j in range(1, n + 1):
        out *= (1.0 - q ** j) / (1.0 - q)
    return out


def q_factorial_log(n: int, q: float) -> float:
    """log of [n]_q!, for sizes where the plain product would overflow."""
    _check_q(q)
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    return float(sum(math.log1p(-q ** j) - math.log1p(-q) for j in range(1, n + 1)))


def product_order(q: float, tol: float) -> int:
    """Number of factors M so the dropped tail of (a; q)_inf with |a| <= q
    satisfies |a| q^M / (1-q) < tol."""
    M = math.log(tol * (1.0 - q) / q) / math.log(q)
    return max(8, math.ceil(M))


def q_pochhammer(a, q: float, n: int | None = None, *, tol: float = 1e-14):
    """(a; q)_n = prod_{k=0..n-1} (1 - a q^k); n = None (or inf) means the
    infinite product, truncated once the certified tail bound drops below tol.
    """
    _check_q(q)
    if n is not None and not math.isinf(n):
        n = int(n)
        if n < 0:
            raise ValueError("n must be nonnegative or None for the infinite product")
        out = complex(1.0)
        for k in range(n):
            out *= 1.0 - a * q ** k
        return out if isinstance(a, complex) else float(out.real)
    if a == 0:
        return 1.0
    M = product_order(q, tol / max(abs(a) / q, 1.0))
    out = complex(1.0)
    fac = complex(a)
    for _ in range(M):
        out *= 1.0 - fac
        fac *= q
    return out if isinstance(a, complex) else float(out.real)


class DensityModel:
    """Pointwise evaluator for the unit-variance q-Gaussian density."""

    def __init__(self, ctx: QContext):
        self.ctx = ctx
        self.product_order = product_order(ctx.q, ctx.tol_product)
        q = ctx.q
        self._qq_inf = float(np.prod(1.0 - q ** np.arange(1, self.product_order + 1)))

    def _theta_factor(self, theta: np.ndarray) -> np.ndarray:
        """|(q e^{2 i theta}; q)_inf|^2, evaluated as a squared modulus so the
        result is real and nonnegative by construction."""
        q = self.ctx.q
        p = np.ones_like(theta, dtype=complex)
        fac = q * np.exp(2j * theta)
        for _ in range(self.product_order):
            p = p * (1.0 - fac)
            fac = fac * q
        return np.abs(p) ** 2

    def theta_weight(self, theta) -> np.ndarray:
        """Density of the image measure under x = L cos(theta), theta in [0, pi].

        Integrates to 1 over [0, pi]; smooth, vanishing quadratically at the
        endpoints.
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return (2.0 / math.pi) * self._qq_inf * np.sin(theta) ** 2 * self._theta_factor(theta)

    def theta_weight_mid_offset(self, delta) -> np.ndarray:
        """theta_weight at pi/2 -+ delta, parametrized by the exact offset so
        that offsets far below the floating-point resolution of pi/2 are not
        lost; identical for both signs.
        """
        delta = np.atleast_1d(np.asarray(delta, dtype=float))
        q = self.ctx.q
        p = np.ones_like(delta, dtype=complex)
        fac = -q * np.exp(2j * delta)
        for _ in range(self.product_order):
            p = p * (1.0 - fac)
            fac = fac * q
        return (2.0 / math.pi) * self._qq_inf * np.cos(delta) ** 2 * np.abs(p) ** 2

    def evaluate(self, x) -> np.ndarray:
        """nu'(x); zero outside the closed support."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        q, L = self.ctx.q, self.ctx.L
        out = np.zeros_like(x)
        inside = np.abs(x) < L
        if inside.any():
            theta = np.arccos(np.clip(x[inside] / L, -1.0, 1.0))
            out[inside] = (
                (1.0 / math.pi)
                * math.sqrt(1.0 - q)
                * np.sin(theta)
                * self._qq_inf
                * self._theta_factor(theta)
            )
        return out

    def __call__(self, x):
        return self.evaluate(x)


def density(x, model: DensityModel):
    """Functional form of :meth:`DensityModel.evaluate`."""
    return model.evaluate(x)


def hermite_eval(n: int, x, q: float):
    """Monic deformed Hermite polynomial H_n(x) by the three-term recurrence

        H_{n+1}(x) = x H_n(x) - [n]_q H_{n-1}(x),  H_0 = 1, H_1 = x.

    With this normalization the squared norm against the q-Gaussian measure
    is [n]_q!, matching the number-basis norms of the one-mode Fock space.
    """
    _check_q(q)
    if not (0 <= n <= MAX_HERMITE_DEGREE):
        raise ValueError(f"degree must be in [0, {MAX_HERMITE_DEGREE}]")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = x.copy()
    for m in range(1, n):
        prev, cur = cur, x * cur - q_bracket(m, q) * prev
    return cur


def hermite_basis(x, nmax: int, q: float, orthonormal: bool = False) -> np.ndarray:
    """Values of H_0..H_nmax at the points x, as columns of a matrix.

    orthonormal=True rescales column n by [n]_q!^{-1/2}; the rescaled
    recurrence is used directly for numerical stability at large degree.
    """
    _check_q(q)
    if not (0 <= nmax <= MAX_HERMITE_DEGREE):
        raise ValueError(f"degree must be in [0, {MAX_HERMITE_DEGREE}]")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    H = np.empty((x.size, nmax + 1))
    H[:, 0] = 1.0
    if nmax >= 1:
        H[:, 1] = x
    if orthonormal:
        for n in range(1, nmax):
            H[:, n + 1] = (x * H[:, n] - math.sqrt(q_bracket(n, q)) * H[:, n - 1]) / math.sqrt(
                q_bracket(n + 1, q)
            )
    else:
        for n in range(1, nmax):
            H[:, n + 1] = x * H[:, n] - q_bracket(n, q) * H[:, n - 1]
    return H


def quadrature(ctx: QContext, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian rule for the q-Gaussian measure.

    Nodes are the eigenvalues of the symmetrized truncated recurrence matrix
    (off-diagonal entries sqrt([n]_q)), weights the squared first eigenvector
    components; exact for polynomials of degree <= 2 n_nodes - 1.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    q = ctx.q
    off = np.sqrt([q_bracket(n, q) for n in range(1, n_nodes)])
    try:
        from scipy.linalg import eigh_tridiagonal

        vals, vecs = eigh_tridiagonal(np.zeros(n_nodes), off)
    except Exception as exc:  # pragma: no cover - diagnostic path
        raise RuntimeError(f"quadrature eigendecomposition failed: {exc}") from exc
    return vals, vecs[0, :] ** 2


class CdfModel:
    """Cumulative distribution of the q-Gaussian and its inverse.

    The cumulative mass is tabulated on a uniform grid in the angle variable
    (one pass of grid doubling if an embedded error estimate exceeds the
    requested tolerance).  Three cumulative frames are kept, anchored at the
    left end, the midpoint and the right end, so that small tail or
    small central masses are always available with full relative accuracy;
    near the centre the mass is additionally evaluated directly in x to avoid
    the angle representation floor around pi/2.  The inverse solves the
    bracketed monotone equation by safeguarded Newton iteration.
    """

    _GL_ORDER = 12

    def __init__(self, ctx: QContext, n_cells: int = 4096, density_model: DensityModel | None = None):
        self.ctx = ctx
        self.dens = density_model if density_model is not None else DensityModel(ctx)
        self._gx, self._gw = leggauss(self._GL_ORDER)
        n = int(n_cells)
        while True:
            self._build_tables(n)
            if self._cell_err_est <= ctx.tol_quad / 10.0 or n >= 4 * n_cells:
                break
            n *= 2
        self._build_center()

    # -- table construction -------------------------------------------------

    def _build_tables(self, n_cells: int):
        if n_cells % 2:
            raise ValueError("n_cells must be even")
        self.n_cells = n_cells
        self.h = math.pi / n_cells
        self.edges = np.linspace(0.0, math.pi, n_cells + 1)
        mid = 0.5 * (self.edges[:-1] + self.edges[1:])
        nodes = mid[:, None] + 0.5 * self.h * self._gx[None, :]
        vals = self.dens.theta_weight(nodes.ravel()).reshape(nodes.shape)
        ci = (vals * self._gw[None, :]).sum(axis=1) * (0.5 * self.h)
        # embedded lower-order estimate for the refinement rule
        lo_ord = self._GL_ORDER // 2
        lx, lw = leggauss(lo_ord)
        lnodes = mid[:, None] + 0.5 * self.h * lx[None, :]
        lvals = self.dens.theta_weight(lnodes.ravel()).reshape(lnodes.shape)
        ci_lo = (lvals * lw[None, :]).sum(axis=1) * (0.5 * self.h)
        self._cell_err_est = float(np.abs(ci - ci_lo).sum())
        self.cell_int = ci
        m = n_cells // 2
        self.mid_cell = m
        self.cumA = np.concatenate([[0.0], np.cumsum(ci)])
        cumC = np.empty(n_cells + 1)
        cumC[m:] = np.concatenate([[0.0], np.cumsum(ci[m:])])
        cumC[:m] = -np.cumsum(ci[:m][::-1])[::-1]
        self.cumC = cumC
        self.cumB = np.concatenate([np.cumsum(ci[::-1])[::-1], [0.0]])
        self.total = float(self.cumA[-1])
        self.mass_left = float(self.cumA[m])    # theta in [0, pi/2]  <->  x >= 0
        self.mass_right = float(self.cumB[m])   # theta in [pi/2, pi] <->  x <= 0

    def _build_center(self):
        # direct x-space mass near 0 for |x| <= x_switch (density smooth there)
        self.x_switch = 0.08 * self.ctx.L
        self.c_switch_pos = float(self._center_mass(np.array([self.x_switch]))[0])
        self.c_switch_neg = float(-self._center_mass(np.array([-self.x_switch]))[0])

    def _center_mass(self, x: np.ndarray) -> np.ndarray:
        """signed mass of (0, x] evaluated by x-space quadrature, |x| small."""
        halfw = 0.5 * x
        nodes = halfw[:, None] * (self._gx[None, :] + 1.0)
        vals = self.dens.evaluate(nodes.ravel()).reshape(nodes.shape)
        return (vals * self._gw[None, :]).sum(axis=1) * halfw

    # -- frame evaluation ----------------------------------------------------

    def _partial(self, a: np.ndarray, theta: np.ndarray) -> np.ndarray:
        halfw = 0.5 * (theta - a)
        nodes = (a + halfw)[:, None] + halfw[:, None] * self._gx[None, :]
        vals = self.dens.theta_weight(nodes.ravel()).reshape(nodes.shape)
        return (vals * self._gw[None, :]).sum(axis=1) * halfw

    def _cells_of(self, theta: np.ndarray) -> np.ndarray:
        return np.clip((theta / self.h).astype(int), 0, self.n_cells - 1)

    def mass_from_left(self, theta) -> np.ndarray:
        """mass of [0, theta]; relative accuracy near theta = 0."""
        theta = np.clip(np.atleast_1d(np.asarray(theta, dtype=float)), 0.0, math.pi)
        j = self._cells_of(theta)
        return self.cumA[j] + self._partial(self.edges[j], theta)

    def mass_from_mid(self, theta) -> np.ndarray:
        """signed mass of [pi/2, theta]; relative accuracy near the midpoint."""
        theta = np.clip(np.atleast_1d(np.asarray(theta, dtype=float)), 0.0, math.pi)
        j = self._cells_of(theta)
        return self.cumC[j] + self._partial(self.edges[j], theta)

    def mass_from_right(self, theta) -> np.ndarray:
        """mass of [theta, pi]; relative accuracy near theta = pi."""
        theta = np.clip(np.atleast_1d(np.asarray(theta, dtype=float)), 0.0, math.pi)
        j = self._cells_of(theta)
        return self.cumB[j] - self._partial(self.edges[j], theta)

    # -- frame inversion -----------------------------------------------------

    def _invert(self, target: np.ndarray, cum: np.ndarray, decreasing: bool, iters: int = 100) -> np.ndarray:
        target = np.atleast_1d(np.asarray(target, dtype=float))
        if decreasing:
            j = np.clip(self.n_cells - np.searchsorted(cum[::-1], target), 0, self.n_cells - 1)
        else:
            j = np.clip(np.searchsorted(cum, target) - 1, 0, self.n_cells - 1)
        lo = self.edges[j]
        hi = self.edges[j + 1]
        theta = 0.5 * (lo + hi)
        sign = -1.0 if decreasing else 1.0
        for _ in range(iters):
            f = cum[j] + sign * self._partial(lo, theta) - target
            w = np.maximum(self.dens.theta_weight(theta), 1e-300)
            new = np.clip(theta - sign * f / w, lo, hi)
            if np.all(np.abs(new - theta) <= 1e-16):
                theta = new
                break
            theta = new
        return theta

    def invert_from_left(self, mass) -> np.ndarray:
        m = np.atleast_1d(np.asarray(mass, dtype=float))
        out = self._invert(np.clip(m, 0.0, self.total), self.cumA, decreasing=False)
        out = np.where(m <= 0.0, 0.0, out)
        return np.where(m >= self.total, math.pi, out)

    def invert_from_mid(self, mass) -> np.ndarray:
        m = np.atleast_1d(np.asarray(mass, dtype=float))
        return self._invert(np.clip(m, self.cumC[0], self.cumC[-1]), self.cumC, decreasing=False)

    def invert_from_right(self, mass) -> np.ndarray:
        m = np.atleast_1d(np.asarray(mass, dtype=float))
        out = self._invert(np.clip(m, 0.0, self.total), self.cumB, decreasing=True)
        out = np.where(m <= 0.0, math.pi, out)
        return np.where(m >= self.total, 0.0, out)

    def invert_center(self, mass) -> np.ndarray:
        """x with signed mass of (0, x] equal to the target; |target| small."""
        t = np.atleast_1d(np.asarray(mass, dtype=float))
        d0 = float(self.dens.evaluate(np.array([0.0]))[0])
        x = np.clip(t / d0, -self.x_switch, self.x_switch)
        for _ in range(60):
            f = self._center_mass(x) - t
            d = np.maximum(self.dens.evaluate(x), 1e-300)
            new = np.clip(x - f / d, -self.x_switch, self.x_switch)
            if np.all(np.abs(new - x) <= 1e-18):
                x = new
                break
            x = new
        return x

    # -- x-space helpers -----------------------------------------------------

    def theta_of(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.arccos(np.clip(x / self.ctx.L, -1.0, 1.0))

    def center_mass_of(self, x) -> np.ndarray:
        """signed mass of (0, x], using the direct x-space rule when |x| is
        small and the midpoint frame otherwise."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        small = np.abs(x) <= self.x_switch
        if small.any():
            out[small] = self._center_mass(x[small])
        if (~small).any():
            out[~small] = -self.mass_from_mid(self.theta_of(x[~small]))
        return out

    # -- public distribution interface ----------------------------------------

    def cdf(self, x) -> np.ndarray:
        """F(x) = mass of [-L, x].  Clamped to [0, 1] outside the support."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        L = self.ctx.L
        out = np.empty_like(x)
        lo = x <= -L
        hi = x >= L
        mid = ~(lo | hi)
        out[lo] = 0.0
        out[hi] = 1.0
        if mid.any():
            xm = x[mid]
            r = np.empty_like(xm)
            neg = xm <= 0
            if neg.any():
                r[neg] = self.mass_from_right(self.theta_of(xm[neg]))
            if (~neg).any():
                r[~neg] = self.total - self.mass_from_left(self.theta_of(xm[~neg]))
            out[mid] = r / self.total
        return out

    def inv_cdf(self, p) -> np.ndarray:
        """Quantile function on [0, 1]; rejects probabilities outside [0, 1]."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("probability outside [0, 1]")
        t = p * self.total
        theta = np.empty_like(t)
        low = p <= 0.25
        high = p >= 0.75
        mid = ~(low | high)
        if low.any():
            theta[low] = self.invert_from_right(t[low])
        if high.any():
            theta[high] = self.invert_from_left(self.total - t[high])
        if mid.any():
            theta[mid] = self.invert_from_mid(self.mass_right - t[mid])
        return self.ctx.L * np.cos(theta)


def cdf(x, model: CdfModel):
    """Cumulative distribution function F of the q-Gaussian."""
    return model.cdf(x)


def inv_cdf(p, model: CdfModel):
    """Inverse of :func:`cdf` by bracketed monotone root finding."""
    return model.inv_cdf(p)

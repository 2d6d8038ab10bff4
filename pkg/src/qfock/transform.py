"""Matrix coefficients of the reflection operator induced by the involution,
and its extension to the two-mode Fock space.

Composition with the multiplication operator diagonalizes the one-mode
position operator on polynomials, so the substitution operator
(f -> f o gamma) acts on the monic basis {H_n} with coefficients

    w_{kn} = (1/[k]_q!) * integral H_k(x) H_n(gamma(x)) d nu_q(x).

In the orthonormal basis {H_n/sqrt([n]_q!)} the matrix (denoted w_hat here)
is symmetric and, before truncation, orthogonal with unit columns; the jump
of gamma at the origin makes the column mass spread broadly over k, so any
finite K by K block is a strict contraction.  The certified column tail
masses 1 - sum_k w_hat[k, n]^2 are reported and drive every downstream
truncation bound.

The two-mode extension conjugates the one-mode action through the
isomorphism built on the kernel of the first-mode annihilator: columns of
shifted kernel vectors form a Gram-orthonormal basis, the extension acts
fiberwise by the (truncated) coefficient block, and the inverse basis change
is the Gram transpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import FockSpace, kernel_basis, q_factorial_any
from .involution import GammaMap, split_quadrature
from .qspecial import QContext, hermite_basis, q_factorial

__all__ = ["WCoefficients", "WDiagnostics", "w_matrix", "BigW", "build_big_w", "lemma_checks"]


@dataclass(frozen=True)
class WDiagnostics:
    """Quadrature health indicators for a coefficient build."""

    n_nodes: int              # nodes per half interval
    parity_max: float         # largest entry with k + n odd (analytically zero)
    symmetry_defect: float    # max |w_hat - w_hat^T| before symmetrization
    doubling_drift: float     # max coefficient change under node doubling
    total_mass_residual: float  # quadrature mass minus one


@dataclass(frozen=True)
class WCoefficients:
    """Reflection coefficients, in both normalizations.

    w[k, n] are monic-basis coefficients; what[k, n] the orthonormal-basis
    (symmetric) ones, related by w = what * sqrt([n]!/[k]!).
    col_tail_mass[n] = 1 - sum_k what[k, n]^2 >= 0 is the exact l2 mass of
    the expansion of H_n o gamma beyond degree K (the full columns have unit
    mass because gamma preserves the distribution).
    """

    ctx: QContext
    K: int
    w: np.ndarray
    what: np.ndarray
    diagnostics: WDiagnostics
    col_tail_mass: np.ndarray = field(init=False)

    def __post_init__(self):
        tails = 1.0 - (self.what ** 2).sum(axis=0)
        object.__setattr__(self, "col_tail_mass", tails)


def _what_block(g: GammaMap, K: int, n_per_half: int) -> tuple[np.ndarray, float]:
    x, gx_, wq = split_quadrature(g, n_per_half)
    q = g.ctx.q
    H = hermite_basis(x, K, q, orthonormal=True)
    Hg = hermite_basis(gx_, K, q, orthonormal=True)
    return H.T @ (wq[:, None] * Hg), float(np.sum(wq) - 1.0)


def w_matrix(ctx: QContext, g: GammaMap, K: int | None = None, n_nodes: int | None = None) -> WCoefficients:
    """Coefficient matrix for indices 0..K with convergence diagnostics.

    n_nodes is the per-half node count; the default scales with K so that the
    polynomial degree content stays resolved.  The matrix is computed on both
    half intervals independently (parity zeros are measured, not imposed) and
    symmetrized afterwards; symmetry and node-doubling drift measure the
    actual quadrature error, and a drift above 1e-5 raises, since it signals
    an under-resolved rule rather than a truncation effect.
    """
    K = ctx.K if K is None else int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    if n_nodes is None:
        n_nodes = max(200, math.ceil(2.6 * K))
    what, mass_res = _what_block(g, K, n_nodes)
    what2, _ = _what_block(g, K, 2 * n_nodes)
    drift = float(np.max(np.abs(what2 - what)))
    if drift > 1e-5:
        raise RuntimeError(
            f"coefficient quadrature not converged (node-doubling drift {drift:.2e}); "
            f"raise n_nodes"
        )
    parity = np.add.outer(np.arange(K + 1), np.arange(K + 1)) % 2 == 1
    parity_max = float(np.max(np.abs(what2[parity])))
    sym_defect = float(np.max(np.abs(what2 - what2.T)))
    what_s = 0.5 * (what2 + what2.T)
    q = ctx.q
    logfacts = np.cumsum([0.0] + [math.log((1 - q ** j) / (1 - q)) for j in range(1, K + 1)])
    scale = np.exp(0.5 * (logfacts[None, :] - logfacts[:, None]))  # sqrt([n]!/[k]!)
    w = what_s * scale
    diag = WDiagnostics(
        n_nodes=n_nodes,
        parity_max=parity_max,
        symmetry_defect=sym_defect,
        doubling_drift=drift,
        total_mass_residual=mass_res,
    )
    return WCoefficients(ctx=ctx, K=K, w=w, what=what_s, diagnostics=diag)


@dataclass(frozen=True)
class BigW:
    """Two-mode extension of the reflection operator.

    matrix acts on the word basis of `space`.  Per fiber at kernel level l the
    action is the (N - l + 1)-square coefficient block; truncation_tail is
    the largest certified column tail mass over all represented fibers, and
    basis_defect the numerical Gram-orthonormality defect of the V-basis.
    """

    space: FockSpace
    matrix: np.ndarray
    coeffs: WCoefficients
    truncation_tail: float
    basis_defect: float


def build_big_w(space: FockSpace, wc: WCoefficients) -> BigW:
    """Assemble the extension on the truncated two-mode space.

    Requires K >= N so every representable fiber block is available.  The
    column tail mass beyond each fiber's cutoff is reported as
    truncation_tail; it is an intrinsic property of the involution (whose
    expansion converges slowly in l2), not a numerical failure, so no
    threshold is applied here.
    """
    if space.d != 2:
        raise ValueError("the extension lives on the two-mode space")
    N, q = space.N, space.q
    if wc.K < N:
        raise ValueError("coefficient cutoff K must be at least the level cutoff N")
    cols = []
    fibers = []
    C0 = space.creation_matrix(0)
    for lev in range(N + 1):
        Kb = kernel_basis(space, lev)
        m = Kb.shape[1]
        if m == 0:
            continue
        kmax = N - lev
        cur = Kb.copy()
        for k in range(kmax + 1):
            if k > 0:
                cur = C0 @ cur
            cols.append(cur / math.sqrt(q_factorial_any(k, q)))
        fibers.append((lev, m, kmax))
    T = np.concatenate(cols, axis=1)
    if T.shape[1] != space.dim:
        raise RuntimeError("fiber basis does not span the truncated space")
    basis_defect = float(np.max(np.abs(T.T @ space.G @ T - np.eye(space.dim))))
    Wpsi = np.zeros((space.dim, space.dim))
    pos = 0
    tail = 0.0
    for lev, m, kmax in fibers:
        blk = wc.what[: kmax + 1, : kmax + 1]
        # column mass beyond the fiber cutoff (exact, from unit full columns)
        tail = max(tail, float(np.max(1.0 - (blk ** 2).sum(axis=0))))
        size = (kmax + 1) * m
        Wpsi[pos:pos + size, pos:pos + size] = np.kron(blk, np.eye(m))
        pos += size
    W = T @ Wpsi @ (T.T @ space.G)  # inverse basis change = Gram transpose
    return BigW(space=space, matrix=W, coeffs=wc, truncation_tail=tail, basis_defect=basis_defect)


def lemma_checks(space: FockSpace, big_w: BigW, wc: WCoefficients, g: GammaMap, n_per_half: int = 200) -> dict:
    """Residual report for the four structural properties of the extension:
    self-adjointness and involutivity, conjugation of the first position
    operator onto the involution (via vacuum moments), kernel fixing, and the
    one-mode expansion of W X_0 on kernel vectors.

    Report-only: thresholds are applied by the caller.  Involutivity and the
    moment match are truncation-limited; the report carries certified
    predictions of both residuals computed from the coefficient block alone,
    so the caller can separate truncation from genuine error.
    """
    N, q = space.N, space.q
    W = big_w.matrix
    X0 = space.position_matrix(0)
    vac = space.vacuum()

    report: dict = {}

    # (1) self-adjointness in the Gram form; involutivity on levels <= N-1
    report["self_adjoint_residual"] = float(np.max(np.abs(W.T @ space.G - space.G @ W)))
    R = W @ W - np.eye(space.dim)
    meas = space.gram_opnorm(R, max_level=N - 1)
    pred = 0.0
    for lev in range(N):
        M = N - lev
        blk = wc.what[: M + 1, : M + 1]
        Rb = blk @ blk - np.eye(M + 1)
        pred = max(pred, float(np.linalg.norm(Rb[:, :M], 2)))
    report["involution_residual"] = meas
    report["involution_residual_predicted"] = pred

    # (2) vacuum moments of W X0 W against moments of gamma
    A = W @ X0 @ W
    x, gx_, wq = split_quadrature(g, n_per_half)
    Jhat = np.zeros((N + 1, N + 1))
    for n in range(1, N + 1):
        Jhat[n - 1, n] = Jhat[n, n - 1] = math.sqrt((1 - q ** n) / (1 - q))
    blk = wc.what[: N + 1, : N + 1]
    fib = blk @ Jhat @ blk
    cur = vac.copy()
    powf = np.eye(N + 1)
    rows = []
    for m in range(1, 7):
        cur = A @ cur
        powf = fib @ powf
        op_val = space.inner(vac, cur)
        quad_val = float(np.sum(wq * gx_ ** m))
        rows.append(
            {
                "order": m,
                "operator": op_val,
                "gamma_moment": quad_val,
                "fiber_prediction": float(powf[0, 0]),
            }
        )
    report["moment_rows"] = rows
    report["moment_machinery_residual"] = max(
        abs(r["operator"] - r["fiber_prediction"]) for r in rows
    )
    report["moment_truncation_gap"] = max(
        abs(r["fiber_prediction"] - r["gamma_moment"]) for r in rows
    )

    # (3) kernel vectors are fixed
    worst = 0.0
    for lev in range(N + 1):
        Kb = kernel_basis(space, lev)
        for c in Kb.T:
            worst = max(worst, space.norm(W @ c - c))
    report["kernel_fix_residual"] = worst

    # (4) W X0 phi equals the coefficient series in shifted kernel vectors
    worst = 0.0
    C0 = space.creation_matrix(0)
    for lev in range(N):
        Kb = kernel_basis(space, lev)
        for c in Kb.T:
            lhs = W @ (X0 @ c)
            rhs = np.zeros(space.dim)
            cur = c.copy()
            for k in range(1, N - lev + 1):
                cur = C0 @ cur
                rhs += wc.w[k, 1] * cur
            worst = max(worst, space.norm(lhs - rhs))
    report["series_identity_residual"] = worst
    report["series_tail_mass"] = float(1.0 - (wc.what[: N + 1, 1] ** 2).sum())
    return report

"""Structural verification suite: every invariant with a pass/fail verdict.

Items that are exact below the truncation cutoff carry absolute thresholds.
The two truncation-limited reflection items (involutivity of the finite
block, vacuum-moment match against the involution's moments) are judged
against their certified truncation predictions: the measured residual must
agree with the prediction computed from the coefficient block alone, which
separates machinery error from the intrinsic, slowly decaying expansion tail
of the discontinuous involution.
"""

from __future__ import annotations

import math

import numpy as np

from .fock import (
    FockSpace,
    commutation_check,
    completeness_check,
    kernel_basis,
    pn_operator_check,
    v_isometry_check,
)
from .involution import GammaMap, check_pushforward, ode_residual
from .moments import m4_gamma_operator, m4_sum_operator, moment_pair_partitions, s_of_q
from .qspecial import CdfModel, QContext, hermite_basis, q_factorial, quadrature
from .transform import build_big_w, lemma_checks, w_matrix

__all__ = ["run_verification"]


def run_verification(q: float, level: int, n_cells: int = 4096) -> dict:
    """Run the full invariant suite at one deformation value.

    Returns {"q", "level", "items": [{name, residual, threshold, pass}...],
    "all_pass"}.
    """
    items: list[dict] = []

    def add(name: str, residual: float, threshold: float):
        items.append(
            {
                "name": name,
                "residual": float(residual),
                "threshold": float(threshold),
                "pass": bool(abs(residual) <= threshold),
            }
        )

    ctx = QContext(q, N=level)
    cdf = CdfModel(ctx, n_cells=n_cells)
    g = GammaMap(ctx, cdf)

    # distribution sanity
    add("mass_total", cdf.total - 1.0, 1e-8)
    nodes, weights = quadrature(ctx, 48)
    add("quadrature_weight_sum", float(np.sum(weights)) - 1.0, 1e-12)
    add("quadrature_second_moment", float(np.sum(weights * nodes ** 2)) - 1.0, 1e-10)
    add("quadrature_fourth_moment", float(np.sum(weights * nodes ** 4)) - (2.0 + q), 1e-10)
    add(
        "quadrature_sixth_moment_vs_partitions",
        float(np.sum(weights * nodes ** 6)) - moment_pair_partitions(6, q),
        1e-8,
    )
    add("quadrature_nodes_inside_support", max(float(np.max(np.abs(nodes))) - ctx.L, 0.0)
        if np.max(np.abs(nodes)) < ctx.L else 1.0, 0.0)
    add("quadrature_weights_positive", max(-float(np.min(weights)), 0.0), 0.0)

    # orthogonality of the polynomial family under the spectral rule
    H = hermite_basis(nodes, 8, q)
    M = H.T @ (weights[:, None] * H)
    expect = np.diag([q_factorial(n, q) for n in range(9)])
    add("hermite_orthogonality", float(np.max(np.abs(M - expect))), 1e-7)

    # involution suite
    xs = np.linspace(-0.99 * ctx.L, 0.99 * ctx.L, 200)
    add("gamma_involution", float(np.max(np.abs(g(g(xs)) - xs))), 1e-6)
    add("gamma_odd", float(np.max(np.abs(g(xs) + g(-xs)))), 1e-8)
    for name, half in (("right", xs[xs > 0]), ("left", xs[xs < 0])):
        vals = g(np.sort(half))
        add(f"gamma_decreasing_{name}", max(float(np.max(np.diff(vals))), 0.0), 0.0)
    xstar = cdf.inv_cdf(np.array([0.75]))[0]
    add("gamma_fixed_point", float(g(np.array([xstar]))[0] - xstar), 1e-8)
    pf = check_pushforward(g, 8)
    add("gamma_pushforward_m8", pf.max_discrepancy, 1e-7)
    grid = np.linspace(0.15 * ctx.L, 0.85 * ctx.L, 10)
    worst = max(abs(ode_residual(float(x), g, 1e-4)) for x in np.concatenate([grid, -grid]))
    add("gamma_ode_residual", worst, 1e-5)

    # Fock structure
    sp = FockSpace(2, level, q)
    for n in range(min(level, 5) + 1):
        add(f"gram_positivity_level_{n}", min(np.linalg.eigvalsh(sp.grams[n]).min(), 0.0), 1e-12)
    for i, j in ((0, 0), (0, 1), (1, 1)):
        add(f"commutation_{i}{j}", commutation_check(sp, i, j), 1e-12)
    A0 = sp.annihilation_matrix(0)
    C0 = sp.creation_matrix(0)
    add("adjointness", float(np.max(np.abs(C0.T @ sp.G - sp.G @ A0))), 1e-12)
    for n in (1, 2, 3):
        add(f"pn_identity_{n}", pn_operator_check(sp, n), 1e-10)
    phi = kernel_basis(sp, 1)[:, 0]
    xi = kernel_basis(sp, 0)[:, 0]
    add("v_isometry_diag", v_isometry_check(sp, 2, 2, phi, phi) , 1e-10)
    add("v_isometry_offdiag", v_isometry_check(sp, 2, 1, phi, xi), 1e-10)
    for lev in range(min(level, 4) + 1):
        add(f"completeness_level_{lev}", completeness_check(sp, lev), 0.0)

    # reflection coefficients
    wc = w_matrix(ctx, g, K=max(ctx.K, level))
    add("w00_minus_one", wc.what[0, 0] - 1.0, 1e-9)
    add("w_parity_zeros", wc.diagnostics.parity_max, 1e-10)
    add("w_symmetry_defect", wc.diagnostics.symmetry_defect, 1e-6)
    add("w_node_doubling", wc.diagnostics.doubling_drift, 1e-8)
    add("w_column_mass_bound", max(float(-np.min(wc.col_tail_mass)), 0.0), 1e-8)
    s_val, s_tail = s_of_q(wc)
    add("margin_exceeds_tail", min(q - s_val - s_tail - 10 * ctx.tol_quad, 0.0), 0.0)

    # extension and its structural properties
    big_w = build_big_w(sp, wc)
    add("v_basis_orthonormal", big_w.basis_defect, 1e-9)
    rep = lemma_checks(sp, big_w, wc, g)
    add("reflection_self_adjoint", rep["self_adjoint_residual"], 1e-8)
    add(
        "reflection_involution_matches_prediction",
        rep["involution_residual"] - rep["involution_residual_predicted"],
        1e-6,
    )
    add("reflection_kernel_fix", rep["kernel_fix_residual"], 1e-10)
    add("reflection_series_identity", rep["series_identity_residual"], 1e-10)
    add("reflection_moment_machinery", rep["moment_machinery_residual"], 1e-8)

    # moment routes
    add("m4_sum_operator", m4_sum_operator(q, max(level, 5)) - (8.0 + 4.0 * q), 1e-10)
    add("m4_sum_partitions", 4.0 * moment_pair_partitions(4, q) - (8.0 + 4.0 * q), 1e-12)
    op = m4_gamma_operator(sp, big_w, q)
    add("sum_square_decomposition", op.decomposition_residual, 1e-8)
    add("m4_gamma_operator_matches_prediction", op.value - op.predicted_value, 1e-6)

    return {
        "q": q,
        "level": level,
        "items": items,
        "all_pass": all(item["pass"] for item in items),
    }

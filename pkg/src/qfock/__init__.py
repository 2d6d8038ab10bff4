"""Numerics for the deformed Fock space and the q-Gaussian distribution:
the distribution-preserving involution of the support, the induced
reflection operator, and the fourth-moment comparison showing that sums of
identically distributed, independent deformed Gaussians do not share a law.
"""

from .qspecial import (
    QContext,
    DensityModel,
    CdfModel,
    q_bracket,
    q_factorial,
    q_factorial_log,
    q_pochhammer,
    density,
    hermite_eval,
    hermite_basis,
    quadrature,
    cdf,
    inv_cdf,
)
from .involution import GammaMap, gamma_eval, ode_residual, check_pushforward, split_quadrature
from .fock import (
    FockSpace,
    OperatorRep,
    gram_matrix,
    creation_op,
    annihilation_op,
    commutation_check,
    pn_eval,
    pn_operator_check,
    kernel_basis,
    v_isometry_check,
    completeness_check,
)
from .transform import WCoefficients, w_matrix, BigW, build_big_w, lemma_checks
from .moments import (
    MomentReport,
    m4_sum_analytic,
    moment_pair_partitions,
    pair_partition_counts,
    m4_sum_operator,
    s_of_q,
    m4_gamma_analytic,
    m4_gamma_operator,
    theorem_check,
    sweep,
)

__version__ = "0.1.0"

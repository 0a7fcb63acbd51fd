"""Numerical laboratory for linear and nonlinear sampling Kantorovich operators.

The package reconstructs signals from local (cell-averaged) samples through
series of the form sum_k L(w x - t_k) g_w(mean_k), certifies the kernel and
nonlinearity constants that the quantitative error estimates require, and
checks measured reconstruction errors against those estimates in L^p and in
Orlicz modulars.
"""

__version__ = "0.1.0"

from .bounds import (
    ComparisonResult,
    LpBoundInputs,
    ModularBoundInputs,
    compare,
    lip_rate_bound,
    lp_bound_rhs,
    lp_bound_terms,
    modular_bound_rhs,
    modular_bound_terms,
    proof_constants,
)
from .errors import (
    BoundViolation,
    ConfigError,
    MomentConditionError,
    NumericError,
    SchemeWindowError,
    SkopError,
    TruncationError,
)
from .kernels import (
    KernelProfile,
    MomentTable,
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
    table_kernel,
)
from .metrics import (
    LipschitzCertificate,
    NormResult,
    RateFit,
    certify_lipschitz,
    fit_rate,
    lp_norm,
    omega_p,
)
from .nonlinearity import (
    Nonlinearity,
    RateCertificate,
    check_psi_lipschitz,
    fit_rate_certificate,
    identity_family,
    make_nonlinearity,
    power_family,
    t_w_product,
)
from .operator import OperatorSpec, Reconstruction, evaluate, linear_evaluate
from .phi import (
    HTriple,
    PhiFunction,
    check_H,
    check_delta2,
    compose_triple,
    detect_modular_convergence,
    exp_minus_one,
    make_phi,
    modular,
    orlicz_modulus,
    power,
    power_triple,
    validate_phi,
    zygmund,
)
from .quadrature import GridFunction, integrate, nodes_weights, pairwise_sum
from .scheme import (
    SamplingScheme,
    cell_means,
    jittered_scheme,
    kantorovich_mean,
    make_scheme,
    uniform_scheme,
)
from .signals import Signal, box, constant, gauss, hat, make_signal, root_bump

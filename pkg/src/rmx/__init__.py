"""rmx: random matrix ensembles over the real normed division algebras.

Samplers, log-density evaluators, matrix-factorization Jacobians, and the
numerical verification harness that certifies them against finite-difference
oracles, normalization integrals and goodness-of-fit tests.
"""

__version__ = "0.1.0"

from .algebra import (  # noqa: F401
    Algebra,
    DMatrix,
    EigenSystem,
    HermitianMatrix,
    cholesky,
    conj_transpose,
    hermitian_eig,
    lu_family,
    matmul,
    polar,
    qr,
    svd,
)
from .densities import (  # noqa: F401
    EnsembleSpec,
    MatrixVariateSpec,
    log_density_eigenvalues,
    log_density_element,
    log_density_fourier_angles,
    log_density_laguerre,
    log_density_matrix_variate,
)
from .samplers import (  # noqa: F401
    RngStream,
    sample_fourier,
    sample_gaussian_matrix,
    sample_hermite_ensemble,
    sample_laguerre,
    sample_matrix_variate,
    sample_quotient_family,
    sample_radial_family,
    sample_tridiagonal_beta,
)
from .special import (  # noqa: F401
    LogValue,
    fourier_constant_log,
    mv_beta_log,
    mv_gamma_log,
    stiefel_log_volume,
    symmetric_space_log_volume,
    tau,
)

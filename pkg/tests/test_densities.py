import math

import numpy as np
import pytest
from scipy.special import gammaln
from scipy.stats import beta as beta_dist
from scipy.stats import betaprime, chi2, norm

from rmx.algebra import (
    Algebra,
    DMatrix,
    HermitianMatrix,
    eigvalsh,
    gram,
    hermitian_inv,
    matmul,
    qr,
)
from rmx.densities import (
    EnsembleSpec,
    MatrixVariateSpec,
    log_density_eigenvalues,
    log_density_element,
    log_density_fourier_angles,
    log_density_laguerre,
    log_density_matrix_variate,
)
from rmx.jacobians import logjac_congruence

R = Algebra.REAL


def herm1(s, beta=1):
    comp = np.zeros((1, 1, beta))
    comp[0, 0, 0] = s
    return HermitianMatrix(Algebra.from_beta(beta), comp, check=False)


def rand_dm(beta, n, m, seed):
    rng = np.random.default_rng(seed)
    return DMatrix(Algebra.from_beta(beta), rng.standard_normal((n, m, beta)))


def rand_pd(beta, m, seed, scale=1.0):
    return gram(rand_dm(beta, m + 2, m, seed) * scale)


GRID = np.linspace(-3.0, 3.0, 100)


# -- scalar reductions: classical univariate pdfs to 1e-10 ---------------------

def test_reduction_hermite_element_is_standard_normal():
    spec = EnsembleSpec("hermite", 1, 1, n=1)
    for x in GRID:
        got = float(log_density_element(spec, DMatrix.from_real(R, [[x]])))
        assert abs(got - norm.logpdf(x)) < 1e-10


def test_reduction_t1_element_is_scaled_student_t():
    nu = 3.0
    spec = EnsembleSpec("t1", 1, 1, n=1, nu=nu)
    for x in GRID:
        got = float(log_density_element(spec, DMatrix.from_real(R, [[x]])))
        want = (gammaln((1 + nu) / 2) - 0.5 * math.log(math.pi) - gammaln(nu / 2)
                - (1 + nu) / 2 * math.log1p(x * x))
        assert abs(got - want) < 1e-10


def test_reduction_gegenbauer1_element_is_symmetric_beta():
    q = 1.25
    spec = EnsembleSpec("gegenbauer1", 1, 1, n=1, q=q)
    for x in np.linspace(-0.99, 0.99, 100):
        got = float(log_density_element(spec, DMatrix.from_real(R, [[x]])))
        want = (gammaln(q + 1.5) - 0.5 * math.log(math.pi) - gammaln(q + 1)
                + q * math.log1p(-x * x))
        assert abs(got - want) < 1e-10


def test_reduction_t2_element_is_student_t_form():
    nu = 4.0
    spec = EnsembleSpec("t2", 1, 1, n=1, nu=nu)
    for x in GRID:
        got = float(log_density_element(spec, DMatrix.from_real(R, [[x]])))
        want = (gammaln((1 + nu) / 2) - 0.5 * math.log(math.pi) - gammaln(nu / 2)
                - (1 + nu) / 2 * math.log1p(x * x))
        assert abs(got - want) < 1e-10


def test_reduction_gegenbauer2_element():
    nu = 3.0
    spec = EnsembleSpec("gegenbauer2", 1, 1, n=1, nu=nu)
    for x in np.linspace(-0.99, 0.99, 100):
        got = float(log_density_element(spec, DMatrix.from_real(R, [[x]])))
        want = ((nu / 2 - 1) * math.log1p(-x * x)
                - (gammaln(0.5) + gammaln(nu / 2) - gammaln((nu + 1) / 2)))
        assert abs(got - want) < 1e-10


def test_reduction_laguerre_is_chi_square():
    for n in (2, 3, 5):
        spec = EnsembleSpec("laguerre", 1, 1, n=n)
        for s in np.linspace(0.05, 12.0, 100):
            got = float(log_density_laguerre(spec, herm1(s)))
            assert abs(got - chi2.logpdf(s, n)) < 1e-10


def test_reduction_jacobi_is_beta():
    spec = EnsembleSpec("jacobi", 1, 1, n=3, nu=2.0)
    for s in np.linspace(0.01, 0.99, 100):
        got = float(log_density_laguerre(spec, herm1(s)))
        assert abs(got - beta_dist.logpdf(s, 1.5, 1.0)) < 1e-10


def test_reduction_modified_jacobi_is_beta_prime():
    spec = EnsembleSpec("modified_jacobi", 1, 1, n=3, nu=4.0)
    for s in np.linspace(0.05, 8.0, 100):
        got = float(log_density_laguerre(spec, herm1(s)))
        assert abs(got - betaprime.logpdf(s, 1.5, 2.0)) < 1e-10


def test_reduction_wishart_is_scaled_chi_square():
    sigma = 2.0
    ms = MatrixVariateSpec("wishart", 1, 1, 3, sigma=herm1(sigma))
    for s in np.linspace(0.1, 20.0, 100):
        got = float(log_density_matrix_variate(ms, herm1(s)))
        want = chi2.logpdf(s / sigma, 3) - math.log(sigma)
        assert abs(got - want) < 1e-10


def test_reduction_normal_is_gaussian():
    mu, sig, the = 0.7, 2.0, 1.5
    ms = MatrixVariateSpec("normal", 1, 1, 1, mu=DMatrix.from_real(R, [[mu]]),
                           sigma=herm1(sig), theta=herm1(the))
    for x in GRID:
        got = float(log_density_matrix_variate(ms, DMatrix.from_real(R, [[x]])))
        assert abs(got - norm.logpdf(x, loc=mu, scale=math.sqrt(sig * the))) < 1e-10


def test_reduction_fourier_m1_is_uniform_angle():
    for th in np.linspace(-3.1, 3.1, 100):
        got = float(log_density_fourier_angles(1, 4, np.array([th])))
        assert abs(got + math.log(2 * math.pi)) < 1e-12


def test_reduction_hermite_eigenvalue_m1_is_standard_normal():
    spec = EnsembleSpec("hermite", 1, 1)
    for x in GRID:
        got = float(log_density_eigenvalues(spec, np.array([x])))
        assert abs(got - norm.logpdf(x)) < 1e-10


# -- frozen example values -----------------------------------------------------

def test_laguerre_frozen_value():
    spec = EnsembleSpec("laguerre", 1, 1, n=2)
    assert math.isclose(float(log_density_laguerre(spec, herm1(2.0))),
                        math.log(math.exp(-1.0) / 2), rel_tol=1e-12)


def test_fourier_m2_value_and_coincident_angles():
    v = float(log_density_fourier_angles(2, 2, np.array([0.0, math.pi])))
    assert math.isclose(v, math.log(2.0) - 2 * math.log(2 * math.pi), rel_tol=1e-12)
    assert not log_density_fourier_angles(2, 2, np.array([0.4, 0.4])).finite
    with pytest.raises(ValueError):
        log_density_fourier_angles(2, 2, np.array([0.0, 4.0]))


def test_hermite_eigen_m2_kernel_sign():
    # density must decay in |lambda|: the kernel sign is exp(-beta/2 sum l^2)
    spec = EnsembleSpec("hermite", 1, 2)
    small = float(log_density_eigenvalues(spec, np.array([1.0, -1.0])))
    large = float(log_density_eigenvalues(spec, np.array([5.0, -5.0])))
    assert large < small


def test_gegenbauer_support_maps_to_neg_inf():
    spec = EnsembleSpec("gegenbauer1", 1, 2, n=2, q=1.0)
    A = DMatrix.from_real(R, np.array([[2.0, 0.0], [0.0, 0.5]]))
    assert not log_density_element(spec, A).finite
    spec_l = EnsembleSpec("gegenbauer_laguerre1", 1, 2, n=3, q=1.0)
    S = rand_pd(1, 2, 3, scale=2.0)
    if np.trace(S.data[..., 0]) > 1:
        assert not log_density_laguerre(spec_l, S).finite


def test_non_pd_laguerre_input_maps_to_neg_inf():
    spec = EnsembleSpec("laguerre", 1, 2, n=3)
    S = HermitianMatrix(R, np.array([[[1.0], [0.0]], [[0.0], [-0.5]]]))
    assert not log_density_laguerre(spec, S).finite


def test_eigenvalue_order_enforced():
    spec = EnsembleSpec("hermite", 1, 2)
    with pytest.raises(ValueError):
        log_density_eigenvalues(spec, np.array([1.0, 2.0]))


def test_spec_domain_validation_names_field():
    with pytest.raises(ValueError, match="q"):
        EnsembleSpec("gegenbauer1", 1, 2, n=2, q=-2.0)
    with pytest.raises(ValueError, match="nu"):
        EnsembleSpec("t1", 1, 2, n=2, nu=-1.0)
    with pytest.raises(ValueError, match="nu"):
        EnsembleSpec("t2", 1, 2, n=2, nu=1.0)  # needs nu > m


# -- invariance and consistency -------------------------------------------------

@pytest.mark.parametrize("beta", (1, 2, 4))
@pytest.mark.parametrize("family,kw", [("hermite", {}), ("t1", {"nu": 5.0}),
                                       ("t2", {"nu": 4.0})])
def test_unitary_invariance_rectangular(beta, family, kw):
    m, n = 2, 3
    spec = EnsembleSpec(family, beta, m, n=n, **kw)
    A = rand_dm(beta, n, m, 11 + beta) * 0.4
    Q, _ = qr(rand_dm(beta, n, n, 5 + beta))
    P, _ = qr(rand_dm(beta, m, m, 6 + beta))
    B = matmul(matmul(Q, A), P)
    va = float(log_density_element(spec, A))
    vb = float(log_density_element(spec, B))
    assert abs(va - vb) < 1e-10


@pytest.mark.parametrize("beta", (1, 2, 4))
def test_unitary_invariance_ensemble(beta):
    m = 3
    spec = EnsembleSpec("hermite", beta, m)
    S = HermitianMatrix(Algebra.from_beta(beta),
                        rand_pd(beta, m, 31 + beta).data * 0.3, check=False)
    U, _ = qr(rand_dm(beta, m, m, 99 + beta))
    S2 = HermitianMatrix.from_dmatrix(matmul(matmul(U, S.as_dmatrix()), U.H),
                                      check=False)
    assert abs(float(log_density_element(spec, S))
               - float(log_density_element(spec, S2))) < 1e-10


@pytest.mark.parametrize("beta", (1, 2, 4))
@pytest.mark.parametrize("family,kw", [("hermite", {}), ("t1", {"nu": 6.0}),
                                       ("gegenbauer2", {"nu": 5.0})])
def test_whitening_consistency(beta, family, kw):
    m, n = 2, 3
    rng = np.random.default_rng(77 + beta)
    Sig = rand_pd(beta, m, 100 + beta)
    The = rand_pd(beta, n, 200 + beta)
    mu = rand_dm(beta, n, m, 300 + beta)
    ms = MatrixVariateSpec("left_elliptical", beta, m, n, family=family, mu=mu,
                           sigma=Sig, theta=The, **kw)
    X = rand_dm(beta, n, m, 400 + beta) * 0.3 + mu
    got = float(log_density_matrix_variate(ms, X))
    # independent whitening route
    from rmx.algebra import hermitian_inv_sqrt
    Z = matmul(matmul(hermitian_inv_sqrt(The).as_dmatrix(), X - mu),
               hermitian_inv_sqrt(Sig).as_dmatrix())
    spec = EnsembleSpec(family, beta, m, n=n, **kw)
    lds = float(np.sum(np.log(eigvalsh(Sig))))
    ldt = float(np.sum(np.log(eigvalsh(The))))
    want = float(log_density_element(spec, Z)) - beta * n / 2 * lds - beta * m / 2 * ldt
    assert abs(got - want) < 1e-10


@pytest.mark.parametrize("beta", (1, 2, 4))
def test_beta1_beta2_change_of_variables(beta):
    # B = I - (I+F)^{-1}: density_B1(B) = density_B2(F) * |dF/dB|
    m, n, nu = 2, 4, 5.0
    rng = np.random.default_rng(500 + beta)
    alg = Algebra.from_beta(beta)
    B = rand_pd(beta, m, 600 + beta)
    B = HermitianMatrix(alg, B.data / (np.trace(B.data[..., 0]) + 1.0), check=False)
    I = HermitianMatrix.eye(alg, m)
    ImB = I - B
    ImB_inv = hermitian_inv(ImB)
    F = ImB_inv - I
    b1 = EnsembleSpec("jacobi", beta, m, n=n, nu=nu)
    b2 = EnsembleSpec("modified_jacobi", beta, m, n=n, nu=nu)
    lhs = float(log_density_laguerre(b1, B))
    # dF = (I-B)^{-1} dB (I-B)^{-1}: Hermitian congruence Jacobian
    logjac = logjac_congruence(ImB_inv.as_dmatrix(), m, beta)
    rhs = float(log_density_laguerre(b2, F)) + logjac
    assert abs(lhs - rhs) < 1e-8


def test_normal_at_mode_value():
    beta, m, n = 2, 2, 3
    Sig = rand_pd(beta, m, 1)
    The = rand_pd(beta, n, 2)
    mu = rand_dm(beta, n, m, 3)
    ms = MatrixVariateSpec("normal", beta, m, n, mu=mu, sigma=Sig, theta=The)
    got = float(log_density_matrix_variate(ms, mu))
    want = (-beta * m * n / 2 * math.log(2 * math.pi / beta)
            - beta * n / 2 * float(np.sum(np.log(eigvalsh(Sig))))
            - beta * m / 2 * float(np.sum(np.log(eigvalsh(The)))))
    assert abs(got - want) < 1e-10


def test_sgw_vsgw_reduce_to_plain_laguerre_at_identity_sigma():
    beta, m, n = 2, 2, 4
    S = rand_pd(beta, m, 7)
    vs = MatrixVariateSpec("vsgw", beta, m, n, family="hermite")
    want = float(log_density_laguerre(EnsembleSpec("laguerre", beta, m, n=n), S))
    assert abs(float(log_density_matrix_variate(vs, S)) - want) < 1e-10
    sg = MatrixVariateSpec("sgw", beta, m, n, family="t2", nu=5.0)
    want = float(log_density_laguerre(
        EnsembleSpec("modified_jacobi", beta, m, n=n, nu=5.0), S))
    assert abs(float(log_density_matrix_variate(sg, S)) - want) < 1e-10


def test_beta8_eigenvalue_density_is_scalar_formula_only():
    spec = EnsembleSpec("hermite", 8, 2)
    v = float(log_density_eigenvalues(spec, np.array([0.5, -0.5])))
    assert np.isfinite(v)
    with pytest.raises(ValueError):
        log_density_element(EnsembleSpec("hermite", 8, 2, n=2),
                            rand_dm(1, 2, 2, 0))

import math

import numpy as np
import pytest
from scipy import stats

from rmx.algebra import Algebra, DMatrix, HermitianMatrix, eigvalsh, gram
from rmx.densities import EnsembleSpec, MatrixVariateSpec
from rmx.samplers import (
    RngStream,
    batch_eigvalsh,
    fourier_batch,
    gaussian_batch,
    haar_batch,
    hermite_ensemble_batch,
    laguerre_batch,
    quotient_batch,
    radial_batch,
    sample_fourier,
    sample_gaussian_matrix,
    sample_hermite_ensemble,
    sample_laguerre,
    sample_matrix_variate,
    sample_quotient_family,
    sample_radial_family,
    sample_tridiagonal_beta,
    tridiagonal_eigvals_batch,
)

N = 20_000


def test_rng_stream_reproducible_and_split():
    a = gaussian_batch(RngStream(11).generator("x"), 4, 2, 2, 2)
    b = gaussian_batch(RngStream(11).generator("x"), 4, 2, 2, 2)
    c = gaussian_batch(RngStream(11).generator("y"), 4, 2, 2, 2)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    s1 = RngStream(11).substream("task")
    s2 = RngStream(11).substream("task")
    assert s1 == s2
    assert s1 != RngStream(11).substream("other")


def test_sample_gaussian_matrix_contract():
    X = sample_gaussian_matrix(2, 3, 4, RngStream(0))
    assert isinstance(X, DMatrix) and X.shape == (3, 2) and X.beta == 4
    X2 = sample_gaussian_matrix(2, 3, 4, RngStream(0))
    assert np.array_equal(X.data, X2.data)
    with pytest.raises(ValueError):
        sample_gaussian_matrix(2, 2, 8, RngStream(0))


@pytest.mark.parametrize("beta", (1, 2, 4))
def test_gaussian_entry_second_moment(beta):
    a = gaussian_batch(RngStream(1).generator(beta), 100_000, 1, 1, beta)
    m2 = (a**2).sum(axis=3).mean()
    se = (a**2).sum(axis=3).std() / math.sqrt(a.shape[0])
    assert abs(m2 - 1.0) < 3 * se


def test_gaussian_beta2_component_structure():
    a = gaussian_batch(RngStream(2).generator(), 100_000, 1, 1, 2)[:, 0, 0, :]
    assert abs(a[:, 0].var() - 0.5) < 0.01
    assert abs(a[:, 1].var() - 0.5) < 0.01
    assert abs(np.corrcoef(a.T)[0, 1]) < 0.02


@pytest.mark.parametrize("beta", (1, 2, 4))
def test_hermite_ensemble_symmetry_bitexact(beta):
    S = sample_hermite_ensemble(3, beta, RngStream(3))
    star = S.data.transpose(1, 0, 2).copy()
    star[..., 1:] *= -1
    assert np.array_equal(S.data, star)
    assert isinstance(S, HermitianMatrix)


def test_hermite_ensemble_m1_beta1_standard_normal():
    x = hermite_ensemble_batch(RngStream(4).generator(), N, 1, 1)[:, 0, 0, 0]
    assert stats.kstest(x, "norm").pvalue > 0.01


def test_radial_hermite_matches_gaussian_in_distribution():
    spec = EnsembleSpec("hermite", 2, 2, n=3)
    a = radial_batch(spec, RngStream(5).generator("a"), N)
    b = gaussian_batch(RngStream(5).generator("b"), N, 3, 2, 2)
    p = stats.ks_2samp((a**2).sum(axis=(1, 2, 3)), (b**2).sum(axis=(1, 2, 3))).pvalue
    assert p > 0.01


def test_radial_t1_scalar_reduction_student_t():
    nu = 5.0
    spec = EnsembleSpec("t1", 1, 1, n=1, nu=nu)
    x = radial_batch(spec, RngStream(6).generator(), N)[:, 0, 0, 0]
    assert stats.kstest(x * math.sqrt(nu), "t", args=(nu,)).pvalue > 0.01


def test_radial_gegenbauer1_support():
    spec = EnsembleSpec("gegenbauer1", 4, 2, n=2, q=0.5)
    a = radial_batch(spec, RngStream(7).generator(), 5_000)
    assert (a**2).sum(axis=(1, 2, 3)).max() <= 1.0


def test_sample_radial_family_returns_hermitian_for_ensembles():
    spec = EnsembleSpec("t1", 2, 3, nu=4.0)  # no n: ensemble variant
    S = sample_radial_family(spec, RngStream(8))
    assert isinstance(S, HermitianMatrix) and S.size == 3


def test_quotient_jacobi_scalar_beta():
    b = quotient_batch("jacobi", 1, 3, 4, 1, RngStream(9).generator(), N)[:, 0, 0, 0]
    assert stats.kstest(b, "beta", args=(1.5, 2.0)).pvalue > 0.01


def test_quotient_b_and_f_related_in_distribution():
    # B and I - (I+F)^{-1} identically distributed (two-sample on eigenvalues)
    g = RngStream(10)
    B = quotient_batch("jacobi", 2, 4, 5, 2, g.generator("b"), N // 2)
    F = quotient_batch("modified_jacobi", 2, 4, 5, 2, g.generator("f"), N // 2)
    wB = batch_eigvalsh(B, 2)
    from rmx.algebra import embed
    Fe = embed(F, 2)
    eye = np.eye(2)
    G = eye - np.linalg.inv(eye + Fe)
    wG = np.linalg.eigvalsh(G)[:, ::-1]
    assert stats.ks_2samp(wB[:, 0], wG[:, 0]).pvalue > 0.01
    assert stats.ks_2samp(wB[:, 1], wG[:, 1]).pvalue > 0.01


def test_quotient_gegenbauer2_support():
    r = quotient_batch("gegenbauer2", 2, 3, 4, 1, RngStream(11).generator(), 2_000)
    from rmx.algebra import embed
    re = embed(r, 1)
    w = np.linalg.eigvalsh(re.transpose(0, 2, 1) @ re)
    assert w.max() < 1.0 and w.min() > 0.0


def test_quotient_needs_enough_rows():
    with pytest.raises(ValueError):
        quotient_batch("t2", 3, 3, 2, 1, RngStream(0).generator(), 1)


def test_laguerre_scalar_chi_square_and_positivity():
    s = laguerre_batch(EnsembleSpec("laguerre", 1, 1, n=3),
                       RngStream(12).generator(), N)[:, 0, 0, 0]
    assert stats.kstest(s, "chi2", args=(3,)).pvalue > 0.01
    S = laguerre_batch(EnsembleSpec("laguerre", 2, 2, n=3),
                       RngStream(13).generator(), 500)
    w = batch_eigvalsh(S, 2)
    assert w.min() > 0


def test_fourier_m1_uniform_and_range():
    th = fourier_batch(1, 2, RngStream(14).generator(), N)
    assert stats.kstest(th[:, 0], "uniform", args=(-math.pi, 2 * math.pi)).pvalue > 0.01
    for beta in (1, 2, 4):
        t = fourier_batch(2, beta, RngStream(15).generator(beta), 500)
        assert t.min() > -math.pi - 1e-12 and t.max() <= math.pi + 1e-12
    assert sample_fourier(3, 4, RngStream(16)).shape == (3,)


def test_haar_batch_unitary():
    for beta in (1, 2, 4):
        u = haar_batch(RngStream(17).generator(beta), 50, 3, beta)
        eye = np.eye(u.shape[1])
        err = np.abs(np.conj(u.transpose(0, 2, 1)) @ u - eye).max()
        assert err < 1e-12


def test_tridiagonal_matches_dense_hermite():
    lam_t = tridiagonal_eigvals_batch("hermite", 2, 1.0, None,
                                      RngStream(18).generator("t"), N)
    lam_d = batch_eigvalsh(hermite_ensemble_batch(RngStream(18).generator("d"), N, 2, 1), 1)
    assert stats.ks_2samp(lam_t[:, 0], lam_d[:, 0]).pvalue > 0.01
    assert stats.ks_2samp(lam_t[:, 1], lam_d[:, 1]).pvalue > 0.01


def test_tridiagonal_laguerre_beta2_scalar():
    lam = tridiagonal_eigvals_batch("laguerre", 1, 2.0, 3,
                                    RngStream(19).generator(), N)[:, 0]
    assert stats.kstest(2 * lam, "chi2", args=(6,)).pvalue > 0.01


def test_tridiagonal_beta8_runs():
    lam = sample_tridiagonal_beta("hermite", 2, 8.0, None, RngStream(20))
    assert lam.shape == (2,) and lam[0] > lam[1]
    with pytest.raises(ValueError):
        sample_tridiagonal_beta("hermite", 2, -1.0, None, RngStream(20))


def test_matrix_variate_normal_mean():
    beta, m, n = 2, 2, 3
    rng = np.random.default_rng(21)
    mu = DMatrix(Algebra.COMPLEX, rng.standard_normal((n, m, beta)))
    ms = MatrixVariateSpec("normal", beta, m, n, mu=mu)
    acc = np.zeros((n, m, beta))
    k = 400
    for i in range(k):
        acc += sample_matrix_variate(ms, RngStream(22).generator(i)).data
    err = np.abs(acc / k - mu.data).max()
    assert err < 5 * 1 / math.sqrt(beta * k) + 0.05


def test_matrix_variate_wishart_mean_scalar():
    sig = HermitianMatrix(Algebra.REAL, np.array([[[2.0]]]))
    ms = MatrixVariateSpec("wishart", 1, 1, 4, sigma=sig)
    vals = [sample_matrix_variate(ms, RngStream(23).generator(i)).data[0, 0, 0]
            for i in range(2000)]
    assert abs(np.mean(vals) - 8.0) < 3 * np.std(vals) / math.sqrt(len(vals))


def test_quotient_single_sample_types():
    t = sample_quotient_family("t2", 2, 3, 4, 2, RngStream(24))
    assert isinstance(t, DMatrix) and t.shape == (3, 2)
    b = sample_quotient_family("jacobi", 2, 3, 4, 2, RngStream(25))
    assert isinstance(b, HermitianMatrix)
    s = sample_laguerre(EnsembleSpec("laguerre", 4, 2, n=4), RngStream(26))
    assert isinstance(s, HermitianMatrix)
    assert eigvalsh(s).min() > 0

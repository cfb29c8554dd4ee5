import numpy as np
import pytest

from rmx.algebra import (
    Algebra,
    DMatrix,
    HermitianMatrix,
    cholesky,
    conj_transpose,
    eigvalsh,
    gram,
    hermitian_eig,
    lu_family,
    matmul,
    polar,
    qr,
    scalar_mul,
    svd,
)

BETAS = (1, 2, 4)


def rand_dm(beta, n, m, seed):
    rng = np.random.default_rng(seed)
    return DMatrix(Algebra.from_beta(beta), rng.standard_normal((n, m, beta)))


def rand_pd(beta, m, seed):
    return gram(rand_dm(beta, m + 2, m, seed))


def max_abs(a):
    return float(np.abs(a).max()) if a.size else 0.0


def test_quaternion_multiplication_table():
    i, j, k = [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]
    assert np.allclose(scalar_mul(i, j, 4), k)
    assert np.allclose(scalar_mul(j, k, 4), i)
    assert np.allclose(scalar_mul(k, i, 4), j)
    assert np.allclose(scalar_mul(j, i, 4), [0, 0, 0, -1])
    assert np.allclose(scalar_mul(i, i, 4), [-1, 0, 0, 0])


def test_matmul_identity_and_quaternion_1x1():
    X = rand_dm(4, 2, 3, 0)
    I2 = DMatrix.eye(Algebra.QUATERNION, 2)
    assert matmul(I2, X).allclose(X)
    qi = DMatrix(Algebra.QUATERNION, np.array([[[0.0, 1, 0, 0]]]))
    qj = DMatrix(Algebra.QUATERNION, np.array([[[0.0, 0, 1, 0]]]))
    assert np.allclose(matmul(qi, qj).data[0, 0], [0, 0, 0, 1])


@pytest.mark.parametrize("beta", BETAS)
def test_product_conj_transpose_rule(beta):
    A = rand_dm(beta, 3, 2, 1)
    B = rand_dm(beta, 2, 4, 2)
    lhs = conj_transpose(matmul(A, B))
    rhs = matmul(conj_transpose(B), conj_transpose(A))
    assert lhs.allclose(rhs, atol=1e-12)


@pytest.mark.parametrize("beta", BETAS)
def test_matmul_agrees_with_embedding_homomorphism(beta):
    A = rand_dm(beta, 3, 2, 3)
    B = rand_dm(beta, 2, 4, 4)
    lhs = matmul(A, B).embed()
    rhs = A.embed() @ B.embed()
    assert max_abs(np.asarray(lhs - rhs)) < 1e-12


def test_octonion_matrices_rejected():
    with pytest.raises(ValueError):
        DMatrix.zeros(Algebra.OCTONION, 2, 2)
    with pytest.raises(ValueError):
        HermitianMatrix.eye(Algebra.OCTONION, 2)


def test_dimension_mismatch_rejected():
    A = rand_dm(2, 3, 2, 5)
    B = rand_dm(2, 3, 2, 6)
    with pytest.raises(ValueError):
        matmul(A, B)
    with pytest.raises(ValueError):
        matmul(A, rand_dm(1, 2, 2, 7))


def test_conj_transpose_explicit_values():
    z = DMatrix(Algebra.COMPLEX, np.array([[[1.0, 2.0]]]))
    assert np.allclose(conj_transpose(z).data[0, 0], [1.0, -2.0])
    qij = DMatrix(Algebra.QUATERNION,
                  np.array([[[0.0, 1, 0, 0], [0.0, 0, 1, 0]]]))  # [[i, j]]
    ct = conj_transpose(qij)
    assert ct.shape == (2, 1)
    assert np.allclose(ct.data[0, 0], [0, -1, 0, 0])
    assert np.allclose(ct.data[1, 0], [0, 0, -1, 0])


# -- eigendecomposition ------------------------------------------------------

def test_eig_diag_trivial():
    S = HermitianMatrix(Algebra.REAL, np.array([[[3.0], [0.0]], [[0.0], [1.0]]]))
    eig = hermitian_eig(S)
    assert np.allclose(eig.values, [3.0, 1.0])
    assert np.allclose(np.abs(eig.vectors.data[:, :, 0]), np.eye(2))


def test_eig_symmetric_swap():
    S = HermitianMatrix(Algebra.REAL, np.array([[[0.0], [1.0]], [[1.0], [0.0]]]))
    assert np.allclose(hermitian_eig(S).values, [1.0, -1.0])


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_eig_reconstruction_and_gauge(beta, m):
    S = rand_pd(beta, m, 10 * m + beta)
    eig = hermitian_eig(S)
    W = eig.vectors
    alg = W.algebra
    assert np.all(np.diff(eig.values) < 0) or m == 1
    rec = matmul(matmul(W, DMatrix.from_real(alg, np.diag(eig.values))), W.H)
    scale = max_abs(S.data)
    assert max_abs(rec.data - S.data) <= 1e-10 * scale
    assert max_abs(matmul(W.H, W).data - DMatrix.eye(alg, m).data) < 1e-10
    # gauge: first entry of non-negligible norm is real positive
    for jcol in range(m):
        col = W.data[:, jcol, :]
        norms = np.sqrt((col**2).sum(axis=1))
        first = int(np.argmax(norms > 1e-8))
        assert col[first, 0] > 0
        assert max_abs(col[first, 1:]) < 1e-10


def test_quaternion_eig_matches_embedding_kramers():
    S = rand_pd(4, 3, 99)
    lam = hermitian_eig(S).values
    w = np.linalg.eigvalsh(S.embed())[::-1]
    assert np.allclose(lam, w[::2], atol=1e-10)
    assert np.allclose(w[::2], w[1::2], atol=1e-10)  # Kramers doubling


def test_quaternion_eig_degenerate_identity():
    eig = hermitian_eig(HermitianMatrix.eye(Algebra.QUATERNION, 3))
    assert np.allclose(eig.values, 1.0)
    W = eig.vectors
    assert max_abs(matmul(W.H, W).data - DMatrix.eye(Algebra.QUATERNION, 3).data) < 1e-10


@pytest.mark.parametrize("beta", BETAS)
def test_eig_invariant_under_unitary_conjugation(beta):
    S = rand_pd(beta, 3, 21 + beta)
    U, _ = qr(rand_dm(beta, 3, 3, 77 + beta))
    S2 = HermitianMatrix.from_dmatrix(matmul(matmul(U, S.as_dmatrix()), U.H),
                                      check=False)
    assert max_abs(hermitian_eig(S).values - hermitian_eig(S2).values) < 1e-9


# -- factorizations ----------------------------------------------------------

@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_qr_reconstruction(beta, m):
    X = rand_dm(beta, m + 1, m, 31 * m + beta)
    Q, T = qr(X)
    alg = X.algebra
    assert max_abs(matmul(Q, T).data - X.data) < 1e-10 * max(1.0, max_abs(X.data))
    assert max_abs(matmul(Q.H, Q).data - DMatrix.eye(alg, m).data) < 1e-12
    diag = T.data[np.arange(m), np.arange(m)]
    assert np.all(diag[:, 0] > 0)
    assert max_abs(diag[:, 1:]) == 0.0


def test_qr_orthonormal_input_gives_identity_t():
    X = rand_dm(2, 4, 2, 8)
    Q, _ = qr(X)
    Q2, T2 = qr(Q)
    assert Q2.allclose(Q, atol=1e-10)
    assert max_abs(T2.data - DMatrix.eye(Algebra.COMPLEX, 2).data) < 1e-10


def test_qr_pythagorean_column():
    X = DMatrix.from_real(Algebra.REAL, np.array([[3.0], [4.0]]))
    Q, T = qr(X)
    assert abs(T.data[0, 0, 0] - 5.0) < 1e-14
    assert np.allclose(Q.data[:, 0, 0], [0.6, 0.8])


def test_qr_rank_deficiency_raises():
    X = DMatrix.from_real(Algebra.REAL, np.array([[1.0, 1.0], [2.0, 2.0], [0.0, 0.0]]))
    with pytest.raises(np.linalg.LinAlgError):
        qr(X)


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_cholesky_reconstruction(beta, m):
    S = rand_pd(beta, m, 41 * m + beta)
    T = cholesky(S)
    scale = max(1.0, max_abs(S.data))
    assert max_abs(matmul(T.H, T).data - S.data) < 1e-10 * scale
    diag = T.data[np.arange(m), np.arange(m)]
    assert np.all(diag[:, 0] > 0)


def test_cholesky_hand_value():
    S = HermitianMatrix(Algebra.REAL, np.array([[[4.0], [2.0]], [[2.0], [2.0]]]))
    T = cholesky(S)
    assert np.allclose(T.data[..., 0], [[2.0, 1.0], [0.0, 1.0]])


def test_cholesky_rejects_indefinite():
    S = HermitianMatrix(Algebra.REAL, np.array([[[1.0], [0.0]], [[0.0], [-1.0]]]))
    with pytest.raises(np.linalg.LinAlgError):
        cholesky(S)


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_polar_reconstruction(beta, m):
    X = rand_dm(beta, m + 2, m, 51 * m + beta)
    P1, R = polar(X)
    alg = X.algebra
    scale = max(1.0, max_abs(X.data))
    assert max_abs(matmul(P1, R.as_dmatrix()).data - X.data) < 1e-10 * scale
    assert max_abs(matmul(P1.H, P1).data - DMatrix.eye(alg, m).data) < 1e-10
    assert eigvalsh(R).min() > 0


def test_polar_scalar_sign_split():
    X = DMatrix.from_real(Algebra.REAL, np.array([[-2.0]]))
    P1, R = polar(X)
    assert abs(P1.data[0, 0, 0] + 1.0) < 1e-14
    assert abs(R.data[0, 0, 0] - 2.0) < 1e-14


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_svd_reconstruction_and_eig_oracle(beta, m):
    X = rand_dm(beta, m + 1, m, 61 * m + beta)
    V1, d, W = svd(X)
    alg = X.algebra
    rec = matmul(matmul(V1, DMatrix.from_real(alg, np.diag(d))), W.H)
    scale = max(1.0, max_abs(X.data))
    assert max_abs(rec.data - X.data) < 1e-10 * scale
    assert np.all(d > 0)
    assert m == 1 or np.all(np.diff(d) < 0)
    # singular values = sqrt eigenvalues of X*X (independent route)
    assert np.allclose(np.sort(d**2), np.sort(eigvalsh(gram(X))), atol=1e-9)


def test_svd_embedded_diag():
    X = DMatrix.from_real(Algebra.REAL, np.array([[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    _, d, _ = svd(X)
    assert np.allclose(d, [2.0, 1.0])


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("variant", ("doolittle", "crout", "ldm"))
@pytest.mark.parametrize("m", (2, 3, 4))
def test_lu_reconstruction_and_conventions(beta, variant, m):
    X = rand_dm(beta, m, m, 71 * m + beta)
    f = lu_family(X, variant)
    if variant == "ldm":
        rec = matmul(matmul(f["L"], f["D"]), f["M"])
        for t, lower in (("L", True), ("M", False)):
            d = f[t].data[np.arange(m), np.arange(m)]
            assert np.allclose(d[:, 0], 1.0) and max_abs(d[:, 1:]) == 0
    else:
        rec = matmul(f["L"], f["U"])
        unit = "L" if variant == "doolittle" else "U"
        d = f[unit].data[np.arange(m), np.arange(m)]
        assert np.allclose(d[:, 0], 1.0) and max_abs(d[:, 1:]) == 0
    scale = max(1.0, max_abs(X.data))
    assert max_abs(rec.data - X.data) < 1e-10 * scale


def test_lu_upper_triangular_input_doolittle():
    X = DMatrix.from_real(Algebra.REAL, np.array([[2.0, 1.0], [0.0, 3.0]]))
    f = lu_family(X, "doolittle")
    assert np.allclose(f["L"].data[..., 0], np.eye(2))


def test_ldm_hand_value():
    X = DMatrix.from_real(Algebra.REAL, np.array([[4.0, 2.0], [2.0, 2.0]]))
    f = lu_family(X, "ldm")
    assert np.allclose(f["D"].data[np.arange(2), np.arange(2), 0], [4.0, 1.0])


def test_lu_zero_pivot_raises():
    X = DMatrix.from_real(Algebra.REAL, np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(np.linalg.LinAlgError):
        lu_family(X, "doolittle")


# -- coordinates -------------------------------------------------------------

@pytest.mark.parametrize("beta", BETAS)
def test_coordinate_counts(beta):
    n, m = 4, 3
    X = rand_dm(beta, n, m, 5)
    assert X.to_coords().size == beta * m * n == X.n_real_coords
    S = rand_pd(beta, m, 6)
    assert S.to_coords().size == m + beta * m * (m - 1) // 2 == S.n_real_coords
    S2 = HermitianMatrix.from_coords(S.algebra, m, S.to_coords())
    assert max_abs(S2.data - S.data) < 1e-14
    X2 = DMatrix.from_coords(X.algebra, n, m, X.to_coords())
    assert max_abs(X2.data - X.data) == 0.0


def test_hermitian_rejects_asymmetric():
    bad = np.zeros((2, 2, 1))
    bad[0, 1, 0] = 1.0
    with pytest.raises(ValueError):
        HermitianMatrix(Algebra.REAL, bad)

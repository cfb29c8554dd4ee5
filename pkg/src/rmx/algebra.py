"""Dense matrix arithmetic and factorizations over the real normed division algebras.

Matrices over R (beta=1), C (beta=2) and H (beta=4) share one storage format:
an ``(n, m, beta)`` float64 array holding the real components of every entry
in the basis order (1, i, j, k).  Products are evaluated through the algebra's
structure tensor, so one code path covers all three algebras.  Eigenvalue and
singular value problems for quaternion matrices go through the standard
complex embedding

    a + b i + c j + d k  ->  [[alpha, gamma], [-conj(gamma), conj(alpha)]]

with alpha = a + b i, gamma = c + d i; the doubled (Kramers) spectrum is
deduplicated on the way back.  Octonions (beta=8) exist only as a scalar
parameter elsewhere in the package; constructing an octonion matrix is an
error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Algebra",
    "DMatrix",
    "HermitianMatrix",
    "EigenSystem",
    "scalar_mul",
    "scalar_conj",
    "scalar_norm",
    "matmul",
    "conj_transpose",
    "hermitian_eig",
    "qr",
    "cholesky",
    "polar",
    "svd",
    "lu_family",
    "hermitian_sqrt",
    "hermitian_inv_sqrt",
    "logdet_hermitian_pd",
]

# Relative spectral gap below which a point is useless for Jacobian charts.
DEGENERATE_GAP = 1e-8


class Algebra(Enum):
    REAL = 1
    COMPLEX = 2
    QUATERNION = 4
    OCTONION = 8

    @property
    def beta(self) -> int:
        return self.value

    @classmethod
    def from_beta(cls, beta: int) -> "Algebra":
        try:
            return cls(beta)
        except ValueError:
            raise ValueError(f"beta must be one of 1, 2, 4, 8, got {beta}") from None


def _mult_tensor(beta: int) -> np.ndarray:
    """Structure tensor M with (x*y)_p = sum_{q,r} M[p,q,r] x_q y_r."""
    M = np.zeros((beta, beta, beta))
    if beta == 1:
        M[0, 0, 0] = 1.0
        return M
    if beta == 2:
        M[0, 0, 0] = 1.0
        M[0, 1, 1] = -1.0
        M[1, 0, 1] = 1.0
        M[1, 1, 0] = 1.0
        return M
    if beta == 4:
        # basis 1, i, j, k with ij=k, jk=i, ki=j
        table = {
            (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
            (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
            (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
            (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
        }
        for (q, r), (p, s) in table.items():
            M[p, q, r] = s
        return M
    raise ValueError(f"no multiplication tensor for beta={beta}")


_MULT = {b: _mult_tensor(b) for b in (1, 2, 4)}


def scalar_mul(x: np.ndarray, y: np.ndarray, beta: int) -> np.ndarray:
    """Product of two algebra elements given as component vectors."""
    return np.einsum("pqr,q,r->p", _MULT[beta], np.asarray(x, float), np.asarray(y, float))


def scalar_conj(x: np.ndarray) -> np.ndarray:
    out = np.array(x, float)
    out[1:] = -out[1:]
    return out


def scalar_norm(x: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(x, float) ** 2)))


def _check_algebra(algebra: Algebra) -> None:
    if algebra == Algebra.OCTONION:
        raise ValueError("octonion matrices are not supported; beta=8 is scalar-formula only")


class DMatrix:
    """Dense ``n x m`` matrix over R, C or H.

    ``data`` has shape ``(n, m, beta)``; the trailing axis holds the real
    components of each entry in the basis order (1, i, j, k).
    """

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: Algebra, data: np.ndarray):
        _check_algebra(algebra)
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[2] != algebra.beta:
            raise ValueError(
                f"expected shape (n, m, {algebra.beta}), got {data.shape}"
            )
        self.algebra = algebra
        self.data = data

    # -- constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, algebra: Algebra, n: int, m: int) -> "DMatrix":
        _check_algebra(algebra)
        return cls(algebra, np.zeros((n, m, algebra.beta)))

    @classmethod
    def eye(cls, algebra: Algebra, n: int) -> "DMatrix":
        out = cls.zeros(algebra, n, n)
        out.data[np.arange(n), np.arange(n), 0] = 1.0
        return out

    @classmethod
    def from_real(cls, algebra: Algebra, real: np.ndarray) -> "DMatrix":
        real = np.asarray(real, float)
        data = np.zeros(real.shape + (algebra.beta,))
        data[..., 0] = real
        return cls(algebra, data)

    @classmethod
    def from_complex(cls, z: np.ndarray) -> "DMatrix":
        z = np.asarray(z, complex)
        return cls(Algebra.COMPLEX, np.stack([z.real, z.imag], axis=-1))

    # -- basic structure ---------------------------------------------------
    @property
    def beta(self) -> int:
        return self.algebra.beta

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def n_real_coords(self) -> int:
        n, m = self.shape
        return self.beta * n * m

    def copy(self) -> "DMatrix":
        return DMatrix(self.algebra, self.data.copy())

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.data[i, j].copy()

    def to_coords(self) -> np.ndarray:
        """Row-major real coordinates, beta components per entry."""
        return self.data.reshape(-1).copy()

    @classmethod
    def from_coords(cls, algebra: Algebra, n: int, m: int, v: np.ndarray) -> "DMatrix":
        v = np.asarray(v, float)
        if v.size != algebra.beta * n * m:
            raise ValueError(f"expected {algebra.beta * n * m} coordinates, got {v.size}")
        return cls(algebra, v.reshape(n, m, algebra.beta))

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "DMatrix") -> "DMatrix":
        self._compatible(other)
        return DMatrix(self.algebra, self.data + other.data)

    def __sub__(self, other: "DMatrix") -> "DMatrix":
        self._compatible(other)
        return DMatrix(self.algebra, self.data - other.data)

    def __mul__(self, scalar: float) -> "DMatrix":
        return DMatrix(self.algebra, self.data * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "DMatrix") -> "DMatrix":
        return matmul(self, other)

    def _compatible(self, other: "DMatrix") -> None:
        if self.algebra != other.algebra:
            raise ValueError(f"algebra mismatch: {self.algebra} vs {other.algebra}")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def conj(self) -> "DMatrix":
        out = self.data.copy()
        out[..., 1:] *= -1.0
        return DMatrix(self.algebra, out)

    @property
    def T(self) -> "DMatrix":
        return DMatrix(self.algebra, self.data.transpose(1, 0, 2).copy())

    @property
    def H(self) -> "DMatrix":
        return self.conj().T

    def real_part(self) -> np.ndarray:
        return self.data[..., 0].copy()

    def trace(self) -> np.ndarray:
        n, m = self.shape
        k = min(n, m)
        return self.data[np.arange(k), np.arange(k)].sum(axis=0)

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def norm_trace(self) -> float:
        """tr(A*A) = sum of squared entry norms (always real)."""
        return float(np.sum(self.data**2))

    # -- embeddings --------------------------------------------------------
    def embed(self) -> np.ndarray:
        """Numeric carrier: real (beta=1), complex (beta=2), or the complex
        embedding of doubled size (beta=4)."""
        return embed(self.data, self.beta)

    @classmethod
    def from_embedding(cls, algebra: Algebra, E: np.ndarray) -> "DMatrix":
        return cls(algebra, disembed(E, algebra.beta))

    def allclose(self, other: "DMatrix", atol: float = 1e-12) -> bool:
        return self.algebra == other.algebra and np.allclose(self.data, other.data, atol=atol)

    def __repr__(self) -> str:
        n, m = self.shape
        return f"DMatrix({self.algebra.name.lower()}, {n}x{m})"


def embed(data: np.ndarray, beta: int) -> np.ndarray:
    """Embed component array (..., n, m, beta) into a numeric matrix."""
    if beta == 1:
        return np.ascontiguousarray(data[..., 0])
    if beta == 2:
        return np.ascontiguousarray(data[..., 0] + 1j * data[..., 1])
    if beta == 4:
        alpha = data[..., 0] + 1j * data[..., 1]
        gamma = data[..., 2] + 1j * data[..., 3]
        shape = data.shape[:-3] + (2 * data.shape[-3], 2 * data.shape[-2])
        E = np.zeros(shape, dtype=complex)
        E[..., 0::2, 0::2] = alpha
        E[..., 0::2, 1::2] = gamma
        E[..., 1::2, 0::2] = -np.conj(gamma)
        E[..., 1::2, 1::2] = np.conj(alpha)
        return E
    raise ValueError(f"no embedding for beta={beta}")


def disembed(E: np.ndarray, beta: int) -> np.ndarray:
    """Inverse of :func:`embed`, reading each block's first row."""
    if beta == 1:
        return np.asarray(E.real, float)[..., None].copy()
    if beta == 2:
        E = np.asarray(E, complex)
        return np.stack([E.real, E.imag], axis=-1)
    if beta == 4:
        E = np.asarray(E, complex)
        alpha = E[..., 0::2, 0::2]
        gamma = E[..., 0::2, 1::2]
        return np.stack([alpha.real, alpha.imag, gamma.real, gamma.imag], axis=-1)
    raise ValueError(f"no embedding for beta={beta}")


def embed_vector(data: np.ndarray, beta: int) -> np.ndarray:
    """Embed an (m, beta) column into the carrier (first embedding column)."""
    return embed(data[:, None, :], beta)[..., 0]


def disembed_vector(v: np.ndarray, beta: int) -> np.ndarray:
    """Quaternion column from a complex 2m-vector v: w_i = v_{2i} - conj(v_{2i+1}) j."""
    if beta == 1:
        return np.asarray(v.real, float)[:, None].copy()
    if beta == 2:
        return np.stack([v.real, v.imag], axis=-1)
    alpha = v[0::2]
    gamma = -np.conj(v[1::2])
    return np.stack([alpha.real, alpha.imag, gamma.real, gamma.imag], axis=-1)


class HermitianMatrix:
    """Matrix S with S = S* (real diagonal) over R, C or H."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: Algebra, data: np.ndarray, check: bool = True, tol: float = 1e-10):
        _check_algebra(algebra)
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != algebra.beta:
            raise ValueError(f"expected square (m, m, {algebra.beta}) array, got {data.shape}")
        if check:
            star = data.transpose(1, 0, 2).copy()
            star[..., 1:] *= -1.0
            scale = max(1.0, float(np.abs(data).max()))
            if not np.allclose(data, star, atol=tol * scale):
                raise ValueError("input is not Hermitian within tolerance")
        # symmetrize so S = S* holds exactly
        star = data.transpose(1, 0, 2).copy()
        star[..., 1:] *= -1.0
        self.algebra = algebra
        self.data = 0.5 * (data + star)

    @property
    def beta(self) -> int:
        return self.algebra.beta

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def n_real_coords(self) -> int:
        m, b = self.size, self.beta
        return m + b * m * (m - 1) // 2

    @classmethod
    def eye(cls, algebra: Algebra, m: int) -> "HermitianMatrix":
        return cls(algebra, DMatrix.eye(algebra, m).data, check=False)

    @classmethod
    def from_dmatrix(cls, A: DMatrix, check: bool = True) -> "HermitianMatrix":
        return cls(A.algebra, A.data, check=check)

    def as_dmatrix(self) -> DMatrix:
        return DMatrix(self.algebra, self.data.copy())

    def to_coords(self) -> np.ndarray:
        """Independent real coordinates: diagonal first, then the strict upper
        triangle row-major with beta components per entry."""
        m = self.size
        parts = [self.data[np.arange(m), np.arange(m), 0]]
        for i in range(m):
            for j in range(i + 1, m):
                parts.append(self.data[i, j])
        return np.concatenate(parts)

    @classmethod
    def from_coords(cls, algebra: Algebra, m: int, v: np.ndarray) -> "HermitianMatrix":
        v = np.asarray(v, float)
        b = algebra.beta
        expected = m + b * m * (m - 1) // 2
        if v.size != expected:
            raise ValueError(f"expected {expected} coordinates, got {v.size}")
        data = np.zeros((m, m, b))
        data[np.arange(m), np.arange(m), 0] = v[:m]
        pos = m
        for i in range(m):
            for j in range(i + 1, m):
                entry = v[pos:pos + b]
                pos += b
                data[i, j] = entry
                data[j, i] = scalar_conj(entry)
        return cls(algebra, data, check=False)

    def embed(self) -> np.ndarray:
        return embed(self.data, self.beta)

    def trace(self) -> float:
        m = self.size
        return float(self.data[np.arange(m), np.arange(m), 0].sum())

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.algebra, self.data + other.data, check=False)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.algebra, self.data - other.data, check=False)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.algebra, self.data * float(scalar), check=False)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianMatrix({self.algebra.name.lower()}, {self.size}x{self.size})"


@dataclass
class EigenSystem:
    """Spectral decomposition S = W Lambda W* with descending real eigenvalues."""

    values: np.ndarray
    vectors: DMatrix

    @property
    def min_gap(self) -> float:
        if len(self.values) < 2:
            return np.inf
        return float(np.min(np.abs(np.diff(self.values))))

    def is_degenerate(self, scale: float | None = None) -> bool:
        if scale is None:
            scale = max(1.0, float(np.max(np.abs(self.values))))
        return self.min_gap < DEGENERATE_GAP * scale


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

def matmul(A: DMatrix, B: DMatrix) -> DMatrix:
    """Matrix product over a shared algebra (beta <= 4)."""
    if A.algebra != B.algebra:
        raise ValueError(f"algebra mismatch: {A.algebra} vs {B.algebra}")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions disagree: {A.shape} @ {B.shape}")
    out = np.einsum("pqr,ijq,jkr->ikp", _MULT[A.beta], A.data, B.data, optimize=True)
    return DMatrix(A.algebra, out)


def conj_transpose(A: DMatrix) -> DMatrix:
    return A.H


def gram(A: DMatrix) -> HermitianMatrix:
    """A*A as a Hermitian matrix."""
    return HermitianMatrix.from_dmatrix(matmul(A.H, A), check=False)


def _gauge_eigvec_columns(W: DMatrix) -> DMatrix:
    """Right-multiply each column by a unit scalar so its first entry of
    non-negligible norm becomes real positive."""
    n, m = W.shape
    b = W.beta
    data = W.data.copy()
    for j in range(m):
        col = data[:, j, :]
        norms = np.sqrt((col**2).sum(axis=1))
        i = int(np.argmax(norms > 1e-12 * max(norms.max(), 1e-300)))
        u = col[i].copy()
        nu = np.sqrt((u**2).sum())
        phase = scalar_conj(u) / nu  # unit scalar, u * phase = |u|
        out = np.einsum("pqr,iq,r->ip", _MULT[b], col, phase)
        data[:, j, :] = out
    return DMatrix(W.algebra, data)


def hermitian_eig(S: HermitianMatrix) -> EigenSystem:
    """Eigendecomposition with descending eigenvalues and gauge-fixed vectors.

    Quaternion input goes through the complex embedding; every eigenvalue
    there appears twice (Kramers pairs) and one representative per pair is
    kept, chosen greedily so the returned quaternion columns stay orthonormal
    even for degenerate spectra.
    """
    m, b = S.size, S.beta
    E = S.embed()
    w, V = np.linalg.eigh(E)
    w = w[::-1]
    V = V[:, ::-1]
    if b < 4:
        vecs = DMatrix(S.algebra, np.stack(
            [disembed_vector(np.asarray(V[:, j]), b) for j in range(m)], axis=1))
        vecs = _gauge_eigvec_columns(vecs)
        return EigenSystem(values=np.asarray(w, float), vectors=vecs)

    # quaternion: pick one column per Kramers pair
    accepted_vals: list[float] = []
    accepted_cols: list[np.ndarray] = []  # (m, 4) component arrays
    for j in range(2 * m):
        cand = disembed_vector(np.asarray(V[:, j]), 4)
        resid = cand.copy()
        for col in accepted_cols:
            # quaternion projection <col, resid> = sum col_i^* resid_i
            inner = np.zeros(4)
            for i in range(m):
                inner += scalar_mul(scalar_conj(col[i]), resid[i], 4)
            for i in range(m):
                resid[i] -= scalar_mul(col[i], inner, 4)
        rn = np.sqrt((resid**2).sum())
        if rn > 0.1:
            accepted_cols.append(resid / rn)
            accepted_vals.append(float(w[j]))
            if len(accepted_cols) == m:
                break
    if len(accepted_cols) != m:
        raise np.linalg.LinAlgError("failed to deduplicate Kramers pairs")
    vecs = _gauge_eigvec_columns(DMatrix(S.algebra, np.stack(accepted_cols, axis=1)))
    return EigenSystem(values=np.asarray(accepted_vals, float), vectors=vecs)


def eigvalsh(S: HermitianMatrix) -> np.ndarray:
    """Descending eigenvalues only (Kramers-deduplicated for quaternions)."""
    w = np.linalg.eigvalsh(S.embed())[::-1]
    if S.beta == 4:
        w = w[::2]
    return np.asarray(w, float)


def qr(X: DMatrix) -> tuple[DMatrix, DMatrix]:
    """X = Q T with Q*Q = I and T upper triangular, real positive diagonal."""
    n, m = X.shape
    if n < m:
        raise ValueError(f"need n >= m, got {n} < {m}")
    E = X.embed()
    Q, R = np.linalg.qr(E)
    d = np.diagonal(R).copy()
    scale = np.abs(d).max() if d.size else 0.0
    if scale == 0.0 or np.abs(d).min() < 1e-12 * scale:
        raise np.linalg.LinAlgError("rank-deficient input in qr")
    phase = np.conj(d) / np.abs(d)
    R = phase[:, None] * R
    Q = Q * np.conj(phase)[None, :]
    Qm = DMatrix.from_embedding(X.algebra, Q)
    Tm = DMatrix.from_embedding(X.algebra, R)
    # round-off below the diagonal is exactly zero by construction
    for i in range(m):
        Tm.data[i, :i, :] = 0.0
        Tm.data[i, i, 1:] = 0.0
    return Qm, Tm


def cholesky(S: HermitianMatrix) -> DMatrix:
    """Upper triangular T with real positive diagonal and S = T*T."""
    E = S.embed()
    try:
        L = np.linalg.cholesky(E)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("matrix is not positive definite") from None
    # S = L L*  =>  T = L*
    T = DMatrix.from_embedding(S.algebra, L.conj().T)
    m = S.size
    for i in range(m):
        T.data[i, :i, :] = 0.0
        T.data[i, i, 1:] = 0.0
    return T


def hermitian_sqrt(S: HermitianMatrix) -> HermitianMatrix:
    """Positive definite square root via the spectral decomposition."""
    eig = hermitian_eig(S)
    if eig.values.min() <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return _assemble_from_eig(eig, np.sqrt(eig.values))


def hermitian_inv_sqrt(S: HermitianMatrix) -> HermitianMatrix:
    eig = hermitian_eig(S)
    if eig.values.min() <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return _assemble_from_eig(eig, 1.0 / np.sqrt(eig.values))


def hermitian_inv(S: HermitianMatrix) -> HermitianMatrix:
    eig = hermitian_eig(S)
    if np.abs(eig.values).min() == 0:
        raise np.linalg.LinAlgError("singular matrix")
    return _assemble_from_eig(eig, 1.0 / eig.values)


def _assemble_from_eig(eig: EigenSystem, values: np.ndarray) -> HermitianMatrix:
    W = eig.vectors
    D = DMatrix.from_real(W.algebra, np.diag(values))
    out = matmul(matmul(W, D), W.H)
    return HermitianMatrix.from_dmatrix(out, check=False)


def logdet_hermitian_pd(S: HermitianMatrix) -> float:
    """log det of a positive definite Hermitian matrix (Moore determinant
    for quaternions: product of the deduplicated eigenvalues)."""
    w = eigvalsh(S)
    if w.min() <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return float(np.sum(np.log(w)))


def polar(X: DMatrix) -> tuple[DMatrix, HermitianMatrix]:
    """X = P1 R with P1*P1 = I and R = (X*X)^{1/2} positive definite."""
    n, m = X.shape
    if n < m:
        raise ValueError(f"need n >= m, got {n} < {m}")
    S = gram(X)
    eig = hermitian_eig(S)
    if eig.values.min() <= 1e-14 * max(eig.values.max(), 1e-300):
        raise np.linalg.LinAlgError("rank-deficient input in polar")
    R = _assemble_from_eig(eig, np.sqrt(eig.values))
    Rinv = _assemble_from_eig(eig, 1.0 / np.sqrt(eig.values))
    P1 = matmul(X, Rinv.as_dmatrix())
    return P1, R


def svd(X: DMatrix) -> tuple[DMatrix, np.ndarray, DMatrix]:
    """X = V1 diag(D) W* with descending positive singular values.

    Built on the Hermitian eigensolver of X*X so the quaternion case inherits
    the Kramers handling and the eigenvector gauge.
    """
    n, m = X.shape
    if n < m:
        raise ValueError(f"need n >= m, got {n} < {m}")
    eig = hermitian_eig(gram(X))
    if eig.values.min() <= 1e-14 * max(eig.values.max(), 1e-300):
        raise np.linalg.LinAlgError("rank-deficient input in svd")
    d = np.sqrt(eig.values)
    W = eig.vectors
    Dinv = DMatrix.from_real(X.algebra, np.diag(1.0 / d))
    V1 = matmul(matmul(X, W), Dinv)
    return V1, d, W


def lu_family(X: DMatrix, variant: str) -> dict[str, DMatrix]:
    """LU-type factorization without pivoting.

    variant 'doolittle': X = L U, unit diagonal on L; returns {'L','U'}.
    variant 'crout':     X = L U, unit diagonal on U; returns {'L','U'}.
    variant 'ldm':       X = L D M, unit triangular L (lower), M (upper);
                         returns {'L','D','M'}.
    """
    n, m = X.shape
    if n != m:
        raise ValueError("lu_family requires a square matrix")
    b = X.beta
    alg = X.algebra
    if variant not in ("doolittle", "crout", "ldm"):
        raise ValueError(f"unknown variant {variant!r}")

    def inv_scalar(x):
        n2 = np.sum(x**2)
        if n2 < 1e-24:
            raise np.linalg.LinAlgError("zero pivot in lu_family")
        return scalar_conj(x) / n2

    L = np.zeros((m, m, b))
    U = np.zeros((m, m, b))
    unit_lower = variant in ("doolittle", "ldm")
    for k in range(m):
        if unit_lower:
            for j in range(k, m):
                acc = X.data[k, j].copy()
                for s in range(k):
                    acc -= scalar_mul(L[k, s], U[s, j], b)
                U[k, j] = acc
            L[k, k, 0] = 1.0
            piv_inv = inv_scalar(U[k, k])
            for i in range(k + 1, m):
                acc = X.data[i, k].copy()
                for s in range(k):
                    acc -= scalar_mul(L[i, s], U[s, k], b)
                L[i, k] = scalar_mul(acc, piv_inv, b)
        else:  # crout
            for i in range(k, m):
                acc = X.data[i, k].copy()
                for s in range(k):
                    acc -= scalar_mul(L[i, s], U[s, k], b)
                L[i, k] = acc
            U[k, k, 0] = 1.0
            piv_inv = inv_scalar(L[k, k])
            for j in range(k + 1, m):
                acc = X.data[k, j].copy()
                for s in range(k):
                    acc -= scalar_mul(L[k, s], U[s, j], b)
                U[k, j] = scalar_mul(piv_inv, acc, b)

    Lm = DMatrix(alg, L)
    Um = DMatrix(alg, U)
    if variant != "ldm":
        return {"L": Lm, "U": Um}
    # split U = D M with unit-diagonal M
    D = np.zeros((m, m, b))
    M = np.zeros((m, m, b))
    for k in range(m):
        D[k, k] = U[k, k]
        piv_inv = inv_scalar(U[k, k])
        M[k, k, 0] = 1.0
        for j in range(k + 1, m):
            M[k, j] = scalar_mul(piv_inv, U[k, j], b)
    return {"L": Lm, "D": DMatrix(alg, D), "M": DMatrix(alg, M)}

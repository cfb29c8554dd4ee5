"""Closed-form log-Jacobians of the matrix factorizations and the
finite-difference oracle that certifies them.

Every factorization gets a *chart*: a square map from the real coordinates of
its factor set to the real coordinates of the reconstructed matrix.  For the
triangular/diagonal factorizations the chart is global.  For factorizations
with an orthonormal factor the chart is local: the orthonormal factor H is
perturbed as H exp(Xi) with Xi skew-Hermitian, and the independent components
of Xi realize the invariant measure (H* dH) at first order.  Phase directions
that the factorization does not determine (the eigenvector/singular-vector
gauge) are zeroed out of the chart, so for those lemmas the oracle sees only
the eigenvalue-dependent factor of the closed form; the remaining constant
(2^-m pi^tau) is certified separately by the normalization integrals.

All Jacobians are returned in log space and are pure functions of the factor
data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .algebra import (
    Algebra,
    DMatrix,
    HermitianMatrix,
    cholesky,
    eigvalsh,
    gram,
    hermitian_eig,
    hermitian_sqrt,
    logdet_hermitian_pd,
    lu_family,
    matmul,
    polar,
    qr,
    scalar_conj,
    svd,
)
from .special import tau

__all__ = [
    "logjac_linear",
    "logjac_congruence",
    "logjac_diag_triangular",
    "logjac_lu",
    "logjac_qr",
    "logjac_qdr",
    "logjac_polar",
    "logjac_svd",
    "logjac_cholesky",
    "logjac_ldl",
    "logjac_sqrt",
    "logjac_spectral",
    "logjac_wishart_map",
    "FactorizationChart",
    "JacobianReport",
    "fd_jacobian_oracle",
    "build_chart",
    "EXPLICIT_LEMMAS",
    "STIEFEL_LEMMAS",
    "ALL_LEMMAS",
    "chart_dim",
]

FD_STEP = 1e-5
GAP_TOL = 0.05  # relative eigen-gap required of random chart base points


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _logdet_gram(A: DMatrix) -> float:
    return logdet_hermitian_pd(gram(A))


def _entry_norms(b, beta: int) -> np.ndarray:
    b = np.asarray(b, float)
    if b.ndim == 1:
        return np.abs(b)
    if b.ndim == 2 and b.shape[1] == beta:
        return np.sqrt((b**2).sum(axis=1))
    raise ValueError(f"expected shape (m,) or (m, {beta}), got {b.shape}")


def logjac_linear(A: DMatrix, B: DMatrix, m: int, n: int, beta: int) -> float:
    """Volume factor of X -> A X B + C on n x m matrices."""
    if A.shape != (n, n) or B.shape != (m, m):
        raise ValueError("A must be n x n and B must be m x m")
    return beta * m / 2 * _logdet_gram(A) + beta * n / 2 * _logdet_gram(B)


def logjac_congruence(A: DMatrix, m: int, beta: int) -> float:
    """Volume factor of S -> A S A* + C on the m x m Hermitian space."""
    if A.shape != (m, m):
        raise ValueError("A must be m x m")
    return (beta * (m - 1) / 2 + 1) * _logdet_gram(A)


def logjac_diag_triangular(b, m: int, beta: int) -> float:
    """J = B G with B diagonal, G unit upper triangular: prod |b_i|^{beta(m-i)}."""
    norms = _entry_norms(b, beta)
    if len(norms) != m:
        raise ValueError(f"expected {m} diagonal entries")
    if np.any(norms == 0):
        raise ValueError("zero diagonal entry")
    i = np.arange(1, m + 1)
    return float(np.sum(beta * (m - i) * np.log(norms)))


def logjac_lu(diagonal, m: int, beta: int, variant: str) -> float:
    """LU-type factor: prod |d_i|^{c beta(m-i)} with c = 2 for LDM, else 1."""
    if variant not in ("doolittle", "crout", "ldm"):
        raise ValueError(f"unknown variant {variant!r}")
    c = 2.0 if variant == "ldm" else 1.0
    norms = _entry_norms(diagonal, beta)
    if len(norms) != m:
        raise ValueError(f"expected {m} diagonal entries")
    if np.any(norms == 0):
        raise ValueError("zero diagonal entry")
    i = np.arange(1, m + 1)
    return float(np.sum(c * beta * (m - i) * np.log(norms)))


def logjac_qr(T, n: int, beta: int) -> float:
    """X = QT: prod t_ii^{beta(n-i+1)-1} over the positive real diagonal."""
    t = _tri_diag(T)
    m = len(t)
    if np.any(t <= 0):
        raise ValueError("QR gauge requires a positive diagonal")
    i = np.arange(1, m + 1)
    return float(np.sum((beta * (n - i + 1) - 1) * np.log(t)))


def logjac_qdr(N, m: int, n: int, beta: int) -> float:
    """X = H N Omega: 2^{-m} prod n_i^{beta(n+m-2i+1)-1} as stated; the local
    chart Jacobian carries the product only (see fd target)."""
    nd = np.asarray(N, float)
    if nd.size != m:
        raise ValueError(f"expected {m} diagonal entries")
    if np.any(nd <= 0):
        raise ValueError("QDR gauge requires a positive diagonal")
    i = np.arange(1, m + 1)
    return float(-m * math.log(2.0) + np.sum((beta * (n + m - 2 * i + 1) - 1) * np.log(nd)))


def _pd_eigs(R, beta: int | None = None) -> np.ndarray:
    if isinstance(R, HermitianMatrix):
        d = eigvalsh(R)
    else:
        d = np.sort(np.asarray(R, float))[::-1]
    if np.any(d <= 0):
        raise ValueError("matrix must be positive definite")
    return d


def logjac_polar(R, n: int, beta: int) -> float:
    """X = P1 R: |R|^{beta(n-m+1)-1} prod_{i<j} (d_i + d_j)^beta."""
    d = _pd_eigs(R)
    m = len(d)
    out = (beta * (n - m + 1) - 1) * float(np.sum(np.log(d)))
    for i in range(m):
        for j in range(i + 1, m):
            out += beta * math.log(d[i] + d[j])
    return out


def logjac_svd(D, m: int, n: int, beta: int) -> float:
    """X = V1 D W*: 2^{-m} pi^tau prod d_i^{beta(n-m+1)-1} prod (d_i^2-d_j^2)^beta."""
    d = np.asarray(D, float)
    if d.size != m:
        raise ValueError(f"expected {m} singular values")
    if np.any(d <= 0) or np.any(np.diff(d) >= 0):
        raise ValueError("singular values must be strictly descending and positive")
    out = -m * math.log(2.0) + tau(beta, m) * math.log(math.pi)
    out += (beta * (n - m + 1) - 1) * float(np.sum(np.log(d)))
    for i in range(m):
        for j in range(i + 1, m):
            out += beta * math.log(d[i] ** 2 - d[j] ** 2)
    return out


def logjac_cholesky(T, m: int, beta: int) -> float:
    """S = T*T: 2^m prod t_ii^{beta(m-i)+1}."""
    t = _tri_diag(T)
    if len(t) != m:
        raise ValueError(f"expected {m} diagonal entries")
    if np.any(t <= 0):
        raise ValueError("Cholesky gauge requires a positive diagonal")
    i = np.arange(1, m + 1)
    return float(m * math.log(2.0) + np.sum((beta * (m - i) + 1) * np.log(t)))


def logjac_ldl(o, m: int, beta: int) -> float:
    """S = Omega* O Omega: prod o_i^{beta(m-i)}."""
    ov = np.asarray(o, float)
    if ov.size != m:
        raise ValueError(f"expected {m} pivots")
    if np.any(ov <= 0):
        raise ValueError("pivots must be positive")
    i = np.arange(1, m + 1)
    return float(np.sum(beta * (m - i) * np.log(ov)))


def logjac_sqrt(R, beta: int) -> float:
    """S = R^2: 2^m |R| prod_{i<j} (d_i + d_j)^beta.

    The source statement ranges the product over i <= j, which double-counts
    the diagonal (it gives 4r^2 instead of the scalar truth 2r at m = 1).
    The bookkeeping used here -- diagonal contributions absorbed into
    2^m |R|, off-diagonal product strictly over i < j -- is the one the
    finite-difference oracle and the Wishart-map composition identity single
    out.
    """
    d = _pd_eigs(R)
    m = len(d)
    out = m * math.log(2.0) + float(np.sum(np.log(d)))
    for i in range(m):
        for j in range(i + 1, m):
            out += beta * math.log(d[i] + d[j])
    return out


def logjac_spectral(lam, beta: int) -> float:
    """S = W Lambda W*: 2^{-m} pi^tau prod_{i<j} (lambda_i - lambda_j)^beta."""
    lv = np.asarray(lam, float)
    m = lv.size
    if m > 1 and np.any(np.diff(lv) >= 0):
        raise ValueError("eigenvalues must be strictly descending")
    out = -m * math.log(2.0) + tau(beta, m) * math.log(math.pi)
    for i in range(m):
        for j in range(i + 1, m):
            out += beta * math.log(lv[i] - lv[j])
    return out


def logjac_wishart_map(S, m: int, n: int, beta: int) -> float:
    """(dX) = 2^{-m} |S|^{beta(n-m+1)/2-1} (dS)(V1* dV1) for S = X*X."""
    if isinstance(S, HermitianMatrix):
        ld = logdet_hermitian_pd(S)
    else:
        d = _pd_eigs(S)
        ld = float(np.sum(np.log(d)))
    return -m * math.log(2.0) + (beta * (n - m + 1) / 2 - 1) * ld


def _tri_diag(T) -> np.ndarray:
    if isinstance(T, DMatrix):
        m = min(T.shape)
        return T.data[np.arange(m), np.arange(m), 0].copy()
    return np.asarray(T, float)


# ---------------------------------------------------------------------------
# coordinate helpers for triangular and skew-Hermitian factors
# ---------------------------------------------------------------------------

def _tri_coords(A: DMatrix, diag: str, lower: bool = False) -> np.ndarray:
    """Coordinates of a triangular matrix: diagonal first ('full' = beta
    components, 'real' = one, 'none' = skipped), then the strict triangle
    row-major."""
    m = A.shape[0]
    parts = []
    if diag == "full":
        parts.extend(A.data[i, i] for i in range(m))
    elif diag == "real":
        parts.append(A.data[np.arange(m), np.arange(m), 0])
    elif diag != "none":
        raise ValueError(diag)
    for i in range(m):
        rng_j = range(0, i) if lower else range(i + 1, m)
        for j in rng_j:
            parts.append(A.data[i, j])
    return np.concatenate([np.atleast_1d(np.asarray(p, float)).ravel() for p in parts])


def _tri_from_coords(alg: Algebra, m: int, v: np.ndarray, diag: str,
                     lower: bool = False) -> DMatrix:
    b = alg.beta
    data = np.zeros((m, m, b))
    pos = 0
    if diag == "full":
        for i in range(m):
            data[i, i] = v[pos:pos + b]
            pos += b
    elif diag == "real":
        data[np.arange(m), np.arange(m), 0] = v[pos:pos + m]
        pos += m
    elif diag == "none":
        data[np.arange(m), np.arange(m), 0] = 1.0
    for i in range(m):
        rng_j = range(0, i) if lower else range(i + 1, m)
        for j in rng_j:
            data[i, j] = v[pos:pos + b]
            pos += b
    return DMatrix(alg, data)


def _tri_coord_count(m: int, beta: int, diag: str) -> int:
    base = beta * m * (m - 1) // 2
    return base + {"full": beta * m, "real": m, "none": 0}[diag]


def skew_dim(m: int, beta: int, include_diag: bool) -> int:
    d = beta * m * (m - 1) // 2
    if include_diag:
        d += (beta - 1) * m
    return d


def _skew_from_params(alg: Algebra, m: int, p: np.ndarray, include_diag: bool) -> DMatrix:
    """Skew-Hermitian m x m matrix: strict upper triangle (beta components per
    entry, row-major) then, if included, the imaginary diagonal components."""
    b = alg.beta
    data = np.zeros((m, m, b))
    pos = 0
    for i in range(m):
        for j in range(i + 1, m):
            entry = np.asarray(p[pos:pos + b], float)
            pos += b
            data[i, j] = entry
            data[j, i] = -scalar_conj(entry)
    if include_diag and b > 1:
        for i in range(m):
            data[i, i, 1:] = p[pos:pos + b - 1]
            pos += b - 1
    return DMatrix(alg, data)


def stiefel_tangent_dim(m: int, n: int, beta: int, gauge_fixed: bool) -> int:
    d = skew_dim(m, beta, include_diag=not gauge_fixed)
    return d + beta * (n - m) * m


def _stiefel_step(Hfull: DMatrix, p: np.ndarray, m: int, gauge_fixed: bool) -> DMatrix:
    """First m columns of Hfull expm(Xi~) with Xi~ = [[Xi11, -Xi21*], [Xi21, 0]]."""
    alg = Hfull.algebra
    b = alg.beta
    n = Hfull.shape[0]
    d11 = skew_dim(m, b, include_diag=not gauge_fixed)
    Xi = np.zeros((n, n, b))
    Xi[:m, :m] = _skew_from_params(alg, m, p[:d11], include_diag=not gauge_fixed).data
    pos = d11
    for i in range(n - m):
        for j in range(m):
            entry = np.asarray(p[pos:pos + b], float)
            pos += b
            Xi[m + i, j] = entry
            Xi[j, m + i] = -scalar_conj(entry)
    XiM = DMatrix(alg, Xi)
    G = DMatrix.from_embedding(alg, expm(XiM.embed()))
    H1 = matmul(Hfull, G)
    return DMatrix(alg, H1.data[:, :m, :].copy())


def _complete_frame(H1: DMatrix, rng: np.random.Generator) -> DMatrix:
    """Extend orthonormal columns H1 (n x m) to a full n x n unitary frame."""
    n, m = H1.shape
    if n == m:
        return H1
    alg = H1.algebra
    G = DMatrix(alg, rng.standard_normal((n, n - m, alg.beta)))
    stacked = DMatrix(alg, np.concatenate([H1.data, G.data], axis=1))
    Q, _ = qr(stacked)
    # leading m columns reproduce H1 because its Gram block is the identity
    if not np.allclose(Q.data[:, :m, :], H1.data, atol=1e-9):
        raise np.linalg.LinAlgError("frame completion failed")
    out = Q.data.copy()
    out[:, :m, :] = H1.data
    return DMatrix(alg, out)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass
class FactorizationChart:
    """Square local chart of one factorization lemma at a sampled point."""

    name: str
    beta: int
    m: int
    n: int
    x0: np.ndarray
    ambient0: np.ndarray
    reconstruct: Callable[[np.ndarray], np.ndarray]
    closed_form_log: float
    fd_target_log: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.x0)

    def check_roundtrip(self, tol: float = 1e-12) -> None:
        scale = max(1.0, float(np.abs(self.ambient0).max()))
        err = float(np.abs(self.reconstruct(self.x0) - self.ambient0).max())
        if err > tol * scale:
            raise ValueError(f"chart {self.name}: reconstruction error {err}")


@dataclass
class JacobianReport:
    lemma: str
    beta: int
    m: int
    n: int
    closed_form_log: float
    oracle_log: float
    rel_error: float
    point_seed: int | None = None


def fd_jacobian_oracle(chart: FactorizationChart, step: float = FD_STEP) -> float:
    """log |det| of the central finite-difference matrix of the chart map.

    Per-coordinate step h_j = step * (1 + |x_j|).
    """
    x0 = chart.x0
    k = chart.dim
    M = np.empty((k, k))
    for j in range(k):
        h = step * (1.0 + abs(x0[j]))
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += h
        xm[j] -= h
        M[:, j] = (chart.reconstruct(xp) - chart.reconstruct(xm)) / (2.0 * h)
    sign, logdet = np.linalg.slogdet(M)
    if sign == 0 or not np.isfinite(logdet):
        raise np.linalg.LinAlgError(
            f"singular finite-difference matrix for chart {chart.name} (degenerate point)"
        )
    return float(logdet)


# -- random base points ------------------------------------------------------

def _rand_dm(alg: Algebra, n: int, m: int, rng) -> DMatrix:
    return DMatrix(alg, rng.standard_normal((n, m, alg.beta)))


def _rand_nonsingular(alg: Algebra, n: int, rng, smin: float = 0.3) -> DMatrix:
    for _ in range(50):
        A = _rand_dm(alg, n, n, rng)
        s = np.linalg.svd(np.atleast_2d(A.embed()), compute_uv=False)
        if s.min() > smin:
            return A
    raise RuntimeError("failed to sample a well-conditioned matrix")


def _rand_spread_pd(alg: Algebra, m: int, rng) -> HermitianMatrix:
    """PD Hermitian with well-separated eigenvalues for gauge charts."""
    for _ in range(50):
        S = gram(_rand_dm(alg, m + 2, m, rng))
        w = eigvalsh(S)
        scale = max(w.max(), 1e-12)
        if w.min() > 0.05 * scale and (m < 2 or np.min(-np.diff(w)) > GAP_TOL * scale):
            return S
    raise RuntimeError("failed to sample a PD matrix with separated spectrum")


def _rand_spread_rect(alg: Algebra, n: int, m: int, rng) -> DMatrix:
    """Full-rank n x m matrix whose singular values are well separated."""
    for _ in range(50):
        X = _rand_dm(alg, n, m, rng)
        w = eigvalsh(gram(X))
        scale = max(w.max(), 1e-12)
        if w.min() > 0.05 * scale and (m < 2 or np.min(-np.diff(w)) > GAP_TOL * scale):
            return X
    raise RuntimeError("failed to sample a spread-spectrum matrix")


# -- chart builders ----------------------------------------------------------

def _dm_chart_dims(m: int, n: int, beta: int) -> int:
    return beta * m * n


def _build_linear(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    A = _rand_nonsingular(alg, n, rng)
    B = _rand_nonsingular(alg, m, rng)
    C = _rand_dm(alg, n, m, rng)
    X0 = _rand_dm(alg, n, m, rng)

    def recon(v):
        X = DMatrix.from_coords(alg, n, m, v)
        return (matmul(matmul(A, X), B) + C).to_coords()

    closed = logjac_linear(A, B, m, n, b)
    return FactorizationChart("linear", b, m, n, X0.to_coords(),
                              recon(X0.to_coords()), recon, closed, closed)


def _build_congruence(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    A = _rand_nonsingular(alg, m, rng)
    S0 = _rand_spread_pd(alg, m, rng)

    def recon(v):
        S = HermitianMatrix.from_coords(alg, m, v)
        Y = matmul(matmul(A, S.as_dmatrix()), A.H)
        return HermitianMatrix.from_dmatrix(Y, check=False).to_coords()

    closed = logjac_congruence(A, m, b)
    x0 = S0.to_coords()
    return FactorizationChart("congruence", b, m, m, x0, recon(x0), recon, closed, closed)


def _build_diag_triangular(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    bd = rng.standard_normal((m, b))
    norms = np.sqrt((bd**2).sum(axis=1))
    bd[norms < 0.3] += 0.5  # keep diagonal entries away from zero
    G0 = _tri_from_coords(alg, m, rng.standard_normal(_tri_coord_count(m, b, "none")), "none")
    nb = m * b
    x0 = np.concatenate([bd.ravel(), _tri_coords(G0, "none")])

    def recon(v):
        B = DMatrix(alg, np.zeros((m, m, b)))
        B.data[np.arange(m), np.arange(m)] = v[:nb].reshape(m, b)
        G = _tri_from_coords(alg, m, v[nb:], "none")
        J = matmul(B, G)
        return _tri_coords(J, "full")

    closed = logjac_diag_triangular(v_to_diag(x0[:nb], m, b), m, b)
    return FactorizationChart("diag_triangular", b, m, m, x0, recon(x0), recon,
                              closed, closed)


def v_to_diag(v: np.ndarray, m: int, beta: int) -> np.ndarray:
    return np.asarray(v, float).reshape(m, beta)


def _build_lu(variant: str):
    def build(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
        b = alg.beta
        for _ in range(50):
            X0 = _rand_dm(alg, m, m, rng)
            try:
                f = lu_family(X0, variant)
            except np.linalg.LinAlgError:
                continue
            diag_holder = {"doolittle": "U", "crout": "L", "ldm": "D"}[variant]
            dvals = f[diag_holder].data[np.arange(m), np.arange(m)]
            if np.sqrt((dvals**2).sum(axis=1)).min() > 0.2:
                break
        else:
            raise RuntimeError("failed to sample an LU-friendly matrix")

        if variant == "doolittle":
            x0 = np.concatenate([_tri_coords(f["L"], "none", lower=True),
                                 _tri_coords(f["U"], "full")])
            nl = _tri_coord_count(m, b, "none")

            def recon(v):
                L = _tri_from_coords(alg, m, v[:nl], "none", lower=True)
                U = _tri_from_coords(alg, m, v[nl:], "full")
                return matmul(L, U).to_coords()

        elif variant == "crout":
            x0 = np.concatenate([_tri_coords(f["L"], "full", lower=True),
                                 _tri_coords(f["U"], "none")])
            nl = _tri_coord_count(m, b, "full")

            def recon(v):
                L = _tri_from_coords(alg, m, v[:nl], "full", lower=True)
                U = _tri_from_coords(alg, m, v[nl:], "none")
                return matmul(L, U).to_coords()

        else:  # ldm
            x0 = np.concatenate([_tri_coords(f["L"], "none", lower=True),
                                 f["D"].data[np.arange(m), np.arange(m)].ravel(),
                                 _tri_coords(f["M"], "none")])
            nl = _tri_coord_count(m, b, "none")

            def recon(v):
                L = _tri_from_coords(alg, m, v[:nl], "none", lower=True)
                D = DMatrix(alg, np.zeros((m, m, b)))
                D.data[np.arange(m), np.arange(m)] = v[nl:nl + m * b].reshape(m, b)
                M = _tri_from_coords(alg, m, v[nl + m * b:], "none")
                return matmul(matmul(L, D), M).to_coords()

        closed = logjac_lu(dvals, m, b, variant)
        return FactorizationChart(f"lu_{variant}", b, m, m, x0, recon(x0), recon,
                                  closed, closed)

    return build


def _build_cholesky(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    S0 = _rand_spread_pd(alg, m, rng)
    T0 = cholesky(S0)
    x0 = _tri_coords(T0, "real")

    def recon(v):
        T = _tri_from_coords(alg, m, v, "real")
        S = matmul(T.H, T)
        return HermitianMatrix.from_dmatrix(S, check=False).to_coords()

    closed = logjac_cholesky(T0, m, b)
    return FactorizationChart("cholesky", b, m, m, x0, recon(x0), recon, closed, closed)


def _build_ldl(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    S0 = _rand_spread_pd(alg, m, rng)
    T0 = cholesky(S0)
    t = T0.data[np.arange(m), np.arange(m), 0]
    o0 = t**2
    Om = T0.data / t[:, None, None]  # Omega = diag(t)^{-1} T, unit diagonal
    Om0 = DMatrix(alg, Om)
    x0 = np.concatenate([o0, _tri_coords(Om0, "none")])

    def recon(v):
        o = v[:m]
        Omega = _tri_from_coords(alg, m, v[m:], "none")
        O = DMatrix.from_real(alg, np.diag(o))
        S = matmul(matmul(Omega.H, O), Omega)
        return HermitianMatrix.from_dmatrix(S, check=False).to_coords()

    closed = logjac_ldl(o0, m, b)
    return FactorizationChart("ldl", b, m, m, x0, recon(x0), recon, closed, closed)


def _build_sqrt(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    R0 = _rand_spread_pd(alg, m, rng)
    x0 = R0.to_coords()

    def recon(v):
        R = HermitianMatrix.from_coords(alg, m, v)
        S = matmul(R.as_dmatrix(), R.as_dmatrix())
        return HermitianMatrix.from_dmatrix(S, check=False).to_coords()

    closed = logjac_sqrt(R0, b)
    return FactorizationChart("sqrt", b, m, m, x0, recon(x0), recon, closed, closed)


def _build_qr(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    X0 = _rand_spread_rect(alg, n, m, rng)
    H1, T0 = qr(X0)
    Hfull = _complete_frame(H1, rng)
    dst = stiefel_tangent_dim(m, n, b, gauge_fixed=False)
    tc = _tri_coords(T0, "real")
    x0 = np.concatenate([np.zeros(dst), tc])

    def recon(v):
        H = _stiefel_step(Hfull, v[:dst], m, gauge_fixed=False)
        T = _tri_from_coords(alg, m, v[dst:], "real")
        return matmul(H, T).to_coords()

    closed = logjac_qr(T0, n, b)
    return FactorizationChart("qr", b, m, n, x0, recon(x0), recon, closed, closed)


def _build_qdr(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    X0 = _rand_spread_rect(alg, n, m, rng)
    H1, T0 = qr(X0)
    Hfull = _complete_frame(H1, rng)
    t = T0.data[np.arange(m), np.arange(m), 0]
    Om0 = DMatrix(alg, T0.data / t[:, None, None])
    dst = stiefel_tangent_dim(m, n, b, gauge_fixed=False)
    x0 = np.concatenate([np.zeros(dst), t, _tri_coords(Om0, "none")])

    def recon(v):
        H = _stiefel_step(Hfull, v[:dst], m, gauge_fixed=False)
        N = DMatrix.from_real(alg, np.diag(v[dst:dst + m]))
        Om = _tri_from_coords(alg, m, v[dst + m:], "none")
        return matmul(matmul(H, N), Om).to_coords()

    closed = logjac_qdr(t, m, n, b)
    # the 2^{-m} in the stated form is a global convention, not a local factor
    return FactorizationChart("qdr", b, m, n, x0, recon(x0), recon, closed,
                              closed + m * math.log(2.0))


def _build_polar(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    X0 = _rand_spread_rect(alg, n, m, rng)
    P1, R0 = polar(X0)
    Hfull = _complete_frame(P1, rng)
    dst = stiefel_tangent_dim(m, n, b, gauge_fixed=False)
    x0 = np.concatenate([np.zeros(dst), R0.to_coords()])

    def recon(v):
        H = _stiefel_step(Hfull, v[:dst], m, gauge_fixed=False)
        R = HermitianMatrix.from_coords(alg, m, v[dst:])
        return matmul(H, R.as_dmatrix()).to_coords()

    closed = logjac_polar(R0, n, b)
    return FactorizationChart("polar", b, m, n, x0, recon(x0), recon, closed, closed)


def _build_svd(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    X0 = _rand_spread_rect(alg, n, m, rng)
    V1, d0, W0 = svd(X0)
    Vfull = _complete_frame(V1, rng)
    dv = stiefel_tangent_dim(m, n, b, gauge_fixed=True)
    dw = skew_dim(m, b, include_diag=True)
    x0 = np.concatenate([np.zeros(dv), d0, np.zeros(dw)])

    def recon(v):
        V = _stiefel_step(Vfull, v[:dv], m, gauge_fixed=True)
        D = DMatrix.from_real(alg, np.diag(v[dv:dv + m]))
        Xi = _skew_from_params(alg, m, v[dv + m:], include_diag=True)
        W = matmul(W0, DMatrix.from_embedding(alg, expm(Xi.embed())))
        return matmul(matmul(V, D), W.H).to_coords()

    closed = logjac_svd(d0, m, n, b)
    target = closed + m * math.log(2.0) - tau(b, m) * math.log(math.pi)
    return FactorizationChart("svd", b, m, n, x0, recon(x0), recon, closed, target)


def _build_spectral(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    S0 = _rand_spread_pd(alg, m, rng)
    eig = hermitian_eig(S0)
    if eig.is_degenerate():
        raise np.linalg.LinAlgError("degenerate spectrum")
    W0, lam0 = eig.vectors, eig.values
    dw = skew_dim(m, b, include_diag=False)
    x0 = np.concatenate([np.zeros(dw), lam0])

    def recon(v):
        Xi = _skew_from_params(alg, m, v[:dw], include_diag=False)
        W = matmul(W0, DMatrix.from_embedding(alg, expm(Xi.embed())))
        L = DMatrix.from_real(alg, np.diag(v[dw:]))
        S = matmul(matmul(W, L), W.H)
        return HermitianMatrix.from_dmatrix(S, check=False).to_coords()

    closed = logjac_spectral(lam0, b)
    target = closed + m * math.log(2.0) - tau(b, m) * math.log(math.pi)
    return FactorizationChart("spectral", b, m, m, x0, recon(x0), recon, closed, target)


def _build_wishart_map(alg: Algebra, m: int, n: int, rng) -> FactorizationChart:
    b = alg.beta
    X0 = _rand_spread_rect(alg, n, m, rng)
    P1, _R = polar(X0)
    S0 = gram(X0)
    Hfull = _complete_frame(P1, rng)
    dst = stiefel_tangent_dim(m, n, b, gauge_fixed=False)
    x0 = np.concatenate([np.zeros(dst), S0.to_coords()])

    def recon(v):
        H = _stiefel_step(Hfull, v[:dst], m, gauge_fixed=False)
        S = HermitianMatrix.from_coords(alg, m, v[dst:])
        R = hermitian_sqrt(S)
        return matmul(H, R.as_dmatrix()).to_coords()

    closed = logjac_wishart_map(S0, m, n, b)
    return FactorizationChart("wishart_map", b, m, n, x0, recon(x0), recon, closed, closed)


_BUILDERS = {
    "linear": _build_linear,
    "congruence": _build_congruence,
    "diag_triangular": _build_diag_triangular,
    "lu_doolittle": _build_lu("doolittle"),
    "lu_crout": _build_lu("crout"),
    "lu_ldm": _build_lu("ldm"),
    "cholesky": _build_cholesky,
    "ldl": _build_ldl,
    "sqrt": _build_sqrt,
    "qr": _build_qr,
    "qdr": _build_qdr,
    "polar": _build_polar,
    "svd": _build_svd,
    "spectral": _build_spectral,
    "wishart_map": _build_wishart_map,
}

EXPLICIT_LEMMAS = ("linear", "congruence", "diag_triangular", "lu_doolittle",
                   "lu_crout", "lu_ldm", "cholesky", "ldl", "sqrt")
STIEFEL_LEMMAS = ("qr", "qdr", "polar", "svd", "spectral", "wishart_map")
ALL_LEMMAS = EXPLICIT_LEMMAS + STIEFEL_LEMMAS

# expected coordinate counts per lemma: (factor count, ambient count)
def chart_dim(lemma: str, m: int, n: int, beta: int) -> int:
    b, herm = beta, m + beta * m * (m - 1) // 2
    rect = {"linear": b * m * n, "qr": b * m * n, "qdr": b * m * n,
            "polar": b * m * n, "svd": b * m * n, "wishart_map": b * m * n}
    if lemma in rect:
        return rect[lemma]
    square = {"lu_doolittle": b * m * m, "lu_crout": b * m * m, "lu_ldm": b * m * m,
              "diag_triangular": b * m * (m + 1) // 2}
    if lemma in square:
        return square[lemma]
    if lemma in ("congruence", "cholesky", "ldl", "sqrt", "spectral"):
        return herm
    raise ValueError(f"unknown lemma {lemma!r}")


def build_chart(lemma: str, m: int, n: int | None, beta: int,
                rng: np.random.Generator) -> FactorizationChart:
    """Sample a random base point and return the lemma's local chart there."""
    if lemma not in _BUILDERS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {sorted(_BUILDERS)}")
    alg = Algebra.from_beta(beta)
    if n is None:
        n = m
    if lemma in ("qr", "qdr", "polar", "svd", "wishart_map", "linear") and n < m:
        raise ValueError(f"lemma {lemma} needs n >= m")
    chart = _BUILDERS[lemma](alg, m, n, rng)
    expected = chart_dim(lemma, m, chart.n, beta)
    if chart.dim != expected or len(chart.ambient0) != expected:
        raise AssertionError(
            f"{lemma}: parameter count {chart.dim} / ambient {len(chart.ambient0)} "
            f"!= expected {expected}"
        )
    return chart


def certify_point(lemma: str, m: int, n: int | None, beta: int,
                  rng: np.random.Generator) -> JacobianReport:
    """One closed-form vs finite-difference comparison at a random point."""
    chart = build_chart(lemma, m, n, beta, rng)
    chart.check_roundtrip(tol=1e-9)
    oracle = fd_jacobian_oracle(chart)
    rel = abs(math.exp(chart.fd_target_log - oracle) - 1.0)
    return JacobianReport(lemma, beta, m, chart.n, chart.closed_form_log, oracle, rel)

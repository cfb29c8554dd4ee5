"""Log-space special functions and normalization constants.

Everything here is computed and returned in log space: the multivariate gamma
function overflows already at modest dimension, and the ensemble constants
multiply several of them together.  A :class:`LogValue` is an ordinary float
(so it composes with arithmetic) that additionally refuses to be NaN; support
violations elsewhere in the package are encoded as ``-inf``, never NaN.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaln

__all__ = [
    "LogValue",
    "TAU_SCALE",
    "tau",
    "mv_gamma_log",
    "mv_beta_log",
    "stiefel_log_volume",
    "fourier_constant_log",
    "symmetric_space_log_volume",
    "vs_constant_log",
    "vs_ensemble_constant_log",
    "ss_constant_log",
    "ss_ensemble_constant_log",
    "hermitian_space_dim",
    "radial_h_log",
]

LOG_2PI = math.log(2.0 * math.pi)


class LogValue(float):
    """A log-magnitude.  -inf encodes a vanishing value; NaN is rejected."""

    def __new__(cls, value: float) -> "LogValue":
        v = float(value)
        if math.isnan(v):
            raise ValueError("log value is NaN")
        return super().__new__(cls, v)

    @property
    def finite(self) -> bool:
        return self != float("-inf")

    @classmethod
    def neg_inf(cls) -> "LogValue":
        return cls(float("-inf"))


NEG_INF = LogValue.neg_inf()

# tau = -TAU_SCALE[beta] * m, stored verbatim from the SVD constant table.
# Note tau(1) = 0 breaks the -m*beta/2 pattern of the other three entries.
TAU_SCALE = {1: 0, 2: 1, 4: 2, 8: 4}


def tau(beta: int, m: int) -> int:
    if beta not in TAU_SCALE:
        raise ValueError(f"beta must be one of 1, 2, 4, 8, got {beta}")
    return -TAU_SCALE[beta] * m


def _check_beta(beta: int) -> None:
    if beta not in (1, 2, 4, 8):
        raise ValueError(f"beta must be one of 1, 2, 4, 8, got {beta}")


@lru_cache(maxsize=4096)
def mv_gamma_log(m: int, beta: int, a: float) -> LogValue:
    """log Gamma_m^beta[a] = log pi^{m(m-1)beta/4} prod_i Gamma[a-(i-1)beta/2]."""
    _check_beta(beta)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if a <= (m - 1) * beta / 2:
        raise ValueError(
            f"multivariate gamma needs a > (m-1)*beta/2 = {(m - 1) * beta / 2}, got a={a}"
        )
    out = m * (m - 1) * beta / 4 * math.log(math.pi)
    for i in range(1, m + 1):
        out += gammaln(a - (i - 1) * beta / 2)
    return LogValue(out)


@lru_cache(maxsize=4096)
def mv_beta_log(m: int, beta: int, a: float, b: float) -> LogValue:
    """log B_m^beta[a, b] = log Gamma_m[a] + log Gamma_m[b] - log Gamma_m[a+b]."""
    return LogValue(
        mv_gamma_log(m, beta, a) + mv_gamma_log(m, beta, b) - mv_gamma_log(m, beta, a + b)
    )


@lru_cache(maxsize=4096)
def stiefel_log_volume(m: int, n: int, beta: int) -> LogValue:
    """log Vol of the n x m orthonormal-column manifold over the algebra."""
    if not 1 <= m <= n:
        raise ValueError(f"need n >= m >= 1, got m={m}, n={n}")
    return LogValue(
        m * math.log(2.0)
        + m * n * beta / 2 * math.log(math.pi)
        - mv_gamma_log(m, beta, n * beta / 2)
    )


@lru_cache(maxsize=4096)
def fourier_constant_log(m: int, beta: int) -> LogValue:
    """log of Gamma[beta m/2 + 1] / Gamma[beta/2 + 1]^m (the Morris constant)."""
    _check_beta(beta)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return LogValue(gammaln(beta * m / 2 + 1) - m * gammaln(beta / 2 + 1))


@lru_cache(maxsize=4096)
def symmetric_space_log_volume(m: int, beta: int) -> LogValue:
    """log of 2^m pi^{beta m^2/2 + tau} Gamma[beta/2+1]^m /
    (Gamma_m^beta[beta m/2] Gamma[beta m/2 + 1]).

    Satisfies fourier_constant_log(m, beta) ==
    tau*log(pi) + stiefel_log_volume(m, m, beta) - symmetric_space_log_volume(m, beta).
    """
    t = tau(beta, m)
    return LogValue(
        m * math.log(2.0)
        + (beta * m * m / 2 + t) * math.log(math.pi)
        + m * gammaln(beta / 2 + 1)
        - mv_gamma_log(m, beta, beta * m / 2)
        - gammaln(beta * m / 2 + 1)
    )


# ---------------------------------------------------------------------------
# radial normalization constants
# ---------------------------------------------------------------------------

def hermitian_space_dim(m: int, beta: int) -> int:
    """Real coordinate count of the m x m Hermitian space."""
    return m + beta * m * (m - 1) // 2


def radial_h_log(family: str, dim: int, beta: int, nu: float | None = None,
                 q: float | None = None):
    """Radial profile log h(t), t = squared norm, for the trace-radial families.

    The T profile's exponent couples to the ambient real dimension ``dim``
    (beta*m*n for rectangular matrices, the Hermitian coordinate count for
    ensembles); the Gegenbauer exponent is +beta*q with support t <= 1.
    Returns (h_log, upper) where upper is the support bound on the radius.
    """
    if family == "hermite":
        return (lambda t: -beta * t / 2.0), math.inf
    if family == "t1":
        if nu is None or nu <= 0:
            raise ValueError(f"t1 family needs nu > 0, got {nu}")
        expo = (dim + beta * nu) / 2.0
        return (lambda t: -expo * math.log1p(t)), math.inf
    if family == "gegenbauer1":
        if q is None or beta * q <= -1:
            raise ValueError(f"gegenbauer1 family needs beta*q > -1, got q={q}")
        bq = beta * q

        def h_log(t):
            if t >= 1.0:
                return -math.inf
            return bq * math.log1p(-t)

        return h_log, 1.0
    raise ValueError(f"unknown radial family {family!r}")


@lru_cache(maxsize=4096)
def _radial_constant_log(dim: int, beta: int, family: str, nu: float | None,
                         q: float | None, method: str) -> LogValue:
    """log of Gamma[dim/2] / (2 pi^{dim/2}) / int_0^inf u^{dim-1} h(u^2) du."""
    if method == "closed":
        if family == "hermite":
            return LogValue(dim / 2 * math.log(beta / (2 * math.pi)))
        if family == "t1":
            if nu is None or nu <= 0:
                raise ValueError(f"t1 family needs nu > 0, got {nu}")
            return LogValue(
                gammaln((dim + beta * nu) / 2)
                - dim / 2 * math.log(math.pi)
                - gammaln(beta * nu / 2)
            )
        if family == "gegenbauer1":
            if q is None or beta * q <= -1:
                raise ValueError(f"gegenbauer1 family needs beta*q > -1, got q={q}")
            return LogValue(
                gammaln(dim / 2 + beta * q + 1)
                - dim / 2 * math.log(math.pi)
                - gammaln(beta * q + 1)
            )
        raise ValueError(f"no closed-form constant for family {family!r}")
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    h_log, upper = radial_h_log(family, dim, beta, nu=nu, q=q)
    # u = tan(t) maps (0, pi/2) onto (0, inf); bounded support shortens the range
    t_hi = math.pi / 2 if math.isinf(upper) else math.atan(upper)

    def integrand(t):
        u = math.tan(t)
        val = (dim - 1) * math.log(u) + h_log(u * u) + 2.0 * math.log(1.0 / math.cos(t))
        return math.exp(val) if val > -700 else 0.0

    integral, _err = integrate.quad(integrand, 0.0, t_hi, epsabs=1e-14, epsrel=1e-10,
                                    limit=200)
    return LogValue(
        gammaln(dim / 2) - math.log(2.0) - dim / 2 * math.log(math.pi) - math.log(integral)
    )


def vs_constant_log(m: int, n: int, beta: int, family: str, nu: float | None = None,
                    q: float | None = None, method: str = "closed") -> LogValue:
    """Normalization of the trace-radial density on n x m matrices."""
    _check_beta(beta)
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got m={m}, n={n}")
    return _radial_constant_log(beta * m * n, beta, family, nu, q, method)


def vs_ensemble_constant_log(m: int, beta: int, family: str, nu: float | None = None,
                             q: float | None = None, method: str = "closed") -> LogValue:
    """Normalization of the trace-radial density on the m x m Hermitian space."""
    _check_beta(beta)
    if m < 1:
        raise ValueError(f"need m >= 1, got m={m}")
    return _radial_constant_log(hermitian_space_dim(m, beta), beta, family, nu, q, method)


@lru_cache(maxsize=4096)
def ss_constant_log(m: int, n: int, beta: int, family: str, nu: float) -> LogValue:
    """Normalization of the eigenvalue-radial (determinantal) densities on
    n x m matrices.  Both the T profile |I + A*A|^{-beta(n+nu)/2} and the
    Gegenbauer profile |I - A*A|^{beta(nu-m+1)/2-1} share the same constant
    Gamma_m[beta(n+nu)/2] / (pi^{beta m n/2} Gamma_m[beta nu/2])."""
    _check_beta(beta)
    if family not in ("t2", "gegenbauer2"):
        raise ValueError(f"unknown spherical family {family!r}")
    return LogValue(
        mv_gamma_log(m, beta, beta * (n + nu) / 2)
        - beta * m * n / 2 * math.log(math.pi)
        - mv_gamma_log(m, beta, beta * nu / 2)
    )


@lru_cache(maxsize=None)
def _ss_ensemble_kernel_integral(m: int, beta: int, family: str, n: int,
                                 nu: float) -> float:
    """int over l_1 > ... > l_m of prod_{i<j}(l_i - l_j)^beta prod_i w(l_i) dl
    with w the ensemble weight of the family; m <= 2 only."""
    if family == "t2":
        expo = beta * (n + nu) / 2.0

        def w_log(x):
            return -expo * math.log1p(x * x)

        lo, hi = -math.inf, math.inf
    elif family == "gegenbauer2":
        expo = beta * (nu - m + 1) / 2.0 - 1.0

        def w_log(x):
            return expo * math.log1p(-x * x) if abs(x) < 1 else -math.inf

        lo, hi = -1.0, 1.0
    else:
        raise ValueError(f"unknown spherical family {family!r}")

    if m == 1:
        val, _ = integrate.quad(lambda x: math.exp(w_log(x)), lo, hi,
                                epsabs=1e-13, epsrel=1e-11, limit=200)
        return val
    if m == 2:
        def inner(l2, l1):
            return math.exp(beta * math.log(l1 - l2) + w_log(l1) + w_log(l2))

        val, _ = integrate.dblquad(inner, lo, hi, lo, lambda l1: l1,
                                   epsabs=1e-11, epsrel=1e-9)
        return val
    raise ValueError(f"spherical ensemble constant only available for m <= 2, got m={m}")


def ss_ensemble_constant_log(m: int, beta: int, family: str, n: int, nu: float) -> LogValue:
    """Normalization of the eigenvalue-radial density on the Hermitian space,
    evaluated by quadrature of the ordered eigenvalue integral (m <= 2)."""
    _check_beta(beta)
    t = tau(beta, m)
    integral = _ss_ensemble_kernel_integral(m, beta, family, n, float(nu))
    return LogValue(
        mv_gamma_log(m, beta, beta * m / 2)
        - m * (m - 1) * beta / 4 * math.log(2.0)
        - (beta * m * m / 2 + t) * math.log(math.pi)
        - math.log(integral)
    )

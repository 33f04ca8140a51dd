"""Jacobi, Gegenbauer, Legendre, and Bessel evaluation.

Polynomials are evaluated by forward three-term recurrence in the degree,
which is stable on [-1, 1] for the parameter ranges used here.  Negative
integer first parameters are routed through the degree-lowering identity
P_n^(-m, b) = C * ((x-1)/2)^m * P_{n-m}^(m, b); a negative integer second
parameter is reached through the reflection P_n^(a,b)(-x) = (-1)^n P_n^(b,a)(x).

Bessel functions use the defining power series for z <= 12 and scipy's jv
beyond; the normalized form j_a(z) = z^(-a) J_a(z) is the one radial Fourier
transforms want, with j_a(0) = 1 / (2^a Gamma(a+1)).

Everything here is pure and accepts scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, jv

from .errors import DomainError, UnsupportedParameterError

__all__ = [
    "PolyIndex",
    "AsymptoticApprox",
    "jacobi_eval",
    "gegenbauer_eval",
    "legendre_eval",
    "bessel",
    "cosine_expansion",
    "jacobi_bessel_approx",
    "LEGENDRE_BESSEL_CONSTANT",
]

# Certified uniform constant for the Bessel approximation of Legendre
# polynomials on [0, pi/2]: |P_n(cos t) - (t/sin t)^(1/2) J_0((n+1/2) t)|
# is at most this constant divided by n.
LEGENDRE_BESSEL_CONSTANT = 0.1711


@dataclass(frozen=True)
class PolyIndex:
    """Degree and parameters of an orthogonal polynomial.

    alpha/beta are the Jacobi parameters; lam is the Gegenbauer parameter,
    tied to the sphere dimension by lam = (d-1)/2.
    """

    n: int
    alpha: float = 0.0
    beta: float = 0.0
    lam: float = 0.5

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("degree must be nonnegative")


@dataclass(frozen=True)
class AsymptoticApprox:
    """Approximate value with a certified absolute error bound.

    N is the shifted degree n + alpha + 1/2 that sets the Bessel argument.
    error_bound is infinite when no certified constant is available.
    """

    value: float
    error_bound: float
    N: float


def _as_grid(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _check_unit_interval(x: np.ndarray) -> None:
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("argument must lie in [-1, 1]")


def _jacobi_recurrence(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """P_n^(a,b)(x) by forward recurrence; requires a, b > -1."""
    if n == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    for k in range(2, n + 1):
        s = a + b
        c1 = 2.0 * k * (k + s) * (2.0 * k + s - 2.0)
        c2 = (2.0 * k + s - 1.0) * (a * a - b * b)
        c3 = (2.0 * k + s - 2.0) * (2.0 * k + s - 1.0) * (2.0 * k + s)
        c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + s)
        p, p_prev = ((c2 + c3 * x) * p - c4 * p_prev) / c1, p
    return p


def _falling_ratio(z: float, m: int) -> float:
    """Gamma(z+m) / Gamma(z) as a finite product (m small, z arbitrary)."""
    out = 1.0
    for i in range(m):
        out *= z + i
    return out


def _jacobi(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Dispatch between the recurrence and the negative-parameter identities."""
    if a > -1.0 and b > -1.0:
        return _jacobi_recurrence(n, a, b, x)
    if a <= -1.0:
        m = int(round(-a))
        if abs(a + m) > 1e-12 or m < 1 or m > n:
            raise UnsupportedParameterError(
                f"alpha={a} not supported: must exceed -1 or be a negative "
                f"integer -m with 1 <= m <= n"
            )
        # binom(n+b, m) / binom(n, m) * ((x-1)/2)^m * P_{n-m}^(m, b)
        coeff = _falling_ratio(n + b - m + 1.0, m) / _falling_ratio(n - m + 1.0, m)
        return coeff * ((x - 1.0) / 2.0) ** m * _jacobi(n - m, float(m), b, x)
    # b <= -1: reflect, then the alpha route above applies
    m = int(round(-b))
    if abs(b + m) > 1e-12 or m < 1 or m > n:
        raise UnsupportedParameterError(
            f"beta={b} not supported: must exceed -1 or be a negative "
            f"integer -m with 1 <= m <= n"
        )
    return (-1.0) ** n * _jacobi(n, b, a, -x)


def jacobi_eval(idx: PolyIndex, x):
    """Evaluate the Jacobi polynomial P_n^(alpha, beta) at x in [-1, 1]."""
    grid, scalar = _as_grid(x)
    _check_unit_interval(grid)
    out = _jacobi(idx.n, idx.alpha, idx.beta, grid)
    return float(out) if scalar else out


def _gegenbauer_normalized(n: int, lam: float, x: np.ndarray) -> np.ndarray:
    """R_n(x) = C_n(x) / C_n(1); bounded recurrence, safe for any n."""
    if n == 0:
        return np.ones_like(x)
    r_prev = np.ones_like(x)
    r = x.copy()
    for k in range(2, n + 1):
        r, r_prev = (2.0 * (k + lam - 1.0) * x * r - (k - 1.0) * r_prev) / (
            k + 2.0 * lam - 1.0
        ), r
    return r


def gegenbauer_value_at_one(n: int, lam: float) -> float:
    """C_n(1) = binom(n + 2 lam - 1, n), via log-gamma to avoid overflow."""
    if n == 0:
        return 1.0
    return float(
        np.exp(gammaln(n + 2.0 * lam) - gammaln(2.0 * lam) - gammaln(n + 1.0))
    )


def gegenbauer_eval(n: int, lam: float, x, normalized: bool = False):
    """Gegenbauer polynomial C_n^lam(x), or R_n^lam = C_n^lam / C_n^lam(1)."""
    if lam <= 0.0:
        raise DomainError("Gegenbauer parameter lam must be positive")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    grid, scalar = _as_grid(x)
    _check_unit_interval(grid)
    out = _gegenbauer_normalized(n, lam, grid)
    if not normalized:
        out = out * gegenbauer_value_at_one(n, lam)
    return float(out) if scalar else out


def gegenbauer_table(nmax: int, lam: float, x: np.ndarray, normalized: bool = False):
    """All degrees 0..nmax at once; rows indexed by degree.

    One recurrence pass serves every degree, which is what coefficient
    integrals and sweeps want.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1, x.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(2, nmax + 1):
        out[k] = (2.0 * (k + lam - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / (
            k + 2.0 * lam - 1.0
        )
    if not normalized:
        scale = np.exp(
            gammaln(np.arange(nmax + 1) + 2.0 * lam)
            - gammaln(2.0 * lam)
            - gammaln(np.arange(nmax + 1) + 1.0)
        )
        out *= scale[:, None]
    return out


def legendre_eval(n: int, x):
    """Legendre polynomial P_n(x) = P_n^(0,0)(x)."""
    grid, scalar = _as_grid(x)
    _check_unit_interval(grid)
    out = _legendre(n, grid)
    return float(out) if scalar else out


def _legendre(n: int, x: np.ndarray) -> np.ndarray:
    if n == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p, p_prev = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k, p
    return p


def legendre_table(nmax: int, x: np.ndarray) -> np.ndarray:
    """P_0..P_nmax on a shared grid, one recurrence pass."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1, x.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(2, nmax + 1):
        out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k
    return out


_SERIES_CUTOFF = 12.0
_SERIES_TERMS = 40


def _bessel_series_normalized(alpha: float, z: np.ndarray) -> np.ndarray:
    """j_alpha(z) = 2^-alpha sum_v (-1)^v (z^2/4)^v / (v! Gamma(v+alpha+1))."""
    q = 0.25 * z * z
    term = np.full_like(z, 1.0 / math.gamma(alpha + 1.0) * 2.0 ** (-alpha))
    total = term.copy()
    for v in range(1, _SERIES_TERMS):
        term = term * (-q) / (v * (v + alpha))
        total += term
    return total


def bessel(alpha: float, z, normalized: bool = False):
    """Bessel function of the first kind J_alpha(z), or j_alpha(z) = z^-alpha J_alpha(z).

    Power series for z <= 12, scipy continuation beyond; absolute accuracy
    ~1e-12 on z in [0, 100], validated against half-integer closed forms.
    """
    if alpha <= -1.0:
        raise DomainError("order alpha must exceed -1")
    grid, scalar = _as_grid(z)
    if np.any(grid < 0.0):
        raise DomainError("argument z must be nonnegative")
    small = grid <= _SERIES_CUTOFF
    out = np.empty_like(grid)
    if np.any(small):
        zs = grid[small]
        norm = _bessel_series_normalized(alpha, zs)
        out[small] = norm if normalized else norm * zs ** alpha
    if np.any(~small):
        zl = grid[~small]
        raw = jv(alpha, zl)
        out[~small] = raw * zl ** (-alpha) if normalized else raw
    return float(out) if scalar else out


def cosine_expansion(n: int, lam: float):
    """Cosine-series coefficients of C_n^lam(cos theta).

    The raw expansion runs over k = 0..n with frequency n - 2k and
    coefficient Gamma(lam+k) Gamma(lam+n-k) / (k! (n-k)! Gamma(lam)^2),
    computed in log space.  Mirror frequencies are folded together, so the
    result lists (frequency, coefficient) pairs with frequencies
    n, n-2, ..., (1 or 0), all coefficients positive for lam > 0.
    """
    if lam == 0.0:
        raise DomainError("lam must be nonzero")
    k = np.arange(n + 1, dtype=float)
    logs = (
        gammaln(lam + k)
        + gammaln(lam + n - k)
        - gammaln(k + 1.0)
        - gammaln(n - k + 1.0)
        - 2.0 * gammaln(lam)
    )
    coeffs = np.exp(logs)
    folded: dict[int, float] = {}
    for i in range(n + 1):
        freq = abs(n - 2 * i)
        folded[freq] = folded.get(freq, 0.0) + float(coeffs[i])
    return sorted(folded.items(), reverse=True)


def jacobi_bessel_approx(n: int, alpha: float, t: float, eps: float = 1e-6) -> AsymptoticApprox:
    """Bessel approximation of the normalized P_n^(a,a)(cos t) / P_n^(a,a)(1).

    Returns 2^a Gamma(a+1) (t/sin t)^(a+1/2) j_a(N t) with N = n + a + 1/2.
    For a = 0 on [0, pi/2] the error bound is the certified 0.1711/n;
    otherwise no certified constant is available and the bound is inf.
    """
    if n < 1:
        raise ValueError("degree n must be >= 1")
    if t < 0.0 or t >= np.pi - eps:
        raise DomainError(f"t must lie in [0, pi - {eps})")
    N = n + alpha + 0.5
    if t == 0.0:
        value = 1.0
    else:
        value = (
            2.0 ** alpha
            * math.gamma(alpha + 1.0)
            * (t / math.sin(t)) ** (alpha + 0.5)
            * bessel(alpha, N * t, normalized=True)
        )
    if alpha == 0.0 and t <= np.pi / 2.0 + 1e-15:
        bound = LEGENDRE_BESSEL_CONSTANT / n
    else:
        bound = math.inf
    return AsymptoticApprox(value=float(value), error_bound=bound, N=N)

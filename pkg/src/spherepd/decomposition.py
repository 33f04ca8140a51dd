"""Structural identities for integer Gegenbauer parameter lam.

Two families live here:

* the half-angle expansion: for integer lam >= 1,
  R_n(cos t) cos(t/2)^(2 lam) = sum_{j=n}^{n+lam} a_{n,j} R_{2j}(cos t/2)
  with strictly positive coefficients summing to 1.  The coefficients come
  from an exact rational recursion (a contiguous parameter-lowering step
  applied lam times, then a quadratic argument-halving transformation);
  for n + lam <= 30 they are computed in exact rational arithmetic.

* the iterated-derivative tables for F_0(t) = f(t/theta) sin(t)^(2 lam) and
  F_j = (F_{j-1}/sin t)': F_ell expands over terms
  theta^-j f^(j)(t/theta) sin(t)^(2 lam - 2 ell + j + 2k) cos(t)^(ell-j-2k)
  with integer coefficients alpha[(j, k)] built by an exact recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Tuple

import numpy as np

from .kernels import Kernel
from .quadrature import DEFAULT_MAX_EVALS, integrate_oscillatory
from .specfun import gegenbauer_eval

__all__ = [
    "HalfAngleCoeffs",
    "FEllTable",
    "lemma23_coeffs",
    "verify_half_angle",
    "refinement_check",
    "f_ell_coeffs",
    "verify_f_ell",
    "EXACT_DEGREE_LIMIT",
]

EXACT_DEGREE_LIMIT = 30  # n + lam at or below this uses exact rationals


@dataclass
class HalfAngleCoeffs:
    """Positive coefficients a_{n,j}, j = n..n+lam, of the half-angle expansion.

    exact holds the same coefficients as Fractions when the exact route was
    taken, else None.
    """

    n: int
    lam: int
    coeffs: Dict[int, float]
    exact: Dict[int, Fraction] | None = None

    def total(self) -> float:
        return sum(self.coeffs.values())


def _half_angle_exact(n: int, lam: int) -> Dict[int, Fraction]:
    """Exact rational half-angle coefficients.

    Start from the single basis element of degree n and apply the
    cos(t/2)^2-absorbing contiguous step lam times:

      cos(t/2)^2 P_m^(lam-1/2, beta) =
          A_m P_m^(lam-1/2, beta-1) + B_m P_{m+1}^(lam-1/2, beta-1),
      A_m = (m + beta - 1/2) / (2m + lam + beta - 1/2 + ... )

    bookkeeping below uses step index i = 1..lam so that at step i the
    incoming second parameter is lam - 1/2 - (i - 1):
      A_m = (2m + 2 lam - 2 i + 1) / (2 (2m + 2 lam - i + 1))
      B_m = (m + 1) / (2m + 2 lam - i + 1).
    Then convert degrees j (basis P_j^(lam-1/2, -1/2)) to the half-angle
    basis and renormalize; all conversion factors collapse into
      a_{n,j} = gamma_j * [prod_{i=n}^{j-1} (i + lam + 1/2)] * n! / j!.
    """
    gamma: Dict[int, Fraction] = {n: Fraction(1)}
    for i in range(1, lam + 1):
        nxt: Dict[int, Fraction] = {}
        for m, c in gamma.items():
            denom = 2 * m + 2 * lam - i + 1
            a_f = Fraction(2 * m + 2 * lam - 2 * i + 1, 2 * denom)
            b_f = Fraction(m + 1, denom)
            nxt[m] = nxt.get(m, Fraction(0)) + c * a_f
            nxt[m + 1] = nxt.get(m + 1, Fraction(0)) + c * b_f
        gamma = nxt

    out: Dict[int, Fraction] = {}
    for j, c in gamma.items():
        ratio = Fraction(1)
        for i in range(n, j):
            ratio *= Fraction(2 * i + 2 * lam + 1, 2)  # i + lam + 1/2
        for i in range(n + 1, j + 1):
            ratio /= i
        out[j] = c * ratio
    return out


def _half_angle_float(n: int, lam: int) -> Dict[int, float]:
    """Floating-point version of the same recursion for large degrees."""
    gamma: Dict[int, float] = {n: 1.0}
    for i in range(1, lam + 1):
        nxt: Dict[int, float] = {}
        for m, c in gamma.items():
            denom = 2.0 * m + 2.0 * lam - i + 1.0
            nxt[m] = nxt.get(m, 0.0) + c * (m + lam - i + 0.5) / denom
            nxt[m + 1] = nxt.get(m + 1, 0.0) + c * (m + 1.0) / denom
        gamma = nxt
    out: Dict[int, float] = {}
    for j, c in gamma.items():
        log_ratio = 0.0
        for i in range(n, j):
            log_ratio += math.log(i + lam + 0.5)
        for i in range(n + 1, j + 1):
            log_ratio -= math.log(i)
        out[j] = c * math.exp(log_ratio)
    return out


def lemma23_coeffs(n: int, lam: int) -> HalfAngleCoeffs:
    """Half-angle expansion coefficients a_{n,j} for integer lam >= 1."""
    if lam < 1 or lam != int(lam):
        raise ValueError("lam must be a positive integer")
    if n < 0:
        raise ValueError("n must be nonnegative")
    lam = int(lam)
    if n + lam <= EXACT_DEGREE_LIMIT:
        exact = _half_angle_exact(n, lam)
        coeffs = {j: float(c) for j, c in exact.items()}
        return HalfAngleCoeffs(n, lam, coeffs, exact)
    return HalfAngleCoeffs(n, lam, _half_angle_float(n, lam), None)


def verify_half_angle(n: int, lam: int, t_grid: np.ndarray) -> float:
    """Max residual of the half-angle expansion over a t grid in [0, pi]."""
    t = np.asarray(t_grid, dtype=float)
    coeffs = lemma23_coeffs(n, lam)
    lhs = gegenbauer_eval(n, float(lam), np.cos(t), normalized=True) * np.cos(
        t / 2.0
    ) ** (2 * lam)
    rhs = np.zeros_like(t)
    for j, a in coeffs.coeffs.items():
        rhs += a * gegenbauer_eval(2 * j, float(lam), np.cos(t / 2.0), normalized=True)
    return float(np.max(np.abs(lhs - rhs)))


def refinement_check(
    f: Kernel,
    n: int,
    theta: float,
    lam: int,
    tol: float = 1e-11,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> float:
    """Relative residual of the halving identity for the scaled integrals.

    int_0^theta f(t/theta) R_n(cos t) sin(t)^(2 lam) dt
      = 2^(2 lam + 1) * sum_j a_{n,j}
            int_0^(theta/2) f(2 s / theta) R_{2j}(cos s) sin(s)^(2 lam) ds.
    """
    if lam < 1 or lam != int(lam):
        raise ValueError("lam must be a positive integer")
    lam = int(lam)

    def left_integrand(t):
        t = np.asarray(t, dtype=float)
        return (
            np.asarray(f(t / theta), dtype=float)
            * gegenbauer_eval(n, float(lam), np.cos(t), normalized=True)
            * np.sin(t) ** (2 * lam)
        )

    lhs = integrate_oscillatory(
        left_integrand, 0.0, theta, freq=float(n), tol=tol, max_evals=max_evals
    ).value

    coeffs = lemma23_coeffs(n, lam)
    rhs = 0.0
    for j, a in coeffs.coeffs.items():

        def right_integrand(s, j=j):
            s = np.asarray(s, dtype=float)
            return (
                np.asarray(f(2.0 * s / theta), dtype=float)
                * gegenbauer_eval(2 * j, float(lam), np.cos(s), normalized=True)
                * np.sin(s) ** (2 * lam)
            )

        rhs += (
            a
            * integrate_oscillatory(
                right_integrand,
                0.0,
                theta / 2.0,
                freq=float(2 * j),
                tol=tol,
                max_evals=max_evals,
            ).value
        )
    rhs *= 2.0 ** (2 * lam + 1)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


@dataclass
class FEllTable:
    """Integer coefficients alpha[(j, k)] of the ell-fold derivative expansion."""

    lam: int
    ell: int
    alpha: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def leading_diagonal_sum(self) -> int:
        """alpha[(0,0)] + alpha[(1,0)], the quantity that telescopes to 2^lam lam!."""
        return self.alpha.get((0, 0), 0) + self.alpha.get((1, 0), 0)


def f_ell_coeffs(lam: int, ell: int) -> FEllTable:
    """Coefficient table of F_ell for 1 <= ell <= lam, by exact recursion.

    Each derivative step sends a term with indices (j, k) to
      (j+1, k)   with weight 1,
      (j,   k)   with weight 2 lam - 2 ell + j + 2k - 1,
      (j, k+1)   with weight j + 2k - ell,
    where ell is the level being left.  Base level: alpha = {(0,0): 2 lam - 1,
    (1,0): 1}.
    """
    if lam < 1 or lam != int(lam):
        raise ValueError("lam must be a positive integer")
    if not 1 <= ell <= lam:
        raise ValueError("need 1 <= ell <= lam")
    alpha: Dict[Tuple[int, int], int] = {(0, 0): 2 * lam - 1, (1, 0): 1}
    for level in range(1, ell):
        nxt: Dict[Tuple[int, int], int] = {}

        def add(key, val):
            if val != 0:
                nxt[key] = nxt.get(key, 0) + val

        for (j, k), c in alpha.items():
            add((j + 1, k), c)
            add((j, k), c * (2 * lam - 2 * level + j + 2 * k - 1))
            add((j, k + 1), c * (j + 2 * k - level))
        alpha = nxt
    return FEllTable(lam, ell, alpha)


def f_ell_closed_form(
    table: FEllTable, f_derivs, theta: float, t: np.ndarray
) -> np.ndarray:
    """Evaluate F_ell from its coefficient table.

    f_derivs[j] must evaluate the j-th derivative of the profile f.
    """
    t = np.asarray(t, dtype=float)
    lam, ell = table.lam, table.ell
    sin_t, cos_t = np.sin(t), np.cos(t)
    out = np.zeros_like(t)
    for (j, k), c in table.alpha.items():
        out += (
            c
            * theta ** (-j)
            * np.asarray(f_derivs[j](t / theta), dtype=float)
            * sin_t ** (2 * lam - 2 * ell + j + 2 * k)
            * cos_t ** (ell - j - 2 * k)
        )
    return out


def _derivative8(func: Callable, x: np.ndarray, h: float) -> np.ndarray:
    """Order-8 central difference with one Richardson step."""

    def stencil(step):
        acc = np.zeros_like(x)
        # 9-point order-8 first-derivative coefficients
        coef = {
            -4: 1.0 / 280.0,
            -3: -4.0 / 105.0,
            -2: 1.0 / 5.0,
            -1: -4.0 / 5.0,
            1: 4.0 / 5.0,
            2: -1.0 / 5.0,
            3: 4.0 / 105.0,
            4: -1.0 / 280.0,
        }
        for off, c in coef.items():
            acc += c * np.asarray(func(x + off * step), dtype=float)
        return acc / step

    d_h = stencil(h)
    d_h2 = stencil(0.5 * h)
    return (256.0 * d_h2 - d_h) / 255.0


def verify_f_ell(
    f_poly,
    lam: int,
    ell: int,
    theta: float,
    t_grid: np.ndarray,
    fd_step: float = 5e-3,
) -> float:
    """Max residual between the F_ell closed form and nested numerical derivatives.

    f_poly must be a numpy Polynomial (so exact profile derivatives exist for
    the closed form); the oracle side never uses them, it differentiates
    F_0(t) = f(t/theta) sin(t)^(2 lam) numerically, ell times.
    """
    t = np.asarray(t_grid, dtype=float)
    derivs = [f_poly.deriv(j) if j else f_poly for j in range(ell + 1)]
    table = f_ell_coeffs(lam, ell)
    closed = f_ell_closed_form(table, derivs, theta, t)

    def f_level(level: int) -> Callable:
        if level == 0:
            return lambda s: f_poly(np.asarray(s) / theta) * np.sin(s) ** (2 * lam)
        prev = f_level(level - 1)
        return lambda s: _derivative8(lambda u: prev(u) / np.sin(u), s, fd_step)

    oracle = f_level(ell)(t)
    return float(np.max(np.abs(closed - oracle)))

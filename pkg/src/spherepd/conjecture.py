"""Boundary-case positivity machinery for the truncated power kernel.

The central quantity is

    A_n(theta, delta) = int_0^theta (theta - t)^delta P_n(cos t) sin t dt

(dimension 2; general dimension replaces P_n sin t by C_n^lam sin^(2 lam) t).
This module computes A_n, its four-term integration-by-parts decomposition,
and audits the explicit-constant inequalities that make the small-theta
positivity proof work.  Every audited inequality is a proved statement, so
a failing row means an implementation bug, not a mathematical finding; the
sweep, by contrast, explores cells the proof does not cover and reports
nonpositive cells as findings.

Bookkeeping caution: the decomposition bounds are stated in the product
n*theta, while the moment bounds of the matching-regime case use
u = (n + 1/2)*theta.  Audits carry their own variable names to keep the two
apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import RegimeError
from .quadrature import (
    DEFAULT_MAX_EVALS,
    QuadratureResult,
    SingularWeight,
    integrate_endpoint_singular,
)
from .specfun import (
    LEGENDRE_BESSEL_CONSTANT,
    PolyIndex,
    bessel,
    gegenbauer_table,
    jacobi_eval,
    legendre_eval,
)
from . import quadrature as _quad

__all__ = [
    "D2Decomposition",
    "AuditRow",
    "BoundAuditReport",
    "SweepConfig",
    "SweepCell",
    "SweepReport",
    "Case3Bound",
    "ThresholdReport",
    "INEQUALITY_IDS",
    "d2_integral",
    "d2_decomposition",
    "bounds_audit",
    "default_grid",
    "case3_lower_bound",
    "theta_threshold",
    "sweep",
]

# Certified constants used by the audits.
EDGE_JACOBI_CONSTANT = 2.821 * math.pi ** 1.5  # sup bound for the (1,1) family
C_R1 = 42.6909  # upper constant for the weighted edge term R_{n,1}
C_R3 = 92.1237  # upper constant for the oscillatory tail term R_{n,3}
C_I1 = 30.1067  # lower-bound constant for the main term I_{n,1}
C_FINAL = 164.9212  # printed constant in the final lower bound
C_FINAL_CHAIN = C_R1 + C_R3 + C_I1  # 164.9213, the sum the proof chain yields
CASE2_PRODUCT_LIMIT = 2.0 / 35.0
CASE3_QUAD_COEFF = 2.0 / 33.0
CASE3_CUBIC_COEFF = 2.0963
CASE3_QUAD_RANGE = math.sqrt(33.0 / 2.0)
CASE3_CUBIC_RANGE = math.sqrt(12.0)
MOMENT_PREFACTOR = 4.0 / 35.0  # Beta(2, 5/2)
PAPER_THETA_THRESHOLD = 1.2644e-21

INEQUALITY_IDS = ("L55", "L56", "L57", "L58", "CASE2", "CASE3", "C1", "C3", "LEGENDRE")


def _p_cos(n: int):
    def f(t):
        t = np.asarray(t, dtype=float)
        return legendre_eval(n, np.clip(np.cos(t), -1.0, 1.0))

    return f


def _one_minus_p_cos(n: int):
    """1 - P_n(cos t) as a sum of positive cosine gaps.

    P_n(cos t) = sum_k c_k cos(f_k t) with positive c_k summing to 1, so
    1 - P_n(cos t) = sum_k c_k * 2 sin(f_k t / 2)^2.  Every term is
    nonnegative, which kills the catastrophic cancellation of the direct
    form near t = 0 (the integrands dividing by sin^2 t need this).  The
    coefficients are renormalized to sum to exactly 1.
    """
    pairs = cosine_expansion(n, 0.5) if n > 0 else [(0, 1.0)]
    freqs = np.array([f for f, _ in pairs], dtype=float)
    coeffs = np.array([c for _, c in pairs], dtype=float)
    coeffs /= coeffs.sum()

    def f(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for fk, ck in zip(freqs, coeffs):
            acc += ck * 2.0 * np.sin(0.5 * fk * t) ** 2
        return acc

    return f


def _p11_cos(n: int):
    idx = PolyIndex(n=n, alpha=1.0, beta=1.0)

    def f(t):
        t = np.asarray(t, dtype=float)
        return jacobi_eval(idx, np.clip(np.cos(t), -1.0, 1.0))

    return f


def d2_integral(
    n: int,
    theta: float,
    delta: float = 1.5,
    tol: Optional[float] = None,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """A_n(theta, delta) = int_0^theta (theta-t)^delta P_n(cos t) sin t dt."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if delta < 1.5:
        raise ValueError("delta must be >= 3/2")
    if theta == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    if tol is None:
        tol = 1e-12 * theta ** (delta + 2.0)
    pn = _p_cos(n)

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return pn(t) * np.sin(t)

    return integrate_endpoint_singular(
        smooth,
        0.0,
        theta,
        SingularWeight(right_exponent=delta),
        tol=tol,
        max_evals=max_evals,
        freq=float(n),
    )


def _term_I1(n: int, theta: float, tol: float) -> QuadratureResult:
    """(2/(n(n+1))) int [1 - P_n(cos t)] sqrt(theta-t) cos t / sin^2 t dt."""
    pn = _p_cos(n)

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return (1.0 - pn(t)) * np.cos(t) / np.sin(t) ** 2

    res = integrate_endpoint_singular(
        smooth, 0.0, theta, SingularWeight(right_exponent=0.5),
        tol=tol, freq=float(n),
    )
    pref = 2.0 / (n * (n + 1.0))
    return QuadratureResult(
        pref * res.value, pref * res.abs_error_est, res.evaluations, res.converged
    )


def _term_R1(n: int, theta: float, tol: float) -> QuadratureResult:
    """(1/(2n)) int P_{n-1}^(1,1)(cos t) sin t cos t / sqrt(theta-t) dt."""
    p11 = _p11_cos(n - 1)

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return p11(t) * np.sin(t) * np.cos(t)

    res = integrate_endpoint_singular(
        smooth, 0.0, theta, SingularWeight(right_exponent=-0.5),
        tol=tol, freq=float(n),
    )
    pref = 1.0 / (2.0 * n)
    return QuadratureResult(
        pref * res.value, pref * res.abs_error_est, res.evaluations, res.converged
    )


def _term_R2(n: int, theta: float, tol: float) -> QuadratureResult:
    """(1/(n(n+1))) int [1 - P_n(cos t)] / (sin t sqrt(theta-t)) dt; >= 0."""
    pn = _p_cos(n)

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return (1.0 - pn(t)) / np.sin(t)

    res = integrate_endpoint_singular(
        smooth, 0.0, theta, SingularWeight(right_exponent=-0.5),
        tol=tol, freq=float(n),
    )
    pref = 1.0 / (n * (n + 1.0))
    return QuadratureResult(
        pref * res.value, pref * res.abs_error_est, res.evaluations, res.converged
    )


def _term_R3(n: int, theta: float, tol: float) -> QuadratureResult:
    """int P_n(cos t) sin t / sqrt(theta-t) dt."""
    pn = _p_cos(n)

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return pn(t) * np.sin(t)

    return integrate_endpoint_singular(
        smooth, 0.0, theta, SingularWeight(right_exponent=-0.5),
        tol=tol, freq=float(n),
    )


@dataclass
class D2Decomposition:
    """Four-term split of (4n(n+1)/3) A_n(theta) with its identity residual."""

    n: int
    theta: float
    A_n: float
    I_n1: float
    R_n1: float
    R_n2: float
    R_n3: float
    identity_residual: float

    def term_scale(self) -> float:
        return max(
            abs(4.0 * self.n * (self.n + 1.0) / 3.0 * self.A_n),
            abs(self.I_n1),
            abs(self.R_n1),
            abs(self.R_n2),
            abs(self.R_n3),
        )


def d2_decomposition(n: int, theta: float, tol: float = 1e-12) -> D2Decomposition:
    """Compute A_n and its decomposition terms by five independent quadratures."""
    if n < 1:
        raise ValueError("decomposition requires n >= 1")
    if not 0.0 < theta <= math.pi / 2.0:
        raise ValueError("theta must lie in (0, pi/2]")
    a_n = d2_integral(n, theta, 1.5, tol=tol * theta ** 3.5).value
    i1 = _term_I1(n, theta, tol).value
    r1 = _term_R1(n, theta, tol).value
    r2 = _term_R2(n, theta, tol).value
    r3 = _term_R3(n, theta, tol).value
    lhs = 4.0 * n * (n + 1.0) / 3.0 * a_n
    residual = abs(lhs - (i1 + r1 + r2 - r3))
    return D2Decomposition(n, theta, a_n, i1, r1, r2, r3, residual)


@dataclass
class AuditRow:
    """One grid point of a bound audit; the claim is always lhs <= rhs."""

    inputs: Dict[str, float]
    lhs: float
    rhs: float
    margin: float
    passed: bool
    skipped: bool = False
    note: str = ""


@dataclass
class BoundAuditReport:
    inequality_id: str
    rows: List[AuditRow] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows if not r.skipped)

    @property
    def n_skipped(self) -> int:
        return sum(1 for r in self.rows if r.skipped)


def _skip(inputs: Dict[str, float], note: str) -> AuditRow:
    return AuditRow(inputs, math.nan, math.nan, math.nan, True, True, note)


def _product_hypothesis_ok(n: int, theta: float) -> Optional[str]:
    if n * theta < 5.0:
        return "requires n*theta >= 5"
    if not 0.0 < theta <= math.pi / 2.0:
        return "requires theta in (0, pi/2]"
    if n < 2:
        return "requires n >= 2"
    return None


def _audit_L55(grid, tol) -> List[AuditRow]:
    rows = []
    for n, theta in grid:
        why = _product_hypothesis_ok(n, theta)
        if why:
            rows.append(_skip({"n": n, "theta": theta}, why))
            continue
        lhs = abs(_term_R1(n, theta, tol).value)
        rhs = C_R1 * (n * theta) ** -2.0 * theta ** 1.5
        rows.append(AuditRow({"n": n, "theta": theta}, lhs, rhs, rhs - lhs, lhs <= rhs))
    return rows


def _audit_L56(grid, tol) -> List[AuditRow]:
    rows = []
    for n, theta in grid:
        why = _product_hypothesis_ok(n, theta)
        if why:
            rows.append(_skip({"n": n, "theta": theta}, why))
            continue
        lhs = abs(_term_R3(n, theta, tol).value)
        big_n = n + 0.5
        rhs = (
            math.sqrt(2.0)
            / (n * theta)
            * abs(math.sin(big_n * theta))
            * math.sqrt(math.sin(theta) / theta)
            * theta ** 1.5
            + C_R3 * (n * theta) ** -1.5 * theta ** 1.5
        )
        rows.append(AuditRow({"n": n, "theta": theta}, lhs, rhs, rhs - lhs, lhs <= rhs))
    return rows


def _audit_L57(grid, tol) -> List[AuditRow]:
    rows = []
    for n, theta in grid:
        why = _product_hypothesis_ok(n, theta)
        if why:
            rows.append(_skip({"n": n, "theta": theta}, why))
            continue
        bound = 1.5 / n * math.sqrt(theta) - C_I1 * (n * theta) ** -1.5 * theta ** 1.5
        value = _term_I1(n, theta, tol).value
        rows.append(
            AuditRow({"n": n, "theta": theta}, bound, value, value - bound, bound <= value)
        )
    return rows


def _l58_expression(product: float, constant: float = C_FINAL) -> float:
    return (1.5 - math.sqrt(2.0)) / product - constant * product ** -1.5


def positivity_product_threshold(constant: float = C_FINAL_CHAIN) -> float:
    """Product n*theta beyond which the final lower bound is positive."""
    return (constant / (1.5 - math.sqrt(2.0))) ** 2


def _audit_L58(grid, tol) -> List[AuditRow]:
    rows = []
    threshold = positivity_product_threshold()
    for entry in grid:
        if isinstance(entry, dict) and "ntheta" in entry:
            product = float(entry["ntheta"])
            expr = _l58_expression(product)
            if product >= threshold:
                rows.append(
                    AuditRow(
                        {"ntheta": product},
                        0.0,
                        expr,
                        expr,
                        expr > 0.0,
                        note="positivity of the closed-form lower bound",
                    )
                )
            else:
                rows.append(
                    _skip(
                        {"ntheta": product},
                        f"below positivity threshold {threshold:.5g}; no claim",
                    )
                )
            continue
        n, theta = entry
        why = _product_hypothesis_ok(n, theta)
        if why:
            rows.append(_skip({"n": n, "theta": theta}, why))
            continue
        a_n = d2_integral(n, theta, 1.5, tol=tol * theta ** 3.5).value
        value = 4.0 * n * (n + 1.0) / 3.0 * theta ** -1.5 * a_n
        bound = _l58_expression(n * theta)
        rows.append(
            AuditRow({"n": n, "theta": theta}, bound, value, value - bound, bound <= value)
        )
    return rows


def _audit_CASE2(grid, tol) -> List[AuditRow]:
    rows = []
    for n, theta in grid:
        if n * theta >= CASE2_PRODUCT_LIMIT:
            rows.append(
                _skip({"n": n, "theta": theta}, "requires n*theta < 2/35")
            )
            continue
        a_n = d2_integral(n, theta, 1.5, tol=tol * theta ** 3.5).value
        value = theta ** -3.5 * a_n
        bound = MOMENT_PREFACTOR - 2.0 * n * theta
        note = "scaled integral exceeds 4/35 - 2 n theta > 0"
        rows.append(
            AuditRow(
                {"n": n, "theta": theta}, bound, value, value - bound,
                bound <= value and bound > 0.0, note=note,
            )
        )
    return rows


def case3_moment(u: float, tol: float = 1e-12) -> float:
    """Direct moment int_0^1 (1-x)^(3/2) J_0(u x) x dx."""

    def smooth(x):
        x = np.asarray(x, dtype=float)
        return bessel(0.0, u * x, normalized=True) * x

    return integrate_endpoint_singular(
        smooth, 0.0, 1.0, SingularWeight(right_exponent=1.5), tol=tol, freq=u
    ).value


def case3_piecewise_bound(u: float) -> Optional[float]:
    """Certified lower bound for the moment, max over applicable branches."""
    branches = []
    if u <= CASE3_QUAD_RANGE:
        branches.append(1.0 - CASE3_QUAD_COEFF * u * u)
    if u >= CASE3_CUBIC_RANGE:
        branches.append(CASE3_CUBIC_COEFF / u ** 3)
    if not branches:
        return None
    return MOMENT_PREFACTOR * max(branches)


def _audit_CASE3(grid, tol) -> List[AuditRow]:
    rows = []
    for (u,) in grid:
        bound = case3_piecewise_bound(u)
        if bound is None:
            rows.append(_skip({"u": u}, "no branch applies"))
            continue
        value = case3_moment(u, tol)
        rows.append(AuditRow({"u": u}, bound, value, value - bound, bound <= value))
    return rows


def _audit_C1(grid, tol) -> List[AuditRow]:
    rows = []
    for n, t in grid:
        if not 0.0 <= t <= math.pi / 2.0 or n < 1:
            rows.append(_skip({"n": n, "t": t}, "requires n >= 1, t in [0, pi/2]"))
            continue
        big_n = n + 0.5
        p_val = legendre_eval(n, math.cos(t))
        if t == 0.0:
            approx = 1.0
        else:
            approx = math.sqrt(t / math.sin(t)) * bessel(0.0, big_n * t)
        lhs = abs(p_val - approx)
        rhs = LEGENDRE_BESSEL_CONSTANT / n
        rows.append(AuditRow({"n": n, "t": t}, lhs, rhs, rhs - lhs, lhs <= rhs))
    return rows


def _audit_C3(grid, tol) -> List[AuditRow]:
    rows = []
    for n, t in grid:
        if n < 2 or not 0.0 < t <= math.pi / 2.0:
            rows.append(_skip({"n": n, "t": t}, "requires n >= 2, t in (0, pi/2]"))
            continue
        lhs = abs(jacobi_eval(PolyIndex(n - 1, 1.0, 1.0), math.cos(t)))
        rhs = EDGE_JACOBI_CONSTANT / (math.sqrt(n - 1.0) * t ** 1.5)
        rows.append(AuditRow({"n": n, "t": t}, lhs, rhs, rhs - lhs, lhs <= rhs))
    return rows


def _audit_LEGENDRE(grid, tol) -> List[AuditRow]:
    rows = []
    for n, t in grid:
        if n < 1 or not 0.0 < t <= math.pi / 2.0:
            rows.append(_skip({"n": n, "t": t}, "requires n >= 1, t in (0, pi/2]"))
            continue
        lhs = abs(legendre_eval(n, math.cos(t)))
        rhs = 1.0 / math.sqrt(n * t)
        rows.append(AuditRow({"n": n, "t": t}, lhs, rhs, rhs - lhs, lhs <= rhs))
    return rows


_AUDITS = {
    "L55": _audit_L55,
    "L56": _audit_L56,
    "L57": _audit_L57,
    "L58": _audit_L58,
    "CASE2": _audit_CASE2,
    "CASE3": _audit_CASE3,
    "C1": _audit_C1,
    "C3": _audit_C3,
    "LEGENDRE": _audit_LEGENDRE,
}


def bounds_audit(inequality_id: str, grid: Sequence, tol: float = 1e-12) -> BoundAuditReport:
    """Audit one certified inequality over a grid.

    Rows violating the inequality's hypotheses are marked skipped, never
    silently passed.  Grid entries are (n, theta)/(n, t) pairs, (u,) tuples
    for CASE3, or {'ntheta': value} dicts for the closed-form rows of L58.
    """
    if inequality_id not in _AUDITS:
        raise ValueError(f"unknown inequality id {inequality_id!r}")
    rows = _AUDITS[inequality_id](grid, tol)
    return BoundAuditReport(inequality_id, rows)


def default_grid(inequality_id: str) -> List:
    """Hypothesis-respecting default grid for each audit.

    The decomposition-term audits use products n*theta up to 5e3, the range
    where the integrals are computable by direct quadrature at the accuracy
    the constants demand; the closed-form rows of L58 extend across
    [5, 1e7].
    """
    if inequality_id in ("L55", "L56", "L57"):
        cells = []
        for target in np.geomspace(5.0, 5.0e3, 8):
            for theta in (math.pi / 2.0, 1.0):
                n = max(2, int(math.ceil(target / theta)))
                cells.append((n, theta))
        return cells
    if inequality_id == "L58":
        cells = default_grid("L55")
        cells.extend({"ntheta": float(v)} for v in np.geomspace(5.0, 1.0e7, 29))
        return cells
    if inequality_id == "CASE2":
        cells = []
        for n in (1, 3, 10, 30, 100, 300):
            for frac in (0.2, 0.8):
                cells.append((n, frac * CASE2_PRODUCT_LIMIT / n))
        return cells
    if inequality_id == "CASE3":
        us = np.concatenate(
            [np.linspace(0.0, CASE3_QUAD_RANGE, 12), np.geomspace(CASE3_CUBIC_RANGE, 60.0, 10)]
        )
        return [(float(u),) for u in us]
    if inequality_id == "C1":
        return [
            (n, float(t))
            for n in range(5, 101)
            for t in np.linspace(0.0, math.pi / 2.0, 17)
        ]
    if inequality_id == "C3":
        return [
            (n, float(t))
            for n in range(2, 201, 3)
            for t in np.geomspace(1e-3, math.pi / 2.0, 25)
        ]
    if inequality_id == "LEGENDRE":
        return [
            (n, float(t))
            for n in range(1, 201, 3)
            for t in np.geomspace(1e-3, math.pi / 2.0, 25)
        ]
    raise ValueError(f"unknown inequality id {inequality_id!r}")


@dataclass
class Case3Bound:
    """Certified chain value for the matching regime, with its direct moment."""

    u: float
    chain_value: float
    piecewise_bound: float
    direct_moment: float


def case3_lower_bound(n: int, theta: float,
                      product_min: float = CASE2_PRODUCT_LIMIT,
                      product_max: Optional[float] = None) -> Case3Bound:
    """Lower-bound chain sqrt(2/pi) * bound(u) - 0.1711 * theta / product_min.

    u = (n + 1/2) theta.  Raises outside the matching regime
    product_min <= n*theta <= product_max.
    """
    if product_max is None:
        product_max = positivity_product_threshold()
    product = n * theta
    if not product_min <= product <= product_max:
        raise RegimeError(
            f"n*theta = {product} outside the matching regime "
            f"[{product_min}, {product_max}]"
        )
    u = (n + 0.5) * theta
    bound = case3_piecewise_bound(u)
    if bound is None:
        raise RegimeError(f"u = {u} outside both moment-bound branches")
    chain = (
        math.sqrt(2.0 / math.pi) * bound
        - LEGENDRE_BESSEL_CONSTANT * theta / product_min
    )
    return Case3Bound(u, chain, bound, case3_moment(u))


@dataclass
class ThresholdReport:
    """Admissible small-theta threshold, recomputed beside the printed value."""

    recomputed: float
    paper_value: float
    product_threshold: float
    product_low: float


def theta_threshold() -> ThresholdReport:
    """Recompute the admissible theta range for the dimension-2 positivity claim.

    theta < (B / 0.1711) sqrt(2/pi) (4/35) * 2.0963 / A^3 with B = 2/35 and
    A the product threshold where the final lower bound turns positive.
    """
    a_threshold = positivity_product_threshold()
    recomputed = (
        CASE2_PRODUCT_LIMIT
        / LEGENDRE_BESSEL_CONSTANT
        * math.sqrt(2.0 / math.pi)
        * MOMENT_PREFACTOR
        * CASE3_CUBIC_COEFF
        / a_threshold ** 3
    )
    return ThresholdReport(
        recomputed, PAPER_THETA_THRESHOLD, a_threshold, CASE2_PRODUCT_LIMIT
    )


@dataclass(frozen=True)
class SweepConfig:
    d: int
    delta: float
    n_max: int
    theta_grid: Tuple[float, ...]
    n_min: int = 0

    def __post_init__(self) -> None:
        if self.d not in (2, 3, 5, 7):
            raise ValueError("sweep supports d in {2, 3, 5, 7}")
        if self.delta < (self.d + 1) / 2.0:
            raise ValueError("sweep requires delta >= (d+1)/2")
        if self.n_min < 0 or self.n_max < self.n_min:
            raise ValueError("need 0 <= n_min <= n_max")
        for theta in self.theta_grid:
            if not 0.0 < theta < math.pi:
                raise ValueError("theta grid must lie in (0, pi)")


@dataclass
class SweepCell:
    n: int
    theta: float
    value: float
    abs_error: float
    guarantee: str


@dataclass
class SweepReport:
    config: SweepConfig
    cells: List[SweepCell]
    min_value: float
    argmin: Tuple[int, float]
    failures: List[SweepCell]


def _guarantee_label(d: int, delta: float, n: int, theta: float, thresh: float) -> str:
    if d in (3, 5, 7):
        return "proved-odd-dimension"
    if n * theta < CASE2_PRODUCT_LIMIT:
        return "small-product"
    if theta <= thresh:
        return "small-theta-threshold"
    return "exploratory"


def _sweep_fixed_theta(d: int, delta: float, n_max: int, theta: float):
    """Values and error estimates of the sweep integral for all degrees at once.

    Rescaled form: theta^(delta+1) int_0^1 (1-x)^delta C_n(cos theta x)
    sin(theta x)^(2 lam) dx.  Half-integer delta is removed by x = 1 - s^2;
    integer delta needs no transform.  One basis-recurrence pass over the
    shared nodes serves every degree.
    """
    lam = (d - 1) / 2.0
    nodes_rule = _quad._X_FINE
    w_fine, w_coarse = _quad._W_FINE, _quad._W_COARSE
    eps = float(np.finfo(float).eps)

    half_integer = abs(2.0 * delta - round(2.0 * delta)) < 1e-12 and (
        abs(delta - round(delta)) > 1e-12
    )
    freq = max(1.0, 2.0 * n_max * theta if half_integer else n_max * theta)
    n_panels = max(4, int(math.ceil(1.0 * 2.0 * freq / math.pi)))
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    s = (mid[:, None] + half[:, None] * nodes_rule[None, :]).ravel()

    if half_integer:
        x = 1.0 - s * s
        power = int(round(2.0 * delta + 1.0))
        base = 2.0 * s ** power
    else:
        x = s
        base = (1.0 - x) ** delta
    t = theta * x
    base = base * np.sin(t) ** (2.0 * lam)
    rows = gegenbauer_table(n_max, lam, np.cos(t)) * base[None, :]
    rows = rows.reshape(n_max + 1, n_panels, nodes_rule.size)
    fine = (rows @ w_fine) * half[None, :]
    coarse = (rows[:, :, 1::2] @ w_coarse) * half[None, :]
    roundoff = eps * (np.abs(rows) @ np.abs(w_fine)) * half[None, :]
    scale = theta ** (delta + 1.0)
    values = scale * np.sum(fine, axis=1)
    errors = scale * np.sum(np.abs(fine - coarse) + roundoff, axis=1)
    return values, errors


def sweep(config: SweepConfig) -> SweepReport:
    """Sign sweep of int_0^theta (theta-t)^delta C_n^lam(cos t) sin^(2 lam) t dt.

    Cells whose positivity the proofs cover carry a guarantee label; the
    rest are exploratory.  Cells that cannot be certified positive against
    their own quadrature error are collected as failures.
    """
    thresh = theta_threshold().recomputed
    cells: List[SweepCell] = []
    failures: List[SweepCell] = []
    fast = (
        abs(2.0 * config.delta - round(2.0 * config.delta)) < 1e-12
        and config.delta <= 6.0
    )
    for theta in config.theta_grid:
        if fast:
            values, errors = _sweep_fixed_theta(
                config.d, config.delta, config.n_max, theta
            )
        else:
            values = np.empty(config.n_max + 1)
            errors = np.empty(config.n_max + 1)
            lam = (config.d - 1) / 2.0
            for n in range(config.n_max + 1):
                res = _general_cell(config.d, config.delta, n, theta)
                values[n], errors[n] = res.value, res.abs_error_est
        for n in range(config.n_min, config.n_max + 1):
            cell = SweepCell(
                n,
                theta,
                float(values[n]),
                float(errors[n]),
                _guarantee_label(config.d, config.delta, n, theta, thresh),
            )
            cells.append(cell)
            if not cell.value > 10.0 * cell.abs_error:
                failures.append(cell)
    best = min(cells, key=lambda c: c.value)
    return SweepReport(config, cells, best.value, (best.n, best.theta), failures)


def _general_cell(d: int, delta: float, n: int, theta: float) -> QuadratureResult:
    """Graded-panel fallback for noninteger, nonhalf-integer delta."""
    from .specfun import gegenbauer_eval

    lam = (d - 1) / 2.0

    def smooth(t):
        t = np.asarray(t, dtype=float)
        return gegenbauer_eval(n, lam, np.clip(np.cos(t), -1.0, 1.0)) * np.sin(t) ** (
            2.0 * lam
        )

    return integrate_endpoint_singular(
        smooth,
        0.0,
        theta,
        SingularWeight(right_exponent=delta),
        tol=1e-12 * theta ** (delta + 2.0),
        freq=float(n),
    )

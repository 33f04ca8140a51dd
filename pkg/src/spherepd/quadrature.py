"""Adaptive panel quadrature for singular and oscillatory 1-d integrals.

One engine drives everything: each panel is evaluated with a 15-point
Fejer rule on interior Chebyshev nodes, and the 7-point rule embedded in
the same nodes supplies the error estimate.  The nodes are open (panel
endpoints are never evaluated), so integrands with removable endpoint
singularities need no guards.  Refinement bisects the worst panels until
either the error budget or the evaluation budget is exhausted.  Integrands
must be vectorized: they receive a numpy array and return one of the same
shape.

Endpoint weights (t-a)^p (b-t)^q with p, q > -1 are handled three ways:

* nonnegative integer exponents are folded into the integrand (smooth);
* half-integer exponents are removed exactly by t = a + s^2 / t = b - s^2;
* anything else falls back to panels graded geometrically (ratio 1/2)
  toward the singular endpoint, with the innermost sliver closed by a
  two-term local expansion.

Oscillatory integrands declare a frequency scale N; seed panels are then
capped at pi/(2N) so the base rule never sees more than a quarter period.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import HypothesisViolationError

__all__ = [
    "QuadratureResult",
    "SingularWeight",
    "integrate_adaptive",
    "integrate_oscillatory",
    "integrate_endpoint_singular",
    "endpoint_asymptotic",
    "DEFAULT_TOL",
    "DEFAULT_MAX_EVALS",
    "DEFAULT_GRADING_DEPTH",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_EVALS = 1_000_000
DEFAULT_GRADING_DEPTH = 40

_EPS = float(np.finfo(float).eps)
_BATCH = 16  # panels split per refinement round


@dataclass
class QuadratureResult:
    """Value, absolute-error estimate, evaluation count, convergence flag."""

    value: float
    abs_error_est: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class SingularWeight:
    """Algebraic endpoint weight (t-a)^left * (b-t)^right, exponents > -1."""

    left_exponent: float = 0.0
    right_exponent: float = 0.0

    def __post_init__(self) -> None:
        if self.left_exponent <= -1.0 or self.right_exponent <= -1.0:
            raise ValueError("endpoint exponents must exceed -1 for integrability")


def _fejer_open(m: int):
    """Nodes and weights of the open (m-1)-point Fejer rule on [-1, 1].

    Nodes are the interior Chebyshev points cos(j pi / m), j = 1..m-1;
    weights come from solving the Chebyshev-Vandermonde moment system,
    which is exact and avoids transcribing tabulated constants.  The rule
    is interpolatory, hence exact through polynomial degree m-2.
    """
    theta = np.arange(1, m) * np.pi / m
    x = np.cos(theta)
    k = np.arange(m - 1)
    vander = np.cos(np.outer(k, theta))  # T_k(x_j)
    moments = np.zeros(m - 1)
    moments[0] = 2.0
    moments[2::2] = 2.0 / (1.0 - k[2::2].astype(float) ** 2)
    w = np.linalg.solve(vander, moments)
    return x, w


_M_FINE = 16
_X_FINE, _W_FINE = _fejer_open(_M_FINE)
_W_COARSE = _fejer_open(_M_FINE // 2)[1]  # lives on _X_FINE[1::2]
_ABS_W_FINE = np.abs(_W_FINE)
EXACT_DEGREE = _M_FINE - 2  # base rule integrates polynomials exactly to here


def _eval_panels(f: Callable, lo: np.ndarray, hi: np.ndarray):
    """Evaluate the rule pair on a batch of panels [lo_i, hi_i]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _X_FINE[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    fine = half * (vals @ _W_FINE)
    coarse = half * (vals[:, 1::2] @ _W_COARSE)
    roundoff = _EPS * half * (np.abs(vals) @ _ABS_W_FINE)
    err = np.abs(fine - coarse) + roundoff
    return fine, err, pts.size


def _adapt(f: Callable, edges: np.ndarray, tol: float, max_evals: int) -> QuadratureResult:
    """Refine the seeded panels until the summed error estimate is below tol."""
    lo, hi = edges[:-1], edges[1:]
    vals, errs, evals = _eval_panels(f, lo, hi)
    total_val = float(vals.sum())
    total_err = float(errs.sum())
    heap = []
    counter = 0
    for a_i, b_i, v_i, e_i in zip(lo, hi, vals, errs):
        heap.append((-e_i, counter, a_i, b_i, v_i, e_i))
        counter += 1
    heapq.heapify(heap)

    while total_err > tol and evals < max_evals and heap:
        batch = []
        for _ in range(min(_BATCH, len(heap))):
            batch.append(heapq.heappop(heap))
        child_lo, child_hi = [], []
        for _, _, a_i, b_i, v_i, e_i in batch:
            m_i = 0.5 * (a_i + b_i)
            child_lo.extend((a_i, m_i))
            child_hi.extend((m_i, b_i))
            total_val -= v_i
            total_err -= e_i
        c_vals, c_errs, n_pts = _eval_panels(f, np.asarray(child_lo), np.asarray(child_hi))
        evals += n_pts
        total_val += float(c_vals.sum())
        total_err += float(c_errs.sum())
        for a_i, b_i, v_i, e_i in zip(child_lo, child_hi, c_vals, c_errs):
            heapq.heappush(heap, (-e_i, counter, a_i, b_i, v_i, e_i))
            counter += 1

    return QuadratureResult(total_val, total_err, evals, total_err <= tol)


def _seed_edges(a: float, b: float, freq: float) -> np.ndarray:
    """Uniform panel edges with width capped at a quarter period of freq."""
    if b <= a:
        return np.array([a, b])
    if freq > 0.0:
        cap = np.pi / (2.0 * max(freq, 1.0))
        n_panels = max(1, int(math.ceil((b - a) / cap)))
    else:
        n_panels = 1
    return np.linspace(a, b, n_panels + 1)


def integrate_adaptive(
    f: Callable,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Integrate a vectorized integrand over [a, b] to absolute tolerance tol."""
    if b < a:
        raise ValueError(f"require a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    return _adapt(f, _seed_edges(a, b, 0.0), tol, max_evals)


def integrate_oscillatory(
    f: Callable,
    a: float,
    b: float,
    freq: float,
    tol: float = DEFAULT_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Same contract as integrate_adaptive, with seed panels <= pi/(2 freq)."""
    if freq < 0.0:
        raise ValueError("frequency scale must be nonnegative")
    if b < a:
        raise ValueError(f"require a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    return _adapt(f, _seed_edges(a, b, freq), tol, max_evals)


def _is_near_int(x: float) -> bool:
    return abs(x - round(x)) < 1e-12


def _combine(parts: Sequence[QuadratureResult], tol: float) -> QuadratureResult:
    value = sum(p.value for p in parts)
    err = sum(p.abs_error_est for p in parts)
    evals = sum(p.evaluations for p in parts)
    return QuadratureResult(value, err, evals, err <= tol)


def _graded_side(
    smooth: Callable,
    sing: float,
    other: float,
    p: float,
    tol: float,
    max_evals: int,
    freq: float,
    depth: int,
) -> QuadratureResult:
    """Integrate smooth(t)*|t-sing|^p over the interval between sing and other.

    Panels accumulate geometrically toward the singular endpoint; the
    innermost sliver is closed with a two-term local expansion of smooth.
    """
    left = sing < other
    length = abs(other - sing)
    ratios = 0.5 ** np.arange(depth, -1, -1.0)
    if left:
        edges = sing + length * np.concatenate(([0.0], ratios))
        weighted = lambda t: smooth(t) * (t - sing) ** p
    else:
        edges = sing - length * np.concatenate(([0.0], ratios))
        edges = edges[::-1]
        weighted = lambda t: smooth(t) * (sing - t) ** p

    # closure of the sliver adjacent to the singular point
    h = length * ratios[0]
    if left:
        t1, t2 = sing + 0.25 * h, sing + 0.75 * h
    else:
        t1, t2 = sing - 0.75 * h, sing - 0.25 * h
    s_vals = np.asarray(smooth(np.array([t1, t2])), dtype=float)
    s_mid = 0.5 * (s_vals[0] + s_vals[1])
    slope = (s_vals[1] - s_vals[0]) / (0.5 * h)
    if not left:
        slope = -slope  # slope with respect to distance from the singular point
    m1 = h ** (p + 1.0) / (p + 1.0)
    m2 = h ** (p + 2.0) / (p + 2.0)
    corr = slope * (m2 - 0.5 * h * m1)
    sliver_val = s_mid * m1 + corr
    sliver_err = 0.25 * abs(s_vals[1] - s_vals[0]) * m1 + _EPS * abs(s_mid) * m1
    sliver = QuadratureResult(sliver_val, sliver_err, 2, True)

    inner = edges[1:] if left else edges[:-1]
    if freq > 0.0:
        cap = np.pi / (2.0 * max(freq, 1.0))
        pieces = [inner[0]]
        for a_i, b_i in zip(inner[:-1], inner[1:]):
            k = max(1, int(math.ceil((b_i - a_i) / cap)))
            pieces.extend(np.linspace(a_i, b_i, k + 1)[1:])
        inner = np.asarray(pieces)
    body = _adapt(weighted, inner, tol, max_evals)
    return _combine([sliver, body], tol)


def _weighted_side(
    f: Callable,
    a: float,
    b: float,
    p: float,
    q: float,
    lo: float,
    hi: float,
    side: str,
    tol: float,
    max_evals: int,
    freq: float,
    depth: int,
) -> QuadratureResult:
    """Integrate f(t)(t-a)^p(b-t)^q over [lo, hi]; only one endpoint is singular."""
    if side == "left":
        exponent = p
        smooth = lambda t: f(t) * (b - t) ** q
        sing, other = a, hi
    else:
        exponent = q
        smooth = lambda t: f(t) * (t - a) ** p
        sing, other = b, lo

    if _is_near_int(exponent) and exponent >= 0:
        k = int(round(exponent))
        if side == "left":
            g = lambda t: smooth(t) * (t - a) ** k
        else:
            g = lambda t: smooth(t) * (b - t) ** k
        return _adapt(g, _seed_edges(lo, hi, freq), tol, max_evals)

    if _is_near_int(2.0 * exponent):
        # half-integer exponent: substitution removes the singularity exactly
        power = int(round(2.0 * exponent + 1.0))  # even, >= 0
        s_max = math.sqrt(abs(other - sing))
        if side == "left":
            g = lambda s: 2.0 * smooth(sing + s * s) * s ** power
        else:
            g = lambda s: 2.0 * smooth(sing - s * s) * s ** power
        freq_s = 2.0 * freq * s_max if freq > 0.0 else 0.0
        return _adapt(g, _seed_edges(0.0, s_max, freq_s), tol, max_evals)

    return _graded_side(smooth, sing, other, exponent, tol, max_evals, freq, depth)


def integrate_endpoint_singular(
    f: Callable,
    a: float,
    b: float,
    weight: SingularWeight,
    tol: float = DEFAULT_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
    freq: float = 0.0,
    grading_depth: int = DEFAULT_GRADING_DEPTH,
) -> QuadratureResult:
    """Integrate f(t) * (t-a)^p * (b-t)^q over [a, b].

    f is the smooth factor; the weight carries the endpoint exponents.
    An optional frequency scale freq (phase ~ freq * t) controls the seed
    panel width exactly as in integrate_oscillatory.
    """
    if b < a:
        raise ValueError(f"require a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    p, q = weight.left_exponent, weight.right_exponent

    if _is_near_int(p) and p >= 0 and _is_near_int(q) and q >= 0:
        kp, kq = int(round(p)), int(round(q))
        g = lambda t: f(t) * (t - a) ** kp * (b - t) ** kq
        return _adapt(g, _seed_edges(a, b, freq), tol, max_evals)

    mid = 0.5 * (a + b)
    left = _weighted_side(
        f, a, b, p, q, a, mid, "left", 0.5 * tol, max_evals // 2, freq, grading_depth
    )
    right = _weighted_side(
        f, a, b, p, q, mid, b, "right", 0.5 * tol, max_evals // 2, freq, grading_depth
    )
    return _combine([left, right], tol)


def endpoint_asymptotic(
    derivs: Sequence[Callable],
    a: float,
    b: float,
    exponent: float,
    N: float,
    v: int,
    side: str,
    tol: float = DEFAULT_TOL,
    vanish_tol: float = 1e-8,
):
    """Endpoint expansion of int_a^b e^{iNt} w(t) phi(t) dt with explicit remainder.

    For side='left' the weight is w(t) = (t-a)^(exponent-1) and phi together
    with its derivatives through order v-1 must vanish at b; for side='right'
    the weight is (b-t)^(exponent-1) with the vanishing required at a.  The
    returned pair is (approximation, certified remainder bound), where the
    bound is N^{-v} * int |phi^{(v)}(t)| w(t) dt.

    derivs must hold the v+1 vectorized callables phi, phi', ..., phi^{(v)}.
    """
    if not 0.0 < exponent < 1.0:
        raise ValueError("exponent must lie in (0, 1)")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if v < 1:
        raise ValueError("expansion order v must be >= 1")
    if len(derivs) < v + 1:
        raise ValueError(f"need phi and its first {v} derivatives, got {len(derivs)}")

    left = side == "left"
    opposite = b if left else a
    for order in range(v):
        val = float(np.asarray(derivs[order](np.array([opposite]))).ravel()[0])
        if abs(val) > vanish_tol:
            raise HypothesisViolationError(
                f"phi^({order}) must vanish at t={opposite}, got {val:+.3e}"
            )

    endpoint = a if left else b
    sgn = 1.0 if left else -1.0
    total = 0.0 + 0.0j
    for k in range(v):
        phik = float(np.asarray(derivs[k](np.array([endpoint]))).ravel()[0])
        amp = math.gamma(k + exponent) / (math.factorial(k) * N ** (k + exponent))
        phase = N * endpoint + sgn * exponent * np.pi / 2.0 + k * np.pi / 2.0
        total += amp * complex(math.cos(phase), math.sin(phase)) * phik

    if left:
        wt = SingularWeight(left_exponent=exponent - 1.0)
    else:
        wt = SingularWeight(right_exponent=exponent - 1.0)
    rem = integrate_endpoint_singular(
        lambda t: np.abs(derivs[v](t)), a, b, wt, tol=tol
    )
    bound = (rem.value + rem.abs_error_est) / N ** v
    return total, bound

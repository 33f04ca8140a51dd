"""Positive-definiteness criteria for isotropic kernels.

Three independent routes:

* the sphere criterion: expansion coefficients a_n of the kernel in the
  Gegenbauer basis at lam = (d-1)/2 must all be nonnegative, with the
  refinement that strict definiteness needs strictly positive coefficients
  at infinitely many even and infinitely many odd indices.  At a finite
  truncation nmax the surrogate policy is: all a_n >= -tol, and at least
  one even and one odd index with a_n > +tol.
* the Euclidean criterion: the radial Fourier transform, evaluated on a
  sampled frequency grid, must be nonnegative.
* the Gram oracle: smallest eigenvalue of kernel matrices over random point
  sets, an empirical check independent of both analytic routes.

d = 1 is handled with the cosine basis (the lam -> 0 limit of the
normalized Gegenbauer polynomials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError
from .kernels import Dimension, Kernel
from .quadrature import DEFAULT_MAX_EVALS, integrate_oscillatory
from .specfun import (
    bessel,
    gegenbauer_eval,
    gegenbauer_table,
    gegenbauer_value_at_one,
)
from . import quadrature as _quad

__all__ = [
    "GegenbauerSeries",
    "PDVerdict",
    "Sphere",
    "Euclidean",
    "PointSet",
    "gegenbauer_coefficients",
    "schoenberg_test",
    "hankel_transform",
    "bochner_test",
    "sample_points",
    "gram_matrix",
    "min_eigenvalue",
    "gram_oracle",
    "inheritance_check",
    "converse_check",
    "InheritanceReport",
    "ConverseReport",
]


@dataclass
class GegenbauerSeries:
    """Expansion coefficients a_0..a_nmax of a kernel at dimension d.

    Coefficients follow the unnormalized convention
    a_n = int_0^pi g(t) C_n^lam(cos t) sin(t)^(2 lam) dt; for d = 1 the basis
    is cos(n t).  weighted_partial_sum is the partial reconstruction of g(0),
    sum_n a_n C_n^lam(1) / h_n with h_n the squared basis norm, which for a
    PSD kernel increases to g(0).
    """

    dim: Dimension
    coefficients: np.ndarray
    per_coeff_error: np.ndarray
    weighted_partial_sum: float
    converged: bool = True

    @property
    def nmax(self) -> int:
        return self.coefficients.size - 1


@dataclass
class PDVerdict:
    """Outcome of a positivity test with a machine-checkable witness."""

    status: str  # 'PD' | 'PSD' | 'NotPD' | 'Inconclusive'
    witness: object = None
    margins: dict = field(default_factory=dict)
    nmax: Optional[int] = None
    tol: Optional[float] = None

    def to_json(self) -> dict:
        witness = self.witness
        if isinstance(witness, np.ndarray):
            witness = witness.tolist()
        margins = {}
        for key, val in self.margins.items():
            if isinstance(val, np.ndarray):
                val = val.tolist()
            elif isinstance(val, (np.floating, np.integer)):
                val = val.item()
            margins[key] = val
        return {
            "status": self.status,
            "witness": witness,
            "nmax": self.nmax,
            "tol": self.tol,
            "margins": margins,
        }


@dataclass(frozen=True)
class Sphere:
    d: int


@dataclass(frozen=True)
class Euclidean:
    d: int


@dataclass
class PointSet:
    """Point configuration with the metric implied by its space."""

    space: Union[Sphere, Euclidean]
    points: np.ndarray


_NODES = _quad._X_FINE
_W_FINE = _quad._W_FINE
_W_COARSE = _quad._W_COARSE
_EPS = float(np.finfo(float).eps)


def _basis_rows(nmax: int, lam: float, t: np.ndarray) -> np.ndarray:
    """C_n^lam(cos t) rows for lam > 0, or cos(n t) rows for lam = 0."""
    if lam > 0.0:
        return gegenbauer_table(nmax, lam, np.cos(t))
    degrees = np.arange(nmax + 1)[:, None]
    return np.cos(degrees * t[None, :])


def _basis_norms(nmax: int, lam: float) -> np.ndarray:
    """Squared L2 norms h_n = int_0^pi basis_n(t)^2 sin(t)^(2 lam) dt."""
    n = np.arange(nmax + 1, dtype=float)
    if lam > 0.0:
        from scipy.special import gammaln as _gln

        log_h = (
            math.log(math.pi)
            + (1.0 - 2.0 * lam) * math.log(2.0)
            + _gln(n + 2.0 * lam)
            - np.log(n + lam)
            - 2.0 * _gln(lam)
            - _gln(n + 1.0)
        )
        return np.exp(log_h)
    h = np.full(nmax + 1, math.pi / 2.0)
    h[0] = math.pi
    return h


def gegenbauer_coefficients(
    g: Kernel,
    dim: Dimension,
    nmax: int,
    tol: float = 1e-12,
    max_refine: int = 4,
) -> GegenbauerSeries:
    """All expansion coefficients a_0..a_nmax of g at dimension d.

    The coefficients share one panel mesh sized for the highest frequency
    (seed width pi/(2 nmax), the oscillatory-rule cap), so a single
    recurrence pass over the nodes serves every degree.  Each coefficient
    carries its own error estimate from the nested rule pair; the mesh is
    refined until every estimate is below tol.
    """
    lam = dim.lam
    upper = min(math.pi, g.support_end)
    if upper <= 0.0:
        zero = np.zeros(nmax + 1)
        return GegenbauerSeries(dim, zero, zero.copy(), 0.0, True)

    value_at_one = (
        np.array([gegenbauer_value_at_one(n, lam) for n in range(nmax + 1)])
        if lam > 0.0
        else np.ones(nmax + 1)
    )
    weights = value_at_one / _basis_norms(nmax, lam)

    n_panels = max(4, int(math.ceil(upper * 2.0 * max(nmax, 1) / math.pi)))
    for _ in range(max_refine):
        edges = np.linspace(0.0, upper, n_panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        t = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        base = np.asarray(g(t), dtype=float)
        if lam > 0.0:
            base = base * np.sin(t) ** (2.0 * lam)
        rows = _basis_rows(nmax, lam, t) * base[None, :]
        rows = rows.reshape(nmax + 1, n_panels, _NODES.size)
        fine = (rows @ _W_FINE) * half[None, :]
        coarse = (rows[:, :, 1::2] @ _W_COARSE) * half[None, :]
        roundoff = _EPS * (np.abs(rows) @ np.abs(_W_FINE)) * half[None, :]
        per_err = np.sum(np.abs(fine - coarse) + roundoff, axis=1)
        coeffs = np.sum(fine, axis=1)
        if float(per_err.max()) <= tol:
            return GegenbauerSeries(
                dim, coeffs, per_err, float(np.dot(coeffs, weights)), True
            )
        n_panels *= 2
    return GegenbauerSeries(
        dim, coeffs, per_err, float(np.dot(coeffs, weights)), False
    )


def schoenberg_test(series: GegenbauerSeries, tol: Optional[float] = None) -> PDVerdict:
    """Sphere positivity verdict from a truncated coefficient series.

    NotPD needs a coefficient reliably below -tol (its index is the
    witness).  PD additionally needs one even and one odd index reliably
    above +tol; all-nonnegative without that surrogate is PSD.  When the
    quadrature error estimates could flip a deciding sign the verdict is
    Inconclusive.
    """
    a = series.coefficients
    err = series.per_coeff_error
    if tol is None:
        scale = max(abs(float(a[0])), abs(series.weighted_partial_sum), 1e-300)
        tol = 1e-10 * scale

    reliably_neg = (a + err) < -tol
    possibly_neg = (a - err) < -tol
    margins = {
        "min_coeff": float(a.min()),
        "argmin": int(a.argmin()),
        "max_coeff": float(a.max()),
        "weighted_sum": series.weighted_partial_sum,
    }
    if not series.converged:
        return PDVerdict("Inconclusive", None, margins, series.nmax, tol)
    if np.any(reliably_neg):
        idx = int(np.argmin(np.where(reliably_neg, a, np.inf)))
        return PDVerdict("NotPD", idx, margins, series.nmax, tol)
    if np.any(possibly_neg):
        return PDVerdict("Inconclusive", None, margins, series.nmax, tol)

    reliably_pos = (a - err) > tol
    idx_even = np.nonzero(reliably_pos[0::2])[0]
    idx_odd = np.nonzero(reliably_pos[1::2])[0]
    margins["n_pos_even"] = int(idx_even.size)
    margins["n_pos_odd"] = int(idx_odd.size)
    if idx_even.size > 0 and idx_odd.size > 0:
        return PDVerdict("PD", None, margins, series.nmax, tol)
    return PDVerdict("PSD", None, margins, series.nmax, tol)


def hankel_transform(
    g: Kernel,
    dim: Dimension,
    xi: float,
    tol: float = 1e-11,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> float:
    """Radial Fourier transform (2 pi)^(d/2) int g(u) j_((d-2)/2)(xi u) u^(d-1) du."""
    if xi < 0.0:
        raise DomainError("frequency xi must be nonnegative")
    d = dim.d
    upper = g.support_end
    if upper <= 0.0:
        return 0.0
    order = (d - 2) / 2.0

    def integrand(u):
        u = np.asarray(u, dtype=float)
        return (
            np.asarray(g(u), dtype=float)
            * bessel(order, xi * u, normalized=True)
            * u ** (d - 1)
        )

    res = integrate_oscillatory(integrand, 0.0, upper, freq=xi, tol=tol, max_evals=max_evals)
    return (2.0 * math.pi) ** (d / 2.0) * res.value


def bochner_test(
    g: Kernel,
    dim: Dimension,
    xi_grid: Sequence[float],
    tol: float = 1e-9,
    quad_tol: float = 1e-11,
) -> PDVerdict:
    """Euclidean positivity sampled on a frequency grid.

    Grid evidence only: a verdict of PD or PSD here means
    'positive/nonnegative at every sampled frequency', recorded in
    margins['evidence'].  A transform value below -tol is a NotPD witness.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.size == 0 or np.any(xi_grid < 0.0) or np.any(np.diff(xi_grid) <= 0.0):
        raise ValueError("xi_grid must be nonempty, nonnegative, strictly sorted")
    values = np.array([hankel_transform(g, dim, x, tol=quad_tol) for x in xi_grid])
    margins = {
        "evidence": "grid-sampled",
        "min_value": float(values.min()),
        "argmin_xi": float(xi_grid[values.argmin()]),
    }
    if np.any(values < -tol):
        xi_bad = float(xi_grid[int(np.argmin(values))])
        return PDVerdict("NotPD", xi_bad, margins, None, tol)
    if np.all(values > tol):
        return PDVerdict("PD", None, margins, None, tol)
    return PDVerdict("PSD", None, margins, None, tol)


def sample_points(space: Union[Sphere, Euclidean], n: int, rng: np.random.Generator,
                  scale: float = math.pi / 4.0) -> PointSet:
    """Random points: normalized Gaussians on spheres, scaled Gaussians in R^d."""
    if isinstance(space, Sphere):
        raw = rng.standard_normal((n, space.d + 1))
        pts = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        return PointSet(space, pts)
    pts = scale * rng.standard_normal((n, space.d))
    return PointSet(space, pts)


def pairwise_distances(ps: PointSet) -> np.ndarray:
    pts = ps.points
    if isinstance(ps.space, Sphere):
        dots = np.clip(pts @ pts.T, -1.0, 1.0)
        return np.arccos(dots)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def gram_matrix(g: Kernel, ps: PointSet) -> np.ndarray:
    dist = pairwise_distances(ps)
    mat = np.asarray(g(dist.ravel()), dtype=float).reshape(dist.shape)
    return 0.5 * (mat + mat.T)  # symmetrize away arccos roundoff


def min_eigenvalue(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(mat)[0])


def gram_oracle(
    g: Kernel,
    space: Union[Sphere, Euclidean],
    n_points: int,
    trials: int,
    seed: int,
    tol: float = 1e-8,
):
    """Minimum Gram eigenvalue over random point sets; empirical PD check.

    Returns (min eigenvalue over all trials, verdict).  The witness of a
    NotPD verdict carries the offending points and eigenvector.  Runs are
    deterministic in (seed, trials, n_points).
    """
    rng = np.random.default_rng(seed)
    worst = math.inf
    worst_detail = None
    scale = max(min(math.pi, g.support_end), 1e-3) / 4.0
    for trial in range(trials):
        ps = sample_points(space, n_points, rng, scale=scale)
        mat = gram_matrix(g, ps)
        eigvals, eigvecs = np.linalg.eigh(mat)
        if eigvals[0] < worst:
            worst = float(eigvals[0])
            worst_detail = (trial, ps, eigvecs[:, 0], float(np.abs(eigvals).max()))
    trial, ps, vec, norm = worst_detail
    margins = {"matrix_norm": norm, "trials": trials, "n_points": n_points}
    if worst < -tol * max(norm, 1e-300):
        witness = {
            "trial": trial,
            "eigenvalue": worst,
            "points": ps.points,
            "eigenvector": vec,
        }
        verdict = PDVerdict("NotPD", witness, margins, None, tol)
    else:
        status = "PD" if worst > tol * norm else "PSD"
        margins["evidence"] = "sampled"
        verdict = PDVerdict(status, None, margins, None, tol)
    return worst, verdict


@dataclass
class InheritanceReport:
    """Cross-tabulation of the Euclidean and sphere verdicts for one kernel."""

    euclidean: PDVerdict
    sphere: PDVerdict
    consistent: bool
    finding: Optional[str] = None


def inheritance_check(
    g: Kernel,
    d: int,
    nmax: int,
    xi_grid: Optional[Sequence[float]] = None,
    tol: float = 1e-9,
) -> InheritanceReport:
    """Check that Euclidean positivity carries over to the sphere (odd d >= 3).

    Runs the Euclidean grid test and the sphere series test; a kernel that
    passes on R^d but fails on S^d is surfaced as a finding, never
    suppressed.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("inheritance check requires odd d >= 3")
    dim = Dimension(d)
    if xi_grid is None:
        xi_grid = np.linspace(0.05, 60.0, 240)
    euclid = bochner_test(g, dim, xi_grid, tol=tol)
    series = gegenbauer_coefficients(g, dim, nmax)
    sphere = schoenberg_test(series)
    consistent = True
    finding = None
    if euclid.status in ("PD", "PSD") and sphere.status == "NotPD":
        consistent = False
        finding = (
            f"Euclidean verdict {euclid.status} but sphere verdict NotPD "
            f"with witness index {sphere.witness}"
        )
    return InheritanceReport(euclid, sphere, consistent, finding)


@dataclass
class ConverseReport:
    """Convergence table for the scaled-kernel limit toward the transform."""

    x: float
    target: float
    rows: list  # (n, S_n, |S_n - target|)
    gaps_decreasing: bool
    final_gap_rel: float


def converse_check(
    g: Kernel,
    d: int,
    x: float,
    n_list: Sequence[int],
    tol: float = 1e-11,
) -> ConverseReport:
    """Scaled sphere functionals S_n against their Euclidean transform limit.

    S_n = n^(2 lam + 1) * int g(t/theta_n) R_n(cos t) sin(t)^(2 lam) dt with
    theta_n = x/n; the limit is c_lam x^(2 lam + 1) (2 pi)^(-d/2) ghat(x).
    Sampling theta along x/n follows the limit construction only; it is
    weaker than requiring the hypothesis at every scale, and reports should
    say so.
    """
    if d < 2:
        raise ValueError("converse check requires d >= 2")
    if x <= 0.0:
        raise ValueError("x must be positive")
    dim = Dimension(d)
    lam = dim.lam
    c_lam = 2.0 ** (lam - 0.5) * math.gamma(lam + 0.5)
    target = (
        c_lam
        * x ** (2.0 * lam + 1.0)
        * (2.0 * math.pi) ** (-d / 2.0)
        * hankel_transform(g, dim, x, tol=tol)
    )
    rows = []
    for n in n_list:
        theta = x / n
        if not 0.0 < theta < 1.0:
            raise ValueError(f"theta_n = x/n = {theta} must lie in (0, 1); raise n")
        upper = theta * g.support_end
        if upper <= 0.0:
            rows.append((n, 0.0, abs(target)))
            continue

        def integrand(t, n=n, theta=theta):
            t = np.asarray(t, dtype=float)
            out = np.asarray(g(t / theta), dtype=float)
            if lam > 0.0:
                cos_t = np.clip(np.cos(t), -1.0, 1.0)
                r_n = gegenbauer_eval(n, lam, cos_t, normalized=True)
                out = out * r_n * np.sin(t) ** (2.0 * lam)
            elif n > 0:
                out = out * np.cos(n * t)
            return out

        res = integrate_oscillatory(
            integrand, 0.0, min(upper, math.pi), freq=float(n), tol=tol
        )
        s_n = n ** (2.0 * lam + 1.0) * res.value
        rows.append((n, s_n, abs(s_n - target)))

    gaps = [row[2] for row in rows]
    decreasing = all(g2 < g1 for g1, g2 in zip(gaps[:-1], gaps[1:]))
    final_rel = gaps[-1] / abs(target) if target != 0.0 else math.inf
    return ConverseReport(x, target, rows, decreasing, final_rel)

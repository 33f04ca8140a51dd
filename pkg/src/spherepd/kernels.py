"""Isotropic kernel specifications and their transforms.

A kernel is a function of the distance t >= 0 with compact support.  The
variants are the truncated power (theta - t)_+^delta, tabulated profiles,
the sinc-power transform g(t) (sin t / t)^(d-1), and rescaling g(t/theta).
Kernel objects are immutable and vectorized over t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .quadrature import (
    DEFAULT_MAX_EVALS,
    SingularWeight,
    integrate_adaptive,
    integrate_endpoint_singular,
)
from .specfun import gegenbauer_eval

__all__ = [
    "Kernel",
    "TruncatedPower",
    "Tabulated",
    "SincPower",
    "Scaled",
    "Dimension",
    "kernel_eval",
    "scale_kernel",
    "sinc_power_transform",
    "fractional_lift_check",
    "constant_one_kernel",
]


@dataclass(frozen=True)
class Dimension:
    """Sphere/space dimension d with the tied Gegenbauer parameter (d-1)/2."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def lam(self) -> float:
        return (self.d - 1) / 2.0


class Kernel:
    """Base class; subclasses implement __call__ on nonnegative arrays."""

    def __call__(self, t):
        raise NotImplementedError

    @property
    def support_end(self) -> float:
        raise NotImplementedError

    @property
    def continuity_class(self) -> int:
        raise NotImplementedError


def _eval_prep(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("kernel argument must be nonnegative")
    return arr, arr.ndim == 0


@dataclass(frozen=True)
class TruncatedPower(Kernel):
    """(theta - t)_+^delta."""

    theta: float
    delta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= math.pi:
            raise ValueError("theta must lie in (0, pi]")
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")

    def __call__(self, t):
        arr, scalar = _eval_prep(t)
        diff = self.theta - arr
        out = np.where(diff > 0.0, np.maximum(diff, 0.0) ** self.delta, 0.0)
        if self.delta == 0.0:
            out = np.where(diff >= 0.0, 1.0, 0.0)
        return float(out) if scalar else out

    @property
    def support_end(self) -> float:
        return self.theta

    @property
    def continuity_class(self) -> int:
        if self.delta == int(self.delta):
            return max(0, int(self.delta) - 1)
        return int(math.floor(self.delta))


@dataclass(frozen=True, eq=False)
class Tabulated(Kernel):
    """Interpolated profile on sorted nodes; zero beyond the last node."""

    nodes: np.ndarray
    values: np.ndarray
    interpolation: str = "cubic"

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("need at least two nodes")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if values.shape != nodes.shape:
            raise ValueError("values must match nodes")
        if self.interpolation not in ("linear", "cubic"):
            raise ValueError("interpolation must be 'linear' or 'cubic'")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @cached_property
    def _interp(self):
        if self.interpolation == "cubic":
            return PchipInterpolator(self.nodes, self.values, extrapolate=False)
        return None

    def __call__(self, t):
        arr, scalar = _eval_prep(t)
        out = np.zeros_like(arr)
        lo, hi = self.nodes[0], self.nodes[-1]
        beyond = arr > hi
        below = arr < lo
        if np.any(below):
            raise DomainError(
                f"tabulated kernel queried below its first node {lo}"
            )
        inside = ~beyond
        if np.any(inside):
            if self.interpolation == "cubic":
                out[inside] = self._interp(arr[inside])
            else:
                out[inside] = np.interp(arr[inside], self.nodes, self.values)
        return float(out) if scalar else out

    @property
    def support_end(self) -> float:
        nonzero = np.nonzero(self.values)[0]
        if nonzero.size == 0:
            return 0.0
        return float(self.nodes[min(nonzero[-1] + 1, self.nodes.size - 1)])

    @property
    def continuity_class(self) -> int:
        return 1 if self.interpolation == "cubic" else 0


@dataclass(frozen=True)
class SincPower(Kernel):
    """g(t) * (sin t / t)^(d-1)."""

    inner: Kernel
    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    def __call__(self, t):
        arr, scalar = _eval_prep(t)
        base = np.asarray(self.inner(arr), dtype=float)
        sinc = np.ones_like(arr)
        nz = arr != 0.0
        sinc[nz] = np.sin(arr[nz]) / arr[nz]
        out = base * sinc ** (self.d - 1)
        return float(out) if scalar else out

    @property
    def support_end(self) -> float:
        return self.inner.support_end

    @property
    def continuity_class(self) -> int:
        return self.inner.continuity_class


@dataclass(frozen=True)
class Scaled(Kernel):
    """g(t / theta); shrinks the support by the factor theta in (0, 1]."""

    inner: Kernel
    theta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("scale theta must lie in (0, 1]")

    def __call__(self, t):
        arr, scalar = _eval_prep(t)
        out = np.asarray(self.inner(arr / self.theta), dtype=float)
        return float(out) if scalar else out

    @property
    def support_end(self) -> float:
        return self.theta * self.inner.support_end

    @property
    def continuity_class(self) -> int:
        return self.inner.continuity_class


def kernel_eval(spec: Kernel, t):
    """Evaluate a kernel at nonnegative t (scalar or array)."""
    return spec(t)


def scale_kernel(g: Kernel, theta: float) -> Scaled:
    return Scaled(inner=g, theta=theta)


def sinc_power_transform(g: Kernel, d: int) -> Kernel:
    if d == 1:
        return g  # exponent d-1 = 0 leaves the kernel unchanged
    return SincPower(inner=g, d=d)


def constant_one_kernel(end: float = math.pi) -> TruncatedPower:
    """Indicator of [0, end]: the delta = 0 truncated power."""
    return TruncatedPower(theta=end, delta=0.0)


def fractional_lift_check(
    g: Kernel,
    delta1: float,
    delta2: float,
    theta: float,
    n: int,
    d: int,
    tol: float = 1e-11,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> float:
    """Residual of the Beta-function reduction between exponents delta1 > delta2.

    With gamma(u) = g(u) C_n^lam(cos u) sin(u)^(2 lam), lam = (d-1)/2, the
    identity under test is

        int_0^theta (theta-u)^delta1 gamma(u) du
          = (1 / B(delta2+1, delta1-delta2))
            * int_0^theta (theta-t)^(delta1-delta2-1)
                 int_0^t (t-u)^delta2 gamma(u) du dt.

    Both sides are computed by independent quadratures; the absolute
    difference is returned.
    """
    if not delta1 > delta2 > -1.0:
        raise ValueError("need delta1 > delta2 > -1")
    a = delta1 - delta2 - 1.0
    b = delta2
    if a <= -1.0 or b <= 0.0:
        raise ValueError("need delta1 - delta2 > 0 and delta2 > 0")
    lam = (d - 1) / 2.0

    def gamma_fn(u):
        u = np.asarray(u, dtype=float)
        out = np.asarray(g(u), dtype=float)
        if lam > 0.0:
            out = out * gegenbauer_eval(n, lam, np.cos(u)) * np.sin(u) ** (2.0 * lam)
        elif n > 0:
            out = out * np.cos(n * u)
        return out

    lhs = integrate_endpoint_singular(
        gamma_fn,
        0.0,
        theta,
        SingularWeight(right_exponent=delta1),
        tol=tol,
        max_evals=max_evals,
        freq=float(n),
    ).value

    def inner(t_scalar: float) -> float:
        if t_scalar <= 0.0:
            return 0.0
        return integrate_endpoint_singular(
            gamma_fn,
            0.0,
            t_scalar,
            SingularWeight(right_exponent=b),
            tol=0.1 * tol,
            max_evals=max_evals,
            freq=float(n),
        ).value

    def outer_fn(t):
        t = np.asarray(t, dtype=float)
        return np.array([inner(ti) for ti in t])

    rhs_int = integrate_endpoint_singular(
        outer_fn,
        0.0,
        theta,
        SingularWeight(right_exponent=a),
        tol=tol,
        max_evals=max_evals,
    ).value
    beta = math.exp(
        math.lgamma(b + 1.0) + math.lgamma(a + 1.0) - math.lgamma(a + b + 2.0)
    )
    rhs = rhs_int / beta
    return abs(lhs - rhs)

"""Scalar numeric services: adaptive quadrature, Gaussian moments, log-log fits.

The quadrature is a Gauss-Kronrod 7-15 pair with deterministic recursive
bisection; complex-valued integrands are supported directly.  The depth cap
turns a genuinely singular integrand into a :class:`NonConvergence` error
instead of silent inaccuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DomainError, NonConvergence

__all__ = [
    "RegressionFit",
    "adaptive_quadrature",
    "gamma_fn",
    "gaussian_moment",
    "loglog_fit",
]

# Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (QUADPACK dqk15 constants).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

# Full 15-point node set in increasing order, plus matching weight tables.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _eval_vector(f, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, tolerating scalar-only and constant callables."""
    try:
        vals = np.asarray(f(x), dtype=np.complex128)
    except (TypeError, ValueError):
        return np.array([complex(f(t)) for t in x], dtype=np.complex128)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape).astype(np.complex128)
    return vals


def _gk15(f, a: float, b: float) -> tuple[complex, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = _eval_vector(f, mid + half * _NODES)
    kronrod = half * np.sum(_KRONROD_W * fx)
    gauss = half * np.sum(_GAUSS_W * fx)
    return complex(kronrod), abs(kronrod - gauss)


def adaptive_quadrature(f, a: float, b: float, rel_tol: float = 1e-10,
                        max_depth: int = 40) -> complex:
    """Integrate a (possibly complex-valued) function over [a, b].

    Deterministic bisection: an interval is split until the local
    Kronrod-Gauss discrepancy is below its share of the tolerance, down to
    ``max_depth`` levels.  Raises :class:`NonConvergence` if any interval is
    still unresolved at the cap, which signals a singular integrand.
    """
    if not (a < b):
        raise DomainError(f"require a < b, got a={a}, b={b}")
    if not (1e-14 < rel_tol < 1e-2):
        raise DomainError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")

    coarse, _ = _gk15(f, a, b)
    scale = 1.0 + abs(coarse)
    tol0 = rel_tol * scale

    total = 0.0 + 0.0j
    # Explicit stack, left interval first, so subdivision order is fixed.
    stack = [(a, b, tol0, 0)]
    while stack:
        lo, hi, tol, depth = stack.pop()
        value, err = _gk15(f, lo, hi)
        if err <= tol or err <= 1e-16 * scale:
            total += value
            continue
        if depth >= max_depth:
            raise NonConvergence(
                f"quadrature did not converge on [{lo}, {hi}] at depth {depth}"
            )
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, 0.5 * tol, depth + 1))
        stack.append((lo, mid, 0.5 * tol, depth + 1))
    return total


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0 (Lanczos-class; relative error <= 1e-13)."""
    if not (x > 0):
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def gaussian_moment(beta: float) -> float:
    """Closed form of the even Gaussian moment: integral of e^{-y^2} |y|^beta.

    Equals Gamma((beta+1)/2) and satisfies the downward recursion
    ``moment(beta) = 2/(beta+1) * moment(beta+2)``.
    """
    if beta < 0:
        raise DomainError(f"gaussian_moment requires beta >= 0, got {beta}")
    return gamma_fn(0.5 * (beta + 1.0))


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line through (log x, log y)."""

    slope: float
    intercept: float
    r_squared: float
    n_samples: int


def loglog_fit(xs, ys) -> RegressionFit:
    """Fit log(y) = slope*log(x) + intercept by unweighted least squares."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DegenerateInput("xs and ys must be 1D arrays of equal length")
    if xs.size < 3:
        raise DegenerateInput(f"need at least 3 samples, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DegenerateInput("all samples must be strictly positive")
    lx = np.log(xs)
    ly = np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res <= 1e-28 else 0.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    if not np.isfinite(slope):
        raise DegenerateInput("regression slope is not finite")
    return RegressionFit(slope=float(slope), intercept=float(intercept),
                         r_squared=r_squared, n_samples=int(xs.size))

"""Exact and numerical machinery for the pointwise ODE w_t = lam*|w|^alpha*w.

The unperturbed equation has closed-form solutions; the perturbed equation
w_t = lam*|w|^alpha*w + h(t, y) is integrated per grid point by classical
RK4, together with the spatial-derivative track v = w_y which obeys

    v_t = lam*(alpha+2)/2 * |w|^alpha * v
          + lam*alpha/2 * |w|^(alpha-2) * w^2 * conj(v) + h_y.

Integrating v via its own equation (rather than differencing w) keeps full
accuracy near the kink that develops at y = 0.  The |w|^(alpha-2)*w^2 factor
is defined as 0 at w = 0 (its modulus is |w|^alpha -> 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BlowUpError,
    DegenerateInput,
    DomainError,
    StepSizeError,
)
from .grids import Grid1D
from .numerics import RegressionFit, loglog_fit

__all__ = [
    "NonlinearityParams",
    "OdeRun",
    "IntegratingFactor",
    "HolderDefectReport",
    "exact_solution",
    "exact_flow",
    "exact_first_derivative",
    "exact_second_derivative",
    "integrate_perturbed",
    "integrating_factor",
    "representation_check",
    "holder_defect",
]


@dataclass(frozen=True)
class NonlinearityParams:
    """Nonlinearity exponent alpha, complex coupling lam, diffusion angle theta.

    lam = 0 is accepted as the linear-control limit (nonlinearity switched
    off), although the singularity mechanism itself needs lam != 0.
    """

    alpha: float
    lam: complex
    theta: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (-np.pi / 2 <= self.theta <= np.pi / 2):
            raise DomainError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "theta", float(self.theta))


def exact_flow(params: NonlinearityParams, values, t: float):
    """Exact time-t flow of w' = lam*|w|^alpha*w from arbitrary complex data.

    Vectorized over ``values``.  For Re lam > 0 raises :class:`BlowUpError`
    as soon as t reaches the blow-up time of the largest sample.
    """
    lam, alpha = params.lam, params.alpha
    v = np.asarray(values, dtype=np.complex128)
    if t == 0.0 or lam == 0:
        return v.copy()
    mag_a = np.abs(v) ** alpha
    if lam.real == 0.0:
        return v * np.exp(1j * t * mag_a * lam.imag)
    base = 1.0 - alpha * t * lam.real * mag_a
    if lam.real > 0 and np.min(base) <= 0.0:
        peak = float(np.max(mag_a))
        critical = 1.0 / (alpha * peak * lam.real)
        raise BlowUpError(
            f"blow-up at t = {critical:.6g} reached before t = {t}", time=critical
        )
    exponent = -lam / (alpha * lam.real)
    return v * np.exp(exponent * np.log(base))


def exact_solution(params: NonlinearityParams, phi_value: complex, t: float) -> complex:
    """Closed-form solution at time t >= 0 with initial value ``phi_value``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return complex(exact_flow(params, np.asarray(phi_value), t))


def _check_deriv_args(params, x, t, need_nonzero_x):
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if need_nonzero_x and x == 0.0:
        raise DomainError("second derivative is undefined at x = 0")


def exact_first_derivative(params: NonlinearityParams, x: float, t: float) -> complex:
    """d/dx of the exact solution with initial data phi(x) = x."""
    _check_deriv_args(params, x, t, need_nonzero_x=False)
    lam, alpha = params.lam, params.alpha
    mag_a = abs(x) ** alpha
    if lam.real == 0.0:
        return (1.0 + 1j * alpha * t * mag_a * lam.imag) * cmath.exp(
            1j * t * mag_a * lam.imag
        )
    base = 1.0 - alpha * t * lam.real * mag_a
    if base <= 0.0:
        critical = 1.0 / (alpha * mag_a * lam.real)
        raise BlowUpError(f"blow-up at t = {critical:.6g}", time=critical)
    exponent = -(lam + alpha * lam.real) / (alpha * lam.real)
    return (1.0 + 1j * alpha * t * mag_a * lam.imag) * cmath.exp(
        exponent * math.log(base)
    )


def exact_second_derivative(params: NonlinearityParams, x: float, t: float) -> complex:
    """d^2/dx^2 of the exact solution with initial data phi(x) = x (x != 0)."""
    _check_deriv_args(params, x, t, need_nonzero_x=True)
    lam, alpha = params.lam, params.alpha
    mag_a = abs(x) ** alpha
    front = alpha * t * mag_a / x
    if lam.real == 0.0:
        return (
            1j * front * lam.imag
            * (1.0 + alpha + 1j * alpha * t * mag_a * lam.imag)
            * cmath.exp(1j * t * mag_a * lam.imag)
        )
    base = 1.0 - alpha * t * lam.real * mag_a
    if base <= 0.0:
        critical = 1.0 / (alpha * mag_a * lam.real)
        raise BlowUpError(f"blow-up at t = {critical:.6g}", time=critical)
    exponent = -(lam + 2.0 * alpha * lam.real) / (alpha * lam.real)
    bracket = lam + alpha * lam.real + 1j * alpha * lam.imag * (1.0 + lam * t * mag_a)
    return front * cmath.exp(exponent * math.log(base)) * bracket


def _conj_factor(w: np.ndarray, alpha: float) -> np.ndarray:
    """|w|^(alpha-2) * w^2, with the removable singularity at w = 0 set to 0."""
    mag = np.abs(w)
    out = np.zeros_like(w)
    nz = mag > 0.0
    out[nz] = (w[nz] / mag[nz]) ** 2 * mag[nz] ** alpha
    return out


def _fd_derivative(func, y: np.ndarray, step: float = 1e-3) -> np.ndarray:
    """Fourth-order central difference of a callable along y."""
    return (
        -func(y + 2 * step) + 8.0 * func(y + step)
        - 8.0 * func(y - step) + func(y - 2 * step)
    ) / (12.0 * step)


@dataclass
class OdeRun:
    """Space-indexed family of scalar ODE solutions plus the derivative track.

    ``had_forcing`` survives serialization even though the forcing callable
    itself does not, so consumers that need h can detect a loaded forced run.
    """

    params: NonlinearityParams
    grid: Grid1D
    times: np.ndarray
    w: np.ndarray  # [time, space]
    v: np.ndarray  # [time, space]
    z0: complex
    phi0: object = None
    h_forcing: object = None
    h_y: object = None
    error_estimate: float = 0.0
    dt: float = 0.0
    had_forcing: bool = False

    @property
    def has_forcing(self) -> bool:
        return self.h_forcing is not None or self.had_forcing


@dataclass(frozen=True)
class IntegratingFactor:
    """Accumulated exponent A(t, y) = lam*(alpha+2)/2 * int_0^t |w|^alpha."""

    A: np.ndarray  # [time, space]


def integrate_perturbed(
    params: NonlinearityParams,
    phi0,
    h_forcing,
    T: float,
    grid: Grid1D,
    dt: float,
    *,
    phi0_prime=None,
    h_y=None,
    max_amplitude: float = 1e6,
    monitor_error: bool = True,
) -> OdeRun:
    """RK4 integration of the perturbed ODE and its variational equation.

    ``phi0`` and ``h_forcing`` are vectorized callables (``phi0(y)``,
    ``h_forcing(t, y)``) with phi0(0) = 0 and h(t, 0) = 0; ``h_forcing`` may
    be None for the unforced problem.  Analytic derivatives ``phi0_prime``
    and ``h_y`` are used when given, otherwise fourth-order central
    differences of the callables.  The y = 0 column of w is pinned to zero.
    """
    if T <= 0:
        raise DomainError(f"T must be positive, got {T}")
    if not (0 < dt <= 1e-3 * T):
        raise StepSizeError(f"require 0 < dt <= 1e-3*T = {1e-3 * T:.3g}, got {dt}")

    y = grid.points
    j0 = grid.zero_index
    lam, alpha = params.lam, params.alpha

    w = np.asarray(phi0(y), dtype=np.complex128).copy()
    if abs(w[j0]) > 1e-13 * (1.0 + np.max(np.abs(w))):
        raise DomainError(f"phi0(0) must vanish, got {w[j0]}")
    w[j0] = 0.0

    if phi0_prime is not None:
        v = np.asarray(phi0_prime(y), dtype=np.complex128).copy()
    else:
        v = _fd_derivative(phi0, y).astype(np.complex128)
    z0 = complex(v[j0])

    if h_forcing is not None:
        h0 = np.asarray(h_forcing(0.0, np.array([0.0])), dtype=np.complex128)
        hT = np.asarray(h_forcing(T, np.array([0.0])), dtype=np.complex128)
        if max(abs(h0[0]), abs(hT[0])) > 1e-13:
            raise DomainError("h_forcing(t, 0) must vanish")

    def h_at(t):
        if h_forcing is None:
            return 0.0
        return np.asarray(h_forcing(t, y), dtype=np.complex128)

    def f_at(t):
        if h_forcing is None:
            return 0.0
        if h_y is not None:
            return np.asarray(h_y(t, y), dtype=np.complex128)
        return _fd_derivative(lambda q: np.asarray(h_forcing(t, q)), y)

    half = 0.5 * alpha + 1.0  # (alpha + 2)/2

    def rhs(t, wc, vc, h_val, f_val):
        mag_a = np.abs(wc) ** alpha
        dw = lam * mag_a * wc + h_val
        dv = lam * half * mag_a * vc + lam * (0.5 * alpha) * _conj_factor(wc, alpha) * np.conj(vc) + f_val
        return dw, dv

    def rk4_step(t, wc, vc, step):
        h_lo, h_mid, h_hi = h_at(t), h_at(t + 0.5 * step), h_at(t + step)
        f_lo, f_mid, f_hi = f_at(t), f_at(t + 0.5 * step), f_at(t + step)
        k1w, k1v = rhs(t, wc, vc, h_lo, f_lo)
        k2w, k2v = rhs(t, wc + 0.5 * step * k1w, vc + 0.5 * step * k1v, h_mid, f_mid)
        k3w, k3v = rhs(t, wc + 0.5 * step * k2w, vc + 0.5 * step * k2v, h_mid, f_mid)
        k4w, k4v = rhs(t, wc + step * k3w, vc + step * k3v, h_hi, f_hi)
        wn = wc + (step / 6.0) * (k1w + 2 * k2w + 2 * k3w + k4w)
        vn = vc + (step / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        return wn, vn

    n_steps = int(round(T / dt))
    times = dt * np.arange(n_steps + 1)
    ws = np.empty((n_steps + 1, y.size), dtype=np.complex128)
    vs = np.empty_like(ws)
    ws[0], vs[0] = w, v

    err_max = 0.0
    for k in range(n_steps):
        t = times[k]
        wn, vn = rk4_step(t, w, v, dt)
        if monitor_error:
            wh, vh = rk4_step(t, w, v, 0.5 * dt)
            wh, _ = rk4_step(t + 0.5 * dt, wh, vh, 0.5 * dt)
            err_max = max(err_max, float(np.max(np.abs(wn - wh))) / 15.0)
        w, v = wn, vn
        w[j0] = 0.0
        peak = float(np.max(np.abs(w)))
        if not np.isfinite(peak) or peak > max_amplitude:
            partial = OdeRun(
                params=params, grid=grid, times=times[: k + 2],
                w=np.vstack([ws[: k + 1], w[None, :]]),
                v=np.vstack([vs[: k + 1], v[None, :]]),
                z0=z0, phi0=phi0, h_forcing=h_forcing, h_y=h_y,
                error_estimate=err_max, dt=dt,
                had_forcing=h_forcing is not None,
            )
            raise BlowUpError(
                f"amplitude exceeded {max_amplitude:.3g} at t = {times[k + 1]:.6g}",
                time=float(times[k + 1]), partial=partial,
            )
        ws[k + 1], vs[k + 1] = w, v

    return OdeRun(
        params=params, grid=grid, times=times, w=ws, v=vs, z0=z0,
        phi0=phi0, h_forcing=h_forcing, h_y=h_y,
        error_estimate=err_max, dt=dt,
        had_forcing=h_forcing is not None,
    )


def _cumtrapz(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid along axis 0, starting at 0."""
    dt = np.diff(times)[:, None]
    out = np.zeros_like(values)
    np.cumsum(0.5 * dt * (values[1:] + values[:-1]), axis=0, out=out[1:])
    return out


def integrating_factor(run: OdeRun) -> IntegratingFactor:
    """Trapezoid accumulation of lam*(alpha+2)/2 * int_0^t |w(s, y)|^alpha ds."""
    lam, alpha = run.params.lam, run.params.alpha
    mag_a = np.abs(run.w) ** alpha
    A = lam * (0.5 * alpha + 1.0) * _cumtrapz(mag_a.astype(np.complex128), run.times)
    return IntegratingFactor(A=A)


def representation_check(run: OdeRun, factor: IntegratingFactor) -> float:
    """Max residual of the integrating-factor representation of v.

    Evaluates v(t,y) - [e^{A(t,y)} v(0,y) + int_0^t e^{A(t,y)-A(s,y)} g(s,y) ds]
    with g = lam*alpha/2*|w|^(alpha-2)*w^2*conj(v) + h_y, pointwise over the
    full stored (t, y) table.  The representation is an identity, so the
    residual measures time-discretization error only (O(dt^2) trapezoid).
    """
    lam, alpha = run.params.lam, run.params.alpha
    if factor.A.shape != run.w.shape:
        raise DegenerateInput("factor and run have mismatched shapes")

    if run.h_forcing is None:
        if run.had_forcing:
            raise DegenerateInput(
                "run was forced but its forcing callable is unavailable "
                "(runs loaded from disk keep only the sampled tracks)"
            )
        f = np.zeros_like(run.w)
    else:
        y = run.grid.points
        if run.h_y is not None:
            f = np.stack([np.asarray(run.h_y(t, y), dtype=np.complex128)
                          for t in run.times])
        else:
            f = np.stack([
                _fd_derivative(lambda q: np.asarray(run.h_forcing(t, q)), y)
                for t in run.times
            ]).astype(np.complex128)

    g = lam * (0.5 * alpha) * _conj_factor(run.w, alpha) * np.conj(run.v) + f
    expA = np.exp(factor.A)
    inner = _cumtrapz(np.exp(-factor.A) * g, run.times)
    model = expA * run.v[0][None, :] + expA * inner
    return float(np.max(np.abs(run.v - model)))


def _dyadic_ladder(grid: Grid1D, y_max: float, min_points: int = 4):
    """Grid-aligned dyadic offsets y_k = y_max * 2^-k with y_k >= 4*spacing."""
    spacing = grid.spacing
    j0 = grid.zero_index
    idx, ys = [], []
    y_k = y_max
    while y_k >= 4.0 * spacing - 1e-12 * spacing:
        j = int(round(y_k / spacing))
        if j >= 1 and j0 + j < grid.n_points and (not idx or j != idx[-1]):
            idx.append(j)
            ys.append(j * spacing)
        y_k *= 0.5
    if len(idx) < min_points:
        raise DegenerateInput(
            f"dyadic ladder from y_max={y_max} has {len(idx)} usable points (< {min_points})"
        )
    return np.array(idx), np.array(ys)


@dataclass
class HolderDefectReport:
    """Dyadic increment diagnostic for the derivative track at one time."""

    t: float
    ys: np.ndarray
    increments: np.ndarray
    increment_fit: RegressionFit
    fits: dict = field(default_factory=dict)  # exponent -> RegressionFit of q/y^ell
    liminf_proxy: float = 0.0
    theory_lower_bound: float = 0.0


def holder_defect(run: OdeRun, t: float, exponents, y_max: float = 0.5) -> HolderDefectReport:
    """Fit |v(t, y) - v(t, 0)| against y on a dyadic ladder near y = 0.

    The raw fit slope is the measured increment exponent (the singularity
    mechanism predicts alpha when phi'(0) != 0).  For each requested
    exponent ell the fit of q(y)/y^ell is returned as well: a negative slope
    for ell > alpha is the discrete signature that the ell-Hoelder windowed
    seminorm diverges as the window shrinks.
    """
    it = int(np.argmin(np.abs(run.times - t)))
    if abs(run.times[it] - t) > 0.5 * run.dt + 1e-12:
        raise DomainError(f"t = {t} is not a stored time of the run")
    exponents = [float(e) for e in np.atleast_1d(exponents)]
    if any(not (0.0 < e <= 1.0) for e in exponents):
        raise DomainError("exponents must lie in (0, 1]")

    j0 = run.grid.zero_index
    idx, ys = _dyadic_ladder(run.grid, y_max)
    q = np.abs(run.v[it, j0 + idx] - run.v[it, j0])
    increment_fit = loglog_fit(ys, q)
    fits = {e: loglog_fit(ys, q / ys**e) for e in exponents}
    alpha = run.params.alpha
    return HolderDefectReport(
        t=float(run.times[it]),
        ys=ys,
        increments=q,
        increment_fit=increment_fit,
        fits=fits,
        liminf_proxy=float(np.min(q / ys**alpha)),
        theory_lower_bound=float(
            run.times[it] * abs(run.params.lam) * abs(run.z0) ** (alpha + 1.0) / 2.0
        ),
    )

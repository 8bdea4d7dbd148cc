"""Regularity measurements and loss-of-smoothness illustrations.

Everything here is a pure function of trajectories or grid functions:
discrete Hoelder seminorms, Fourier H^s norms (p = 2 only), the increment
exponent of the third y-derivative at y = 0, the smoothed Duhamel integral
with its fifth-derivative divergence rate, the dilation transform behind
the ill-posedness scaling argument, and randomized checks of the three
elementary inequalities used by the regularity bootstrap.

Divergence statements are always illustrated as finite-window power-law
fits with stated exponents; no check ever claims to verify an actual
infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInput,
    DomainError,
    InsufficientSnapshots,
    ResolutionError,
)
from .evolution import Trajectory, eta_track
from .grids import GridFunction, spectral_derivative, trig_interpolate
from .kernels import KernelProbe, c_alpha, fifth_derivative_at_zero
from .numerics import RegressionFit, loglog_fit
from .ode import _dyadic_ladder

__all__ = [
    "HolderIndex",
    "SobolevIndex",
    "DuhamelProbe",
    "ScalingParams",
    "ScanReport",
    "DuhamelRateReport",
    "ScalingVerdict",
    "InequalityReport",
    "holder_seminorm",
    "hs_norm",
    "third_derivative_holder_scan",
    "duhamel_integral",
    "duhamel_integral_of_series",
    "duhamel_fifth_derivative_rate",
    "synthetic_slice_check",
    "scaling_transform",
    "illposedness_exponent_report",
    "appendix_inequality_checks",
    "consistency_report",
]


# ---------------------------------------------------------------------------
# Hoelder seminorm


@dataclass(frozen=True)
class HolderIndex:
    ell: float
    window: float

    def __post_init__(self):
        if not (0.0 < self.ell <= 1.0):
            raise DomainError(f"ell must lie in (0, 1], got {self.ell}")
        if not (self.window > 0.0):
            raise DomainError(f"window must be positive, got {self.window}")


def holder_seminorm(u: GridFunction, idx: HolderIndex) -> float:
    """Discrete sup of |u(x) - u(y)| / |x - y|^ell over pairs within the window.

    Exact on the sample set; pair distances are straight-line (no periodic
    wraparound), scanned at increasing offset so the result is deterministic.
    """
    if u.ndim != 1:
        raise DomainError("holder_seminorm expects a 1D grid function")
    g = u.grids[0]
    spacing = g.spacing
    if idx.window < 2.0 * spacing:
        raise DegenerateInput(
            f"window {idx.window} smaller than 2*spacing = {2 * spacing}"
        )
    vals = u.values
    d_max = min(int(idx.window / spacing + 1e-12), g.n_points - 1)
    best = 0.0
    for d in range(1, d_max + 1):
        diff = float(np.max(np.abs(vals[d:] - vals[:-d])))
        best = max(best, diff / (d * spacing) ** idx.ell)
    return best


# ---------------------------------------------------------------------------
# Sobolev norm (p = 2)


@dataclass(frozen=True)
class SobolevIndex:
    s: float
    p: int = 2

    def __post_init__(self):
        if self.s < 0:
            raise DomainError(f"s must be >= 0, got {self.s}")
        if self.p != 2:
            raise DomainError("only p = 2 is supported")


def hs_norm(u: GridFunction, idx: SobolevIndex) -> float:
    """Plancherel evaluation of the (1 + xi^2)^(s/2) multiplier norm.

    Normalized so that s = 0 reproduces the discrete L^2 norm
    sqrt(spacing * sum |u_j|^2).
    """
    if u.ndim != 1:
        raise DomainError("hs_norm expects a 1D grid function")
    from .grids import forward_transform

    g = u.grids[0]
    coeffs = forward_transform(u).coefficients
    xi_sq = g.wavenumbers**2
    total = np.sum((1.0 + xi_sq) ** idx.s * np.abs(coeffs) ** 2)
    return float(np.sqrt(2.0 * g.half_length * total))


# ---------------------------------------------------------------------------
# Third-derivative increment scan


@dataclass
class ScanReport:
    """Increment exponent of the third y-derivative at y = 0."""

    t: float
    ys: np.ndarray
    increments: np.ndarray
    increment_fit: RegressionFit
    window_fits: dict = field(default_factory=dict)  # beta -> RegressionFit


def third_derivative_holder_scan(
    traj: Trajectory, t: float, beta_list, y_max: float | None = None
) -> ScanReport:
    """Fit |d^3_y u(t, y) - d^3_y u(t, 0)| against y on a dyadic ladder.

    The increment exponent is expected to equal alpha for the nonlinear
    run (so every beta-seminorm with beta > alpha diverges as the window
    shrinks); a smooth control run fits >= 1.  For each requested beta the
    windowed-seminorm growth fit is returned: the sup of q(y)/y^beta over
    y <= w scales like w^(alpha-beta).
    """
    if traj.snapshot(0).ndim != 1:
        raise DomainError("third_derivative_holder_scan expects a 1D trajectory")
    i = traj.index_of_time(t)
    u = traj.snapshot(i)
    d3 = spectral_derivative(u, order=3, axis=-1).values
    g = traj.y_grid
    j0 = g.zero_index
    if y_max is None:
        y_max = g.half_length / 16.0
    try:
        idx, ys = _dyadic_ladder(g, y_max)
    except DegenerateInput as err:
        raise ResolutionError(str(err)) from None
    q = np.abs(d3[j0 + idx] - d3[j0])
    increment_fit = loglog_fit(ys, q)

    # seminorm proxy at window scale w: q(w)/w^beta ~ w^(alpha - beta), so a
    # negative slope for beta > alpha is the discrete divergence signature
    window_fits = {}
    for beta in np.atleast_1d(beta_list):
        beta = float(beta)
        window_fits[beta] = loglog_fit(ys, q / ys**beta)
    return ScanReport(t=float(traj.times[i]), ys=ys, increments=q,
                      increment_fit=increment_fit, window_fits=window_fits)


# ---------------------------------------------------------------------------
# Duhamel integral and its fifth-derivative divergence rate


@dataclass
class DuhamelProbe:
    """A trajectory, a cutoff time t, and a ladder of smoothing times tau > t."""

    traj: Trajectory
    t: float
    tau_ladder: np.ndarray
    x_prime_window: float = 0.0

    def __post_init__(self):
        self.tau_ladder = np.asarray(self.tau_ladder, dtype=float)
        if self.tau_ladder.size == 0:
            raise DegenerateInput("tau_ladder is empty")
        if np.any(self.tau_ladder <= self.t):
            raise DomainError("every tau must exceed t")
        if self.t < 0 or self.t > self.traj.times[-1] + 1e-12:
            raise DomainError("t must lie within the trajectory horizon")
        # sort by decreasing gap tau - t
        self.tau_ladder = np.sort(self.tau_ladder)[::-1].copy()


def _snapshot_times_upto(traj: Trajectory, t: float):
    i = traj.index_of_time(t)
    return traj.times[: i + 1], traj.values[: i + 1]


def duhamel_integral_of_series(times, series, grids, tau: float) -> np.ndarray:
    """Heat-smoothed time integral of a stored integrand series.

    Computes int_0^t exp((tau - s) Delta) F(s) ds by trapezoid over the
    stored times; each term applies the Fourier heat multiplier.  Linear in
    the series by construction.
    """
    xi_sq = grids[0].wavenumbers ** 2 if len(grids) == 1 else (
        grids[0].wavenumbers[:, None] ** 2 + grids[1].wavenumbers[None, :] ** 2
    )
    acc = np.zeros_like(series[0], dtype=np.complex128)
    weights = np.zeros(len(times))
    dt = np.diff(times)
    weights[:-1] += 0.5 * dt
    weights[1:] += 0.5 * dt
    for w, t_s, f_s in zip(weights, times, series):
        acc += w * np.fft.fftn(f_s) * np.exp(-(tau - t_s) * xi_sq)
    return np.fft.ifftn(acc)


def duhamel_integral(probe: DuhamelProbe, tau: float | None = None) -> GridFunction:
    """Smoothed Duhamel integral NH(t, tau) of the trajectory's nonlinearity."""
    traj = probe.traj
    if tau is None:
        tau = float(probe.tau_ladder[0])
    if tau <= probe.t:
        raise DomainError("tau must exceed t")
    times, snaps = _snapshot_times_upto(traj, probe.t)
    if times.size < 2:
        raise InsufficientSnapshots("need at least 2 snapshots up to t")
    max_gap = float(np.max(np.diff(times)))
    if max_gap > (tau - probe.t) / 4.0 + 1e-15:
        raise InsufficientSnapshots(
            f"snapshot spacing {max_gap:.3g} exceeds (tau - t)/4 = {(tau - probe.t) / 4:.3g}"
        )
    alpha = traj.params.alpha
    series = np.abs(snaps) ** alpha * snaps
    values = duhamel_integral_of_series(times, series, traj.grids, tau)
    return GridFunction(traj.grid, values, allow_nonfinite=True)


def _slice_fifth_derivative(interpolant, alpha: float, sigma: float,
                            rel_tol: float) -> complex:
    """Fifth y-derivative at 0 of the heat-smoothed nonlinearity of one slice.

    The smooth field u is evaluated off-grid by trigonometric interpolation
    and the nonlinearity is applied pointwise at the quadrature nodes, so no
    Fourier transform of the kinked profile is ever taken.
    """

    def psi(pts):
        vals = interpolant(pts)
        return np.abs(vals) ** alpha * vals

    probe = KernelProbe(psi=psi, sigma=sigma, m=0.0)
    return fifth_derivative_at_zero(probe, rel_tol=rel_tol)


def _fit_empirical_constants(gaps: np.ndarray, mags: np.ndarray, beta: float):
    """Linear least squares for |D5| ~ a*(tau-t)^-beta - A at the theory exponent.

    The divergence statement only asserts that such constants a, A > 0
    exist; they are fitted empirically, never assigned theory values.
    """
    design = np.column_stack([gaps**-beta, -np.ones_like(gaps)])
    coeffs, *_ = np.linalg.lstsq(design, mags, rcond=None)
    return float(coeffs[0]), float(coeffs[1])


def _fit_divergence_law(gaps: np.ndarray, mags: np.ndarray, t: float) -> tuple[float, float]:
    """Profile least squares in log space for |D5| = A*((tau-t)^-b - tau^-b).

    This is the exact shape of the divergence law including its finite-tau
    second term; over a window where tau - t is not vanishingly small
    compared to t, the naive log-log slope is offset by that term while the
    law exponent is not.  Deterministic: dense scan plus golden-section
    refinement of the scalar profile objective.
    """
    logm = np.log(mags)

    def objective(beta):
        shape = gaps**-beta - (t + gaps) ** -beta
        g = np.log(shape)
        log_a = float(np.mean(logm - g))
        return float(np.sum((logm - log_a - g) ** 2)), log_a

    betas = np.linspace(0.02, 1.5, 149)
    errs = np.array([objective(b)[0] for b in betas])
    k = int(np.argmin(errs))
    a, b = betas[max(k - 1, 0)], betas[min(k + 1, betas.size - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    for _ in range(50):
        if objective(c)[0] < objective(d)[0]:
            b, d = d, c
            c = b - inv_phi * (b - a)
        else:
            a, c = c, d
            d = a + inv_phi * (b - a)
    beta_hat = 0.5 * (a + b)
    return beta_hat, math.exp(objective(beta_hat)[1])


@dataclass
class DuhamelRateReport:
    """Divergence of the fifth y-derivative of NH(t, tau) as tau -> t."""

    t: float
    taus: np.ndarray
    gaps: np.ndarray
    values: np.ndarray            # complex D5 per tau (quadrature path)
    magnitudes: np.ndarray
    raw_fit: RegressionFit        # log|D5| vs log(tau - t)
    law_exponent: float           # -beta from the two-term law fit
    law_amplitude: float
    empirical_a: float            # fitted constants of a*(tau-t)^-beta - A
    empirical_A: float
    predicted_amplitude: float    # 2/(2-alpha) * C_alpha * 4^(alpha/2-2) * |eta0|^(alpha+1)
    eta0: complex
    spectral_magnitudes: np.ndarray
    spectral_max_rel_diff: float


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    weights = np.zeros(len(times))
    dtimes = np.diff(times)
    weights[:-1] += 0.5 * dtimes
    weights[1:] += 0.5 * dtimes
    return weights


def duhamel_fifth_derivative_rate(probe: DuhamelProbe, rel_tol: float = 1e-7) -> DuhamelRateReport:
    """Measure the rate at which d^5_y NH(t, tau)|_{y=0} grows as tau -> t.

    Per time slice the fifth derivative is computed by the heat-kernel
    quadrature formula with sigma = 4(tau - s); the time integral is a
    trapezoid over the stored snapshots, subsampled per tau so the spacing
    stays below (tau - t)/4 without wasting slices on wide gaps.  A spectral
    (i xi)^5 evaluation is kept as a cross-check (it amplifies the
    nonlinearity's aliasing error, so it carries a much looser tolerance).
    The expected slope of log|D5| vs log(tau - t) is -(2 - alpha)/2; the
    empirical constants of a*(tau-t)^(-(2-alpha)/2) - A are fitted as well.
    """
    traj = probe.traj
    if traj.snapshot(0).ndim != 1:
        raise DomainError("duhamel_fifth_derivative_rate expects a 1D trajectory")
    gaps = probe.tau_ladder - probe.t
    if np.max(gaps) / np.min(gaps) < 29.9:
        raise DegenerateInput("tau - t must span at least ~1.5 decades")
    times, snaps = _snapshot_times_upto(traj, probe.t)
    max_gap = float(np.max(np.diff(times)))
    if max_gap > np.min(gaps) / 4.0 + 1e-15:
        raise InsufficientSnapshots(
            f"snapshot spacing {max_gap:.3g} exceeds (tau - t)/4 for the smallest gap"
        )
    alpha = traj.params.alpha
    grid = traj.y_grid
    xi = grid.wavenumbers
    n = grid.n_points
    # (i xi)^5 with the (-1)^k phase placing the evaluation point at x = 0
    mult5 = (1j * xi) ** 5 * np.where(grid.frequencies % 2 == 0, 1.0, -1.0) / n
    mult5[n // 2] = 0.0

    from .grids import TrigInterpolant

    interpolants = {}

    def interpolant_at(i):
        if i not in interpolants:
            interpolants[i] = TrigInterpolant(traj.snapshot(i))
        return interpolants[i]

    nonlin_hats = np.stack([np.fft.fft(np.abs(s) ** alpha * s) for s in snaps])

    n_stored = len(times)
    values = []
    spectral = []
    for tau, gap in zip(probe.tau_ladder, gaps):
        # subsample so spacing <= gap/4, always keeping the final slice s = t
        stride = max(1, int(gap / 4.0 / max_gap)) if max_gap > 0 else 1
        sub = list(range(0, n_stored - 1, stride)) + [n_stored - 1]
        sub_times = times[sub]
        weights = _trapezoid_weights(sub_times)
        total = 0.0 + 0.0j
        for w, t_s, i in zip(weights, sub_times, sub):
            sigma = 4.0 * (tau - t_s)
            total += w * _slice_fifth_derivative(interpolant_at(i), alpha, sigma, rel_tol)
        values.append(total)
        spec = np.sum(
            weights[:, None] * nonlin_hats[sub]
            * np.exp(-(tau - sub_times)[:, None] * xi[None, :] ** 2)
            * mult5[None, :]
        )
        spectral.append(complex(spec))
    values = np.array(values)
    spectral = np.array(spectral)
    mags = np.abs(values)
    raw_fit = loglog_fit(gaps, mags)
    beta_hat, amp_hat = _fit_divergence_law(gaps, mags, probe.t)
    emp_a, emp_A = _fit_empirical_constants(gaps, mags, (2.0 - alpha) / 2.0)

    eta0 = eta_track(traj).eta0
    predicted = (
        2.0 / (2.0 - alpha) * c_alpha(alpha) * 4.0 ** (alpha / 2.0 - 2.0)
        * abs(eta0) ** (alpha + 1.0)
    )
    rel_diff = float(np.max(np.abs(np.abs(spectral) - mags) / mags))
    return DuhamelRateReport(
        t=probe.t, taus=probe.tau_ladder.copy(), gaps=gaps, values=values,
        magnitudes=mags, raw_fit=raw_fit, law_exponent=-beta_hat,
        law_amplitude=amp_hat, empirical_a=emp_a, empirical_A=emp_A,
        predicted_amplitude=predicted, eta0=eta0,
        spectral_magnitudes=np.abs(spectral), spectral_max_rel_diff=rel_diff,
    )


def synthetic_slice_check(alpha: float, eta0: complex, sigmas) -> float:
    """Max relative error of the per-slice quadrature against the closed form.

    With the nonlinearity replaced by its pure leading term
    psi(y) = |eta0 y|^alpha eta0 y (constant eta), each slice value must be
    -c_alpha(alpha) * sigma^(alpha/2 - 2) * |eta0|^alpha * eta0.
    """
    worst = 0.0
    for sigma in np.atleast_1d(sigmas):
        def psi(y):
            return np.abs(eta0 * y) ** alpha * (eta0 * y)

        probe = KernelProbe(psi=psi, sigma=float(sigma), m=alpha + 1.0)
        val = fifth_derivative_at_zero(probe)
        expect = -c_alpha(alpha) * float(sigma) ** (alpha / 2.0 - 2.0) \
            * abs(eta0) ** alpha * eta0
        worst = max(worst, abs(val - expect) / abs(expect))
    return worst


# ---------------------------------------------------------------------------
# Scaling transform and the ill-posedness exponent


@dataclass(frozen=True)
class ScalingParams:
    mu: float
    alpha: float
    s: float
    N: int = 1

    def __post_init__(self):
        if not (self.mu >= 1.0):
            raise DomainError(f"mu must be >= 1, got {self.mu}")
        if not (self.alpha > 0):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")


def scaling_transform(phi: GridFunction, params: ScalingParams) -> GridFunction:
    """Dilation phi^mu(x) = mu^(2/alpha) phi(mu x), resampled spectrally.

    For dyadic mu on a power-of-two grid the resampling reduces to exact
    sample lookups, so the sup-norm factor mu^(2/alpha) is exact to roundoff.
    """
    if phi.ndim != 1:
        raise DomainError("scaling_transform expects a 1D grid function")
    g = phi.grids[0]
    stretched = params.mu * g.points
    vals = trig_interpolate(phi, stretched)
    # the dilation of a profile supported in the fundamental domain vanishes
    # where mu*x leaves [-L, L); without this cut the torus would tile images
    vals[(stretched < -g.half_length) | (stretched >= g.half_length)] = 0.0
    return GridFunction(g, params.mu ** (2.0 / params.alpha) * vals)


@dataclass(frozen=True)
class ScalingVerdict:
    """Sign arithmetic of the dilation exponent 2/alpha + s - N/2."""

    alpha: float
    N: int
    s: float
    exponent: float
    verdict: str       # "applies" | "does not apply" | "inconclusive"
    scaling_gap: float  # N - 2s - 4/alpha, positive iff exponent negative
    dimension_condition: bool  # N > 11 + 4/alpha

    @property
    def mechanism_applies(self) -> bool:
        return self.verdict == "applies"


def illposedness_exponent_report(alpha: float, N: int, s: float) -> ScalingVerdict:
    """Pure arithmetic: does the dilation shrink the data norm while it
    shrinks the blow-up time (T -> T/mu^2)?"""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    exponent = 2.0 / alpha + s - N / 2.0
    if abs(exponent) < 1e-12:
        verdict = "inconclusive"
    elif exponent < 0:
        verdict = "applies"
    else:
        verdict = "does not apply"
    return ScalingVerdict(
        alpha=alpha, N=N, s=s, exponent=exponent, verdict=verdict,
        scaling_gap=N - 2.0 * s - 4.0 / alpha,
        dimension_condition=bool(N > 11.0 + 4.0 / alpha),
    )


# ---------------------------------------------------------------------------
# Appendix inequality suite


@dataclass
class InequalityCheck:
    name: str
    n_samples: int
    max_ratio: float
    threshold: float
    passed: bool


@dataclass
class InequalityReport:
    seed: int
    checks: list

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _band_limited_field(rng, grid, modes: int) -> np.ndarray:
    coeffs = np.zeros(grid.n_points, dtype=np.complex128)
    k = np.arange(1, modes + 1)
    amp = rng.standard_normal((2, modes)) + 1j * rng.standard_normal((2, modes))
    coeffs[k] = amp[0] / k
    coeffs[-k] = amp[1] / k
    coeffs[0] = rng.standard_normal() + 0.0j
    return np.fft.ifft(coeffs * grid.n_points)


def appendix_inequality_checks(seed_count: int, seed: int = 2026) -> InequalityReport:
    """Randomized verification of the three elementary estimates.

    (a) | |z1|^a - |z2|^a | <= |z1 - z2|^a for a in (0, 1], with constant 1;
    (b) the gradient formula for |u|^a u against finite differences, away
        from zeros of u, to 1e-6 relative;
    (c) the interpolation bound sup|u'| <= 2 sqrt(sup|u''| sup|u|)
        (sharp constant sqrt(2) on the line, plus margin).
    """
    if seed_count < 100:
        raise DomainError(f"seed_count must be >= 100, got {seed_count}")
    rng = np.random.default_rng(seed)
    checks = []

    # (a) modulus-power difference bound
    alphas = rng.uniform(0.01, 1.0, size=seed_count)
    z1 = (rng.standard_normal(seed_count) + 1j * rng.standard_normal(seed_count)) \
        * 10.0 ** rng.uniform(-3, 3, size=seed_count)
    z2 = (rng.standard_normal(seed_count) + 1j * rng.standard_normal(seed_count)) \
        * 10.0 ** rng.uniform(-3, 3, size=seed_count)
    num = np.abs(np.abs(z1) ** alphas - np.abs(z2) ** alphas)
    den = np.abs(z1 - z2) ** alphas
    ratios = num / np.where(den > 0, den, 1.0)
    max_a = float(np.max(ratios))
    checks.append(InequalityCheck("modulus_power_difference", seed_count, max_a,
                                  1.0 + 1e-12, max_a <= 1.0 + 1e-12))

    # (b) gradient of the nonlinearity vs finite differences
    from .grids import Grid1D

    grid = Grid1D(256, np.pi)
    n_fields = max(8, seed_count // 64)
    worst_b = 0.0
    h = 1e-3
    for _ in range(n_fields):
        alpha = float(rng.uniform(0.1, 1.9))
        lam = complex(rng.standard_normal(), rng.standard_normal())
        u_vals = _band_limited_field(rng, grid, modes=8)
        u = GridFunction(grid, u_vals)
        pts = rng.uniform(-np.pi, np.pi, size=16)
        u_p = trig_interpolate(u, pts)
        mask = np.abs(u_p) >= 0.1 * np.max(np.abs(u_vals))
        if not np.any(mask):
            continue
        pts = pts[mask]
        u_p = u_p[mask]
        du_p = trig_interpolate(spectral_derivative(u, 1), pts)
        formula = (
            lam * (alpha + 2.0) / 2.0 * np.abs(u_p) ** alpha * du_p
            + lam * alpha / 2.0 * np.abs(u_p) ** (alpha - 2.0) * u_p**2 * np.conj(du_p)
        )

        def f_of(x):
            v = trig_interpolate(u, x)
            return lam * np.abs(v) ** alpha * v

        fd = (-f_of(pts + 2 * h) + 8 * f_of(pts + h)
              - 8 * f_of(pts - h) + f_of(pts - 2 * h)) / (12 * h)
        rel = np.max(np.abs(formula - fd) / np.abs(formula))
        worst_b = max(worst_b, float(rel))
    checks.append(InequalityCheck("nonlinearity_gradient_formula",
                                  n_fields * 16, worst_b, 1e-6, worst_b <= 1e-6))

    # (c) Landau-type interpolation ratio
    worst_c = 0.0
    n_fields_c = max(16, seed_count // 16)
    for _ in range(n_fields_c):
        u_vals = _band_limited_field(rng, grid, modes=32)
        u = GridFunction(grid, u_vals)
        sup_u = float(np.max(np.abs(u_vals)))
        sup_d1 = float(np.max(np.abs(spectral_derivative(u, 1).values)))
        sup_d2 = float(np.max(np.abs(spectral_derivative(u, 2).values)))
        ratio = sup_d1 / math.sqrt(sup_d2 * sup_u)
        worst_c = max(worst_c, ratio)
    checks.append(InequalityCheck("gradient_interpolation_bound",
                                  n_fields_c, worst_c, 2.0, worst_c <= 2.0))

    return InequalityReport(seed=seed, checks=checks)


# ---------------------------------------------------------------------------
# Combined trajectory record


@dataclass
class ConsistencyRecord:
    scan: ScanReport
    rate: DuhamelRateReport
    alpha: float
    scan_ok: bool
    rate_ok: bool

    @property
    def combined_pass(self) -> bool:
        return self.scan_ok and self.rate_ok


def consistency_report(traj: Trajectory, t: float, tau_ladder,
                       tolerance: float = 0.1,
                       y_max: float | None = None) -> ConsistencyRecord:
    """The two exponents of the same trajectory must tell one story:
    increment exponent of d^3_y u near alpha, divergence exponent of the
    smoothed fifth derivative near -(2 - alpha)/2."""
    alpha = traj.params.alpha
    scan = third_derivative_holder_scan(traj, t, [min(1.0, alpha + 0.4)],
                                        y_max=y_max)
    probe = DuhamelProbe(traj=traj, t=t, tau_ladder=tau_ladder)
    rate = duhamel_fifth_derivative_rate(probe)
    scan_ok = abs(scan.increment_fit.slope - alpha) <= tolerance
    rate_ok = abs(rate.law_exponent + (2.0 - alpha) / 2.0) <= tolerance
    return ConsistencyRecord(scan=scan, rate=rate, alpha=alpha,
                             scan_ok=scan_ok, rate_ok=rate_ok)

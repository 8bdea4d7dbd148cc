"""Command-line driver: config, experiment dispatch, reports.

Experiments (``--experiment``):

    verify-kernel          closed-form vs quadrature scaling of the smoothed
                           odd power and its constant
    ode-defect             increment exponent of the perturbed-ODE derivative
                           track on a dyadic ladder, with linear control
    simulate               run the splitting solver and persist the trajectory
    third-derivative-scan  increment exponent of d^3_y u at y = 0
    duhamel-rate           divergence rate of d^5_y NH(t, tau) as tau -> t
    scaling-report         dilation-exponent arithmetic and the H^s bound sweep
    inequality-suite       randomized checks of the elementary inequalities

Configuration comes from a flat key = value file with optional [sections]
(sections are organizational only; keys are flat), overridden by flags
(flag wins).  ``REGLAB_THREADS`` caps sweep parallelism.  Exit codes:
0 all checks passed, 1 some check failed, 2 bad configuration,
3 numerical failure, 4 blow-up.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .diagnostics import (
    DuhamelProbe,
    SobolevIndex,
    ScalingParams,
    appendix_inequality_checks,
    duhamel_fifth_derivative_rate,
    hs_norm,
    illposedness_exponent_report,
    scaling_transform,
    synthetic_slice_check,
    third_derivative_holder_scan,
)
from .errors import BlowUpError, ConfigError, RegLabError
from .evolution import make_odd_bump, solve
from .grids import Grid1D, GridFunction
from .kernels import c_alpha, fifth_derivative_at_zero, odd_power_probe
from .numerics import gaussian_moment
from .ode import NonlinearityParams, holder_defect, integrate_perturbed
from .trajio import save_trajectory, write_report

EXPERIMENTS = (
    "verify-kernel",
    "ode-defect",
    "simulate",
    "third-derivative-scan",
    "duhamel-rate",
    "scaling-report",
    "inequality-suite",
)


@dataclass
class ExperimentConfig:
    experiment: str = ""
    alpha: float = 0.5
    lambda_re: float = 1.0
    lambda_im: float = 0.0
    theta: float = 0.0
    grid_n: int = 1024
    domain_l: float = 4.0
    dt: float = 2e-5
    t_final: float = 0.02
    seed: int = 2026
    out_dir: str = "reglab-out"
    amplitude: float = 16.0
    support_radius: float = 2.0
    snapshot_every: int = 1
    sobolev_s: float = 1.0
    dimension_n: int = 1
    tolerance_scale: float = 1.0

    def params(self) -> NonlinearityParams:
        return NonlinearityParams(
            alpha=self.alpha,
            lam=complex(self.lambda_re, self.lambda_im),
            theta=self.theta,
        )

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment '{self.experiment}'")
        if not (0.0 < self.alpha < 2.0):
            raise ConfigError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (-np.pi / 2 <= self.theta <= np.pi / 2):
            raise ConfigError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if self.grid_n < 8 or self.grid_n & (self.grid_n - 1):
            raise ConfigError(f"grid_n must be a power of two >= 8, got {self.grid_n}")
        if self.domain_l <= 0 or self.dt <= 0 or self.t_final <= 0:
            raise ConfigError("domain_l, dt and t_final must be positive")
        if self.amplitude <= 0 or self.support_radius <= 0:
            raise ConfigError("amplitude and support_radius must be positive")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1")
        if self.sobolev_s < 0:
            raise ConfigError("sobolev_s must be >= 0")
        if self.dimension_n < 1:
            raise ConfigError("dimension_n must be >= 1")
        if self.tolerance_scale <= 0:
            raise ConfigError("tolerance_scale must be positive")


_INT_FIELDS = {"grid_n", "seed", "snapshot_every", "dimension_n"}
_STR_FIELDS = {"experiment", "out_dir"}


def load_config_file(path: str) -> dict:
    """Flat key = value with optional sections; duplicate keys are an error."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_string("[DEFAULT]\n" + fh.read())
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"malformed config {path}: {err}") from err
    known = {f.name for f in fields(ExperimentConfig)}
    out: dict = {}
    sections = ["DEFAULT"] + parser.sections()
    for section in sections:
        for key, value in parser.items(section):
            if section != "DEFAULT" and key in parser.defaults():
                if parser.defaults()[key] == value:
                    continue
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key '{key}'")
            if key in out and out[key] != value:
                raise ConfigError(f"duplicate config key '{key}'")
            out[key] = value
    return out


def _coerce(key: str, value):
    if key in _STR_FIELDS:
        return str(value)
    if key in _INT_FIELDS:
        try:
            return int(value)
        except ValueError as err:
            raise ConfigError(f"config key '{key}' must be an integer: {err}") from None
    try:
        return float(value)
    except ValueError as err:
        raise ConfigError(f"config key '{key}' must be a number: {err}") from None


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, _coerce(key, value))
    for f in fields(ExperimentConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            setattr(cfg, f.name, flag_value)
    cfg.validate()
    return cfg


def worker_count() -> int:
    raw = os.environ.get("REGLAB_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"REGLAB_THREADS must be an integer, got '{raw}'")
    return min(4, os.cpu_count() or 1)


def map_items(fn, items):
    """Order-preserving map, threaded when REGLAB_THREADS allows."""
    n = worker_count()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _check(name, measured, expected, tolerance, provenance, passed=None):
    if passed is None:
        passed = bool(abs(measured - expected) <= tolerance)
    return {
        "name": name,
        "measured": measured,
        "expected": expected,
        "tolerance": tolerance,
        "provenance": provenance,
        "passed": bool(passed),
    }


def _report_skeleton(cfg: ExperimentConfig) -> dict:
    return {
        "experiment": cfg.experiment,
        "tool_version": __version__,
        "config": {f.name: getattr(cfg, f.name) for f in fields(ExperimentConfig)},
        "seed": cfg.seed,
        "checks": [],
        "tables": {},
        "passed": False,
    }


# ---------------------------------------------------------------------------
# Experiments


def run_verify_kernel(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    alpha = cfg.alpha
    scale = cfg.tolerance_scale
    sigmas = [1e-2, 1e-1, 1.0, 10.0]

    def one(sigma):
        val = fifth_derivative_at_zero(odd_power_probe(alpha, sigma))
        expect = -c_alpha(alpha) * sigma ** (-2.0 + alpha / 2.0)
        return sigma, val.real, expect, abs(val.real - expect) / abs(expect)

    rows = map_items(one, sigmas)
    worst = max(r[3] for r in rows)
    report["checks"].append(_check(
        "fifth_derivative_closed_form_max_rel_err", worst, 0.0, 1e-8 * scale,
        "paper-eq", passed=worst <= 1e-8 * scale,
    ))
    report["checks"].append(_check(
        "c_alpha_at_two", c_alpha(2.0), 0.0, 0.0, "trivial",
        passed=c_alpha(2.0) == 0.0,
    ))
    expect_one = 8.0 / np.sqrt(np.pi)
    report["checks"].append(_check(
        "c_alpha_at_one", c_alpha(1.0), expect_one, 1e-10 * expect_one * scale,
        "derived-oracle",
    ))
    rng = np.random.default_rng(cfg.seed)
    worst_rec = 0.0
    for beta in rng.uniform(0.0, 8.0, size=50):
        lhs = gaussian_moment(beta)
        rhs = 2.0 / (beta + 1.0) * gaussian_moment(beta + 2.0)
        worst_rec = max(worst_rec, abs(lhs - rhs) / abs(lhs))
    report["checks"].append(_check(
        "gaussian_moment_recursion_max_rel_err", worst_rec, 0.0, 1e-11 * scale,
        "paper-eq", passed=worst_rec <= 1e-11 * scale,
    ))
    report["tables"]["sigma_scan"] = {
        "columns": ["sigma", "measured", "expected", "rel_err"],
        "rows": [list(r) for r in rows],
    }
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def run_ode_defect(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    grid = Grid1D(cfg.grid_n, 1.0)
    T = cfg.t_final
    dt = min(cfg.dt, 1e-3 * T)
    alpha = cfg.alpha
    scale = cfg.tolerance_scale

    def defect_slope(lam, h, h_y):
        run = integrate_perturbed(
            cfg.params() if lam != 0 else NonlinearityParams(alpha, 0.0, cfg.theta),
            lambda y: y.astype(complex), h, T=T, grid=grid, dt=dt,
            phi0_prime=lambda y: np.ones_like(y, dtype=complex), h_y=h_y,
            monitor_error=False,
        )
        return holder_defect(run, T, [alpha]), run

    rep_unforced, _ = defect_slope(cfg.params().lam, None, None)
    rep_forced, _ = defect_slope(
        cfg.params().lam, lambda t, y: t * y**3, lambda t, y: 3.0 * t * y**2
    )
    rep_control, _ = defect_slope(
        0.0, lambda t, y: t * y**3, lambda t, y: 3.0 * t * y**2
    )
    report["checks"].append(_check(
        "defect_exponent_unforced", rep_unforced.increment_fit.slope, alpha,
        0.05 * scale, "derived-oracle",
    ))
    report["checks"].append(_check(
        "defect_exponent_smooth_forcing", rep_forced.increment_fit.slope, alpha,
        0.05 * scale, "derived-oracle",
    ))
    report["checks"].append(_check(
        "linear_control_exponent", rep_control.increment_fit.slope, 1.0,
        0.01 * scale, "trivial",
        passed=rep_control.increment_fit.slope >= 1.0 - 0.01 * scale,
    ))
    report["tables"]["ladder"] = {
        "columns": ["y", "increment_unforced", "increment_forced", "increment_control"],
        "rows": [
            [float(y), float(a), float(b), float(c)]
            for y, a, b, c in zip(rep_unforced.ys, rep_unforced.increments,
                                  rep_forced.increments, rep_control.increments)
        ],
    }
    # the theory asserts the defect only for small t without quantifying the
    # threshold, so sweep t and report instead of guessing
    run_sweep = integrate_perturbed(
        cfg.params(), lambda y: y.astype(complex), None, T=T, grid=grid, dt=dt,
        phi0_prime=lambda y: np.ones_like(y, dtype=complex),
        monitor_error=False,
    )
    sweep_rows = []
    for frac in (0.2, 0.4, 0.6, 0.8, 1.0):
        t_k = frac * T
        rep_k = holder_defect(run_sweep, t_k, [alpha])
        sweep_rows.append([float(rep_k.t), float(rep_k.increment_fit.slope),
                           float(rep_k.liminf_proxy),
                           float(rep_k.theory_lower_bound)])
    report["tables"]["t_sweep"] = {
        "columns": ["t", "defect_exponent", "liminf_proxy", "theory_lower_bound"],
        "rows": sweep_rows,
    }
    report["liminf_proxy"] = rep_unforced.liminf_proxy
    report["theory_lower_bound"] = rep_unforced.theory_lower_bound
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def _standard_solve(cfg: ExperimentConfig, lam=None, snapshot_every=None):
    params = cfg.params() if lam is None else NonlinearityParams(
        cfg.alpha, lam, cfg.theta
    )
    grid = Grid1D(cfg.grid_n, cfg.domain_l)
    bump = make_odd_bump(1, cfg.amplitude, cfg.support_radius)
    return solve(params, bump, grid, T=cfg.t_final, dt=cfg.dt,
                 snapshot_every=snapshot_every or cfg.snapshot_every)


def run_simulate(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "trajectory.rglb")
    blowup = None
    try:
        traj = _standard_solve(cfg)
    except BlowUpError as err:
        traj = err.partial
        blowup = err.time
    save_trajectory(traj, path)
    norms = np.sqrt(np.sum(np.abs(traj.values) ** 2, axis=tuple(range(1, traj.values.ndim)))
                    * traj.y_grid.spacing)
    drift = float(np.max(np.abs(norms - norms[0])) / norms[0]) if norms[0] else 0.0
    report["trajectory_path"] = path
    report["blowup_time"] = blowup
    report["l2_drift"] = drift
    report["checks"].append(_check(
        "trajectory_recorded", float(len(traj.times)), float(len(traj.times)),
        0.0, "trivial", passed=len(traj.times) >= 2,
    ))
    report["tables"]["norms"] = {
        "columns": ["t", "l2_norm", "sup_norm"],
        "rows": [
            [float(t), float(n), float(np.max(np.abs(v)))]
            for t, n, v in zip(traj.times, norms, traj.values)
        ],
    }
    report["passed"] = all(c["passed"] for c in report["checks"]) and blowup is None
    return report


def run_third_derivative_scan(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    y_max = 0.25 * cfg.support_radius
    quarter = max(1, int(round(cfg.t_final / cfg.dt)) // 4)
    traj = _standard_solve(cfg, snapshot_every=quarter)
    scan = third_derivative_holder_scan(traj, cfg.t_final, [0.9], y_max=y_max)
    control_traj = _standard_solve(
        cfg, lam=0.0, snapshot_every=max(1, int(round(cfg.t_final / cfg.dt))))
    control = third_derivative_holder_scan(control_traj, cfg.t_final, [0.9], y_max=y_max)
    # smallness of t is unquantified by the theory: report the sweep
    sweep_rows = []
    for t_k in traj.times[1:]:
        rep_k = third_derivative_holder_scan(traj, float(t_k), [0.9], y_max=y_max)
        sweep_rows.append([float(t_k), float(rep_k.increment_fit.slope)])
    report["tables"]["t_sweep"] = {
        "columns": ["t", "increment_exponent"],
        "rows": sweep_rows,
    }
    scale = cfg.tolerance_scale
    report["checks"].append(_check(
        "third_derivative_increment_exponent", scan.increment_fit.slope,
        cfg.alpha, 0.1 * scale, "derived-oracle",
    ))
    report["checks"].append(_check(
        "linear_control_exponent", control.increment_fit.slope, 1.0, 0.01 * scale,
        "trivial", passed=control.increment_fit.slope >= 1.0 - 0.01 * scale,
    ))
    report["tables"]["ladder"] = {
        "columns": ["y", "increment", "increment_control"],
        "rows": [
            [float(y), float(q), float(qc)]
            for y, q, qc in zip(scan.ys, scan.increments, control.increments)
        ],
    }
    report["window_fit_beta09"] = scan.window_fits[0.9].slope
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def run_duhamel_rate(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    traj = _standard_solve(cfg, snapshot_every=1)
    taus = cfg.t_final + np.geomspace(1e-4, 3e-3, 8)
    probe = DuhamelProbe(traj=traj, t=cfg.t_final, tau_ladder=taus)
    rate = duhamel_fifth_derivative_rate(probe)
    expected_slope = -(2.0 - cfg.alpha) / 2.0
    scale = cfg.tolerance_scale
    report["checks"].append(_check(
        "divergence_law_exponent", rate.law_exponent, expected_slope, 0.1 * scale,
        "paper-eq",
    ))
    sigmas = 4.0 * np.geomspace(1e-4, 3e-3, 5)
    synth = synthetic_slice_check(cfg.alpha, rate.eta0, sigmas)
    report["checks"].append(_check(
        "synthetic_slice_closed_form_max_rel_err", synth, 0.0, 1e-6 * scale,
        "derived-oracle", passed=synth <= 1e-6 * scale,
    ))
    scan = third_derivative_holder_scan(
        traj, cfg.t_final, [0.9], y_max=0.25 * cfg.support_radius
    )
    consistent = (abs(scan.increment_fit.slope - cfg.alpha) <= 0.1 * scale
                  and abs(rate.law_exponent - expected_slope) <= 0.1 * scale)
    report["checks"].append(_check(
        "scan_rate_consistency", scan.increment_fit.slope, cfg.alpha, 0.1 * scale,
        "derived-oracle", passed=consistent,
    ))
    report["raw_fit_slope"] = rate.raw_fit.slope
    report["empirical_a"] = rate.empirical_a
    report["empirical_A"] = rate.empirical_A
    report["predicted_amplitude"] = rate.predicted_amplitude
    report["spectral_max_rel_diff"] = rate.spectral_max_rel_diff
    report["tables"]["rate"] = {
        "columns": ["tau_minus_t", "d5_magnitude", "d5_spectral"],
        "rows": [
            [float(g), float(m), float(s)]
            for g, m, s in zip(rate.gaps, rate.magnitudes, rate.spectral_magnitudes)
        ],
    }
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def run_scaling_report(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    verdict = illposedness_exponent_report(cfg.alpha, cfg.dimension_n, cfg.sobolev_s)
    report["verdict"] = verdict.verdict
    report["exponent"] = verdict.exponent
    report["dimension_condition"] = verdict.dimension_condition
    report["blowup_time_scaling"] = "T/mu^2"
    example_rows = [
        (1.0, 16, 5.5, "applies"),
        (1.0, 2, 1.0, "does not apply"),
        (1.0, 8, 2.0, "inconclusive"),
    ]
    ok = all(
        illposedness_exponent_report(a, n, s).verdict == expect
        for a, n, s, expect in example_rows
    )
    report["checks"].append(_check(
        "sign_verdict_examples", float(ok), 1.0, 0.0, "paper-eq", passed=ok,
    ))

    grid = Grid1D(cfg.grid_n, cfg.domain_l)
    phi = GridFunction(grid, np.exp(-grid.points**2).astype(complex))
    s = cfg.sobolev_s
    base_hs = hs_norm(phi, SobolevIndex(s=s))
    base_sup = float(np.max(np.abs(phi.values)))
    rows = []
    hs_ok, sup_ok = True, True
    scale = cfg.tolerance_scale
    for mu in (1.0, 2.0, 4.0, 8.0):
        out = scaling_transform(phi, ScalingParams(mu=mu, alpha=cfg.alpha, s=s))
        ratio = hs_norm(out, SobolevIndex(s=s)) / base_hs
        bound = mu ** (2.0 / cfg.alpha + s - 0.5)
        sup_factor = float(np.max(np.abs(out.values))) / base_sup
        hs_ok = hs_ok and ratio <= bound * (1.0 + 1e-6 * scale)
        sup_ok = sup_ok and abs(sup_factor - mu ** (2.0 / cfg.alpha)) \
            <= 1e-12 * scale * mu ** (2.0 / cfg.alpha)
        rows.append([mu, ratio, bound, sup_factor])
    report["checks"].append(_check(
        "hs_norm_scaling_bound", float(hs_ok), 1.0, 0.0, "derived-oracle",
        passed=hs_ok,
    ))
    report["checks"].append(_check(
        "sup_norm_factor_exact", float(sup_ok), 1.0, 0.0, "trivial", passed=sup_ok,
    ))
    report["tables"]["mu_sweep"] = {
        "columns": ["mu", "hs_ratio", "hs_bound", "sup_factor"],
        "rows": rows,
    }
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def run_inequality_suite(cfg: ExperimentConfig) -> dict:
    report = _report_skeleton(cfg)
    suite = appendix_inequality_checks(1000, seed=cfg.seed)
    for check in suite.checks:
        report["checks"].append(_check(
            check.name, check.max_ratio, 0.0, check.threshold, "derived-oracle",
            passed=check.passed,
        ))
    report["tables"]["ratios"] = {
        "columns": ["check", "n_samples", "max_ratio", "threshold", "passed"],
        "rows": [
            [c.name, c.n_samples, c.max_ratio, c.threshold, c.passed]
            for c in suite.checks
        ],
    }
    report["passed"] = suite.all_passed
    return report


_RUNNERS = {
    "verify-kernel": run_verify_kernel,
    "ode-defect": run_ode_defect,
    "simulate": run_simulate,
    "third-derivative-scan": run_third_derivative_scan,
    "duhamel-rate": run_duhamel_rate,
    "scaling-report": run_scaling_report,
    "inequality-suite": run_inequality_suite,
}


def run(cfg: ExperimentConfig) -> dict:
    """Dispatch one experiment and return its report dict (not yet written)."""
    cfg.validate()
    started = time.time()
    report = _RUNNERS[cfg.experiment](cfg)
    report["timing"] = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "wall_clock_seconds": time.time() - started,
    }
    return report


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reglab",
        description="Desk-scale regularity-loss laboratory for semilinear "
                    "heat/Schroedinger/Ginzburg-Landau equations.",
    )
    parser.add_argument("--experiment", choices=EXPERIMENTS)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--lambda-re", dest="lambda_re", type=float)
    parser.add_argument("--lambda-im", dest="lambda_im", type=float)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--grid-n", dest="grid_n", type=int)
    parser.add_argument("--domain-l", dest="domain_l", type=float)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-final", dest="t_final", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--config")
    parser.add_argument("--amplitude", type=float)
    parser.add_argument("--support-radius", dest="support_radius", type=float)
    parser.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    parser.add_argument("--sobolev-s", dest="sobolev_s", type=float)
    parser.add_argument("--dimension-n", dest="dimension_n", type=int)
    parser.add_argument("--tolerance-scale", dest="tolerance_scale", type=float)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if not cfg.experiment:
            raise ConfigError("--experiment is required (or set it in the config file)")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    blowup = False
    try:
        report = run(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except BlowUpError as err:
        print(f"blow-up at t = {err.time:.6g}: {err}", file=sys.stderr)
        return 4
    except RegLabError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3

    path = write_report(report, cfg.out_dir, cfg.experiment)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: measured={check['measured']:.6g} "
              f"expected={check['expected']:.6g} ({check['provenance']})")
    print(f"report: {path}")
    if report.get("blowup_time") is not None:
        return 4
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())

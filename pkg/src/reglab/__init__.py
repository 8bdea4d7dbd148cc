"""Desk-scale numerical laboratory for regularity loss in semilinear
heat, Schroedinger and Ginzburg-Landau equations."""

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateInput,
    DomainError,
    FormatError,
    InsufficientSnapshots,
    IoError,
    NonConvergence,
    RegLabError,
    ResolutionError,
    SizeMismatch,
    StepSizeError,
    VersionError,
)
from .grids import (
    Grid1D,
    GridFunction,
    Spectrum,
    TrigInterpolant,
    forward_transform,
    inverse_transform,
    odd_part,
    reflect_y,
    spectral_derivative,
    trig_interpolate,
)
from .numerics import (
    RegressionFit,
    adaptive_quadrature,
    gamma_fn,
    gaussian_moment,
    loglog_fit,
)
from .ode import (
    IntegratingFactor,
    NonlinearityParams,
    OdeRun,
    exact_first_derivative,
    exact_flow,
    exact_second_derivative,
    exact_solution,
    holder_defect,
    integrate_perturbed,
    integrating_factor,
    representation_check,
)
from .kernels import (
    KernelProbe,
    c_alpha,
    fifth_derivative_at_zero,
    gaussian_smooth,
    odd_power_scaling_check,
    odd_power_probe,
)
from .evolution import (
    EtaTrack,
    InitialData,
    Trajectory,
    eta_track,
    make_odd_bump,
    remainder_decomposition,
    sample_initial_data,
    solve,
    step,
)
from .diagnostics import (
    DuhamelProbe,
    HolderIndex,
    ScalingParams,
    SobolevIndex,
    appendix_inequality_checks,
    consistency_report,
    duhamel_fifth_derivative_rate,
    duhamel_integral,
    holder_seminorm,
    hs_norm,
    illposedness_exponent_report,
    scaling_transform,
    synthetic_slice_check,
    third_derivative_holder_scan,
)
from .trajio import load_trajectory, save_trajectory, validate_report, write_report

"""Uniform periodic grids, grid functions and the discrete Fourier contract.

The spatial domain is the periodic interval [-L, L) sampled at
``x_j = -L + j*spacing`` with ``spacing = 2L/n`` and ``n`` a power of two,
so that x = 0 is always a sample point (index n//2).  Two-dimensional
fields live on a tensor product of two such grids with the distinguished
coordinate y on the *last* axis.

Fourier conventions: physical wavenumbers are ``xi_k = pi*k/L`` for integer
frequencies k in [-n/2, n/2).  The forward transform divides by n, so a
constant field has coefficient 1 at k = 0 and Parseval reads
``sum_k |c_k|^2 = (1/n) sum_j |u_j|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SizeMismatch

__all__ = [
    "Grid1D",
    "GridFunction",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "spectral_derivative",
    "TrigInterpolant",
    "trig_interpolate",
    "reflect_y",
    "odd_part",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [-L, L) with a power-of-two point count."""

    n_points: int
    half_length: float

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)) or self.n_points < 8:
            raise DomainError(f"n_points must be an integer >= 8, got {self.n_points}")
        if not _is_power_of_two(int(self.n_points)):
            raise DomainError(f"n_points must be a power of two, got {self.n_points}")
        if not (self.half_length > 0):
            raise DomainError(f"half_length must be positive, got {self.half_length}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @property
    def points(self) -> np.ndarray:
        return -self.half_length + self.spacing * np.arange(self.n_points)

    @property
    def zero_index(self) -> int:
        """Index of the sample at x = 0 (exact in floating point)."""
        return self.n_points // 2

    @property
    def frequencies(self) -> np.ndarray:
        """Integer frequencies k in FFT order: 0..n/2-1, -n/2..-1."""
        n = self.n_points
        return np.where(np.arange(n) < n // 2, np.arange(n), np.arange(n) - n)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Physical wavenumbers xi_k = pi*k/L in FFT order."""
        return np.pi * self.frequencies / self.half_length

    def phase(self) -> np.ndarray:
        """(-1)^k factors translating the FFT origin to x = -L (exact)."""
        return np.where(self.frequencies % 2 == 0, 1.0, -1.0)


def _grids_tuple(grid) -> tuple[Grid1D, ...]:
    if isinstance(grid, Grid1D):
        return (grid,)
    grids = tuple(grid)
    if not all(isinstance(g, Grid1D) for g in grids) or len(grids) not in (1, 2):
        raise DomainError("grid must be a Grid1D or a pair of Grid1D")
    return grids


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a 1D grid or a 2D tensor grid (y on the last axis)."""

    grid: object
    values: np.ndarray
    allow_nonfinite: bool = False

    def __post_init__(self):
        grids = _grids_tuple(self.grid)
        values = np.asarray(self.values, dtype=np.complex128)
        expected = tuple(g.n_points for g in grids)
        if values.shape != expected:
            raise SizeMismatch(f"values shape {values.shape} != grid shape {expected}")
        if not self.allow_nonfinite and not np.all(np.isfinite(values)):
            raise DomainError("GridFunction values contain NaN/Inf (not flagged as blown up)")
        object.__setattr__(self, "values", values)

    @property
    def grids(self) -> tuple[Grid1D, ...]:
        return _grids_tuple(self.grid)

    @property
    def ndim(self) -> int:
        return len(self.grids)

    @property
    def y_grid(self) -> Grid1D:
        return self.grids[-1]


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients in FFT frequency order for each axis."""

    grid: object
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        grids = _grids_tuple(self.grid)
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        expected = tuple(g.n_points for g in grids)
        if coeffs.shape != expected:
            raise SizeMismatch(f"coefficients shape {coeffs.shape} != grid shape {expected}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def grids(self) -> tuple[Grid1D, ...]:
        return _grids_tuple(self.grid)

    def coefficient(self, *k: int) -> complex:
        """Coefficient at integer frequency k (or (k_xprime, k_y) in 2D)."""
        grids = self.grids
        if len(k) != len(grids):
            raise SizeMismatch(f"expected {len(grids)} frequency indices, got {len(k)}")
        idx = []
        for ki, g in zip(k, grids):
            n = g.n_points
            if not (-n // 2 <= ki < n // 2):
                raise DomainError(f"frequency {ki} outside [-{n // 2}, {n // 2})")
            idx.append(ki % n)
        return complex(self.coefficients[tuple(idx)])


def _phase_nd(grids: tuple[Grid1D, ...]) -> np.ndarray:
    out = grids[0].phase()
    for g in grids[1:]:
        out = np.multiply.outer(out, g.phase())
    return out


def forward_transform(u: GridFunction) -> Spectrum:
    """Coefficients c_k = (1/n) sum_j u_j exp(-i xi_k x_j) (per axis)."""
    grids = u.grids
    n_total = int(np.prod([g.n_points for g in grids]))
    coeffs = np.fft.fftn(u.values) / n_total * _phase_nd(grids)
    return Spectrum(grid=u.grid, coefficients=coeffs)


def inverse_transform(spectrum: Spectrum) -> GridFunction:
    """Inverse of :func:`forward_transform`; round trip is exact to roundoff."""
    grids = spectrum.grids
    n_total = int(np.prod([g.n_points for g in grids]))
    values = np.fft.ifftn(spectrum.coefficients * _phase_nd(grids)) * n_total
    return GridFunction(grid=spectrum.grid, values=values, allow_nonfinite=True)


def _derivative_multiplier(grid: Grid1D, order: int) -> np.ndarray:
    xi = grid.wavenumbers
    mult = (1j * xi) ** order
    if order % 2 == 1:
        # Nyquist mode has no well-defined odd derivative on a real grid.
        mult = mult.copy()
        mult[grid.n_points // 2] = 0.0
    return mult


def spectral_derivative(u: GridFunction, order: int = 1, axis: int = -1) -> GridFunction:
    """Differentiate along one axis via the (i*xi)^order multiplier."""
    grids = u.grids
    axis = axis % len(grids)
    g = grids[axis]
    coeffs = np.fft.fft(u.values, axis=axis)
    shape = [1] * len(grids)
    shape[axis] = g.n_points
    coeffs *= _derivative_multiplier(g, order).reshape(shape)
    values = np.fft.ifft(coeffs, axis=axis)
    return GridFunction(grid=u.grid, values=values, allow_nonfinite=True)


class TrigInterpolant:
    """Trigonometric interpolant of a 1D grid function with cached coefficients.

    Periodic in 2L, exact at grid nodes up to FFT roundoff.  The Nyquist mode
    is evaluated as cos(xi_{n/2} x), which agrees with exp(i xi_{-n/2} x) at
    the nodes and keeps real data real off the nodes.
    """

    def __init__(self, u: GridFunction):
        if u.ndim != 1:
            raise DomainError("TrigInterpolant supports 1D grid functions only")
        g = u.grids[0]
        self.grid = g
        self.coefficients = forward_transform(u).coefficients
        self._xi = g.wavenumbers
        self._nyquist = g.n_points // 2

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        flat = pts.reshape(-1)
        basis = np.exp(1j * np.outer(flat, self._xi))
        basis[:, self._nyquist] = np.cos(
            np.pi * self._nyquist / self.grid.half_length * flat
        )
        vals = basis @ self.coefficients
        return vals.reshape(pts.shape)


def trig_interpolate(u: GridFunction, points: np.ndarray) -> np.ndarray:
    """One-shot evaluation of the trigonometric interpolant (see TrigInterpolant)."""
    return TrigInterpolant(u)(points)


def reflect_y(values: np.ndarray) -> np.ndarray:
    """Samples of u(-y) on the periodic grid (last axis)."""
    n = values.shape[-1]
    idx = (-np.arange(n)) % n
    return values[..., idx]


def odd_part(values: np.ndarray) -> np.ndarray:
    return 0.5 * (values - reflect_y(values))

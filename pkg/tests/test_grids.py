import numpy as np
import pytest

from reglab.errors import DomainError, SizeMismatch
from reglab.grids import (
    Grid1D,
    GridFunction,
    forward_transform,
    inverse_transform,
    odd_part,
    reflect_y,
    spectral_derivative,
    trig_interpolate,
)


class TestGrid1D:
    def test_validation(self):
        with pytest.raises(DomainError):
            Grid1D(6, 1.0)
        with pytest.raises(DomainError):
            Grid1D(24, 1.0)
        with pytest.raises(DomainError):
            Grid1D(64, -1.0)

    def test_geometry(self):
        g = Grid1D(64, 4.0)
        assert g.spacing * g.n_points == 2.0 * g.half_length
        pts = g.points
        assert pts[0] == -4.0
        assert pts[g.zero_index] == 0.0
        assert np.allclose(np.diff(pts), g.spacing)

    def test_wavenumbers(self):
        g = Grid1D(8, 2.0)
        k = g.frequencies
        assert list(k) == [0, 1, 2, 3, -4, -3, -2, -1]
        assert np.allclose(g.wavenumbers, np.pi * k / 2.0)


class TestGridFunction:
    def test_shape_check(self):
        g = Grid1D(16, 1.0)
        with pytest.raises(SizeMismatch):
            GridFunction(g, np.zeros(8))

    def test_finiteness(self):
        g = Grid1D(16, 1.0)
        vals = np.zeros(16, dtype=complex)
        vals[3] = np.nan
        with pytest.raises(DomainError):
            GridFunction(g, vals)
        GridFunction(g, vals, allow_nonfinite=True)

    def test_2d(self):
        gx, gy = Grid1D(8, 1.0), Grid1D(16, 2.0)
        u = GridFunction((gx, gy), np.ones((8, 16)))
        assert u.ndim == 2
        assert u.y_grid is gy


class TestTransforms:
    def test_constant_field(self):
        g = Grid1D(32, 3.0)
        s = forward_transform(GridFunction(g, np.ones(32)))
        assert abs(s.coefficient(0) - 1.0) <= 1e-14
        other = s.coefficients.copy()
        other[0] = 0.0
        assert np.max(np.abs(other)) <= 1e-14

    def test_single_mode(self):
        g = Grid1D(64, 2.0)
        x = g.points
        u = GridFunction(g, np.exp(1j * (np.pi / g.half_length) * x))
        s = forward_transform(u)
        assert abs(s.coefficient(1) - 1.0) <= 1e-13
        rest = s.coefficients.copy()
        rest[1] = 0.0
        assert np.max(np.abs(rest)) <= 1e-13

    @pytest.mark.parametrize("n", [8, 16, 64, 256, 1024, 4096])
    def test_round_trip_and_parseval(self, n):
        rng = np.random.default_rng(n)
        g = Grid1D(n, 1.5)
        vals = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u = GridFunction(g, vals)
        s = forward_transform(u)
        back = inverse_transform(s)
        scale = np.max(np.abs(vals))
        assert np.max(np.abs(back.values - vals)) <= 1e-12 * scale
        lhs = np.sum(np.abs(s.coefficients) ** 2)
        rhs = np.sum(np.abs(vals) ** 2) / n
        assert abs(lhs - rhs) <= 1e-12 * rhs

    def test_round_trip_2d(self):
        rng = np.random.default_rng(5)
        gx, gy = Grid1D(16, 1.0), Grid1D(32, 2.0)
        vals = rng.standard_normal((16, 32)) + 1j * rng.standard_normal((16, 32))
        u = GridFunction((gx, gy), vals)
        back = inverse_transform(forward_transform(u))
        assert np.max(np.abs(back.values - vals)) <= 1e-12 * np.max(np.abs(vals))

    def test_coefficient_bounds(self):
        g = Grid1D(8, 1.0)
        s = forward_transform(GridFunction(g, np.ones(8)))
        with pytest.raises(DomainError):
            s.coefficient(4)
        assert s.coefficient(-4) is not None


class TestSpectralOps:
    def test_derivative_of_mode(self):
        g = Grid1D(128, 4.0)
        x = g.points
        xi = 3 * np.pi / g.half_length
        u = GridFunction(g, np.sin(xi * x))
        du = spectral_derivative(u, 1)
        assert np.max(np.abs(du.values.real - xi * np.cos(xi * x))) <= 1e-11
        assert np.max(np.abs(du.values.imag)) <= 1e-12
        d3 = spectral_derivative(u, 3)
        assert np.max(np.abs(d3.values.real + xi**3 * np.cos(xi * x))) <= 1e-9

    def test_trig_interpolation_exact_at_nodes(self):
        rng = np.random.default_rng(3)
        g = Grid1D(64, 2.0)
        vals = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        u = GridFunction(g, vals)
        out = trig_interpolate(u, g.points)
        assert np.max(np.abs(out - vals)) <= 1e-12 * np.max(np.abs(vals))

    def test_trig_interpolation_band_limited(self):
        g = Grid1D(64, 3.0)
        x = g.points
        f = lambda t: np.cos(2 * np.pi * t / 3.0) + 0.5 * np.sin(np.pi * t / 3.0)
        u = GridFunction(g, f(x))
        pts = np.linspace(-2.9, 2.9, 77)
        out = trig_interpolate(u, pts)
        assert np.max(np.abs(out - f(pts))) <= 1e-12

    def test_trig_interpolation_periodic_wrap(self):
        g = Grid1D(32, 1.0)
        u = GridFunction(g, np.cos(np.pi * g.points))
        a = trig_interpolate(u, np.array([0.3]))
        b = trig_interpolate(u, np.array([0.3 + 2.0]))
        assert abs(a - b) <= 1e-12

    def test_reflect_and_odd_part(self):
        g = Grid1D(16, 1.0)
        x = g.points
        u = x**3 + 1.0  # odd plus even part
        refl = reflect_y(u)
        # reflect maps sample at x_j to sample at -x_j (periodically)
        j = 3
        i = (16 - j) % 16
        assert refl[j] == u[i]
        odd = odd_part(u)
        assert np.max(np.abs(odd + reflect_y(odd))) == 0.0
        # x = -L is its own reflection pair on the torus, so skip index 0
        assert np.max(np.abs(odd[1:] - x[1:] ** 3)) <= 1e-14
        assert odd[0] == 0.0

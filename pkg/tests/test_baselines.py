import math

import numpy as np
import pytest
import scipy.special

from kernelopt import (
    FourierInit,
    Grid,
    InitialCondition,
    backstepping_kernel,
    fourier_coefficients,
    uncontrolled_exact,
)


def bessel_ratio_30_terms(w: float) -> float:
    """Independent oracle: 30 explicit series terms of I1(w)/w."""
    total = 0.0
    for k in range(30):
        total += w ** (2 * k) / (2 ** (2 * k + 1) * math.factorial(k) * math.factorial(k + 1))
    return total


class TestBacksteppingKernel:
    def test_zero_at_left_end(self):
        for c in (1.0, 10.0, 16.0):
            assert backstepping_kernel(c, 0.0) == 0.0

    def test_right_end_limit(self):
        assert backstepping_kernel(10.0, 1.0) == -5.0

    def test_series_against_explicit_sum(self):
        w = math.sqrt(7.5)
        expected = -10.0 * 0.5 * bessel_ratio_30_terms(w)
        assert abs(backstepping_kernel(10.0, 0.5) - expected) < 1e-12

    def test_series_against_scipy(self):
        for c in (2.0, 10.0, 16.0):
            for xi in (0.1, 0.3, 0.5, 0.9, 0.99):
                w = math.sqrt(c * (1 - xi * xi))
                expected = -c * xi * scipy.special.i1(w) / w
                assert abs(backstepping_kernel(c, xi) - expected) < 1e-12

    def test_negative_on_interior(self):
        for c in (0.5, 10.0, 16.0):
            for xi in np.linspace(0.01, 1.0, 50):
                assert backstepping_kernel(c, float(xi)) < 0.0

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            backstepping_kernel(-1.0, 0.5)
        with pytest.raises(ValueError):
            backstepping_kernel(10.0, 1.5)


class TestFourierCoefficients:
    def test_orthogonality_of_first_mode(self):
        fi = fourier_coefficients(InitialCondition.sin_pi(), 3)
        assert abs(fi.coefficients[0] - 0.5) < 1e-10
        assert abs(fi.coefficients[1]) < 1e-10
        assert abs(fi.coefficients[2]) < 1e-10

    def test_linear_envelope_first_coefficient(self):
        fi = fourier_coefficients(InitialCondition.envelope_sin(1, 1, 1), 1)
        assert abs(fi.coefficients[0] - 0.75) < 1e-8

    def test_refinement_self_consistency(self):
        y0 = InitialCondition.envelope_sin(2, 1, 2.5)
        coarse = fourier_coefficients(y0, 8, 2048).coefficients
        fine = fourier_coefficients(y0, 8, 4096).coefficients
        assert np.abs(coarse - fine).max() < 1e-8

    def test_parity_enforced(self):
        with pytest.raises(ValueError):
            fourier_coefficients(InitialCondition.sin_pi(), 2, quad_nodes=101)


class TestUncontrolledExact:
    def test_recovers_initial_profile(self):
        grid = Grid(14, 5000, 4.0)
        field = uncontrolled_exact(FourierInit([0.5]), 10.0, grid)
        assert np.allclose(field.values[:, 0], np.sin(np.pi * grid.x_nodes()), atol=1e-14)

    def test_single_mode_point_value(self):
        grid = Grid(14, 5000, 4.0)
        field = uncontrolled_exact(FourierInit([0.5]), 10.0, grid)
        i = 7  # x = 0.5
        expected = math.exp(4.0 * (10.0 - math.pi**2))
        assert abs(field.values[i, -1] - expected) < 1e-10
        assert abs(expected - 1.6847) < 1e-4

    def test_neutral_mode_at_critical_coefficient(self):
        grid = Grid(4, 64, 1.0)
        field = uncontrolled_exact(FourierInit([0.5]), math.pi**2, grid)
        profile = np.sin(np.pi * grid.x_nodes())
        assert np.allclose(field.values, profile[:, None], atol=1e-12)

    def test_instability_threshold(self):
        grid = Grid(8, 256, 1.0)
        growing = uncontrolled_exact(FourierInit([0.5]), 10.0, grid)
        assert np.abs(growing.values[:, -1]).max() > np.abs(growing.values[:, 0]).max()
        decaying = uncontrolled_exact(FourierInit([0.5]), 5.0, grid)
        assert np.abs(decaying.values[:, -1]).max() < np.abs(decaying.values[:, 0]).max()

"""Reference solutions: the closed-form stabilizing kernel and the exact
uncontrolled Fourier solution.

Both exist for validation and plotting only; neither feeds the optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Field, Grid, InitialCondition
from .quadrature import simpson_weights

SERIES_RELATIVE_CUTOFF = 1e-16


@dataclass(frozen=True)
class FourierInit:
    """Sine-series coefficients of an initial profile, modes 1..N."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size < 1 or not np.isfinite(coeffs).all():
            raise ValueError("coefficients must be a nonempty finite vector")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)


def backstepping_kernel(c: float, xi: float) -> float:
    """Closed-form stabilizing kernel -c*xi*I1(w)/w with w = sqrt(c(1-xi^2)).

    The ratio I1(w)/w is summed directly from the power series of the
    first-order modified Bessel function, truncated once the next term drops
    below 1e-16 relative; the series gives the limit value 1/2 at xi = 1
    with no special casing.  Arguments here stay small (w <= sqrt(c)), so
    about twenty terms reach machine precision.
    """
    if not (c > 0):
        raise ValueError("c must be positive")
    if not (0.0 <= xi <= 1.0):
        raise ValueError("xi must lie in [0, 1]")
    w2 = c * (1.0 - xi * xi)
    term = 0.5
    total = term
    k = 0
    while True:
        term *= w2 / (4.0 * (k + 1) * (k + 2))
        if abs(term) < SERIES_RELATIVE_CUTOFF * abs(total):
            break
        total += term
        k += 1
        if k > 500:
            break
    return -c * xi * total


def fourier_coefficients(
    y0: InitialCondition, modes: int, quad_nodes: int = 2048
) -> FourierInit:
    """Sine coefficients C_n = integral of y0(x) sin(n pi x), n = 1..modes,
    by composite Simpson with ``quad_nodes`` intervals (must be even)."""
    if modes < 1:
        raise ValueError("need at least one mode")
    if quad_nodes % 2 != 0 or quad_nodes < 2:
        raise ValueError("quad_nodes must be a positive even interval count")
    x = np.arange(quad_nodes + 1) / quad_nodes
    w = simpson_weights(quad_nodes, 1.0 / quad_nodes)
    y0v = y0.evaluate(x)
    n = np.arange(1, modes + 1)
    sines = np.sin(np.pi * np.outer(x, n))
    return FourierInit(sines.T @ (w * y0v))


def uncontrolled_exact(fi: FourierInit, c: float, grid: Grid) -> Field:
    """Exact solution of the uncontrolled problem sampled on the grid:
    y(x_i, t_j) = 2 * sum_n C_n exp((c - n^2 pi^2) t_j) sin(n pi x_i)."""
    coeffs = fi.coefficients
    n = np.arange(1, coeffs.size + 1)
    x = grid.x_nodes()
    t = grid.t_nodes()
    sines = np.sin(np.pi * np.outer(x, n))
    decay = np.exp(np.outer(c - (n * np.pi) ** 2, t))
    values = 2.0 * sines @ (coeffs[:, None] * decay)
    return Field(values, grid)

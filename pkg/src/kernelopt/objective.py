"""Cost functional, adjoint cost gradient, and the algebraic constraints.

The cost is the running output energy plus the kernel energy; the kernel
part has the exact closed form theta1^2/6 + theta1*theta2/4 + theta2^2/10,
which the production path uses instead of quadrature.  The cost gradient
combines the double integral of x^p * v_x(1,t) * y(x,t) with the kernel-energy
derivative.  The three constraint functions and their gradients are explicit
closed forms in (theta1, theta2, alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Field, ScenarioSpec, Theta
from .quadrature import simpson_2d
from .solvers import CostateSolution, StateSolution


@dataclass(frozen=True)
class CostBreakdown:
    state_term: float
    kernel_term: float
    total: float


@dataclass(frozen=True)
class GradientReport:
    d_theta1: float
    d_theta2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.d_theta1, self.d_theta2])


@dataclass(frozen=True)
class ConstraintValues:
    """Constraint values and their closed-form gradients.

    g1 >= 0 guarantees the characteristic equation has infinitely many
    positive roots; g2 = c - alpha^2 <= -epsilon forces a negative spectrum;
    g3 = 0 says alpha is a characteristic root.
    """

    g1: float
    g2: float
    g3: float
    grad_g1: tuple[float, float]
    grad_g2_alpha: float
    grad_g3: tuple[float, float, float]


def kernel_energy(theta: Theta) -> float:
    """Closed form of (1/2) * integral of k(xi)^2 over [0, 1]."""
    t1, t2 = theta.theta1, theta.theta2
    return t1 * t1 / 6.0 + t2 * t2 / 10.0 + t1 * t2 / 4.0


def kernel_energy_gradient(theta: Theta) -> np.ndarray:
    t1, t2 = theta.theta1, theta.theta2
    return np.array([t1 / 3.0 + t2 / 4.0, t1 / 4.0 + t2 / 5.0])


def cost(spec: ScenarioSpec, theta: Theta, state: StateSolution) -> CostBreakdown:
    """Evaluate the cost functional for a state trajectory solved at ``theta``."""
    squared = Field(state.y.values * state.y.values, spec.grid)
    state_term = 0.5 * simpson_2d(squared)
    kernel_term = kernel_energy(theta)
    return CostBreakdown(state_term, kernel_term, state_term + kernel_term)


def cost_gradient(
    spec: ScenarioSpec,
    theta: Theta,
    state: StateSolution,
    costate: CostateSolution,
) -> GradientReport:
    """Adjoint gradient of the cost with respect to (theta1, theta2)."""
    if state.y.grid != costate.v.grid:
        raise ValueError("state and costate were solved on different grids")
    g = spec.grid
    x = g.x_nodes()
    weighted = costate.vx1[None, :] * state.y.values
    int1 = simpson_2d(Field(x[:, None] * weighted, g))
    int2 = simpson_2d(Field((x * x)[:, None] * weighted, g))
    ke = kernel_energy_gradient(theta)
    return GradientReport(-int1 + ke[0], -int2 + ke[1])


def char_function(theta: Theta, alpha):
    """Characteristic function g3; vectorized over ``alpha``."""
    t1, t2 = theta.theta1, theta.theta2
    a = np.asarray(alpha, dtype=float)
    a2 = a * a
    out = (
        (t1 * a2 + t2 * a2 - 2.0 * t2) * np.cos(a)
        + (a * a2 - t1 * a - 2.0 * t2 * a) * np.sin(a)
        + 2.0 * t2
    )
    return float(out) if out.ndim == 0 else out


def char_function_alpha_derivative(theta: Theta, alpha):
    """d g3 / d alpha; vectorized over ``alpha``."""
    t1, t2 = theta.theta1, theta.theta2
    a = np.asarray(alpha, dtype=float)
    a2 = a * a
    out = (a * a2 + t1 * a) * np.cos(a) + (
        3.0 * a2 - t1 * a2 - t2 * a2 - t1
    ) * np.sin(a)
    return float(out) if out.ndim == 0 else out


def constraint_values(theta: Theta, alpha: float, c: float) -> ConstraintValues:
    """All three constraint values and gradients at one decision point."""
    t1, t2 = theta.theta1, theta.theta2
    a = float(alpha)
    a2 = a * a
    sin_a, cos_a = np.sin(a), np.cos(a)

    g1 = t1 * t1 + t2 * t2 + 2.0 * t1 * t2 - 2.0 * t1 - 4.0 * t2
    g2 = c - a2
    g3 = (t1 * a2 + t2 * a2 - 2.0 * t2) * cos_a + (a * a2 - t1 * a - 2.0 * t2 * a) * sin_a + 2.0 * t2

    grad_g1 = (2.0 * t1 + 2.0 * t2 - 2.0, 2.0 * t2 + 2.0 * t1 - 4.0)
    grad_g2_alpha = -2.0 * a
    grad_g3 = (
        a2 * cos_a - a * sin_a,
        (a2 - 2.0) * cos_a - 2.0 * a * sin_a + 2.0,
        (a * a2 + t1 * a) * cos_a + (3.0 * a2 - t1 * a2 - t2 * a2 - t1) * sin_a,
    )
    return ConstraintValues(g1, g2, g3, grad_g1, grad_g2_alpha, grad_g3)

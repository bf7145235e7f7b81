"""Explicit marching solvers for the closed-loop state and the costate.

The state marches forward with the classic explicit stencil
y_{i,j+1} = (1-2r+c*tau)*y_{i,j} + r*(y_{i-1,j} + y_{i+1,j}); after each
interior update the right boundary is closed with the trapezoid form of the
integral feedback, solved for y_{n,j}.  The costate marches backward with the
mirrored stencil plus the state forcing and the nonlocal term built from the
one-sided boundary derivative of v.  Both solves abort with BlowUpError as
soon as any value exceeds BLOWUP_LIMIT or stops being finite, so unstable
trajectories never leak NaNs to callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ClosureSingularityError
from .model import Field, Grid, ScenarioSpec, Theta, kernel_eval

BLOWUP_LIMIT = 1e12
CLOSURE_SINGULARITY_TOL = 1e-10


@dataclass(frozen=True)
class StateSolution:
    """Closed-loop state field plus the boundary control samples u_j = y(1, t_j)."""

    y: Field
    u: np.ndarray


@dataclass(frozen=True)
class CostateSolution:
    """Costate field plus the one-sided samples of v_x(1, t_j)."""

    v: Field
    vx1: np.ndarray


def closure_denominator(theta: Theta, grid: Grid) -> float:
    """1 - (h/2) k(1); the trapezoid closure divides by this."""
    return 1.0 - 0.5 * grid.h * kernel_eval(theta, 1.0)


def _state_step_matrix(spec: ScenarioSpec, theta: Theta) -> np.ndarray:
    """One-step propagation matrix, closure row included.

    Row i (1 <= i <= n-1) is the interior stencil; row n is the closure
    applied to the freshly updated interior values, which makes the whole
    time step a single matrix-vector product.  Row 0 is zero (left boundary).
    """
    g = spec.grid
    n, r, ct = g.n, g.r, spec.c * g.tau
    denom = closure_denominator(theta, g)
    if abs(denom) < CLOSURE_SINGULARITY_TOL:
        raise ClosureSingularityError(
            f"boundary closure is singular: |1 - (h/2) k(1)| = {abs(denom):.3e}"
        )
    A = np.zeros((n + 1, n + 1))
    diag = 1.0 - 2.0 * r + ct
    for i in range(1, n):
        A[i, i - 1] = r
        A[i, i] = diag
        A[i, i + 1] = r
    kx = kernel_eval(theta, g.x_nodes())
    closure_w = g.h * kx[1:n] / denom
    A[n, :] = closure_w @ A[1:n, :]
    return A


def solve_state(spec: ScenarioSpec, theta: Theta) -> StateSolution:
    """March the closed-loop state forward over the whole horizon.

    The initial slice is sampled straight from y0 (all nodes); from j = 1 on,
    the left boundary is zero and the right boundary comes from the closure.
    """
    g = spec.grid
    A = _state_step_matrix(spec, theta)
    W = np.empty((g.m + 1, g.n + 1))
    W[0] = spec.y0.samples_on(g)
    for j in range(g.m):
        w = A @ W[j]
        amax = np.abs(w).max()
        if not (amax <= BLOWUP_LIMIT):
            raise BlowUpError("state", j + 1, float(amax))
        W[j + 1] = w
    values = W.T.copy()
    return StateSolution(y=Field(values, g), u=values[g.n].copy())


def _costate_step_matrix(spec: ScenarioSpec, theta: Theta) -> np.ndarray:
    """Backward-step matrix: v_{.,j-1} = B v_{.,j} + tau*y_{.,j} (interior rows).

    Includes the nonlocal column pair from -(tau k(x_i)/h)(v_{n,j} - v_{n-1,j});
    boundary rows are zero, which keeps v = 0 at both ends for every step.
    """
    g = spec.grid
    n, r, ct = g.n, g.r, spec.c * g.tau
    B = np.zeros((n + 1, n + 1))
    diag = 1.0 - 2.0 * r + ct
    for i in range(1, n):
        B[i, i - 1] = r
        B[i, i] = diag
        B[i, i + 1] = r
    kx = kernel_eval(theta, g.x_nodes())
    scale = g.tau / g.h
    for i in range(1, n):
        B[i, n] -= scale * kx[i]
        B[i, n - 1] += scale * kx[i]
    return B


def solve_costate(spec: ScenarioSpec, theta: Theta, state: StateSolution) -> CostateSolution:
    """March the costate backward from the zero terminal slice."""
    g = spec.grid
    if state.y.grid != g:
        raise ValueError("state was solved on a different grid")
    B = _costate_step_matrix(spec, theta)
    forcing = (g.tau * state.y.values).T.copy()
    forcing[:, 0] = 0.0
    forcing[:, g.n] = 0.0
    W = np.empty((g.m + 1, g.n + 1))
    W[g.m] = 0.0
    for j in range(g.m, 0, -1):
        w = B @ W[j] + forcing[j]
        amax = np.abs(w).max()
        if not (amax <= BLOWUP_LIMIT):
            raise BlowUpError("costate", j - 1, float(amax))
        W[j - 1] = w
    values = W.T.copy()
    vx1 = (values[g.n] - values[g.n - 1]) / g.h
    return CostateSolution(v=Field(values, g), vx1=vx1)


def boundary_control_residual(spec: ScenarioSpec, theta: Theta, state: StateSolution) -> np.ndarray:
    """Per-time-level gap between the stored boundary value and an independent
    trapezoid evaluation of the feedback integral (with the y_n term included).

    Used as a consistency diagnostic; zero up to rounding by construction.
    """
    g = spec.grid
    kx = kernel_eval(theta, g.x_nodes())
    y = state.y.values
    integral = g.h * (kx @ y - 0.5 * (kx[0] * y[0] + kx[g.n] * y[g.n]))
    return integral[1:] - state.u[1:]

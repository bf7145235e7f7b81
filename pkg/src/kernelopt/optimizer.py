"""Gradient-based constrained optimization of the kernel coefficients.

The outer loop is a standard augmented Lagrangian over the three nonlinear
constraints (coefficient inequality, eigenvalue margin, characteristic
equation); the inner loop is a projected-gradient method with Armijo
backtracking under the box bounds.  Every inner iteration performs one
state solve, one costate solve, the gradient assembly, a scaled descent
direction, a backtracking line search, and the update.

Two implementation choices matter for conditioning and are invisible in the
reported quantities: internally the equality constraint is normalized by
(1 + alpha^3) so its gradient stays O(1) across the root range, and descent
directions are scaled by a 3x3 Gauss-Newton model of the augmented
Lagrangian (with a diagonal fallback on the active set).  Feasibility and
the recorded violations always use the raw constraint values.  A per-step
move cap keeps alpha from vaulting over characteristic roots when the
penalty surface is still shallow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ClosureSingularityError
from .model import Decision, ScenarioSpec, Theta
from .objective import CostBreakdown, ConstraintValues, cost, cost_gradient, constraint_values
from .solvers import solve_costate, solve_state
from .spectral import (
    DEFAULT_MODE_COUNT,
    DEFAULT_SPAN_THRESHOLD,
    SpectralReport,
    certify,
)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    grad_tol: float = 1e-5
    constraint_tol: float = 1e-6
    penalty_init: float = 1.0
    penalty_growth: float = 10.0
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    min_step: float = 1e-12
    # loop shaping
    max_outer: int = 40
    inner_max: int = 120
    penalty_max: float = 1e8
    tol_shrink: float = 0.2
    step_cap_theta: float = 1.0
    step_cap_alpha: float = 0.5
    ridge: float = 1e-2
    alpha_seed: float = 1e-2
    # final certificate
    span_modes: int = DEFAULT_MODE_COUNT
    span_threshold: float = DEFAULT_SPAN_THRESHOLD

    def __post_init__(self):
        positives = (
            self.max_iters, self.grad_tol, self.constraint_tol, self.penalty_init,
            self.penalty_growth, self.armijo_c, self.backtrack_factor, self.min_step,
            self.max_outer, self.inner_max, self.penalty_max, self.tol_shrink,
            self.step_cap_theta, self.step_cap_alpha,
        )
        if any(not (p > 0) for p in positives):
            raise ValueError("optimizer configuration values must be positive")
        if not (self.armijo_c < 1.0 and self.backtrack_factor < 1.0):
            raise ValueError("armijo_c and backtrack_factor must be below 1")


@dataclass(frozen=True)
class IterateRecord:
    iteration: int
    decision: Decision
    cost: float
    constraint_violation: float
    step_length: float
    merit: float = math.nan
    outer: int = 0


@dataclass(frozen=True)
class OptimizationResult:
    decision: Decision
    cost_breakdown: CostBreakdown
    history: tuple[IterateRecord, ...]
    converged: bool
    spectral: SpectralReport
    constraint_violation: float = math.nan
    projected_gradient_norm: float = math.nan
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.history)


def raw_violation(cons: ConstraintValues, epsilon: float) -> float:
    """max([-g1]+, [g2+eps]+, |g3|), the reported feasibility measure."""
    return max(max(0.0, -cons.g1), max(0.0, cons.g2 + epsilon), abs(cons.g3))


class _Multipliers:
    __slots__ = ("lam1", "lam2", "mu", "rho")

    def __init__(self, rho: float):
        self.lam1 = 0.0
        self.lam2 = 0.0
        self.mu = 0.0
        self.rho = rho


class _Evaluation:
    """Merit value and everything computed on the way at one decision point."""

    __slots__ = ("z", "merit", "cost_bd", "cons", "state", "c1", "c2", "e3", "scale3")

    def __init__(self, z, merit, cost_bd, cons, state, c1, c2, e3, scale3):
        self.z = z
        self.merit = merit
        self.cost_bd = cost_bd
        self.cons = cons
        self.state = state
        self.c1 = c1
        self.c2 = c2
        self.e3 = e3
        self.scale3 = scale3


def _evaluate(spec: ScenarioSpec, z: np.ndarray, mult: _Multipliers) -> _Evaluation:
    theta = Theta(float(z[0]), float(z[1]))
    alpha = float(z[2])
    state = solve_state(spec, theta)
    cost_bd = cost(spec, theta, state)
    cons = constraint_values(theta, alpha, spec.c)
    scale3 = 1.0 / (1.0 + alpha**3)
    c1 = -cons.g1
    c2 = cons.g2 + spec.epsilon
    e3 = cons.g3 * scale3
    rho = mult.rho
    merit = cost_bd.total + mult.mu * e3 + 0.5 * rho * e3 * e3
    for lam, cval in ((mult.lam1, c1), (mult.lam2, c2)):
        plus = max(0.0, lam + rho * cval)
        merit += (plus * plus - lam * lam) / (2.0 * rho)
    return _Evaluation(z.copy(), merit, cost_bd, cons, state, c1, c2, e3, scale3)


def _gradient_pieces(
    spec: ScenarioSpec, theta: Theta, ev: _Evaluation
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Adjoint cost gradient and constraint gradients at one evaluation."""
    costate = solve_costate(spec, theta, ev.state)
    gcost = cost_gradient(spec, theta, ev.state, costate)
    alpha = float(ev.z[2])
    cons = ev.cons
    s = ev.scale3
    grad_cost = np.array([gcost.d_theta1, gcost.d_theta2, 0.0])
    grad_c1 = np.array([-cons.grad_g1[0], -cons.grad_g1[1], 0.0])
    grad_c2 = np.array([0.0, 0.0, cons.grad_g2_alpha])
    grad_e3 = s * np.array(cons.grad_g3)
    grad_e3[2] -= 3.0 * alpha * alpha * s * ev.e3
    return grad_cost, grad_c1, grad_c2, grad_e3


def _merit_gradient(
    grads, ev: _Evaluation, mult: _Multipliers, ridge: float
) -> tuple[np.ndarray, np.ndarray]:
    """Merit gradient (adjoint cost gradient plus constraint terms) and the
    Gauss-Newton metric used to scale descent directions."""
    grad_cost, grad_c1, grad_c2, grad_e3 = grads

    g = grad_cost + (mult.mu + mult.rho * ev.e3) * grad_e3
    H = np.array([[1.0 / 3.0, 0.25, 0.0], [0.25, 0.2, 0.0], [0.0, 0.0, 0.0]])
    H += ridge * np.eye(3)
    H += mult.rho * np.outer(grad_e3, grad_e3)
    for lam, cval, grad_c in ((mult.lam1, ev.c1, grad_c1), (mult.lam2, ev.c2, grad_c2)):
        plus = max(0.0, lam + mult.rho * cval)
        if plus > 0.0:
            g += plus * grad_c
            H += mult.rho * np.outer(grad_c, grad_c)
    return g, H


def _gradient_and_metric(
    spec: ScenarioSpec, theta: Theta, ev: _Evaluation, mult: _Multipliers, ridge: float
) -> tuple[np.ndarray, np.ndarray]:
    return _merit_gradient(_gradient_pieces(spec, theta, ev), ev, mult, ridge)


def _kkt_residual_norm(
    spec: ScenarioSpec, theta: Theta, ev: _Evaluation, lo: np.ndarray, hi: np.ndarray
) -> float:
    """Projected norm of the Lagrangian gradient with least-squares multiplier
    estimates over the near-active constraints; the reported stationarity
    measure."""
    grad_cost, grad_c1, grad_c2, grad_e3 = _gradient_pieces(spec, theta, ev)
    cols = [grad_e3]
    bounded = [False]
    if ev.c1 >= -1e-3:
        cols.append(grad_c1)
        bounded.append(True)
    if ev.c2 >= -1e-3:
        cols.append(grad_c2)
        bounded.append(True)
    A = np.column_stack(cols)
    lam, *_ = np.linalg.lstsq(A, -grad_cost, rcond=None)
    lam = np.array([max(0.0, v) if b else v for v, b in zip(lam, bounded)])
    resid = grad_cost + A @ lam
    return _projected_gradient_norm(ev.z, resid, lo, hi)


def _direction(z, g, H, lo, hi) -> np.ndarray:
    """Two-metric projected direction: Newton step of the Gauss-Newton model
    on the free variables, diagonal scaling on the (near-)active ones."""
    eps_act = 1e-10 * (1.0 + np.abs(z))
    active = ((z - lo <= eps_act) & (g > 0)) | ((hi - z <= eps_act) & (g < 0))
    diag = np.diag(H)
    d = np.zeros(3)
    d[active] = -g[active] / diag[active]
    free = ~active
    if free.any():
        try:
            d[free] = np.linalg.solve(H[np.ix_(free, free)], -g[free])
        except np.linalg.LinAlgError:
            d[free] = -g[free] / diag[free]
    if float(g @ d) >= 0.0:
        d = -g / diag
    return d


def _restoration_direction(ev: _Evaluation, mult: _Multipliers, grads, ridge: float) -> np.ndarray:
    """Gauss-Newton step on the constraint part of the merit alone.

    Near the cost-gradient noise floor the combined direction couples a tiny
    feasibility fix to a larger tangential move, and the line search rejects
    the pair; this direction restores feasibility without the tangential
    component."""
    _, grad_c1, grad_c2, grad_e3 = grads
    g = (mult.mu + mult.rho * ev.e3) * grad_e3
    H = mult.rho * np.outer(grad_e3, grad_e3) + ridge * np.eye(3)
    for lam, cval, grad_c in ((mult.lam1, ev.c1, grad_c1), (mult.lam2, ev.c2, grad_c2)):
        plus = max(0.0, lam + mult.rho * cval)
        if plus > 0.0:
            g += plus * grad_c
            H += mult.rho * np.outer(grad_c, grad_c)
    try:
        return np.linalg.solve(H, -g)
    except np.linalg.LinAlgError:
        return -g / np.diag(H)


def _projected_gradient_norm(z, g, lo, hi) -> float:
    return float(np.abs(z - np.clip(z - g, lo, hi)).max())


def optimize(spec: ScenarioSpec, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Run the full constrained optimization for one scenario.

    Returns the final decision, its cost breakdown, the per-iteration
    history, and the stability certificate of the final decision.
    """
    cfg = config or OptimizerConfig()
    lo = np.array([spec.bounds.a1, spec.bounds.a2, 0.0])
    hi = np.array([spec.bounds.b1, spec.bounds.b2, np.inf])
    cap = np.array([cfg.step_cap_theta, cfg.step_cap_theta, cfg.step_cap_alpha])

    z = np.clip(spec.initial_guess.as_array(), lo, hi)
    if z[2] == 0.0:
        # The merit gradient in alpha vanishes identically at alpha = 0 (a
        # degenerate stationary point of every term), so a gradient method
        # started exactly there would never move alpha.  Nudge it off zero.
        z[2] = cfg.alpha_seed

    mult = _Multipliers(cfg.penalty_init)
    ev = _evaluate(spec, z, mult)

    history: list[IterateRecord] = []
    total_iter = 0
    inner_tol = 1e-1
    prev_viol = math.inf
    stalls = 0
    converged = False
    message = "iteration budget exhausted"
    best_key = (math.inf, math.inf)
    best_z = z.copy()
    pg = math.inf

    def line_search(current: _Evaluation, g: np.ndarray, d: np.ndarray):
        """Armijo backtracking along the projected, move-capped arc."""
        lo_arc = np.maximum(lo, current.z - cap)
        hi_arc = np.minimum(hi, current.z + cap)
        step = 1.0
        noise_floor = 1e-15 * (1.0 + abs(current.merit))
        while step >= cfg.min_step:
            z_try = np.clip(current.z + step * d, lo_arc, hi_arc)
            predicted = float(g @ (z_try - current.z))
            if predicted >= 0.0:
                step *= cfg.backtrack_factor
                continue
            if cfg.armijo_c * abs(predicted) < noise_floor:
                # Sufficient decrease below merit rounding noise: unwinnable.
                return None, step
            try:
                ev_try = _evaluate(spec, z_try, mult)
            except (BlowUpError, ClosureSingularityError):
                step *= cfg.backtrack_factor
                continue
            if ev_try.merit <= current.merit + cfg.armijo_c * predicted:
                return ev_try, step
            step *= cfg.backtrack_factor
        return None, step

    for outer in range(1, cfg.max_outer + 1):
        stalled = False
        inner_steps = 0
        for _ in range(cfg.inner_max):
            if total_iter >= cfg.max_iters:
                break
            theta = Theta(float(z[0]), float(z[1]))
            grads = _gradient_pieces(spec, theta, ev)
            g, H = _merit_gradient(grads, ev, mult, cfg.ridge)
            pg = _projected_gradient_norm(z, g, lo, hi)
            if pg <= inner_tol:
                break
            d = _direction(z, g, H, lo, hi)
            accepted, step = line_search(ev, g, d)
            if accepted is None:
                # Retry along the pure feasibility-restoration direction.
                d_rest = _restoration_direction(ev, mult, grads, cfg.ridge)
                accepted, step = line_search(ev, g, d_rest)
            if accepted is None:
                stalled = True
                break

            z = accepted.z
            ev = accepted
            total_iter += 1
            inner_steps += 1
            viol = raw_violation(ev.cons, spec.epsilon)
            history.append(
                IterateRecord(
                    iteration=total_iter,
                    decision=Decision(Theta(float(z[0]), float(z[1])), float(z[2])),
                    cost=ev.cost_bd.total,
                    constraint_violation=viol,
                    step_length=step,
                    merit=ev.merit,
                    outer=outer,
                )
            )
            key = (max(viol, cfg.constraint_tol), ev.cost_bd.total)
            if key < best_key:
                best_key = key
                best_z = z.copy()

        viol = raw_violation(ev.cons, spec.epsilon)
        theta = Theta(float(z[0]), float(z[1]))
        g, _ = _gradient_and_metric(spec, theta, ev, mult, cfg.ridge)
        pg = _projected_gradient_norm(z, g, lo, hi)
        if viol <= cfg.constraint_tol and pg <= cfg.grad_tol:
            converged = True
            message = "stationary and feasible"
            break
        if total_iter >= cfg.max_iters:
            break
        if stalled:
            stalls += 1
            # A stalled line search at a feasible point means the adjoint
            # direction can no longer certify decrease of the marching cost;
            # further outer iterations cannot improve stationarity.
            if viol <= cfg.constraint_tol:
                message = "feasible; line search stalled below min_step"
                break
            # Infeasible and the penalty already saturated with no progress:
            # nothing left to escalate.
            if mult.rho >= cfg.penalty_max and viol >= 0.999 * prev_viol:
                message = "line search stalled below min_step"
                break
        else:
            stalls = 0

        # First-order multiplier updates; skipped when the inner loop could
        # not move at all and feasibility did not improve, so repeated stalls
        # cannot drive the multipliers away from their current estimates.
        if inner_steps > 0 or viol < prev_viol:
            mult.lam1 = max(0.0, mult.lam1 + mult.rho * ev.c1)
            mult.lam2 = max(0.0, mult.lam2 + mult.rho * ev.c2)
            mult.mu = mult.mu + mult.rho * ev.e3
        if viol > 0.25 * prev_viol:
            mult.rho = min(mult.rho * cfg.penalty_growth, cfg.penalty_max)
        prev_viol = viol
        inner_tol = max(cfg.grad_tol, inner_tol * cfg.tol_shrink)
        ev = _evaluate(spec, z, mult)

    if not converged and tuple(best_z) != tuple(z):
        z = best_z
        ev = _evaluate(spec, z, mult)

    final_theta = Theta(float(z[0]), float(z[1]))
    decision = Decision(final_theta, float(z[2]))
    final_cost = cost(spec, final_theta, ev.state)
    kkt = _kkt_residual_norm(spec, final_theta, ev, lo, hi)
    spectral = certify(
        spec,
        decision,
        span_threshold=cfg.span_threshold,
        mode_count=cfg.span_modes,
    )
    return OptimizationResult(
        decision=decision,
        cost_breakdown=final_cost,
        history=tuple(history),
        converged=converged,
        spectral=spectral,
        constraint_violation=raw_violation(ev.cons, spec.epsilon),
        projected_gradient_norm=kkt,
        message=message,
    )

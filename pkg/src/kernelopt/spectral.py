"""Characteristic roots, closed-loop spectrum, span check, stability certificate.

Roots of the characteristic function are bracketed by a dense sign scan
(step pi/200) and refined by bisection; for large indices the roots cluster
at integer multiples of pi, so each window (k*pi - pi/2, k*pi + pi/2) is also
probed to make sure none is skipped.  The span condition is checked by
linear least squares over the mode functions sin(alpha_n x): the normal
equations are assembled with composite Simpson quadrature on the grid's own
spatial nodes and solved with a Cholesky factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import RootSearchError, SingularGramError
from .model import Decision, Grid, InitialCondition, ScenarioSpec, Theta
from .objective import char_function, constraint_values
from .quadrature import simpson_weights

RESIDUAL_LIMIT = 1e-9
SCAN_STEP = math.pi / 200.0
GRAM_CONDITION_LIMIT = 1e12
DEFAULT_SPAN_THRESHOLD = 1e-3
DEFAULT_MODE_COUNT = 14


@dataclass(frozen=True)
class RootSequence:
    """Ascending positive roots of the characteristic function with their
    residual magnitudes."""

    roots: np.ndarray
    residuals: np.ndarray

    def __post_init__(self):
        roots = np.asarray(self.roots, dtype=float)
        residuals = np.asarray(self.residuals, dtype=float)
        if roots.ndim != 1 or roots.size == 0 or roots.shape != residuals.shape:
            raise ValueError("roots and residuals must be matching nonempty vectors")
        if roots[0] <= 0 or np.any(np.diff(roots) <= 0):
            raise ValueError("roots must be positive and strictly ascending")
        if np.any(residuals > RESIDUAL_LIMIT):
            raise ValueError(
                f"root residuals exceed {RESIDUAL_LIMIT:g}: max {residuals.max():.3e}"
            )
        roots.flags.writeable = False
        residuals.flags.writeable = False
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "residuals", residuals)

    def __len__(self) -> int:
        return self.roots.size


@dataclass(frozen=True)
class SpectralReport:
    """Outcome of the stability certificate for one decision."""

    roots: RootSequence
    eigenvalues: np.ndarray
    span_residual_J: float
    span_coefficients: np.ndarray
    smallest_root_is_alpha: bool
    stable: bool
    reasons: tuple[str, ...] = ()
    span_threshold: float = DEFAULT_SPAN_THRESHOLD
    mode_count: int = DEFAULT_MODE_COUNT

    def to_dict(self) -> dict:
        return {
            "roots": [float(v) for v in self.roots.roots],
            "residuals": [float(v) for v in self.roots.residuals],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "span_residual_J": float(self.span_residual_J),
            "span_coefficients": [float(v) for v in self.span_coefficients],
            "smallest_root_is_alpha": bool(self.smallest_root_is_alpha),
            "stable": bool(self.stable),
            "reasons": list(self.reasons),
            "span_threshold": float(self.span_threshold),
            "mode_count": int(self.mode_count),
        }


def _bisect(theta: Theta, lo: float, hi: float, flo: float, fhi: float, tol: float):
    """Bisection refinement; runs to the tolerance or the machine limit and
    returns the endpoint with the smallest |g3|."""
    a, b, fa, fb = lo, hi, flo, fhi
    while (b - a) > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = char_function(theta, mid)
        if fm == 0.0:
            return mid, 0.0
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    if abs(fa) <= abs(fb):
        return a, abs(fa)
    return b, abs(fb)


def find_roots(theta: Theta, count: int, tol: float = 1e-14) -> RootSequence:
    """First ``count`` positive roots of the characteristic function.

    Scans (0, (count+2)*pi] with step pi/200 for sign changes, refines each
    bracket by bisection, and probes each window around k*pi for crossings
    the scan might have straddled.  Raises RootSearchError when the scan
    range does not contain enough roots, distinguishing the g1 < 0 pathology
    from plain range exhaustion.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    num_steps = 200 * (count + 2)
    xs = np.arange(1, num_steps + 1) * SCAN_STEP
    vals = char_function(theta, xs)

    found: list[tuple[float, float]] = []
    exact = np.flatnonzero(vals == 0.0)
    for k in exact:
        found.append((float(xs[k]), 0.0))
    signs = np.sign(vals)
    crossings = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    for k in crossings:
        root, resid = _bisect(theta, xs[k], xs[k + 1], vals[k], vals[k + 1], tol)
        found.append((root, resid))

    # Window probe around each multiple of pi, in case a pair of roots sits
    # between two scan points.
    half = math.pi / 2.0 - SCAN_STEP
    for k in range(1, count + 2):
        center = k * math.pi
        if any(abs(r - center) < half for r, _ in found):
            continue
        a, b = center - half, center + half
        fa, fb = char_function(theta, a), char_function(theta, b)
        if fa == 0.0 or fb == 0.0 or (fa > 0.0) == (fb > 0.0):
            continue
        fine = np.linspace(a, b, 401)
        fvals = char_function(theta, fine)
        fsigns = np.sign(fvals)
        hits = np.flatnonzero(fsigns[:-1] * fsigns[1:] < 0)
        for j in hits[:1]:
            root, resid = _bisect(theta, fine[j], fine[j + 1], fvals[j], fvals[j + 1], tol)
            found.append((root, resid))

    found.sort(key=lambda p: p[0])
    deduped: list[tuple[float, float]] = []
    for root, resid in found:
        if deduped and abs(root - deduped[-1][0]) < 10 * tol + 1e-12:
            continue
        deduped.append((root, resid))

    if len(deduped) < count:
        g1 = constraint_values(theta, 0.0, 1.0).g1
        if g1 < 0:
            raise RootSearchError(
                "g1-negative",
                f"found {len(deduped)} of {count} roots; the coefficient "
                f"inequality is violated (g1 = {g1:.4g} < 0), so an infinite "
                "root sequence is not guaranteed",
            )
        raise RootSearchError(
            "scan-exhausted",
            f"found only {len(deduped)} of {count} roots in (0, {(count + 2)}*pi]",
        )
    roots = np.array([r for r, _ in deduped[:count]])
    residuals = np.array([s for _, s in deduped[:count]])
    return RootSequence(roots, residuals)


def eigenvalues(roots: RootSequence, c: float) -> np.ndarray:
    """Closed-loop eigenvalues c - alpha_n^2, in root order."""
    return c - roots.roots**2


def char_amplitude_phase(theta: Theta, alpha: float) -> tuple[float, float]:
    """Amplitude-phase form of the characteristic function.

    Returns (Q, phi) with Q*sin(alpha + phi) + 2*theta2 equal to g3; a
    diagnostic identity useful for cross-checking the direct evaluation.
    """
    t1, t2 = theta.theta1, theta.theta2
    a = float(alpha)
    s = t1 * a * a + t2 * a * a - 2.0 * t2
    co = a**3 - t1 * a - 2.0 * t2 * a
    q = math.hypot(s, co)
    phi = math.atan2(s, co) if q > 0 else 0.0
    return q, phi


def span_fit(
    y0: InitialCondition, roots: RootSequence, grid: Grid
) -> tuple[float, np.ndarray]:
    """Least-squares fit of y0 by the mode functions sin(alpha_n x).

    Solves the normal equations of min_Y integral |y0 - sum Y_n sin(alpha_n x)|^2
    and returns the optimal residual J and coefficients Y.  The integrals are
    composite Simpson sums on the grid's own spatial nodes: the span check
    shares its mesh with the solver, so the residual it reports is the one
    seen at the resolution the whole pipeline runs at.
    """
    alphas = roots.roots
    intervals = grid.n
    x = np.arange(intervals + 1) / intervals
    w = simpson_weights(intervals, 1.0 / intervals)
    modes = np.sin(np.outer(x, alphas))
    y0v = y0.evaluate(x)

    gram = modes.T @ (modes * w[:, None])
    moments = modes.T @ (w * y0v)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_CONDITION_LIMIT:
        raise SingularGramError(
            f"span Gram matrix is numerically singular (condition ~ {cond:.3e})"
        )
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGramError("span Gram matrix is not positive definite") from exc
    coeffs = scipy.linalg.cho_solve(factor, moments)
    resid = y0v - modes @ coeffs
    j_value = float(w @ (resid * resid))
    return j_value, coeffs


def certify(
    spec: ScenarioSpec,
    decision: Decision,
    span_threshold: float = DEFAULT_SPAN_THRESHOLD,
    mode_count: int = DEFAULT_MODE_COUNT,
    tol: float = 1e-14,
    alpha_match_tol: float | None = None,
    feasibility_tol: float = 1e-5,
) -> SpectralReport:
    """Stability certificate for a decision.

    Checks, in order: the coefficient inequality g1 >= 0 (up to
    ``feasibility_tol``, which absorbs optimizer tolerances and rounded
    published inputs), that the decision's alpha is the smallest positive
    root, that the leading eigenvalue clears the margin, and that the span
    residual is below ``span_threshold``.  ``alpha_match_tol`` defaults to
    the relative tolerance 1e-6 * (1 + alpha_1).

    The span check shares its quadrature mesh with the grid, which can
    resolve at most n independent modes (the x = 0 node contributes nothing),
    so ``mode_count`` is capped at grid.n; the report records the count used.
    """
    mode_count = min(mode_count, spec.grid.n)
    cons = constraint_values(decision.theta, decision.alpha, spec.c)
    reasons: list[str] = []
    if cons.g1 < -feasibility_tol:
        reasons.append("g1-negative")

    roots = find_roots(decision.theta, mode_count, tol)
    first = float(roots.roots[0])
    if alpha_match_tol is None:
        alpha_match_tol = 1e-6 * (1.0 + first)
    smallest_root_is_alpha = abs(decision.alpha - first) <= alpha_match_tol
    if not smallest_root_is_alpha:
        reasons.append("alpha-not-smallest-root")

    sigma = eigenvalues(roots, spec.c)
    if not (sigma[0] <= -spec.epsilon + feasibility_tol):
        reasons.append("eigenvalue-margin")

    j_value, coeffs = span_fit(spec.y0, roots, spec.grid)
    if not (j_value <= span_threshold):
        reasons.append("span-residual")

    return SpectralReport(
        roots=roots,
        eigenvalues=sigma,
        span_residual_J=j_value,
        span_coefficients=coeffs,
        smallest_root_is_alpha=smallest_root_is_alpha,
        stable=not reasons,
        reasons=tuple(reasons),
        span_threshold=span_threshold,
        mode_count=mode_count,
    )

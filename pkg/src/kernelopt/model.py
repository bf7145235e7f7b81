"""Domain types: grid, kernel coefficients, scenario configuration, fields.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid on [0,1] x [0,T].

    ``n`` and ``m`` are the numbers of spatial and temporal intervals; both
    must be even so composite Simpson's rule applies in either direction.
    The derived steps ``h = 1/n`` and ``tau = T/m`` are stored once here and
    read everywhere else, so every module sees identical rounding.  The mesh
    ratio ``r = tau/h**2`` must satisfy r <= 0.5 or the explicit marching
    scheme is not convergent; construction fails otherwise.
    """

    n: int
    m: int
    T: float
    h: float = field(init=False)
    tau: float = field(init=False)
    r: float = field(init=False)

    def __post_init__(self):
        if self.n <= 0 or self.m <= 0:
            raise ValueError("grid interval counts must be positive")
        if self.n % 2 != 0 or self.m % 2 != 0:
            raise ValueError("grid interval counts must be even (Simpson parity)")
        if not (self.T > 0):
            raise ValueError("time horizon must be positive")
        h = 1.0 / self.n
        tau = self.T / self.m
        r = tau / (h * h)
        if r > 0.5:
            raise ValueError(
                f"mesh ratio r = tau/h^2 = {r:.6g} exceeds 0.5; "
                "the explicit scheme would not converge"
            )
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "r", r)

    def x_nodes(self) -> np.ndarray:
        """Spatial nodes i/n, i = 0..n (x_n is exactly 1.0)."""
        return np.arange(self.n + 1) / self.n

    def t_nodes(self) -> np.ndarray:
        """Temporal nodes j*tau, j = 0..m."""
        return np.arange(self.m + 1) * self.tau


@dataclass(frozen=True)
class Theta:
    """Kernel coefficients of the quadratic feedback kernel."""

    theta1: float
    theta2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])


def kernel_eval(theta: Theta, xi):
    """Evaluate the feedback kernel theta1*xi + theta2*xi**2.

    Accepts a scalar or an ndarray of abscissae in [0, 1].
    """
    xi = np.asarray(xi, dtype=float)
    if xi.size and (xi.min() < 0.0 or xi.max() > 1.0):
        raise ValueError("kernel abscissa must lie in [0, 1]")
    out = theta.theta1 * xi + theta.theta2 * xi * xi
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Decision:
    """Augmented decision vector: kernel coefficients plus the candidate
    smallest positive characteristic root."""

    theta: Theta
    alpha: float

    def __post_init__(self):
        if not (self.alpha >= 0.0) or not math.isfinite(self.alpha):
            raise ValueError("alpha must be a finite nonnegative real")

    def as_array(self) -> np.ndarray:
        return np.array([self.theta.theta1, self.theta.theta2, self.alpha])


@dataclass(frozen=True)
class Bounds:
    """Box bounds for the kernel coefficients."""

    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        if self.a1 > self.b1 or self.a2 > self.b2:
            raise ValueError("bounds must satisfy a1 <= b1 and a2 <= b2")

    def contains(self, theta: Theta, tol: float = 0.0) -> bool:
        return (
            self.a1 - tol <= theta.theta1 <= self.b1 + tol
            and self.a2 - tol <= theta.theta2 <= self.b2 + tol
        )

    def lower(self) -> np.ndarray:
        return np.array([self.a1, self.a2])

    def upper(self) -> np.ndarray:
        return np.array([self.b1, self.b2])


_PRESET_SIN_PI = "sin_pi"
_PRESET_ENVELOPE = "envelope_sin"
_KIND_SAMPLES = "samples"


@dataclass(frozen=True)
class InitialCondition:
    """Initial profile y0 on [0, 1].

    Supported forms: the ``sin_pi`` preset sin(pi*x); the ``envelope_sin``
    preset (a + b*x)*sin(freq*pi*x); or a raw vector of n+1 samples on the
    grid nodes.  Every form evaluates to 0 at x = 0, matching the homogeneous
    left boundary condition.
    """

    kind: str
    params: tuple = ()
    sampled: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == _KIND_SAMPLES:
            values = np.array(self.sampled, dtype=float)
            if values.ndim != 1 or values.size < 2:
                raise ValueError("sampled initial condition must be a 1-D vector")
            if not np.isfinite(values).all():
                raise ValueError("sampled initial condition contains non-finite entries")
            if values[0] != 0.0:
                raise ValueError(
                    "initial condition must vanish at x = 0 "
                    "(left boundary compatibility)"
                )
            values.flags.writeable = False
            object.__setattr__(self, "sampled", values)
        elif self.kind not in (_PRESET_SIN_PI, _PRESET_ENVELOPE):
            raise ValueError(f"unknown initial condition kind {self.kind!r}")

    @classmethod
    def sin_pi(cls) -> "InitialCondition":
        return cls(_PRESET_SIN_PI)

    @classmethod
    def envelope_sin(cls, a: float, b: float, freq: float) -> "InitialCondition":
        return cls(_PRESET_ENVELOPE, (float(a), float(b), float(freq)))

    @classmethod
    def from_samples(cls, values: Sequence[float]) -> "InitialCondition":
        return cls(_KIND_SAMPLES, sampled=np.asarray(values, dtype=float))

    def evaluate(self, x) -> np.ndarray:
        """Evaluate y0 at arbitrary abscissae in [0, 1].

        Presets are evaluated analytically; a sampled profile is interpolated
        linearly between its native uniform nodes.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == _PRESET_SIN_PI:
            return np.sin(np.pi * x)
        if self.kind == _PRESET_ENVELOPE:
            a, b, freq = self.params
            return (a + b * x) * np.sin(freq * np.pi * x)
        native = np.arange(self.sampled.size) / (self.sampled.size - 1)
        return np.interp(x, native, self.sampled)

    def samples_on(self, grid: Grid) -> np.ndarray:
        """Samples y0(x_i), i = 0..n.  A raw vector must match the grid."""
        if self.kind == _KIND_SAMPLES:
            if self.sampled.size != grid.n + 1:
                raise ValueError(
                    f"sampled initial condition has {self.sampled.size} entries, "
                    f"grid needs {grid.n + 1}"
                )
            return self.sampled.copy()
        return self.evaluate(grid.x_nodes())


def initial_condition_samples(ic: InitialCondition, grid: Grid) -> np.ndarray:
    """Vector of initial values on the grid nodes."""
    return ic.samples_on(grid)


@dataclass(frozen=True)
class ScenarioSpec:
    """Problem data for one stabilization scenario."""

    c: float
    grid: Grid
    y0: InitialCondition
    bounds: Bounds
    epsilon: float
    initial_guess: Decision
    name: str = "scenario"

    def __post_init__(self):
        if not (self.c > 0):
            raise ValueError("reaction coefficient c must be positive")
        if not (self.epsilon > 0):
            raise ValueError("stability margin epsilon must be positive")
        if not self.bounds.contains(self.initial_guess.theta):
            raise ValueError("initial guess violates the coefficient bounds")


@dataclass(frozen=True)
class Field:
    """(n+1) x (m+1) matrix of samples on a grid; entries must be finite."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.grid.n + 1, self.grid.m + 1)
        if values.shape != expected:
            raise ValueError(f"field shape {values.shape} does not match grid {expected}")
        if not np.isfinite(values).all():
            raise ValueError("field contains non-finite entries")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def scenario_from_dict(doc: dict, name: str = "scenario") -> ScenarioSpec:
    """Build a ScenarioSpec from its JSON document form.

    Expected keys: c, T, n, m, y0 (either {"preset": ...} or
    {"samples": [...]}), bounds {a1, b1, a2, b2}, epsilon and
    initial_guess {theta1, theta2, alpha}.  An optional "name" overrides the
    fallback name.
    """
    try:
        grid = Grid(n=int(doc["n"]), m=int(doc["m"]), T=float(doc["T"]))
        y0 = _initial_condition_from_dict(doc["y0"])
        b = doc["bounds"]
        bounds = Bounds(float(b["a1"]), float(b["b1"]), float(b["a2"]), float(b["b2"]))
        g = doc["initial_guess"]
        guess = Decision(
            theta=Theta(float(g["theta1"]), float(g["theta2"])),
            alpha=float(g.get("alpha", 0.0)),
        )
        return ScenarioSpec(
            c=float(doc["c"]),
            grid=grid,
            y0=y0,
            bounds=bounds,
            epsilon=float(doc["epsilon"]),
            initial_guess=guess,
            name=str(doc.get("name", name)),
        )
    except KeyError as exc:
        raise ValueError(f"scenario document is missing key {exc}") from exc
    except TypeError as exc:
        raise ValueError(f"malformed scenario document: {exc}") from exc


def _initial_condition_from_dict(doc: dict) -> InitialCondition:
    if "samples" in doc:
        return InitialCondition.from_samples(doc["samples"])
    preset = doc.get("preset")
    if preset == _PRESET_SIN_PI:
        return InitialCondition.sin_pi()
    if preset == _PRESET_ENVELOPE:
        return InitialCondition.envelope_sin(doc["a"], doc["b"], doc["freq"])
    raise ValueError(f"unknown initial condition document: {doc!r}")

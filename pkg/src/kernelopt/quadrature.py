"""Composite trapezoid and Simpson rules on uniform samples.

Summation order is fixed by the expressions below, so repeated runs are
bit-reproducible.  At the problem sizes used here (n of a few hundred,
m of a few ten-thousand) no compensated summation is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Field


@dataclass(frozen=True)
class SampledFunction1D:
    """Values of a function on uniform nodes with spacing ``step``."""

    values: np.ndarray
    step: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("need at least two nodes")
        if not (self.step > 0):
            raise ValueError("step must be positive")
        object.__setattr__(self, "values", values)


def trapezoid(f: SampledFunction1D) -> float:
    """Composite trapezoid rule: h*(f0/2 + f1 + ... + f_{n-1} + fn/2)."""
    v = f.values
    return float(f.step * (v.sum() - 0.5 * (v[0] + v[-1])))


def simpson(f: SampledFunction1D) -> float:
    """Composite Simpson rule; requires an even number of intervals."""
    v = f.values
    if (v.size - 1) % 2 != 0:
        raise ValueError("Simpson's rule needs an even interval count")
    if v.size < 3:
        raise ValueError("Simpson's rule needs at least two intervals")
    odd = v[1:-1:2].sum()
    even = v[2:-1:2].sum()
    return float(f.step / 3.0 * (v[0] + 4.0 * odd + 2.0 * even + v[-1]))


def simpson_weights(intervals: int, step: float) -> np.ndarray:
    """Weight vector w with w . f = simpson(f) for even ``intervals``."""
    if intervals % 2 != 0 or intervals < 2:
        raise ValueError("Simpson's rule needs an even interval count >= 2")
    w = np.full(intervals + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (step / 3.0)


def simpson_2d(psi: Field) -> float:
    """Iterated composite Simpson integral of a field over [0,1] x [0,T].

    Applies the 1-D rule over x for each time slice to get the slice
    integrals, then the 1-D rule over t.  Grid parity is enforced by the
    Grid type itself.
    """
    g = psi.grid
    wx = simpson_weights(g.n, g.h)
    wt = simpson_weights(g.m, g.tau)
    per_slice = wx @ psi.values
    return float(wt @ per_slice)

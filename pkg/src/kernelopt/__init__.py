"""Optimal polynomial feedback kernels for boundary stabilization of a 1-D
unstable diffusion-reaction equation, with adjoint-gradient optimization and
spectral stability certification."""

from .baselines import FourierInit, backstepping_kernel, fourier_coefficients, uncontrolled_exact
from .errors import (
    BlowUpError,
    ClosureSingularityError,
    KernelOptError,
    RootSearchError,
    SingularGramError,
)
from .model import (
    Bounds,
    Decision,
    Field,
    Grid,
    InitialCondition,
    ScenarioSpec,
    Theta,
    initial_condition_samples,
    kernel_eval,
    scenario_from_dict,
)
from .objective import (
    ConstraintValues,
    CostBreakdown,
    GradientReport,
    char_function,
    constraint_values,
    cost,
    cost_gradient,
    kernel_energy,
)
from .optimizer import IterateRecord, OptimizationResult, OptimizerConfig, optimize
from .quadrature import SampledFunction1D, simpson, simpson_2d, simpson_weights, trapezoid
from .solvers import (
    BLOWUP_LIMIT,
    CostateSolution,
    StateSolution,
    boundary_control_residual,
    solve_costate,
    solve_state,
)
from .spectral import (
    RootSequence,
    SpectralReport,
    certify,
    char_amplitude_phase,
    eigenvalues,
    find_roots,
    span_fit,
)

__version__ = "0.1.0"

__all__ = [
    "BLOWUP_LIMIT",
    "BlowUpError",
    "Bounds",
    "ClosureSingularityError",
    "ConstraintValues",
    "CostBreakdown",
    "CostateSolution",
    "Decision",
    "Field",
    "FourierInit",
    "GradientReport",
    "Grid",
    "InitialCondition",
    "IterateRecord",
    "KernelOptError",
    "OptimizationResult",
    "OptimizerConfig",
    "RootSearchError",
    "RootSequence",
    "SampledFunction1D",
    "ScenarioSpec",
    "SingularGramError",
    "SpectralReport",
    "StateSolution",
    "Theta",
    "backstepping_kernel",
    "boundary_control_residual",
    "certify",
    "char_amplitude_phase",
    "char_function",
    "constraint_values",
    "cost",
    "cost_gradient",
    "eigenvalues",
    "find_roots",
    "fourier_coefficients",
    "initial_condition_samples",
    "kernel_energy",
    "kernel_eval",
    "optimize",
    "scenario_from_dict",
    "simpson",
    "simpson_2d",
    "simpson_weights",
    "solve_costate",
    "solve_state",
    "span_fit",
    "trapezoid",
    "uncontrolled_exact",
]

"""Exception types raised by the numerical routines."""


class KernelOptError(Exception):
    """Base class for package-specific failures."""


class ClosureSingularityError(KernelOptError, ValueError):
    """The integral boundary closure is degenerate for this kernel/grid pair.

    Raised when |1 - (h/2) k(1)| falls below the singularity threshold, so the
    right-boundary value cannot be solved for.
    """


class BlowUpError(KernelOptError, RuntimeError):
    """A marching solution exceeded the blow-up limit or became non-finite."""

    def __init__(self, quantity: str, time_index: int, magnitude: float):
        self.quantity = quantity
        self.time_index = time_index
        self.magnitude = magnitude
        super().__init__(
            f"{quantity} solve blew up at time index {time_index} "
            f"(max magnitude {magnitude:.3e})"
        )


class RootSearchError(KernelOptError, RuntimeError):
    """Fewer characteristic roots were found than requested.

    ``reason`` is ``"g1-negative"`` when the coefficient inequality that
    guarantees an infinite root sequence is violated, otherwise
    ``"scan-exhausted"``.
    """

    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(message)


class SingularGramError(KernelOptError, RuntimeError):
    """The Gram matrix of the span fit is numerically singular."""

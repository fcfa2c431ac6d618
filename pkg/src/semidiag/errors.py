"""Exception types raised across the toolkit."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimit(ValueError):
    """The requested problem size exceeds a documented cap."""


class PreconditionViolation(ValueError):
    """Input data fails a structural check (e.g. convexity)."""


class FlowOrderViolation(RuntimeError):
    """A simulated flow slice lost strict monotonicity in the start point.

    Attributes
    ----------
    step : int
        Time index of the first offending slice.
    index : int
        x-grid index ``j`` such that ``D[step][j] >= D[step][j + 1]``.
    """

    def __init__(self, step: int, index: int):
        super().__init__(
            f"flow order violated at time step {step}, x index {index}; retry with finer dt"
        )
        self.step = step
        self.index = index


class QuantileOutOfRange(ValueError):
    """The target level lies outside the range of a flow slice."""

    def __init__(self, alpha: float, step: int):
        super().__init__(f"alpha={alpha!r} outside the flow slice range at time step {step}")
        self.alpha = alpha
        self.step = step

"""Exception types shared across the simulation modules."""


class ConfigError(ValueError):
    """Invalid parameter or configuration value."""


class SimulationError(RuntimeError):
    """A run aborted; carries the step index and the offending quantity."""

    exit_code = 1

    def __init__(self, message: str, step: int | None = None, quantity: str | None = None):
        where = f" at step {step}" if step is not None else ""
        what = f" [{quantity}]" if quantity else ""
        super().__init__(f"{message}{where}{what}")
        self.step = step
        self.quantity = quantity


class InvariantViolation(SimulationError):
    exit_code = 2


class NumericFailure(SimulationError):
    exit_code = 3

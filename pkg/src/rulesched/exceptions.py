"""Exception types raised across the package."""


class InstanceError(ValueError):
    """Malformed or invalid instance data.

    ``path`` points at the offending location in the document, e.g.
    ``"nurses[2].pref_cost"``.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class InfeasibleNurseError(ValueError):
    """A nurse has an empty feasible pattern set."""

    def __init__(self, nurse_id):
        self.nurse_id = nurse_id
        super().__init__(f"nurse {nurse_id} has no feasible shift pattern")


class ContractViolation(ValueError):
    """A schedule assigns a nurse a pattern outside its feasible set."""


class CapacityError(RuntimeError):
    """Exhaustive search space exceeds the configured limit."""

    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"search space of {size} states exceeds limit {limit}")


class GenerationError(ValueError):
    """The generator cannot produce an instance from the given spec."""

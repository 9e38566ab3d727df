"""Exception hierarchy shared by the solvers, the knowledgebase and the CLI."""


class VnfcaError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(VnfcaError, ValueError):
    """Input arrays do not match the shape of the capacity model."""


class UnsupportedShapeError(VnfcaError, ValueError):
    """The requested solver does not handle this problem shape."""


class NonlinearModelError(VnfcaError, ValueError):
    """A continuous solver was given a model with partial-allocation curves."""


class InfeasibleObjectiveError(VnfcaError):
    """Cobb-Douglas objective is -inf everywhere (some VNF has no capacity)."""

    def __init__(self, message, vnfs=()):
        super().__init__(message)
        self.vnfs = tuple(vnfs)


class InfeasibleRequirementsError(VnfcaError):
    """The throughput requirements cannot be met by any feasible allocation.

    ``unreachable`` holds ``(vnf_index, required, max_achievable)`` tuples.
    """

    def __init__(self, message, unreachable=()):
        super().__init__(message)
        self.unreachable = tuple(unreachable)


class UndefinedPriceError(VnfcaError, ValueError):
    """Shadow price requested at a zero throughput component."""


class OracleBudgetError(VnfcaError, ValueError):
    """Grid enumeration would exceed the configured point budget."""

    def __init__(self, message, count):
        super().__init__(message)
        self.count = count


class KnowledgebaseError(VnfcaError, ValueError):
    """A knowledgebase document failed to parse or validate.

    ``path`` is a JSON-path-like locator such as ``capacity[2].curve[1]``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.detail = message

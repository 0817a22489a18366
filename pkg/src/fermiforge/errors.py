"""Exception hierarchy shared across the package.

The CLI maps ValidationError to exit code 1 and every other
FermiforgeError (or unexpected exception) to exit code 2.
"""


class FermiforgeError(Exception):
    """Base class for all package errors."""


class ValidationError(FermiforgeError):
    """Invalid user input: bad indices, malformed files, broken preconditions."""


class UnsupportedGateError(FermiforgeError):
    """A gate name has no rule for the requested operation (simulate, inverse, translate)."""


class SimulationError(FermiforgeError):
    """Simulation could not be carried out (width caps, unbound parameters, noise misuse)."""


class SymmetryError(ValidationError):
    """Operator violates the symmetry a mapping requires."""


class LifecycleError(FermiforgeError):
    """Solver method called out of order (e.g. get_resources before build)."""


class ConvergenceError(FermiforgeError):
    """An iterative procedure failed to converge within its iteration cap."""

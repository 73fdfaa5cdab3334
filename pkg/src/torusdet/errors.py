"""Exception types shared across the package.

The split matters for the CLI, which maps invalid input and numerical
failures to distinct exit codes.
"""


class TorusdetError(Exception):
    """Base class for all package errors."""


class InputError(TorusdetError, ValueError):
    """Invalid arguments: bad grids, out-of-range parameters, size caps."""


class FitDegenerateError(TorusdetError, RuntimeError):
    """Least-squares design matrix is rank deficient or too ill-conditioned."""


class TailModelError(TorusdetError, RuntimeError):
    """A declared tail basis cannot represent the sampled tail behaviour."""


class NumericalError(TorusdetError, RuntimeError):
    """Quadrature or another numerical subroutine failed to converge."""

"""Exception hierarchy shared across the package.

Configuration problems map to CLI exit code 1, numerical/convergence
problems to exit code 2.
"""


class BerrysimError(Exception):
    """Base class for all package errors."""


class ConfigurationError(BerrysimError):
    """Invalid or inconsistent configuration input."""


class NumericalError(BerrysimError):
    """Base class for numerical failures (exit code 2)."""


class DegenerateFieldError(NumericalError):
    """Effective field vanishes; tilt angle undefined."""


class DegeneracyError(NumericalError):
    """Eigenstate branch tracking hit an (avoided) level crossing."""


class ConvergenceError(NumericalError):
    """A result did not converge under refinement."""


class ValidityDomainError(NumericalError):
    """Inputs are outside the validity domain of a perturbative formula."""


class IntegrationError(NumericalError):
    """Time integration violated one of its accuracy bounds."""


class UnphysicalStateError(NumericalError):
    """A state/operator failed its physicality checks."""


class UndefinedPhaseError(NumericalError):
    """Bloch vector too short in-plane to define a phase."""

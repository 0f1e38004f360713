"""Exception and warning types shared across the package.

The CLI maps these onto stable exit codes: configuration problems exit
with 2, numerical failures with 3, I/O errors with 4.
"""


class MtCavityError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MtCavityError):
    """Invalid parameters, spaces, or run configuration."""


class InvalidSpaceError(ConfigurationError):
    """Hilbert-space specification that cannot be built."""


class ShapeError(ConfigurationError):
    """Array arguments with incompatible or non-square shapes."""


class ModelError(ConfigurationError):
    """Hamiltonian/jump-operator containers that violate their contract."""


class NumericalError(MtCavityError):
    """Runtime numerical failure (norm collapse, divergence, ...)."""


class StiffnessError(NumericalError):
    """Adaptive integrator step size underflowed; message names the time reached."""


class StabilityError(NumericalError):
    """Stochastic step size too large for the fastest jump rate."""


class CutoffError(NumericalError):
    """Boson truncation too small for the requested state."""


class FitQualityError(NumericalError):
    """A regression did not meet its required goodness of fit."""


class GeometryError(ConfigurationError):
    """Ill-posed holography scene geometry."""


class CutoffWarning(UserWarning):
    """Appreciable population in the top two boson levels; results may be corrupted."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the region where the projective map is a diffeomorphism."""


class RectilinearError(ValueError):
    """Angular momentum is (numerically) zero; the angle-like parameterization is singular."""


class NonOscillatoryError(ValueError):
    """The fiber frequency is not real (squared specific angular momentum <= k2/m)."""


class ConfigError(ValueError):
    """A run configuration file is malformed or inconsistent."""


class IntegrationError(RuntimeError):
    """Numerical integration failed; carries the partial trajectory if available."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class DomainExitError(IntegrationError):
    """The flow left the valid domain (radius or normal coordinate hit zero)."""

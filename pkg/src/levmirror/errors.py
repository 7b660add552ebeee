"""Exception hierarchy for the levitated-mirror model."""


class LevMirrorError(Exception):
    """Base class for all errors raised by :mod:`levmirror`."""


class DomainError(LevMirrorError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class NoRealSteadyState(LevMirrorError):
    """The steady-state discriminant is negative (power below threshold).

    Attributes
    ----------
    discriminant : float
        Value of the discriminant that was found to be negative.
    params : SystemParams or None
        Parameters that produced it.
    """

    def __init__(self, discriminant, params=None):
        self.discriminant = float(discriminant)
        self.params = params
        super().__init__(
            f"no real steady state: discriminant D = {self.discriminant:.6g} < 0"
        )


class ThresholdNotFound(LevMirrorError):
    """The discriminant has no sign change on the searched power interval."""


class NumericalError(LevMirrorError, ArithmeticError):
    """A numerical routine failed or its result could not be certified.

    Attributes
    ----------
    omega : float or None
        Sideband frequency at which the failure happened, when relevant.
    """

    def __init__(self, message, omega=None):
        self.omega = omega
        if omega is not None:
            message = f"{message} (omega = {omega!r} rad/s)"
        super().__init__(message)


class ConsistencyError(LevMirrorError):
    """Two routes to the same quantity disagree beyond tolerance."""


class UnphysicalStateError(LevMirrorError):
    """A covariance matrix violates a physical constraint beyond tolerance."""

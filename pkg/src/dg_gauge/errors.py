"""Exception types shared across the package."""


class DGError(Exception):
    """Base class for errors raised by this package."""


class NodalState(DGError):
    """A wavefunction hit (or started with) a zero of the density.

    The nonlinear functionals divide by rho, so states with nodes are
    outside the domain of the flow.  Carries the time reached when raised
    mid-evolution.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class UnsupportedDimension(DGError):
    """Operation is only implemented for a restricted set of dimensions."""


class DegenerateFamily(DGError):
    """Family parameters do not describe a usable equation (e.g. nu1 = 0)."""


class ZeroPoint(DGError):
    """The pointwise gauge map is singular at z = 0."""


class InsufficientSnapshots(DGError):
    """A trajectory diagnostic needs more recorded snapshots than it got."""


class Unstable(DGError):
    """Time step violates the stability bound, or the state blew up.

    Carries the time reached when raised mid-evolution.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NotLinearizable(DGError):
    """Requested a linearizing gauge element for an orbit that has none."""


class ParseError(DGError):
    """Configuration document is not syntactically valid."""


class ValidationError(DGError):
    """Configuration document is well-formed but semantically wrong."""

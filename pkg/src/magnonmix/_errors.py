"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class NumericalError(RuntimeError):
    """A computation failed to converge or produced a non-finite result."""


class StiffnessError(NumericalError):
    """Adaptive step size underflowed during ODE integration."""

    def __init__(self, message, t=None, h=None):
        super().__init__(message)
        self.t = t
        self.h = h


class CoherentSamplingError(InvalidParameterError):
    """A DFT target frequency is not bin-aligned and no window was requested."""


class SteadyStateError(NumericalError):
    """A time-domain run did not settle to a periodic steady state."""

    def __init__(self, message, drift=None, t_settle=None):
        super().__init__(message)
        self.drift = drift
        self.t_settle = t_settle

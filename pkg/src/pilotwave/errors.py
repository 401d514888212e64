"""Exception hierarchy shared by all modules."""


class PilotwaveError(Exception):
    """Base class for all package errors."""


# --- wavefield ---

class EvanescentRegime(PilotwaveError):
    """Interior wavenumber is imaginary; only propagating solutions are handled."""


class DegenerateWavenumber(PilotwaveError):
    """k_x = 0 has no scattering solution."""


class NonUnitaryAmplitudes(PilotwaveError):
    """The splitter amplitude matrix fails unitarity beyond tolerance."""


class GridTooCoarse(PilotwaveError):
    """Spatial grid does not resolve the wavelength."""


class WindowTooSmall(PilotwaveError):
    """Grid window does not contain the packet support with the required margin."""


class BoundaryContamination(PilotwaveError):
    """Probability reached the hard grid boundary; the run is invalid."""


# --- trajectories ---

class NodeSingularity(PilotwaveError):
    """|psi|^2 fell below the node floor at the requested point."""


class StepUnderflow(PilotwaveError):
    """Adaptive step shrank below dt_min (trajectory trapped at a node)."""


class OrderViolation(PilotwaveError):
    """Final trajectory positions are not sorted; integrator accuracy failure."""


# --- maps ---

class OutOfSupport(PilotwaveError):
    """Position lies outside the segment support."""


class WrongHalfInterval(PilotwaveError):
    """y does not lie in the gate's half-interval."""


class SaturatedSeparation(PilotwaveError):
    """Orbit separation left the linear-growth window."""


class PrecisionExhausted(PilotwaveError):
    """Float input cannot supply the requested binary digit reliably."""


# --- frobenius ---

class BadGridSize(PilotwaveError):
    """Density grid must have 2^K + 1 nodes."""


class OrderTooHigh(PilotwaveError):
    """Bernoulli polynomial order exceeds the supported maximum."""


class RoughDensity(PilotwaveError):
    """Endpoint derivative stencils disagree across resolutions; density too rough."""


# --- entropy ---

class NotNormalized(PilotwaveError):
    """Density does not integrate to one."""


class MonotonicityViolation(PilotwaveError):
    """Entropy decreased along a Perron-Frobenius trace."""


class NonPositiveDensity(PilotwaveError):
    """Density must be strictly positive for the rate integral."""


# --- cli ---

class ConfigError(PilotwaveError):
    """Scenario configuration failed validation."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")

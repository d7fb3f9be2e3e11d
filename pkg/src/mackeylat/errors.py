"""Exception types shared across the package.

Everything domain-level derives from :class:`LatticeError` so the CLI can
map library failures to a single exit code.
"""


class LatticeError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidModelSpec(LatticeError):
    """Model definition violates an invariant (empty alphabet, bad extent, ...)."""


class EnumerationCapExceeded(LatticeError):
    """The configuration space would exceed the enumeration cap."""


class UnknownSite(LatticeError):
    """A region references a coordinate outside the lattice."""


class UnknownConfiguration(LatticeError):
    """A configuration (or configuration index) does not belong to the phase space."""


class TableLengthMismatch(LatticeError):
    """A value table does not match the size of the phase space."""


class NonFiniteValue(LatticeError):
    """An observable table contains NaN or infinity."""


class IncompleteLocalTable(LatticeError):
    """A local function table does not cover every local configuration."""


class PhaseSpaceMismatch(LatticeError):
    """Operands were built over different phase spaces."""


class WeightSumError(LatticeError):
    """State weights are negative or do not sum to one within tolerance."""


class EmptyEnergyShell(LatticeError):
    """No configuration lies in the requested energy shell."""

    def __init__(self, message: str, nearest_energy: float | None = None):
        super().__init__(message)
        self.nearest_energy = nearest_energy


class InconsistentThread(LatticeError):
    """A thread of local states fails the marginal-consistency check."""


class InvalidSpectralMeasure(LatticeError):
    """Atoms of a spectral measure do not partition the phase space."""


class UndefinedOnSpectrum(LatticeError):
    """A function passed to the functional calculus is undefined at a spectral value."""


class InvalidEventRule(LatticeError):
    """An event rule produced a probability-zero event."""

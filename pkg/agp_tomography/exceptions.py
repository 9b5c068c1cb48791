"""Exception hierarchy shared by the simulator, tomography and CLI layers."""


class AgpError(Exception):
    """Base class for all agp-tomography errors."""


class ValidationError(AgpError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(ValidationError):
    """A register or oracle size exceeds the configured cap."""


class QubitIndexError(AgpError, IndexError):
    """A gate or operator targets a qubit outside the register."""


class UnsupportedGateError(AgpError):
    """A gate kind has no OpenQASM 2.0 text equivalent."""


class EmptySectorError(AgpError):
    """No shots (or no probability weight) survive particle-number post-selection."""


class IncompleteEntriesError(AgpError):
    """A geminal matrix cannot be assembled because entries are missing."""


class SectorUnavailableError(AgpError):
    """A geminal matrix cannot be assembled because a sector is empty."""


class OutputError(AgpError):
    """Writing a report, matrix or circuit file failed."""

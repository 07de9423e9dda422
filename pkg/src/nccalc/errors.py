"""Error taxonomy shared by the whole package.

Every failure mode is a subclass of NcError so callers (and the CLI) can
rely on one catch point.  The CLI maps these onto exit codes: InputError
is a parse/validation problem with the user's data (exit 2), CapError is
a resource-cap violation (exit 3), and mathematical findings are plain
results, not exceptions.
"""


class NcError(Exception):
    """Base class for all package errors."""


class InputError(NcError):
    """Malformed input: bad JSON shape, inconsistent dimensions, bad strings."""


class ValidationError(NcError):
    """Input parsed but violates a mathematical contract (associativity, unit...)."""


class TruncationError(NcError):
    """An exact operation would leave the configured truncation window."""


class CapError(NcError):
    """A computation exceeded an explicitly configured resource cap."""


class SupportError(NcError):
    """An A-infinity plugin was asked for an operation beyond its declared support."""

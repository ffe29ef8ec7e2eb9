"""Exception types shared across the toolkit, with their CLI exit codes."""


class WoundAmbitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidInputError(WoundAmbitError):
    """Input violates a documented precondition (bad dimensions, bad values)."""

    exit_code = 2


class NoReferenceError(WoundAmbitError):
    """No usable fiducial marker found; the px/mm scale cannot be estimated."""

    exit_code = 3


class IOFailureError(WoundAmbitError):
    """A file could not be read or written."""

    exit_code = 4

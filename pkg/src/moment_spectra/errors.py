"""Exception hierarchy shared by the library and the command-line front end.

Each exception carries the process exit code the CLI maps it to, so that
library code can raise precise errors without knowing about the CLI.
"""

from __future__ import annotations


class MomentSpectraError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationFailure(MomentSpectraError):
    """A numerical cross-check did not meet its tolerance."""

    exit_code = 1


class InputError(MomentSpectraError):
    """Malformed input file, unparsable value, or I/O failure."""

    exit_code = 2


class InvariantError(MomentSpectraError):
    """A mathematical precondition or invariant is violated (e.g. non-unitary gate)."""

    exit_code = 3


class UnsupportedConfiguration(MomentSpectraError):
    """The request is well-formed but outside what the library supports."""

    exit_code = 4

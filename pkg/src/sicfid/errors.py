"""Error hierarchy shared by all sicfid modules.

Two failure families matter to callers: ordinary computational failures
(bad input, not enough precision, iteration caps) and conjecture
falsification events, where an exact identity the construction relies on
fails to hold.  The CLI maps them to exit codes 1 and 2 respectively.
"""


class SicfidError(Exception):
    """Base class for all package errors."""


class ComputationalError(SicfidError):
    """A calculation failed for mundane reasons (exit code 1)."""


class PrecisionError(ComputationalError):
    """Working precision was insufficient; retry with more digits."""

    def __init__(self, message, suggested_precision=None):
        super().__init__(message)
        self.suggested_precision = suggested_precision


class CutoffError(ComputationalError):
    """A truncated series needs more terms; carries the suggested cutoff."""

    def __init__(self, message, suggested_cutoff=None):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff


class UnsupportedError(ComputationalError):
    """Input is valid but outside the implemented scope (e.g. h > 2)."""


class ConjectureFailure(SicfidError):
    """An exact identity predicted by the conjectures failed (exit code 2)."""

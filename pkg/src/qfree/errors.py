"""Shared exception types, mapped to CLI exit codes."""


class InputError(ValueError):
    """Malformed or out-of-domain input (CLI exit code 2)."""


class CapExceededError(RuntimeError):
    """A configurable resource cap would be exceeded (CLI exit code 3)."""


class InternalInvariantError(AssertionError):
    """A computed quantity violated an internal invariant (CLI exit code 4)."""

"""Shared exception hierarchy.

Every error deliberately raised by this package derives from ScholiaError so
callers (notably the CLI) can distinguish our failures from programming bugs.
"""


class ScholiaError(Exception):
    """Base class for all errors raised by the scholia package."""

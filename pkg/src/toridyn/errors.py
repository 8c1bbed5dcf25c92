"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class ToridynError(Exception):
    exit_code = 1


class InputError(ToridynError, ValueError):
    """Malformed or inconsistent input (bad fan, bad matrix, schema violation)."""

    exit_code = 2


class UnsupportedGeometryError(ToridynError):
    """Input is well formed but lies outside the supported Q-factorial pipeline."""

    exit_code = 3


class BranchCapExceeded(ToridynError):
    """Exhaustive MMP enumeration produced more traces than allowed.

    ``partial`` holds the traces collected before the cap was hit.
    """

    exit_code = 4

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = tuple(partial)

"""Error hierarchy shared by the engine and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class RGroupsError(Exception):
    exit_code = 1


class SchemaError(RGroupsError):
    """Malformed or out-of-contract input (bad JSON, unknown keys, bad rationals)."""

    exit_code = 2


class EngineRejection(RGroupsError):
    """Well-formed input the engine refuses: violated preconditions,
    inconsistent oracles, missing flags, budget overruns."""

    exit_code = 3


class CapExceeded(EngineRejection):
    """Enumeration would exceed the configured element or root budget."""


class InvariantViolation(RGroupsError):
    """An internal consistency check failed.  These should never fire on
    valid data; if one does it falsifies a structural fact the engine
    relies on and the run must not be trusted."""

    exit_code = 4

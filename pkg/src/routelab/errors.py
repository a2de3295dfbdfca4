"""Shared exception types.

CapExceeded marks a refusal on a configured size cap (exit code 2 in the
CLI); InvariantViolation marks bad input or a broken internal guarantee
(exit code 1).  Exact solvers refuse instead of silently approximating.
"""


class CapExceeded(Exception):
    """An operation refused to run because a size cap would be exceeded."""


class InvariantViolation(Exception):
    """Input or internal state violates a documented invariant."""


class LengthOverflow(InvariantViolation):
    """An edge length left the unsigned 64-bit range."""

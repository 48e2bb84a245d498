"""Exception hierarchy shared across the package."""


class WAlgebraError(Exception):
    """Base class for all package errors."""


class InvalidInput(WAlgebraError):
    """Caller passed data outside an operation's domain."""


class StructureValidationError(WAlgebraError):
    """A structural axiom (antisymmetry, Jacobi, invariance, ...) failed.

    The message names the offending basis triple or field.
    """


class InternalConsistencyError(WAlgebraError):
    """A mathematically guaranteed identity failed at runtime.

    Raising this signals an implementation bug, never bad user input.
    """


class FormPairingError(WAlgebraError):
    """A bilinear pairing that must be nondegenerate turned out singular."""


class NotAMemberError(WAlgebraError):
    """Element required to lie in the invariant subalgebra does not."""

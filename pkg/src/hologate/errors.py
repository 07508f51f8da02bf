"""Exception types shared across the package."""


class HologateError(Exception):
    """Base class for all package-specific errors."""


class InvalidGeometry(HologateError, ValueError):
    """Cone or mode parameters outside their legal ranges."""


class WireOutOfRange(HologateError, IndexError):
    """A gate references a wire outside the circuit width."""


class MalformedCircuit(HologateError, ValueError):
    """Circuit structure violates ordering or measurement rules."""


class DimensionMismatch(HologateError, ValueError):
    """Operands have incompatible dimensions."""


class NotUnitary(HologateError, ValueError):
    """A matrix required to be unitary is not."""


class NotSignedPermutation(HologateError, ValueError):
    """Stacked compilation requires a signed/phased permutation matrix."""


class UnknownMode(HologateError, KeyError):
    """A plane-wave mode is not part of the relevant mode set."""


class NonuniformCoupling(HologateError, ValueError):
    """Exposure coupling strengths differ where uniformity is required."""


class StepUnderflow(HologateError, RuntimeError):
    """The integrator step bound collapsed to an unusable size."""

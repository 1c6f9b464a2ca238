"""Exception hierarchy shared by all modules."""

import os

#: Hard ceiling on tensor rank / polynomial degree.
HARD_MAX_ORDER = 16


def max_order():
    """Current rank cap; ``MULTIPOLE_MAX_ORDER`` may lower (never raise) it."""
    raw = os.environ.get("MULTIPOLE_MAX_ORDER")
    if not raw:
        return HARD_MAX_ORDER
    try:
        value = int(raw)
    except ValueError:
        return HARD_MAX_ORDER
    return max(0, min(value, HARD_MAX_ORDER))


class MultipoleError(Exception):
    """Base class for library errors."""


class OrderOutOfRange(MultipoleError, ValueError):
    """Requested order, degree or rank exceeds the supported cap."""


class FoldTooLarge(MultipoleError, ValueError):
    pass


class RankMismatch(MultipoleError, ValueError):
    pass


class SingularOrigin(MultipoleError, ZeroDivisionError):
    pass


class NotTraceless(MultipoleError, ValueError):
    pass


class ZeroTensor(MultipoleError, ValueError):
    pass


class PairingFailure(MultipoleError, ArithmeticError):
    """Roots of the Sylvester polynomial could not be matched in antipodal pairs."""


class BandLimitTooHigh(MultipoleError, ValueError):
    pass


class NonOrthonormalFrame(MultipoleError, ValueError):
    pass


class AntipodalDegeneracy(MultipoleError, ValueError):
    pass


class ZeroState(MultipoleError, ValueError):
    pass


class OrderExceedsSpin(MultipoleError, ValueError):
    """An observable carries a harmonic order above 2J."""


class DimensionMismatch(MultipoleError, ValueError):
    pass


class NotHermitian(MultipoleError, ValueError):
    pass


class SchemaError(MultipoleError, ValueError):
    """Malformed JSON document."""

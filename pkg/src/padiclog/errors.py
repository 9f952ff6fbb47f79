"""Exception hierarchy.

Every failure mode that a caller can reasonably branch on gets its own
class.  CLI exit codes: InvalidInput-flavored errors map to 2,
PrecisionExhausted to 3, and CheckFailure subclasses to 1.
"""

from __future__ import annotations


class PadicError(Exception):
    """Base class for all library errors."""


class InvalidInput(PadicError):
    """Caller supplied data outside the supported range."""


class EvenPrime(InvalidInput):
    """p = 2 needs a separate treatment of the cyclotomic character."""


class OrdinaryForm(InvalidInput):
    """The Hecke polynomial has a unit root; the slope-zero theory applies."""


class EqualRoots(InvalidInput):
    """Hecke discriminant is zero; the pair of roots degenerates."""


class RootsNotInField(InvalidInput):
    """The supplied field does not split a Hecke polynomial."""


class UnsupportedField(InvalidInput):
    """Field construction outside the implemented catalogue."""


class ConductorExceedsLevel(InvalidInput):
    """Character conductor is too large for the requested level data."""


class LevelMismatch(InvalidInput):
    """Two finite-level objects live at incompatible levels."""


class NotPsiZero(PadicError):
    """An element expected in the psi = 0 part has trace components."""


class PrecisionExhausted(PadicError):
    """A computation cannot certify the requested number of digits."""


class CheckFailure(PadicError):
    """A verification predicate failed at the requested tolerance."""


class IntegralityViolation(CheckFailure):
    """An object expected to be integral has a negative-valuation entry."""


class DivisibilityFailure(CheckFailure):
    """A claimed polynomial divisibility leaves a large remainder."""


class CoherenceFailure(CheckFailure):
    """Finite-level truncations disagree where they must agree."""


class ImageMismatch(CheckFailure):
    """A computed image ideal disagrees with its independent oracle."""

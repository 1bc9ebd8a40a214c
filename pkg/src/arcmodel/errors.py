"""Exception taxonomy shared by all arcmodel modules.

Everything derives from ArcModelError so callers (and the CLI) can map
library failures to exit codes without matching on message strings.
"""


class ArcModelError(Exception):
    """Base class for all arcmodel errors."""


class RankMismatch(ArcModelError):
    """Vectors of different lengths were mixed in one computation."""


class ZeroVector(ArcModelError):
    """A nonzero lattice vector was required."""


class NotPointed(ArcModelError):
    """The ray set spans a line, so it is not a strongly convex cone."""


class NotFullDimensional(ArcModelError):
    """Operation needs a full-dimensional cone (dual would not be pointed)."""


class NotInCone(ArcModelError):
    """A lattice point was expected to lie in the cone but does not."""


class NoUnimodularSubset(ArcModelError):
    """No size-d subset of the generators has determinant +-1."""


class NotARelation(ArcModelError):
    """The two sides of a claimed exponent relation pair differently."""


class MNotInSemigroup(ArcModelError):
    """An exponent of a semigroup-algebra element lies outside the dual cone."""


class TruncationMismatch(ArcModelError):
    """Truncated series of different lengths were combined."""


class NonUnitIntoInvertible(ArcModelError):
    """Substitution target for an invertible variable is not a unit monomial."""


class LaurentInput(ArcModelError):
    """A polynomial-only routine received negative exponents."""


class LeadingTermMismatch(ArcModelError):
    """The top t-coefficient of a substituted relation failed to cancel."""


class HypothesisViolation(ArcModelError):
    """A structural hypothesis of the lifting setup failed.

    ``clause`` names which one ('A1', 'A2', 'C', 'linearity', ...).
    """

    def __init__(self, clause: str, message: str = ""):
        self.clause = clause
        super().__init__(f"hypothesis {clause} violated" + (f": {message}" if message else ""))


class NonMonomialDivision(ArcModelError):
    """A division step needed a non-monomial inverse (not representable)."""


class DepthExhausted(ArcModelError):
    """The equation window of the system is too small for the requested order."""


class OutOfWindow(ArcModelError):
    """A jet coefficient outside the computed window was requested."""


class NotRegular(ArcModelError):
    """The series is 0 modulo the coefficient ideal up to its truncation."""


class TruncationTooSmall(ArcModelError):
    """t-truncation too small for a Weierstrass step at this order."""


class VerificationFailed(ArcModelError):
    """A verification pass (comparison or internal re-check) failed."""

"""Exception types shared across the package.

Every operation-level failure mode has its own class so callers (and the
CLI report machinery) can match on type rather than message text.
"""


class SharpflatError(Exception):
    """Base class for all package errors."""


class ConfigError(SharpflatError):
    """Invalid run or context configuration."""


class RepeatedRoot(ConfigError):
    """The Hecke polynomial has a repeated root (alpha = beta)."""


class OrdinaryInput(ConfigError):
    """a_p is a p-adic unit; this machinery needs the non-ordinary case."""


class PrecisionTooLow(ConfigError):
    """Requested precision is too small for the weight."""


class ZeroResidue(SharpflatError):
    """Teichmueller representative of 0 requested."""


class NotPrincipalUnit(SharpflatError):
    """p-adic logarithm input is not congruent to 1 mod p."""


class CapTooSmall(SharpflatError):
    """An exact polynomial does not fit in the requested degree cap."""


class NotDivisible(SharpflatError):
    """Exact polynomial division left a non-negligible remainder."""

    def __init__(self, message, residual_val=None):
        super().__init__(message)
        self.residual_val = residual_val


class ModuliNotCoprime(SharpflatError):
    """CRT moduli could not be inverted against each other at precision."""


class CongruenceFailure(SharpflatError):
    """A sequence violated its required congruence at some level."""

    def __init__(self, level, message=None):
        super().__init__(message or f"congruence fails at level {level}")
        self.level = level


class NormBlowup(SharpflatError):
    """Norm condition of a limit construction fails numerically."""


class PrecisionExhausted(SharpflatError):
    """Accumulated denominators/losses exceeded the working precision."""


class SingularQ(SharpflatError):
    """v(alpha - beta) too large to invert Q at working precision."""


class DeterminantMismatch(SharpflatError):
    """det C_n does not match the expected gadget product."""


class GrowthViolation(SharpflatError):
    """A row norm bound fails to stay uniform across levels."""

    def __init__(self, row, level, message=None):
        super().__init__(message or f"growth bound fails on row {row} at level {level}")
        self.row = row
        self.level = level


class IncompatibleInput(SharpflatError):
    """Eigenpair fails the compatibility (adjugate divisibility) criterion."""

    def __init__(self, witness, message=None):
        super().__init__(message or f"incompatible input: {witness}")
        self.witness = witness


class InconsistentLevels(SharpflatError):
    """Adjacent levels of a provider disagree modulo the expected block."""

    def __init__(self, level, message=None):
        super().__init__(message or f"levels {level - 1} and {level} are inconsistent")
        self.level = level


class DenominatorGrowth(SharpflatError):
    """Measured denominator exponent grows with the level."""


class DegenerateFactor(SharpflatError):
    """An Euler-type factor vanishes at working precision."""


class WrongLabel(SharpflatError):
    """Two-variable operation applied to a grid with the wrong variable labels."""


class NonvanishingOnAcLine(SharpflatError):
    """Derived extraction requires vanishing on the anticyclotomic line."""


class IOFormatError(SharpflatError):
    """Malformed JSON payload for one of the interchange schemas."""

"""Exception types shared across the package.

Split in two tiers: input/usage problems (bad generators, unsupported
moduli) and hypothesis/certification failures (Runge condition false,
precision exhausted).  The CLI maps the first tier to exit code 2 and the
second to exit code 1.
"""

from __future__ import annotations


class RungemodError(Exception):
    """Base class for all package errors."""


# --- input / usage tier ---------------------------------------------------

class ModulusMismatch(RungemodError):
    """Operands defined over different moduli."""


class NonInvertibleGenerator(RungemodError):
    """A generator matrix has gcd(det, N) != 1."""


class UnsupportedModulus(RungemodError):
    """Modulus outside the enumerable range, or a preset needs an odd prime base."""


# --- hypothesis / certification tier --------------------------------------

class NotDefinedOverQ(RungemodError):
    """det(G) is a proper subgroup of (Z/N)^*, so the rational orbit model does not apply."""


class NotIntegral(RungemodError):
    """An order that must be an integer came out with a nontrivial denominator."""


class RankDeficient(RungemodError):
    """Matrix rank is smaller than its row count."""


class BoundViolated(RungemodError):
    """An internally guaranteed inequality failed; indicates a bug, never user error."""


class RungeConditionFailed(RungemodError):
    """The orbit count does not exceed |S|, or Sigma is larger than |S|."""


class SigmaNotProper(RungemodError):
    """Sigma is empty, not a subset of the orbit set, or equal to all of it."""


class HypothesisFailed(RungemodError):
    """A theorem's stated hypothesis does not hold for the given input."""


class DegenerateJ(RungemodError):
    """j in {0, 1728}: the twist equation and conductor bound are undefined there."""


class NotInPlusRegion(RungemodError):
    """|j| <= 2500 cannot be excluded, so no cusp neighbourhood contains the point."""


class PrecisionExhausted(RungemodError):
    """Escalation hit the precision cap without reaching a decision."""


class Indeterminate(RungemodError):
    """Ball widths are too large to decide a comparison at the current precision."""

"""Exact rationals and power-of-two scale arithmetic.

Every real handled by the package is a :class:`fractions.Fraction`.  Scale
factors are always powers of two and are stored by exponent, so scaling a
rational by a factor is a left shift of its numerator followed by one integer
floor division.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExactReal",
    "ScaleFactor",
    "DomainError",
    "EqualValuesError",
    "ParseError",
    "exp2_ceil",
    "floor_scale",
    "floor_shift",
    "separating_level",
    "separating_exponent",
    "match_at_level",
    "parse_real",
]

#: Arbitrary-precision rational.  Always stored in lowest terms with a
#: positive denominator; every arithmetic operation on it is exact.
ExactReal = Fraction


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class EqualValuesError(ValueError):
    """Two values that must differ are equal."""


class ParseError(ValueError):
    """A textual value could not be parsed into an exact rational."""


@dataclass(frozen=True, order=True)
class ScaleFactor:
    """The power of two ``2**log2``."""

    log2: int

    def __post_init__(self):
        if self.log2 < 0:
            raise DomainError(f"scale exponent must be nonnegative, got {self.log2}")

    @property
    def value(self) -> int:
        return 1 << self.log2

    def __int__(self) -> int:
        return 1 << self.log2

    def __repr__(self) -> str:
        return f"ScaleFactor(2**{self.log2})"


def exp2_ceil(m: int) -> ScaleFactor:
    """Smallest power of two that is >= ``m``.

    Computed from the bit length of ``m``; no floating point is involved.
    """
    if m <= 0:
        raise DomainError(f"exp2_ceil needs m >= 1, got {m}")
    return ScaleFactor((m - 1).bit_length())


def _check_unit(r: Fraction) -> None:
    if not 0 < r < 1:
        raise DomainError(f"value {r} is not strictly inside (0, 1)")


def floor_shift(r: Fraction, log2: int) -> int:
    """``floor(r * 2**log2)`` without domain checks (hot path)."""
    return (r.numerator << log2) // r.denominator


def floor_scale(r: Fraction, f: ScaleFactor) -> int:
    """``floor(r * f)`` for ``0 < r < 1``; the result lies in ``[0, f - 1]``."""
    _check_unit(r)
    return floor_shift(r, f.log2)


def separating_exponent(r1: Fraction, r2: Fraction) -> int:
    """Exponent of :func:`separating_level`, for callers that work with shifts."""
    d = abs(r1 - r2)
    if d == 0:
        raise EqualValuesError(f"values are equal: {r1}")
    # floor(1/d) >= 1 because |r1 - r2| < 1 for values in (0, 1)
    inv = d.denominator // d.numerator
    return exp2_ceil(inv).log2 + 1


def separating_level(r1: Fraction, r2: Fraction) -> ScaleFactor:
    """The factor ``2 * exp2_ceil(floor(1 / |r1 - r2|))``.

    Scaling both values by this factor and flooring always gives two different
    integers.
    """
    _check_unit(r1)
    _check_unit(r2)
    return ScaleFactor(separating_exponent(r1, r2))


def match_at_level(r1: Fraction, r2: Fraction, l: ScaleFactor) -> bool:
    """True when ``r1`` and ``r2`` floor to the same integer at factor ``l``."""
    return floor_scale(r1, l) == floor_scale(r2, l)


_RATIO = re.compile(r"([+-]?\d+)/(\d+)")
_DECIMAL = re.compile(r"([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?")


def parse_real(text: str) -> Fraction:
    """Parse ``"p/q"`` or a decimal string such as ``"-0.125"`` or ``"3e-4"``.

    Decimal parsing is exact: ``k`` fractional digits give a denominator
    dividing ``10**k``.
    """
    s = text.strip()
    m = _RATIO.fullmatch(s)
    if m:
        q = int(m.group(2))
        if q == 0:
            raise ParseError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), q)
    m = _DECIMAL.fullmatch(s)
    if not m or not (m.group(2) or m.group(3)):
        raise ParseError(f"not a rational number: {text!r}")
    sign, whole, frac, exp = m.groups()
    frac = frac or ""
    value = Fraction(int((whole or "0") + frac), 10 ** len(frac))
    if exp:
        e = int(exp)
        value = value * 10**e if e >= 0 else value / 10**-e
    return -value if sign == "-" else value

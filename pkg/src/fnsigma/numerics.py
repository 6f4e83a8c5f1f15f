"""Configurable-precision arithmetic built on independent mpmath contexts.

Every evaluation takes a :class:`PrecisionCtx` explicitly; nothing touches
mpmath's global ``mp`` object, so two computations at different precisions
can run side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

import mpmath

from .params import PiAngle

MIN_DIGITS = 30
MAX_DIGITS = 1000
DEFAULT_DIGITS = 60

# Largest real exponent accepted by cexp_polar; well inside mpmath's range
# but large enough for anything a series at desk-scale |x| produces.
MAX_EXPONENT = 10**7


class PoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class PrecisionExhausted(ArithmeticError):
    """Cancellation consumed the working precision; retry with more digits."""

    def __init__(self, message: str, cancellation_digits: int = 0):
        super().__init__(message)
        self.cancellation_digits = cancellation_digits


@lru_cache(maxsize=None)
def _context(digits: int) -> mpmath.MPContext:
    mp = mpmath.MPContext()
    mp.dps = digits
    return mp


@dataclass(frozen=True)
class PrecisionCtx:
    """Decimal working precision shared by one computation."""

    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if not MIN_DIGITS <= self.digits <= MAX_DIGITS:
            raise ValueError(f"digits must be in [{MIN_DIGITS}, {MAX_DIGITS}], got {self.digits}")

    @property
    def mp(self) -> mpmath.MPContext:
        return _context(self.digits)

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.digits)

    def with_digits(self, digits: int) -> "PrecisionCtx":
        return PrecisionCtx(min(max(digits, MIN_DIGITS), MAX_DIGITS))

    def real(self, value) -> mpmath.mpf:
        """Convert ``value`` (Fraction, int, decimal string, mpf) at this precision."""
        mp = self.mp
        if isinstance(value, Fraction):
            return mp.mpf(value.numerator) / value.denominator
        return mp.mpf(value)


class PolarPoint(NamedTuple):
    """``modulus * exp(i * angle)`` with the angle kept exact."""

    modulus: object
    angle: PiAngle


Angle = Union[PiAngle, object]


def gamma(x, ctx: PrecisionCtx):
    """Gamma function of a real argument; reflection is applied for x < 1/2."""
    mp = ctx.mp
    x = ctx.real(x)
    if x <= 0 and x == mp.floor(x):
        raise PoleError(f"gamma has a pole at {mp.nstr(x, 10)}")
    return mp.gamma(x)


def recip_gamma(x, ctx: PrecisionCtx):
    """1/Gamma(x), exactly zero at the poles of Gamma."""
    return ctx.mp.rgamma(ctx.real(x))


def cospi(q: Fraction, ctx: PrecisionCtx):
    """cos(q pi) with exact reduction; exact at multiples of pi/2."""
    mp = ctx.mp
    q = q % 2
    if q.denominator == 1:
        return mp.mpf(1) if q == 0 else mp.mpf(-1)
    if q.denominator == 2:
        return mp.zero
    return mp.cospi(mp.mpf(q.numerator) / q.denominator)


def sinpi(q: Fraction, ctx: PrecisionCtx):
    """sin(q pi) with exact reduction; exact at multiples of pi/2."""
    mp = ctx.mp
    q = q % 2
    if q.denominator == 1:
        return mp.zero
    if q.denominator == 2:
        return mp.mpf(1) if q == Fraction(1, 2) else mp.mpf(-1)
    return mp.sinpi(mp.mpf(q.numerator) / q.denominator)


def expi(theta: PiAngle, ctx: PrecisionCtx):
    """exp(i theta) for an exact angle."""
    return ctx.mp.mpc(cospi(theta.coeff, ctx), sinpi(theta.coeff, ctx))


def cos_sin(theta: Angle, ctx: PrecisionCtx):
    if isinstance(theta, PiAngle):
        return cospi(theta.coeff, ctx), sinpi(theta.coeff, ctx)
    mp = ctx.mp
    theta = ctx.real(theta)
    return mp.cos(theta), mp.sin(theta)


def cexp_polar(r, theta: Angle, ctx: PrecisionCtx):
    """exp(r e^{i theta}) for real ``r``.

    Raises OverflowError when ``r cos(theta)`` exceeds ``MAX_EXPONENT``.
    """
    mp = ctx.mp
    r = ctx.real(r)
    if not mp.isfinite(r):
        raise DomainError("r must be finite")
    c, s = cos_sin(theta, ctx)
    re = r * c
    if abs(re) > MAX_EXPONENT:
        raise OverflowError(f"exponent {mp.nstr(re, 8)} outside the supported range")
    im = r * s
    return mp.exp(re) * mp.mpc(mp.cos(im), mp.sin(im))


def as_complex(z, ctx: PrecisionCtx):
    """Convert a PolarPoint or any scalar to an mpc."""
    mp = ctx.mp
    if isinstance(z, PolarPoint):
        return ctx.real(z.modulus) * expi(z.angle, ctx)
    if isinstance(z, (Fraction, int)):
        return mp.mpc(ctx.real(z))
    return mp.mpc(z)


def significant_match(a, b, ctx: PrecisionCtx):
    """Number of agreeing significant digits between two values (capped at ctx.digits)."""
    mp = ctx.mp
    scale = max(abs(a), abs(b))
    if scale == 0:
        return ctx.digits
    diff = abs(a - b)
    if diff == 0:
        return ctx.digits
    return int(min(ctx.digits, mp.floor(-mp.log10(diff / scale))))

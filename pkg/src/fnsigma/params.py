"""Parameters, exact angle arithmetic and regime thresholds.

All angles that decide which expansion applies are rational multiples of
pi, so they are stored as :class:`PiAngle` (an exact ``Fraction`` times pi)
and compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Union

RationalLike = Union[Fraction, int, str]

INF = math.inf


class ParameterError(ValueError):
    """Raised for invalid (sigma, mu, n) inputs."""


def to_fraction(value: RationalLike, name: str = "value") -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts ``Fraction``, ``int`` and strings such as ``"5/9"``, ``"3"`` or
    ``"0.75"``. Floats are refused: the regime boundaries are exact angle
    equalities and a float could land on the wrong side of one.
    """
    if isinstance(value, bool):
        raise ParameterError(f"{name}: booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ParameterError(f"{name}: pass an exact rational like '3/4', not the float {value!r}")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"{name}: cannot parse {value!r} as a rational") from exc
    raise ParameterError(f"{name}: unsupported type {type(value).__name__}")


@total_ordering
@dataclass(frozen=True)
class PiAngle:
    """The angle ``coeff * pi`` with ``coeff`` an exact rational."""

    coeff: Fraction

    def __post_init__(self):
        if not isinstance(self.coeff, Fraction):
            object.__setattr__(self, "coeff", to_fraction(self.coeff, "coeff"))

    @classmethod
    def of(cls, value: RationalLike) -> "PiAngle":
        return cls(to_fraction(value))

    def __add__(self, other: "PiAngle") -> "PiAngle":
        return PiAngle(self.coeff + other.coeff)

    def __sub__(self, other: "PiAngle") -> "PiAngle":
        return PiAngle(self.coeff - other.coeff)

    def __neg__(self) -> "PiAngle":
        return PiAngle(-self.coeff)

    def __abs__(self) -> "PiAngle":
        return PiAngle(abs(self.coeff))

    def __mul__(self, k: RationalLike) -> "PiAngle":
        return PiAngle(self.coeff * to_fraction(k, "factor"))

    __rmul__ = __mul__

    def __truediv__(self, k: RationalLike) -> "PiAngle":
        return PiAngle(self.coeff / to_fraction(k, "divisor"))

    def __lt__(self, other: "PiAngle") -> bool:
        return self.coeff < other.coeff

    @property
    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def reduced(self) -> "PiAngle":
        """Equivalent angle with coefficient in (-1, 1]."""
        c = self.coeff % 2
        if c > 1:
            c -= 2
        return PiAngle(c)

    def __float__(self) -> float:
        return float(self.coeff) * math.pi

    def __str__(self) -> str:
        return f"{self.coeff}*pi" if self.coeff else "0"


@dataclass(frozen=True)
class Parameters:
    """User inputs: ``0 < sigma < 1``, ``mu > 0``, integer ``n >= 1``."""

    sigma: Fraction
    mu: Fraction
    n: int

    def __post_init__(self):
        sigma = to_fraction(self.sigma, "sigma")
        mu = to_fraction(self.mu, "mu")
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise ParameterError(f"n must be an integer, got {self.n!r}")
        if not 0 < sigma < 1:
            raise ParameterError(f"sigma must lie in (0, 1), got {sigma}")
        if mu <= 0:
            raise ParameterError(f"mu must be positive, got {mu}")
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mu", mu)


def omega_list(n: int) -> tuple[tuple[PiAngle, ...], tuple[PiAngle, ...]]:
    """Rotation angles ``(n - 2r - 1) pi / (2n)``, full list and the positive half.

    The reduced list keeps the first ``floor(n/2)`` entries, all of which
    are strictly positive.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    full = tuple(PiAngle(Fraction(n - 2 * r - 1, 2 * n)) for r in range(n))
    return full, full[: n // 2]


@dataclass(frozen=True)
class Thresholds:
    """``n0 = 1/(2-3 sigma)``, ``n_star = 1/(2 sigma - 1)``, ``n_exp = 1/sigma``.

    ``n0`` is ``INF`` for sigma >= 2/3 and ``n_star`` is ``INF`` for
    sigma <= 1/2, where the corresponding condition can never be met.
    """

    n0: Fraction | float
    n_star: Fraction | float
    n_exp: Fraction


def thresholds(sigma: RationalLike) -> Thresholds:
    s = to_fraction(sigma, "sigma")
    if not 0 < s < 1:
        raise ParameterError(f"sigma must lie in (0, 1), got {s}")
    n0 = 1 / (2 - 3 * s) if s < Fraction(2, 3) else INF
    n_star = 1 / (2 * s - 1) if s > Fraction(1, 2) else INF
    return Thresholds(n0=n0, n_star=n_star, n_exp=1 / s)


@dataclass(frozen=True)
class DerivedParams:
    params: Parameters
    kappa: Fraction
    delta: Fraction
    vartheta: Fraction
    omega_full: tuple[PiAngle, ...]
    omega_reduced: tuple[PiAngle, ...]
    delta_n: int
    thresholds: Thresholds = field(repr=False)

    @property
    def sigma(self) -> Fraction:
        return self.params.sigma

    @property
    def mu(self) -> Fraction:
        return self.params.mu

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def N(self) -> int:
        return len(self.omega_reduced)

    @property
    def n0(self):
        return self.thresholds.n0

    @property
    def n_star(self):
        return self.thresholds.n_star

    @property
    def n_exp(self) -> Fraction:
        return self.thresholds.n_exp

    def h_log(self, ctx):
        """``log h = sigma log sigma`` at the precision of ``ctx``."""
        mp = ctx.mp
        s = mp.mpf(self.sigma.numerator) / self.sigma.denominator
        return s * mp.log(s)

    def K(self, k: int) -> Fraction:
        """Exponent ``(k + delta) / sigma`` of the algebraic series."""
        return (k + self.delta) / self.sigma


def derive(p: Parameters) -> DerivedParams:
    full, reduced = omega_list(p.n)
    delta = 1 - p.mu
    return DerivedParams(
        params=p,
        kappa=1 - p.sigma,
        delta=delta,
        vartheta=delta - Fraction(1, 2),
        omega_full=full,
        omega_reduced=reduced,
        delta_n=p.n % 2,
        thresholds=thresholds(p.sigma),
    )

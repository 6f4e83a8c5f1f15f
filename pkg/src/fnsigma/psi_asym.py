"""Large-|z| asymptotics of Psi(z) = sum z**k Gamma(sigma k + delta) / k!.

Psi(z) ~ E(z) + H(z e^{-/+ pi i}) in |arg z| <= pi kappa / 2 and
H(z e^{-/+ pi i}) outside it, where

    E(z) = Z**vartheta e**Z sum_j A_j Z**-j,     Z = kappa (h z)**(1/kappa),
    H(z) = (1/sigma) sum_k (-1)**k / k! Gamma((k+delta)/sigma) z**-((k+delta)/sigma).

Points are passed as :class:`~fnsigma.numerics.PolarPoint` so that
``arg Z = arg z / kappa`` is formed exactly, without reducing to the
principal branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Union

from .numerics import (
    DomainError,
    PolarPoint,
    PrecisionCtx,
    cexp_polar,
    expi,
)
from .params import PiAngle, to_fraction

JMAX = 3
DEFAULT_CAP = 100


class Sector(str, Enum):
    EXP_LARGE = "ExpLarge"
    OSC_BOUNDARY = "OscBoundary"
    EXP_SMALL_PRESENT = "ExpSmallPresent"
    ALGEBRAIC_ONLY = "AlgebraicOnly"


@dataclass(frozen=True)
class SectorClass:
    tag: Sector
    branch_sign: int  # +1: H(z e^{-pi i}) for arg z > 0; -1: H(z e^{+pi i}) otherwise
    on_stokes_line: bool = False


@dataclass(frozen=True)
class Fixed:
    """Sum the algebraic series for k = 0 .. kmax."""

    kmax: int


@dataclass(frozen=True)
class Optimal:
    """Stop just before the smallest term, looking at most ``cap`` terms ahead."""

    cap: int = DEFAULT_CAP


TruncPolicy = Union[Fixed, Optimal]


def parse_trunc(text: str) -> TruncPolicy:
    """``"opt"`` or ``"opt:<cap>"`` for optimal truncation, an integer for Fixed."""
    text = text.strip().lower()
    if text == "opt":
        return Optimal()
    if text.startswith("opt:"):
        return Optimal(int(text[4:]))
    kmax = int(text)
    if kmax < 0:
        raise ValueError("truncation index must be >= 0")
    return Fixed(kmax)


def _poly(coeffs, s):
    return sum(c * s**i for i, c in enumerate(coeffs))


def normalized_coeffs(sigma, delta) -> tuple[Fraction, ...]:
    """Exact c_0..c_3 (c_j = A_j / A_0) for rational sigma and delta."""
    s = to_fraction(sigma, "sigma")
    d = to_fraction(delta, "delta")
    c1 = (2 + 7 * s + 2 * s**2 - 12 * d * (1 + s) + 12 * d**2) / (24 * s)
    c2 = (
        _poly([4, 172, 417, 172, 4], s)
        - 24 * d * _poly([6, 41, 41, 6], s)
        + 120 * d**2 * _poly([4, 11, 4], s)
        - 480 * d**3 * (1 + s)
        + 144 * d**4
    ) / (1152 * s**2)
    c3 = (
        _poly([-1112, 9636, 163734, 336347, 163734, 9636, -1112], s)
        - d * _poly([3600, 220320, 929700, 929700, 220320, 3600], s)
        + d**2 * _poly([65520, 715680, 1440180, 715680, 65520], s)
        - d**3 * _poly([161280, 816480, 816480, 161280], s)
        + d**4 * _poly([151200, 378000, 151200], s)
        - 60480 * d**5 * (1 + s)
        + 8640 * d**6
    ) / (414720 * s**3)
    return (Fraction(1), c1, c2, c3)


@dataclass(frozen=True)
class AsymCoeffs:
    A: tuple
    c: tuple[Fraction, ...]


def a0(sigma, delta, ctx: PrecisionCtx):
    """A_0 = (2 pi / kappa)**(1/2) (sigma / kappa)**vartheta."""
    s = to_fraction(sigma, "sigma")
    d = to_fraction(delta, "delta")
    mp = ctx.mp
    kappa = 1 - s
    vartheta = d - Fraction(1, 2)
    return mp.sqrt(2 * mp.pi / ctx.real(kappa)) * mp.power(ctx.real(s / kappa), ctx.real(vartheta))


def coeffs(sigma, delta, ctx: PrecisionCtx) -> AsymCoeffs:
    c = normalized_coeffs(sigma, delta)
    base = a0(sigma, delta, ctx)
    return AsymCoeffs(tuple(base * ctx.real(cj) for cj in c), c)


class BigZ(NamedTuple):
    """Z = modulus * e^{i angle}, angle = arg(z) / kappa exactly."""

    modulus: object
    angle: PiAngle


def _polar(z, ctx: PrecisionCtx) -> PolarPoint:
    if isinstance(z, PolarPoint):
        return PolarPoint(ctx.real(z.modulus), z.angle)
    mp = ctx.mp
    z = mp.mpc(z)
    if z.imag == 0 and z.real > 0:
        return PolarPoint(z.real, PiAngle(Fraction(0)))
    if z.imag == 0 and z.real < 0:
        return PolarPoint(-z.real, PiAngle(Fraction(1)))
    raise DomainError(
        "complex z off the real axis must be given as PolarPoint(modulus, PiAngle)"
    )


def big_z_polar(sigma, z, ctx: PrecisionCtx) -> BigZ:
    s = to_fraction(sigma, "sigma")
    pz = _polar(z, ctx)
    if pz.modulus == 0:
        raise DomainError("Z is undefined at z = 0")
    mp = ctx.mp
    kappa = 1 - s
    sr = ctx.real(s)
    # kappa (h r)**(1/kappa) with log h = sigma log sigma
    log_mod = (sr * mp.log(sr) + mp.log(pz.modulus)) / ctx.real(kappa)
    return BigZ(ctx.real(kappa) * mp.exp(log_mod), pz.angle / kappa)


def big_z(sigma, z, ctx: PrecisionCtx):
    """Z = kappa (h z)**(1/kappa) as a complex number."""
    bz = big_z_polar(sigma, z, ctx)
    return bz.modulus * expi(bz.angle, ctx)


def e_expansion(sigma, delta, z, jmax: int, ctx: PrecisionCtx):
    """Partial sum E(z) through j = jmax (jmax <= 3)."""
    if not 0 <= jmax <= JMAX:
        raise ValueError(f"jmax must be in 0..{JMAX}")
    d = to_fraction(delta, "delta")
    vartheta = d - Fraction(1, 2)
    bz = big_z_polar(sigma, z, ctx)
    mp = ctx.mp
    A = coeffs(sigma, delta, ctx).A
    zinv = expi(-bz.angle, ctx) / bz.modulus
    s = mp.mpc(0)
    zp = mp.mpc(1)
    for j in range(jmax + 1):
        s += A[j] * zp
        zp *= zinv
    z_theta = mp.power(bz.modulus, ctx.real(vartheta)) * expi(bz.angle * vartheta, ctx)
    return z_theta * cexp_polar(bz.modulus, bz.angle, ctx) * s


class HTerm(NamedTuple):
    k: int
    K: Fraction
    value: object
    envelope: object


def h_terms(sigma, delta, z, branch_sign: int, ctx: PrecisionCtx, count: int) -> list[HTerm]:
    """The first ``count`` terms of H(z e^{-branch_sign pi i}).

    A term whose Gamma((k+delta)/sigma) sits on a pole is returned as 0
    (the matching Psi term is dropped the same way in the series).
    """
    if branch_sign not in (1, -1):
        raise ValueError("branch_sign must be +1 or -1")
    s = to_fraction(sigma, "sigma")
    d = to_fraction(delta, "delta")
    pz = _polar(z, ctx)
    if pz.modulus == 0:
        raise DomainError("H is undefined at z = 0")
    mp = ctx.mp
    arg = pz.angle - PiAngle(Fraction(branch_sign))
    log_r = mp.log(pz.modulus)
    out = []
    fact = mp.one
    for k in range(count):
        if k:
            fact *= k
        K = (k + d) / s
        if K <= 0 and K.denominator == 1:
            out.append(HTerm(k, K, mp.mpc(0), mp.zero))
            continue
        g = mp.gamma(ctx.real(K))
        env = abs(g) * mp.exp(-ctx.real(K) * log_r) / fact
        value = (-1) ** k * g / fact * mp.exp(-ctx.real(K) * log_r) * expi(-arg * K, ctx)
        out.append(HTerm(k, K, value / ctx.real(s), env / ctx.real(s)))
    return out


def optimal_index(envelopes, cap: int) -> int:
    """Number of terms to keep: everything before the smallest envelope.

    Zero envelopes (pole terms) are ignored. Ties go to the earlier index.
    """
    best = None
    best_k = len(envelopes)
    for k, e in enumerate(envelopes[: cap + 1]):
        if e == 0:
            continue
        if best is None or e < best:
            best, best_k = e, k
    return best_k


def truncate(terms, envelopes, trunc: TruncPolicy) -> int:
    if isinstance(trunc, Fixed):
        return min(trunc.kmax + 1, len(terms))
    return optimal_index(envelopes, trunc.cap)


def _needed(trunc: TruncPolicy) -> int:
    return trunc.kmax + 1 if isinstance(trunc, Fixed) else trunc.cap + 1


def h_expansion(sigma, delta, z, branch_sign: int, trunc: TruncPolicy, ctx: PrecisionCtx,
                with_terms: bool = False):
    """H(z e^{-branch_sign pi i}) truncated per ``trunc``."""
    terms = h_terms(sigma, delta, z, branch_sign, ctx, _needed(trunc))
    m = truncate(terms, [t.envelope for t in terms], trunc)
    total = ctx.mp.mpc(0)
    for t in terms[:m]:
        total += t.value
    if with_terms:
        return total, terms, m
    return total


def classify_sector(sigma, phi: PiAngle) -> SectorClass:
    """Exact position of the ray arg z = phi relative to pi kappa / 2 and pi kappa.

    ``phi`` is first reduced to (-pi, pi]; Psi is single-valued so only the
    ray matters.
    """
    s = to_fraction(sigma, "sigma")
    phi = phi.reduced()
    kappa = 1 - s
    a = abs(phi.coeff)
    half = kappa / 2
    if a < half:
        tag = Sector.EXP_LARGE
    elif a == half:
        tag = Sector.OSC_BOUNDARY
    elif a < kappa:
        tag = Sector.EXP_SMALL_PRESENT
    else:
        tag = Sector.ALGEBRAIC_ONLY
    # upper sign (e^{-pi i}) only for arg z > 0; the positive real axis takes the lower one
    branch = 1 if phi.coeff > 0 else -1
    return SectorClass(tag, branch, on_stokes_line=(phi.coeff == 0 or a == kappa))


def psi_asymptotic(sigma, delta, z, jmax: int, trunc: TruncPolicy, ctx: PrecisionCtx):
    """E(z) + H(z e^{-/+ pi i}) or H alone, by the sector of arg z."""
    pz = _polar(z, ctx)
    pz = PolarPoint(pz.modulus, pz.angle.reduced())
    cls = classify_sector(sigma, pz.angle)
    h = h_expansion(sigma, delta, pz, cls.branch_sign, trunc, ctx)
    if cls.tag in (Sector.EXP_LARGE, Sector.OSC_BOUNDARY):
        return e_expansion(sigma, delta, pz, jmax, ctx) + h
    return h

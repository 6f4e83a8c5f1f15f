"""Direct Taylor summation of the Wright function, Psi and F_{n,sigma}.

These sums are the reference values ("oracle") against which every
asymptotic expansion is checked, so nothing here switches to asymptotics.
Terms are summed at the context precision until ten consecutive terms fall
below ``10**-digits`` times the largest term seen. The largest term, not
the partial sum, sets the scale because the sums cancel heavily (for
instance F is O(1) at x = 8 while single terms reach 1e5 or more).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .numerics import (
    PrecisionCtx,
    PrecisionExhausted,
    as_complex,
    expi,
    sinpi,
)
from .params import Parameters, derive, to_fraction

STOP_RUN = 10


class SeriesDivergence(RuntimeError):
    """The hard term cap was hit before the stopping rule fired."""


@dataclass(frozen=True)
class SeriesResult:
    value: object
    terms_used: int
    max_partial_term: object
    cancellation_digits: int

    @property
    def real(self):
        return self.value.real

    def accurate_digits(self, ctx: PrecisionCtx) -> int:
        return ctx.digits - self.cancellation_digits


def term_cap(ctx: PrecisionCtx) -> int:
    return 10 * ctx.digits + 500


def cancellation(max_term, value, ctx: PrecisionCtx) -> int:
    mp = ctx.mp
    if value == 0 or max_term == 0:
        return 0
    return max(0, int(mp.floor(mp.log10(max_term / abs(value)))))


def sum_terms(terms: Iterable, ctx: PrecisionCtx, what: str = "series") -> SeriesResult:
    """Sum ``terms`` with the relative-to-max stopping rule."""
    mp = ctx.mp
    eps = ctx.eps
    total = mp.mpc(0)
    max_term = mp.zero
    run = 0
    cap = term_cap(ctx)
    used = 0
    for t in terms:
        used += 1
        total += t
        a = abs(t)
        if a > max_term:
            max_term = a
        if a <= eps * max_term:
            run += 1
            if run >= STOP_RUN:
                break
        else:
            run = 0
        if used >= cap:
            raise SeriesDivergence(
                f"{what}: no convergence within {cap} terms at {ctx.digits} digits"
            )
    result = SeriesResult(total, used, max_term, cancellation(max_term, total, ctx))
    check_precision(result, ctx, what)
    return result


def check_precision(result: SeriesResult, ctx: PrecisionCtx, what: str) -> None:
    if result.cancellation_digits > ctx.digits - 10:
        raise PrecisionExhausted(
            f"{what}: {result.cancellation_digits} digits lost to cancellation at "
            f"{ctx.digits}-digit precision",
            result.cancellation_digits,
        )


def _powers(z, ctx: PrecisionCtx) -> Iterator:
    """Yield z**k / k! for k = 0, 1, 2, ..."""
    p = ctx.mp.mpc(1)
    k = 0
    while True:
        yield p
        k += 1
        p = p * z / k


def phi_terms(sigma, mu, z, ctx: PrecisionCtx) -> Iterator:
    """Terms z**k / (k! Gamma(mu - sigma k)) of the Wright function."""
    sigma = to_fraction(sigma, "sigma")
    mu = to_fraction(mu, "mu")
    mp = ctx.mp
    z = as_complex(z, ctx)
    for k, p in enumerate(_powers(z, ctx)):
        yield p * mp.rgamma(ctx.real(mu - sigma * k))


def psi_terms(sigma, delta, z, ctx: PrecisionCtx) -> Iterator:
    """Terms z**k Gamma(sigma k + delta) / k!; a term sitting on a pole of Gamma is set to 0."""
    sigma = to_fraction(sigma, "sigma")
    delta = to_fraction(delta, "delta")
    mp = ctx.mp
    z = as_complex(z, ctx)
    for k, p in enumerate(_powers(z, ctx)):
        arg = sigma * k + delta
        if arg <= 0 and arg.denominator == 1:
            yield mp.mpc(0)
        else:
            yield p * mp.gamma(ctx.real(arg))


def _check_sigma(sigma) -> Fraction:
    sigma = to_fraction(sigma, "sigma")
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    return sigma


def phi(sigma, mu, z, ctx: PrecisionCtx) -> SeriesResult:
    """Wright function phi(-sigma, mu; z) by its Taylor series."""
    sigma = _check_sigma(sigma)
    return sum_terms(phi_terms(sigma, mu, z, ctx), ctx, "phi")


def psi(sigma, delta, z, ctx: PrecisionCtx) -> SeriesResult:
    """Psi(z) = sum z**k Gamma(sigma k + delta) / k!."""
    sigma = _check_sigma(sigma)
    return sum_terms(psi_terms(sigma, delta, z, ctx), ctx, "psi")


def sin_ratio(n: int, k: int) -> Fraction | None:
    """sin(n g)/sin(g) at g = (k+1) pi / (2n) when it is rational, else None.

    The ratio is rational exactly when sin(g) is 0 (removable singularity)
    or when sin(n g) is 0.
    """
    m, rem = divmod(k + 1, 2 * n)
    if rem == 0:
        return Fraction(n * (-1) ** (m * (n - 1)))
    if (k + 1) % 2 == 0:
        return Fraction(0)
    return None


def sin_ratio_value(n: int, k: int, ctx: PrecisionCtx):
    exact = sin_ratio(n, k)
    if exact is not None:
        return ctx.real(exact)
    numer = sinpi(Fraction(k + 1, 2), ctx)
    return numer / sinpi(Fraction(k + 1, 2 * n), ctx)


def f_direct_terms(p: Parameters, x, ctx: PrecisionCtx) -> Iterator:
    """Terms of the defining series of F_{n,sigma}(x; mu) for real x."""
    # the coefficient has period 4n in k
    coeffs = [sin_ratio_value(p.n, k, ctx) for k in range(4 * p.n)]
    for k, t in enumerate(phi_terms(p.sigma, p.mu, ctx.real(x), ctx)):
        yield coeffs[k % (4 * p.n)] * t


def f_direct(p: Parameters, x, ctx: PrecisionCtx) -> SeriesResult:
    """F_{n,sigma}(x; mu) summed from its defining series."""
    res = sum_terms(f_direct_terms(p, x, ctx), ctx, "f_direct")
    mp = ctx.mp
    return SeriesResult(mp.mpc(res.value.real, 0), res.terms_used, res.max_partial_term,
                        res.cancellation_digits)


def f_wright(p: Parameters, x, ctx: PrecisionCtx) -> SeriesResult:
    """F_{n,sigma}(x; mu) as a finite combination of Wright functions.

    ``2 Re sum_{r<N} e^{i w_r} phi(x e^{i w_r}) + Delta_n phi(x)``.
    """
    mp = ctx.mp
    dp = derive(p)
    x = ctx.real(x)
    total = mp.zero
    max_term = mp.zero
    used = 0
    for w in dp.omega_reduced:
        rot = expi(w, ctx)
        res = phi(p.sigma, p.mu, x * rot, ctx)
        total += 2 * (rot * res.value).real
        max_term = max(max_term, 2 * res.max_partial_term)
        used = max(used, res.terms_used)
    if dp.delta_n:
        res = phi(p.sigma, p.mu, x, ctx)
        total += res.value.real
        max_term = max(max_term, res.max_partial_term)
        used = max(used, res.terms_used)
    out = SeriesResult(mp.mpc(total, 0), used, max_term, cancellation(max_term, total, ctx))
    check_precision(out, ctx, "f_wright")
    return out


@dataclass(frozen=True)
class SeriesCost:
    """Rough size of a Wright-series evaluation at |x|.

    ``peak_index`` is where |term| peaks, about (h|x|)**(1/kappa);
    ``lost_digits`` is log10 of the peak term, about Z / ln 10 with
    Z = kappa (h|x|)**(1/kappa). An F of order one loses that many digits.
    """

    peak_index: float
    lost_digits: float

    def feasible(self, max_digits: int = 1000) -> bool:
        """True if the series fits under the term cap and digit cap with margin."""
        digits = min(max_digits, max(60, 2 * int(self.lost_digits) + 20))
        return self.lost_digits + 20 <= max_digits and 3 * self.peak_index + 50 <= 10 * digits + 500


def estimate_cost(sigma, x) -> SeriesCost:
    sigma = _check_sigma(sigma)
    kappa = 1 - float(sigma)
    hx = float(sigma) ** float(sigma) * abs(float(x))
    if hx == 0:
        return SeriesCost(0.0, 0.0)
    log_peak = math.log(hx) / kappa
    if log_peak > 700:
        return SeriesCost(math.inf, math.inf)
    peak = math.exp(log_peak)
    return SeriesCost(peak, kappa * peak / math.log(10))


def with_retry(fn, *args, ctx: PrecisionCtx, max_doublings: int = 5, **kwargs):
    """Call ``fn(*args, ctx=...)`` doubling the precision on failure.

    PrecisionExhausted and SeriesDivergence both trigger a retry (more
    digits also raise the term cap). Returns ``(result, ctx_used)``; the
    digits are capped at 1000.
    """
    attempt = ctx
    for i in range(max_doublings + 1):
        try:
            return fn(*args, ctx=attempt, **kwargs), attempt
        except (PrecisionExhausted, SeriesDivergence) as exc:
            if attempt.digits >= 1000 or i == max_doublings:
                raise
            needed = attempt.digits + getattr(exc, "cancellation_digits", 0) + 10
            attempt = attempt.with_digits(max(2 * attempt.digits, needed))
    raise AssertionError("unreachable")

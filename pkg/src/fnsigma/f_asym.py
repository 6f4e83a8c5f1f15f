"""Asymptotic expansions of F_{n,sigma}(x; mu) for x -> +infinity and x -> -infinity.

F is assembled from Psi at the rotated points ``x e^{i phi}``. Each
exponential piece is E(z) of :mod:`fnsigma.psi_asym` weighted by its unit
prefactor; the algebraic pieces collapse to real series in ``x**-K`` with
``K = (k + delta) / sigma``:

* x > 0:  H(x)  = (1/sigma) sum x**-K / (k! Gamma(1-K)) theta_{n,k}
* x < 0:  Hhat(x) = (2/sigma) sum x**-K / (k! Gamma(1-K)) thetahat_{n,k}

Which exponentials are kept, and whether Hhat exists, is decided with
exact angle comparisons (:class:`~fnsigma.params.PiAngle`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .numerics import DomainError, PolarPoint, PrecisionCtx, cospi, expi
from .params import DerivedParams, Parameters, PiAngle, derive
from .psi_asym import (
    JMAX,
    Fixed,
    Optimal,
    Sector,
    TruncPolicy,
    a0,
    big_z_polar,
    classify_sector,
    e_expansion,
    truncate,
)


class StokesLineError(ArithmeticError):
    """An argument pi kappa - w_r falls exactly on the Stokes line arg z = 0."""


class Side(str, Enum):
    POS = "Pos"
    NEG = "Neg"


class Component(str, Enum):
    EXP_LARGE = "ExpLarge"
    EXP_OSCILLATORY = "ExpOscillatory"
    EXP_SMALL = "ExpSmall"
    ALGEBRAIC = "Algebraic"


_COMPONENT_OF = {
    Sector.EXP_LARGE: Component.EXP_LARGE,
    Sector.OSC_BOUNDARY: Component.EXP_OSCILLATORY,
    Sector.EXP_SMALL_PRESENT: Component.EXP_SMALL,
}

_ORDER = list(Component)


@dataclass(frozen=True)
class ExpTerm:
    """One exponential contribution: Psi at arg ``phi`` with weight ``e^{i weight}``.

    ``r`` is None for the unpaired Delta_n term.
    """

    r: Optional[int]
    sign: int
    phi: PiAngle
    weight: PiAngle
    sector: Sector

    def describe(self) -> dict:
        return {
            "r": self.r,
            "sign": "+" if self.sign > 0 else "-",
            "phi": str(self.phi.coeff),
            "sector": self.sector.value,
        }


@dataclass(frozen=True)
class Regime:
    side: Side
    components: tuple[Component, ...]
    retained: tuple[ExpTerm, ...]
    excluded: tuple[ExpTerm, ...] = ()
    notes: tuple[str, ...] = ()
    algebraic_omitted: bool = False

    def tags(self) -> list[str]:
        return [c.value for c in self.components]


@dataclass(frozen=True)
class ExpansionResult:
    value: object
    e_part: object
    h_part: object
    regime: Regime
    jmax: int
    h_terms_used: int
    term_table: list = field(default_factory=list)


def _sort(components) -> tuple[Component, ...]:
    return tuple(sorted(set(components), key=_ORDER.index))


def _fmt(t) -> str:
    return "inf" if t == float("inf") else str(t)


# ---------------------------------------------------------------- x > 0

def positive_candidates(dp: DerivedParams) -> list[ExpTerm]:
    """All Psi arguments phi_r^{+/-} = +/- pi sigma - w_r and the Delta_n ray pi sigma."""
    ps = PiAngle(dp.sigma)
    pv = PiAngle(dp.vartheta)
    out = []
    for r, w in enumerate(dp.omega_reduced):
        for sign in (1, -1):
            phi = ps * sign - w
            out.append(ExpTerm(r, sign, phi, pv * sign - w, classify_sector(dp.sigma, phi).tag))
    if dp.delta_n:
        out.append(ExpTerm(None, 1, ps, pv, classify_sector(dp.sigma, ps).tag))
    return out


def is_retained_pos(dp: DerivedParams, t: ExpTerm) -> bool:
    """|phi| <= pi kappa / 2, and never the phi^- family once sigma >= 1/3."""
    if t.r is not None and t.sign < 0 and dp.sigma >= Fraction(1, 3):
        return False
    return abs(t.phi.coeff) <= dp.kappa / 2


def _pos_regime(dp: DerivedParams) -> Regime:
    cands = positive_candidates(dp)
    kept = tuple(t for t in cands if is_retained_pos(dp, t))
    dropped = tuple(t for t in cands if not is_retained_pos(dp, t))
    comps = [_COMPONENT_OF[t.sector] for t in kept] + [Component.ALGEBRAIC]
    notes = []
    n0 = dp.n0
    if n0 != float("inf") and dp.sigma >= Fraction(1, 2):
        if dp.n < n0:
            notes.append(f"n < n0 = {_fmt(n0)}")
        elif dp.n == n0:
            notes.append(f"n = n0 = {_fmt(n0)} (oscillatory boundary)")
        else:
            notes.append(f"n > n0 = {_fmt(n0)}")
    if dp.n == 1:
        notes.append("n=1: a single Wright function, outside the n >= 2 range of the expansions")
    return Regime(Side.POS, _sort(comps), kept, dropped, tuple(notes))


def theta(dp: DerivedParams, k: int, ctx: PrecisionCtx):
    """theta_{n,k} = 2 sum_{r<N} cos((K-1) w_r) + Delta_n."""
    K1 = dp.K(k) - 1
    total = ctx.real(dp.delta_n)
    for w in dp.omega_reduced:
        total += 2 * cospi(w.coeff * K1, ctx)
    return total


def _envelope(dp: DerivedParams, k: int, log_x, fact, ctx: PrecisionCtx):
    """|Gamma(K)| x**-K / k!, the size of each Psi H-series term; 0 on a Gamma pole."""
    mp = ctx.mp
    K = dp.K(k)
    if K <= 0 and K.denominator == 1:
        return mp.zero
    return abs(mp.gamma(ctx.real(K))) * mp.exp(-ctx.real(K) * log_x) / fact


def _algebraic(dp: DerivedParams, x, trunc: TruncPolicy, ctx: PrecisionCtx, term):
    """Sum ``term(k, K, x**-K, k!)`` truncated on the envelope ``|Gamma(K)| x**-K / k!``."""
    mp = ctx.mp
    x = ctx.real(x)
    count = trunc.kmax + 1 if isinstance(trunc, Fixed) else trunc.cap + 1
    log_x = mp.log(x)
    rows = []
    fact = mp.one
    for k in range(count):
        if k:
            fact *= k
        K = dp.K(k)
        xk = mp.exp(-ctx.real(K) * log_x)
        rows.append({"k": k, "K": K, "value": term(k, K, xk, fact),
                     "envelope": _envelope(dp, k, log_x, fact, ctx)})
    m = truncate(rows, [r["envelope"] for r in rows], trunc)
    total = mp.zero
    for r in rows[:m]:
        total += r["value"]
    return total, rows, m


def h_branch(t: ExpTerm) -> int:
    """+1 for H(z e^{-pi i}) (arg z > 0), -1 for H(z e^{+pi i})."""
    return 1 if t.phi.reduced().coeff > 0 else -1


def standard_branches(dp: DerivedParams) -> bool:
    """True when every phi_r^+ and the Delta_n ray lie above the real axis.

    Then the algebraic coefficients collapse to theta_{n,k}. Otherwise
    (sigma <= w_0 / pi, e.g. sigma = 1/3 with n >= 3) some phi_r^+ <= 0 and
    the e^{+pi i} continuation applies to that term.
    """
    for t in positive_candidates(dp):
        if t.r is None or t.sign > 0:
            if t.phi.reduced().coeff <= 0:
                return False
    return True


def theta_general(dp: DerivedParams, k: int, ctx: PrecisionCtx):
    """sum over Psi arguments of cos(weight - K (phi - b pi)), b the H branch.

    For standard branches this equals (-1)**k sin(pi K) theta_{n,k}.
    """
    K = dp.K(k)
    total = ctx.mp.zero
    for t in positive_candidates(dp):
        phi = t.phi.reduced()
        b = h_branch(t)
        total += cospi(t.weight.coeff - K * (phi.coeff - b), ctx)
    return total


def h_alg_pos(dp: DerivedParams, x, trunc: TruncPolicy, ctx: PrecisionCtx):
    """Algebraic expansion H(x), x > 0. Returns ``(value, rows, terms_used)``."""
    if x <= 0:
        raise DomainError("h_alg_pos needs x > 0")
    mp = ctx.mp
    inv_sigma = 1 / ctx.real(dp.sigma)
    if standard_branches(dp):
        def term(k, K, xk, fact):
            return inv_sigma * xk * mp.rgamma(1 - ctx.real(K)) * theta(dp, k, ctx) / fact
    else:
        def term(k, K, xk, fact):
            if K <= 0 and K.denominator == 1:
                raise DomainError(f"K = {K} is a pole of Gamma with non-standard H branches")
            c = theta_general(dp, k, ctx)
            return (-1) ** k * inv_sigma * mp.gamma(ctx.real(K)) * xk * c / (mp.pi * fact)
    return _algebraic(dp, x, trunc, ctx, term)


def _exp_sum(dp: DerivedParams, x, terms, jmax: int, ctx: PrecisionCtx):
    mp = ctx.mp
    total = mp.zero
    rows = []
    for t in terms:
        e = e_expansion(dp.sigma, dp.delta, PolarPoint(x, t.phi), jmax, ctx)
        v = (expi(t.weight, ctx) * e).real / mp.pi
        total += v
        rows.append({**t.describe(), "value": v})
    return total, rows


def e_exp_pos(dp: DerivedParams, x, jmax: int, ctx: PrecisionCtx):
    """Exponential expansion E(x), x > 0: ``(value, retained_terms, rows)``."""
    if x <= 0:
        raise DomainError("e_exp_pos needs x > 0")
    kept = _pos_regime(dp).retained
    total, rows = _exp_sum(dp, ctx.real(x), kept, jmax, ctx)
    return total, kept, rows


# ---------------------------------------------------------------- x < 0

def negative_terms(dp: DerivedParams) -> list[ExpTerm]:
    """Psi at arg pi kappa - w_r with weight -(pi vartheta + w_r)."""
    pk = PiAngle(dp.kappa)
    pv = PiAngle(dp.vartheta)
    out = []
    for r, w in enumerate(dp.omega_reduced):
        phi = pk - w
        out.append(ExpTerm(r, 1, phi, -pv - w, classify_sector(dp.sigma, phi).tag))
    return out


def r0_index(dp: DerivedParams) -> int:
    """Largest r with pi kappa - w_r < 0, or -1 if there is none.

    Raises StokesLineError if some pi kappa - w_r is exactly 0.
    """
    r0 = -1
    for r, w in enumerate(dp.omega_reduced):
        d = dp.kappa - w.coeff
        if d == 0:
            raise StokesLineError(
                f"pi*kappa - w_{r} = 0 for sigma={dp.sigma}, n={dp.n}: on the Stokes line arg z = 0"
            )
        if d < 0:
            r0 = r
    return r0


def theta_hat(dp: DerivedParams, k: int, ctx: PrecisionCtx):
    """thetahat_{n,k} = sum_{r<=r0} cos(pi K - (K-1) w_r)."""
    r0 = r0_index(dp)
    K = dp.K(k)
    total = ctx.mp.zero
    for w in dp.omega_reduced[: r0 + 1]:
        total += cospi(K - (K - 1) * w.coeff, ctx)
    return total


def h_alg_neg(dp: DerivedParams, x, trunc: TruncPolicy, ctx: PrecisionCtx):
    """Algebraic expansion Hhat(x) of F(-x), x > 0: ``(value, rows, terms_used)``.

    Identically zero below n* (no Stokes crossing); raises StokesLineError at n = n*.
    """
    if x <= 0:
        raise DomainError("h_alg_neg takes the modulus x > 0")
    r0 = r0_index(dp)
    if r0 < 0:
        return ctx.mp.zero, [], 0
    mp = ctx.mp
    factor = 2 / ctx.real(dp.sigma)

    def term(k, K, xk, fact):
        return factor * xk * mp.rgamma(1 - ctx.real(K)) * theta_hat(dp, k, ctx) / fact

    return _algebraic(dp, x, trunc, ctx, term)


def e_exp_neg(dp: DerivedParams, x, jmax: int, ctx: PrecisionCtx):
    """Exponential expansion Ehat(x) of F(-x), x > 0: ``(value, terms, rows)``.

    Terms beyond the Stokes line |arg| >= pi kappa carry no exponential and are skipped.
    """
    if x <= 0:
        raise DomainError("e_exp_neg takes the modulus x > 0")
    terms = [t for t in negative_terms(dp) if t.sector != Sector.ALGEBRAIC_ONLY]
    total, rows = _exp_sum(dp, ctx.real(x), terms, jmax, ctx)
    return total, terms, rows


def _neg_regime(dp: DerivedParams, strict: bool) -> Regime:
    terms = negative_terms(dp)
    kept = tuple(t for t in terms if t.sector != Sector.ALGEBRAIC_ONLY)
    dropped = tuple(t for t in terms if t.sector == Sector.ALGEBRAIC_ONLY)
    comps = [_COMPONENT_OF[t.sector] for t in kept]
    notes = []
    omitted = False
    ns = dp.n_star
    if ns != float("inf"):
        if dp.n == ns:
            if strict:
                raise StokesLineError(f"n = n* = {_fmt(ns)}: algebraic part lies on a Stokes line")
            notes.append(f"n = n* = {_fmt(ns)}: Stokes line, algebraic part omitted")
            omitted = True
        elif dp.n > ns:
            try:
                r0_index(dp)
            except StokesLineError:
                if strict:
                    raise
                notes.append("some pi*kappa - w_r = 0: Stokes line, algebraic part omitted")
                omitted = True
            else:
                comps.append(Component.ALGEBRAIC)
            notes.append(f"n > n* = {_fmt(ns)}")
        else:
            notes.append(f"n < n* = {_fmt(ns)}: algebraic part cancels")
    else:
        notes.append("sigma <= 1/2: algebraic part cancels")
    ne = dp.n_exp
    if dp.sigma < Fraction(1, 2):
        rel = "<" if dp.n < ne else ("=" if dp.n == ne else ">")
        notes.append(f"n {rel} 1/sigma = {_fmt(ne)}")
    return Regime(Side.NEG, _sort(comps), kept, dropped, tuple(notes), omitted)


def classify_regime(dp: DerivedParams, side: Side | str, strict: bool = True) -> Regime:
    """Components present in the expansion on one side.

    With ``strict`` a Stokes-line configuration (n = n*) raises; otherwise
    it is reported in the notes and the algebraic part is marked omitted.
    """
    side = Side(side) if not isinstance(side, Side) else side
    if side is Side.POS:
        return _pos_regime(dp)
    return _neg_regime(dp, strict)


# ---------------------------------------------------------------- both

def f_asym(p: Parameters, x, ctx: PrecisionCtx, jmax: int = JMAX,
           trunc: TruncPolicy | None = None, strict: bool = False) -> ExpansionResult:
    """Asymptotic value of F_{n,sigma}(x; mu), dispatching on the sign of x."""
    trunc = trunc or Optimal()
    if not 0 <= jmax <= JMAX:
        raise ValueError(f"jmax must be in 0..{JMAX}")
    mp = ctx.mp
    x = ctx.real(x)
    if x == 0:
        raise DomainError("asymptotic expansions need x != 0")
    dp = derive(p)
    table = []
    if x > 0:
        regime = classify_regime(dp, Side.POS)
        e, _, erows = e_exp_pos(dp, x, jmax, ctx)
        h, hrows, used = h_alg_pos(dp, x, trunc, ctx)
    else:
        regime = classify_regime(dp, Side.NEG, strict=strict)
        e, _, erows = e_exp_neg(dp, -x, jmax, ctx)
        if regime.algebraic_omitted:
            h, hrows, used = mp.zero, [], 0
        else:
            h, hrows, used = h_alg_neg(dp, -x, trunc, ctx)
    for row in erows:
        table.append({"part": "E", **row})
    for row in hrows[:used]:
        table.append({"part": "H", **row})
    return ExpansionResult(e + h, e, h, regime, jmax, used, table)


def karasheva_angle(p: Parameters) -> PiAngle:
    """(n - 1 - alpha) pi / (2n - alpha) with alpha = 2 n sigma."""
    alpha = 2 * p.n * p.sigma
    return PiAngle((p.n - 1 - alpha) / (2 * p.n - alpha))


def karasheva_leading(p: Parameters, x, ctx: PrecisionCtx, parts: bool = False):
    """Leading r = 0 exponential estimate of F for sigma = alpha/(2n), 0 < alpha < 1.

    With ``parts`` returns ``(amplitude, cosine_factor)`` whose product is the estimate.
    """
    alpha = 2 * p.n * p.sigma
    if not 0 < alpha < 1:
        raise DomainError(f"alpha = 2 n sigma = {alpha} is outside (0, 1)")
    mp = ctx.mp
    x = ctx.real(x)
    if x <= 0:
        raise DomainError("karasheva_leading needs x > 0")
    dp = derive(p)
    w0 = dp.omega_full[0]
    big_phi = PiAngle(dp.vartheta / dp.kappa) - w0 * (1 + dp.vartheta / dp.kappa)
    X = big_z_polar(p.sigma, x, ctx).modulus
    a = karasheva_angle(p)
    amp = a0(p.sigma, dp.delta, ctx) * mp.power(X, ctx.real(dp.vartheta)) / mp.pi
    amp *= mp.exp(X * cospi(a.coeff, ctx))
    phase = X * mp.sinpi(ctx.real(a.coeff)) - ctx.real(big_phi.coeff) * mp.pi
    c = mp.cos(phase)
    if parts:
        return amp, c
    return amp * c

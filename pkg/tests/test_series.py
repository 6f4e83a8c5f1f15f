import random
from fractions import Fraction as Fr

import pytest
from hypothesis import assume, given, settings, strategies as st

from fnsigma.numerics import PolarPoint, PrecisionCtx, PrecisionExhausted, expi, significant_match
from fnsigma.params import Parameters, PiAngle
from fnsigma.series import (
    SeriesDivergence,
    estimate_cost,
    f_direct,
    f_direct_terms,
    f_wright,
    phi,
    phi_terms,
    psi,
    psi_terms,
    sin_ratio,
    sin_ratio_value,
    sum_terms,
    with_retry,
)

CTX = PrecisionCtx(60)
MP = CTX.mp


def close(a, b, digits, ctx=CTX):
    return significant_match(a, b, ctx) >= digits


def test_phi_at_zero():
    assert close(phi(Fr(1, 3), Fr(3, 4), 0, CTX).value.real, MP.rgamma(MP.mpf(3) / 4), 55)


def test_phi_m_wright_closed_form():
    # M_{1/2}(x) = exp(-x^2/4)/sqrt(pi) evaluated at x = 2
    v = phi(Fr(1, 2), Fr(1, 2), -2, CTX).value.real
    assert close(v, MP.exp(-1) / MP.sqrt(MP.pi), 55)


def test_phi_conjugate_symmetry():
    z = PolarPoint(8, PiAngle(Fr(1, 4)))
    zc = PolarPoint(8, PiAngle(Fr(-1, 4)))
    a = phi(Fr(1, 2), Fr(3, 4), z, CTX).value
    b = phi(Fr(1, 2), Fr(3, 4), zc, CTX).value
    assert close(a.real, b.real, 50) and close(a.imag, -b.imag, 50)


def test_psi_at_zero():
    assert close(psi(Fr(1, 2), Fr(1, 4), 0, CTX).value.real, MP.gamma(MP.mpf(1) / 4), 55)
    assert psi(Fr(1, 2), -2, 0, CTX).value == 0


def test_psi_conjugate_symmetry():
    a = psi(Fr(2, 5), Fr(1, 4), PolarPoint(6, PiAngle(Fr(1, 3))), CTX).value
    b = psi(Fr(2, 5), Fr(1, 4), PolarPoint(6, PiAngle(Fr(-1, 3))), CTX).value
    assert close(a.real, b.real, 50) and close(a.imag, -b.imag, 50)


@pytest.mark.parametrize("sigma,mu,x", [
    (Fr(1, 2), Fr(3, 4), 3),
    (Fr(1, 3), Fr(5, 4), -2),
    (Fr(2, 3), Fr(1, 3), 5),
    (Fr(3, 5), Fr(3, 2), Fr(7, 2)),
])
def test_psi_reflection_gives_phi(sigma, mu, x):
    delta = 1 - mu
    vt = Fr(1, 2) - mu
    ps = PiAngle(sigma)
    z_plus = PolarPoint(CTX.real(x), ps) if x > 0 else PolarPoint(-CTX.real(x), ps + PiAngle(1))
    z_minus = PolarPoint(CTX.real(x), -ps) if x > 0 else PolarPoint(-CTX.real(x), PiAngle(1) - ps)
    lhs = (expi(PiAngle(vt), CTX) * psi(sigma, delta, z_plus, CTX).value
           + expi(PiAngle(-vt), CTX) * psi(sigma, delta, z_minus, CTX).value) / (2 * MP.pi)
    rhs = phi(sigma, mu, x, CTX).value
    assert close(lhs.real, rhs.real, 45)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_sin_ratio_exact_entries(n):
    for k in range(8 * n):
        exact = sin_ratio(n, k)
        numeric = MP.sinpi(MP.mpf(k + 1) / 2) / MP.sinpi(MP.mpf(k + 1) / (2 * n)) \
            if (k + 1) % (2 * n) else None
        if exact is not None and numeric is not None:
            assert abs(CTX.real(exact) - numeric) < 1e-50
        if numeric is not None:
            assert abs(sin_ratio_value(n, k, CTX) - numeric) < 1e-50


def test_sin_ratio_removable_points():
    # the limit of sin(n g)/sin(g) at g = m pi is n (-1)^{m(n-1)}
    assert sin_ratio(3, 5) == 3
    assert sin_ratio(2, 3) == -2
    assert sin_ratio(2, 7) == 2


def test_f_direct_table_values():
    v = f_direct(Parameters(Fr(1, 2), Fr(3, 4), 2), 8, CTX).value.real
    assert abs(v - MP.mpf("0.80329527")) <= MP.mpf("1e-8")
    w = f_wright(Parameters(Fr(2, 3), Fr(3, 4), 4), 8, CTX).value.real
    assert abs(w - MP.mpf("1.63072031")) <= MP.mpf("1e-8")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_f_direct_at_zero(n):
    v = f_direct(Parameters(Fr(2, 5), Fr(3, 4), n), 0, CTX).value.real
    expected = 1 / (MP.sinpi(MP.mpf(1) / (2 * n)) * MP.gamma(MP.mpf(3) / 4))
    assert close(v, expected, 55)


def test_f_n1_is_phi():
    p = Parameters(Fr(3, 7), Fr(5, 3), 1)
    a = f_direct(p, Fr(-9, 2), CTX).value.real
    b = phi(p.sigma, p.mu, Fr(-9, 2), CTX).value.real
    c = f_wright(p, Fr(-9, 2), CTX).value.real
    assert a == b == c


def test_outputs_are_real():
    res = f_direct(Parameters(Fr(1, 3), Fr(3, 4), 3), 8, CTX)
    assert res.value.imag == 0
    res = f_wright(Parameters(Fr(1, 3), Fr(3, 4), 3), 8, CTX)
    assert res.value.imag == 0


def test_precision_doubling_self_consistent():
    p = Parameters(Fr(1, 2), Fr(3, 4), 3)
    lo = f_direct(p, 8, PrecisionCtx(60)).value.real
    hi = f_direct(p, 8, PrecisionCtx(120)).value.real
    assert significant_match(lo, PrecisionCtx(60).mp.mpf(hi), PrecisionCtx(60)) >= 40


def test_term_ratio_matches_gamma_ratio():
    rng = random.Random(7)
    sigma, mu = Fr(2, 7), Fr(4, 3)
    z = MP.mpf("3.5")
    terms = []
    gen = phi_terms(sigma, mu, z, CTX)
    for _ in range(60):
        terms.append(next(gen))
    for k in rng.sample(range(59), 20):
        ratio = terms[k + 1] / terms[k]
        expected = z / (k + 1) * MP.gamma(CTX.real(mu - sigma * k)) / MP.gamma(CTX.real(mu - sigma * (k + 1)))
        assert close(ratio.real, expected, 50)


def test_psi_pole_terms_are_zero():
    # sigma k + delta = k/2 - 2 is a pole at k = 0, 2, 4 only
    gen = psi_terms(Fr(1, 2), Fr(-2), 2, CTX)
    terms = [next(gen) for _ in range(7)]
    assert terms[0] == 0 and terms[2] == 0 and terms[4] == 0
    assert terms[1] != 0 and terms[6] != 0


def test_cancellation_raises_precision_exhausted():
    ctx = PrecisionCtx(30)
    with pytest.raises(PrecisionExhausted) as info:
        f_direct(Parameters(Fr(1, 2), Fr(3, 4), 2), 20, ctx)
    assert info.value.cancellation_digits > 20


def test_retry_recovers():
    p = Parameters(Fr(1, 2), Fr(3, 4), 2)
    res, used = with_retry(f_direct, p, 20, ctx=PrecisionCtx(30))
    assert used.digits > 30
    ref = f_direct(p, 20, PrecisionCtx(200)).value.real
    assert significant_match(res.value.real, used.mp.mpf(ref), used) >= 20


def test_retry_stops_after_max_doublings():
    p = Parameters(Fr(1, 2), Fr(3, 4), 2)
    with pytest.raises(PrecisionExhausted):
        with_retry(f_direct, p, 20, ctx=PrecisionCtx(30), max_doublings=0)


def test_term_cap():
    ctx = PrecisionCtx(30)
    with pytest.raises(SeriesDivergence):
        sum_terms((MP.mpf(1) for _ in range(10**6)), ctx)


def test_sigma_out_of_range():
    with pytest.raises(ValueError):
        phi(1, 1, 1, CTX)


@settings(max_examples=25, deadline=None)
@given(
    st.fractions(min_value=Fr(1, 20), max_value=Fr(19, 20), max_denominator=20),
    st.fractions(min_value=Fr(1, 10), max_value=3, max_denominator=10),
    st.integers(min_value=1, max_value=6),
    st.fractions(min_value=-6, max_value=6, max_denominator=8),
)
def test_direct_equals_wright(sigma, mu, n, x):
    assume(estimate_cost(sigma, x).feasible(300))
    p = Parameters(sigma, mu, n)
    a, ca = with_retry(f_direct, p, x, ctx=CTX)
    b, cb = with_retry(f_wright, p, x, ctx=CTX)
    work = ca if ca.digits <= cb.digits else cb
    lost = max(a.cancellation_digits, b.cancellation_digits)
    need = work.digits - lost - 10
    assert significant_match(work.mp.mpf(a.value.real), work.mp.mpf(b.value.real), work) >= min(need, 30)


def test_cost_estimate_flags_infeasible_corner():
    assert not estimate_cost(Fr(19, 20), 6).feasible()
    assert estimate_cost(Fr(1, 2), 8).feasible()
    assert estimate_cost(Fr(1, 2), 0).lost_digits == 0
    # sigma = 2/3 at x = 32 needs about 2100 digits
    assert 2000 < estimate_cost(Fr(2, 3), 32).lost_digits < 2200

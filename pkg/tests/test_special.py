import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from nlsdtn import oracle
from nlsdtn.special import (AsymptoticDescriptor, DomainError, SampledFunction, abel,
                            abel_asymptotics, fresnel_c, fresnel_s, h_asym, h_exact,
                            h_hypergeometric, hc_asym, hc_exact, hs_asym, hs_exact,
                            hyp1f2, inverse_abel)

# remainder constants calibrated on [10, 60] (measured 13.07 for both)
HCS_ENVELOPE = 15.0


def test_fresnel_at_zero():
    assert fresnel_c(0.0) == 0.0
    assert fresnel_s(0.0) == 0.0


def test_fresnel_c_of_one_matches_quadrature():
    ref = integrate.quad(lambda s: np.cos(np.pi * s * s / 2), 0, 1, epsabs=1e-14)[0]
    assert abs(fresnel_c(1.0) - ref) < 1e-13
    assert abs(fresnel_c(1.0) - 0.7798934003768228) < 1e-13


def test_fresnel_limit():
    assert abs(fresnel_c(50.0) - 0.5) < 1e-2
    assert abs(fresnel_s(50.0) - 0.5) < 1e-2


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.0, max_value=40.0))
def test_fresnel_against_mpmath_and_odd(z):
    c_ref = float(mpmath.fresnelc(z))
    s_ref = float(mpmath.fresnels(z))
    assert abs(fresnel_c(z) - c_ref) <= 1e-12
    assert abs(fresnel_s(z) - s_ref) <= 1e-12
    assert fresnel_c(-z) == -fresnel_c(z)
    assert fresnel_s(-z) == -fresnel_s(z)


# -- sampled functions -------------------------------------------------------


def test_sampled_function_rejects_outside_and_bad_nodes():
    f = SampledFunction(np.linspace(0, 1, 5), np.arange(5.0))
    with pytest.raises(DomainError):
        f(1.5)
    with pytest.raises(ValueError):
        SampledFunction([0.0, 0.5, 0.4], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        SampledFunction([0.0, 1.0], [1.0])


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_sampled_function_reproduces_cubics(c):
    x = np.linspace(-1, 2, 9)
    p = np.polynomial.Polynomial(c)
    f = SampledFunction(x, p(x) + 1j * p(x), interpolation_order=3)
    xs = np.linspace(-1, 2, 31)
    assert np.allclose(f(xs), p(xs) * (1 + 1j), atol=1e-9 * (1 + np.abs(c).max()))


# -- Abel transform ----------------------------------------------------------


def test_abel_examples():
    assert abel(lambda s: 0 * s, 2.0) == 0
    assert abs(abel(h_exact, 3.0) - np.pi * np.sin(3.0)) < 1e-10
    assert abs(abel(lambda s: 1.0 + 0 * s, 4.0) - 4.0) < 1e-12


def test_abel_rejects_negative_time():
    with pytest.raises(DomainError):
        abel(np.cos, -1.0)


def test_abel_of_h_is_pi_sin_on_0_30():
    t = np.linspace(0, 30, 301)
    assert np.max(np.abs(abel(h_exact, t) - np.pi * np.sin(t))) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5), st.floats(0.1, 20.0))
def test_abel_of_monomials(n, t):
    # A(s^n)(t) = t^{n + 1/2} B(n + 1, 1/2)
    exact = t ** (n + 0.5) * float(mpmath.beta(n + 1, 0.5))
    assert abs(abel(lambda s: s**n, t) - exact) <= 1e-8 * abs(exact)


def test_abel_relative_accuracy_against_oracle():
    for t in (0.7, 5.0, 17.3):
        f = lambda s: np.exp(-0.1 * s) * np.cos(2 * s)
        ref = oracle.abel_reference(f, t)
        assert abs(abel(f, t) - ref) <= 1e-8 * max(1.0, abs(ref))


def test_abel_of_sampled_function():
    s = np.linspace(0, 4, 401)
    f = SampledFunction(s, s**2)
    assert abs(abel(f, 4.0) - 4.0**2.5 * 16 / 15) < 1e-8


# -- inverse Abel -------------------------------------------------------------


def test_inverse_abel_of_zero():
    s = np.linspace(-2, 2, 41)
    F = SampledFunction(s, 0 * s)
    assert inverse_abel(F, 2.0, 0.3) == 0


def test_inverse_abel_round_trip_on_tau_squared():
    # F(s) = int_{-t}^s g(tau + t)/sqrt(s - tau) with g(x) = x^2: F(s) = (16/15)(s + t)^{5/2}
    t = 2.0
    s = np.linspace(-t, t, 801)
    F = SampledFunction(s, 16 / 15 * (s + t) ** 2.5)
    pts = np.array([-1.5, 0.0, 1.2, 2.0])
    got = inverse_abel(F, t, pts)
    # (1/pi) d/ds of A(A g) = int g, hence g itself
    assert np.max(np.abs(got - (pts + t) ** 2)) <= 1e-4


def test_inverse_abel_of_first_order_kernel():
    t = 3.0
    s = np.linspace(-t, t, 1201)
    F = SampledFunction(s, np.sin((t + s) / 2))
    for sv in (-1.0, 0.5, 2.5):
        ref = integrate.quad(lambda tau: 0.5 * np.cos((t + tau) / 2), -t, sv,
                             weight="alg", wvar=(0, -0.5), epsabs=1e-13)[0] / np.pi
        assert abs(inverse_abel(F, t, sv) - ref) <= 1e-6


def test_inverse_abel_precondition():
    s = np.linspace(-1, 1, 21)
    F = SampledFunction(s, 1.0 + 0 * s)
    with pytest.raises(DomainError):
        inverse_abel(F, 1.0, 0.0)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_inverse_abel_round_trip_polynomials(c):
    # p of degree <= 4 on [0, 2t]; A p is known term by term
    t = 1.0
    s = np.linspace(-t, t, 1601)
    x = s + t
    Ap = sum(ck * x ** (k + 0.5) * float(mpmath.beta(k + 1, 0.5)) for k, ck in enumerate(c))
    F = SampledFunction(s, Ap)
    pts = np.array([-0.5, 0.0, 0.7])
    p = np.polynomial.Polynomial(c)
    scale = 1 + np.abs(c).sum()
    assert np.max(np.abs(inverse_abel(F, t, pts) - p(pts + t))) <= 1e-4 * scale


# -- h, H_c, H_s --------------------------------------------------------------


def test_h_examples():
    assert h_exact(0.0) == 0.0
    ref = oracle.abel_reference(np.cos, 5.0)
    assert abs(h_exact(5.0) - ref) < 1e-10
    t = 100.0
    diff = h_exact(t) - np.sqrt(np.pi / 2) * (np.sin(t) + np.cos(t))
    assert abs(diff + 0.5 * t**-1.5) <= 2 * t**-3.5


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 20.0))
def test_h_and_H_against_quadrature(t):
    assert abs(h_exact(t) - oracle.abel_reference(np.cos, t)) <= 1e-8
    hc = integrate.quad(lambda s: h_exact(s) * np.cos(s), 0, t, epsabs=1e-12, limit=200)[0]
    hs = integrate.quad(lambda s: h_exact(s) * np.sin(s), 0, t, epsabs=1e-12, limit=200)[0]
    assert abs(hc_exact(t) - hc) <= 1e-8
    assert abs(hs_exact(t) - hs) <= 1e-8


def test_H_examples():
    assert hc_exact(0.0) == 0.0 and hs_exact(0.0) == 0.0
    ref = integrate.quad(lambda s: h_exact(s) * np.cos(s), 0, 10, epsabs=1e-13, limit=200)[0]
    assert abs(hc_exact(10.0) - ref) < 1e-10
    t = 200.0
    lead = 0.5 * np.sqrt(np.pi / 2) * t - 0.25 * np.sqrt(np.pi / 2) * (np.sin(2 * t) + np.cos(2 * t))
    assert abs(hs_exact(t) - lead) <= 1e-3


def test_h_matches_1f2_series_on_0_10():
    t = np.linspace(0, 10, 101)
    assert max(abs(h_exact(x) - h_hypergeometric(x)) for x in t) <= 1e-8


def test_hyp1f2_simple_values():
    assert hyp1f2(1.0, 0.75, 1.25, 0.0) == 1.0
    # 1F2(a; a, b; x) = 0F1(b; x)
    assert abs(hyp1f2(0.5, 0.5, 1.5, -1.0) - float(mpmath.hyp0f1(1.5, -1.0))) < 1e-14


def test_h_four_term_remainder_double_precision():
    # the full t^{-15/2} check needs extended precision (see the acceptance test);
    # in double precision the expansion is still accurate to rounding at t >= 10
    t = np.linspace(10, 30, 500)
    assert np.max(np.abs(h_exact(t) - h_asym(t)) * t**7.5) <= 1.1 * 135135 / 128


def test_H_expansions_envelope():
    t = np.linspace(10, 60, 3000)
    assert np.max(np.abs(hc_exact(t) - hc_asym(t)) * t**4.5) <= HCS_ENVELOPE
    assert np.max(np.abs(hs_exact(t) - hs_asym(t)) * t**4.5) <= HCS_ENVELOPE


# -- Abel asymptotics engine ---------------------------------------------------


def test_abel_asymptotics_zero_descriptor():
    d = AsymptoticDescriptor(2)
    assert abel_asymptotics(d, 50.0) == 0


def test_abel_asymptotics_of_cos():
    c = np.zeros((5, 2))
    c[0, 1] = 1.0
    d = AsymptoticDescriptor(1, osc_cos=c)
    assert abs(abel_asymptotics(d, 400.0) - h_exact(400.0)) <= 0.05


def test_abel_asymptotics_of_constant():
    d = AsymptoticDescriptor(1, power=[1, 0, 0, 0, 0])
    for t in (3.0, 40.0):
        assert abs(abel_asymptotics(d, t) - 2 * np.sqrt(t)) < 1e-12


def test_descriptor_shape_validation():
    with pytest.raises(ValueError):
        AsymptoticDescriptor(2, osc_cos=np.zeros((5, 2)))
    with pytest.raises(ValueError):
        AsymptoticDescriptor(0)


@pytest.mark.parametrize("j,n,kind", [(0, 1, "c"), (0, 2, "s"), (1, 1, "s"), (2, 1, "c"),
                                      (2, 3, "s"), (3, 1, "c"), (4, 2, "c")])
def test_abel_asymptotics_single_terms_against_quadrature(j, n, kind):
    # f = t^{j/2} cos(nt) or sin(nt); compare differences at two times so that the
    # O(1) constant left by the expansion cancels, leaving the oscillatory part
    c = np.zeros((5, n + 1))
    s = np.zeros((5, n + 1))
    (c if kind == "c" else s)[j, n] = 1.0
    d = AsymptoticDescriptor(n, osc_cos=c, osc_sin=s)
    f = d.evaluate
    ts = np.array([300.0, 300.0 + np.pi / (2 * n)])
    ref = np.array([oracle.abel_reference(lambda x: np.real(f(x)), t) for t in ts])
    got = abel_asymptotics(d, ts)
    scale = ts[0] ** (j / 2)
    assert abs((got[1] - got[0]) - (ref[1] - ref[0])) <= 0.05 * scale

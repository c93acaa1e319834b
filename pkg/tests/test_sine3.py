import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsdtn import oracle
from nlsdtn.sine3 import (composite_weights, cumulative4, g13_sine, i_ssc, lag_integral,
                          phi_exact, pipeline, reduced_integral, t3_term, t_terms)
from nlsdtn.special import h_exact, hs_exact


@pytest.mark.parametrize("name", ["ssc", "shh", "hsh", "hhs"])
def test_reduced_triple_integrals_match_oracle(name):
    tol = 1e-6 if name == "ssc" else 1e-4
    for t in (2.0, 5.0, 8.0):
        ref = oracle.triple_singular(name, t)
        assert abs(float(reduced_integral(name, t)) - ref) <= tol


def test_triple_integrals_vanish_at_zero():
    assert i_ssc(0.0) == 0
    for name in ("shh", "hsh", "hhs"):
        assert abs(float(reduced_integral(name, 0.0))) < 1e-12
        assert oracle.triple_singular(name, 0.0) == 0


def test_unknown_triple_integral():
    with pytest.raises(ValueError):
        reduced_integral("sss", 1.0)


def test_t3_is_minus_sqrt_two_over_pi_hs_sin():
    t = np.linspace(0, 40, 401)
    assert np.array_equal(t3_term(t), -np.sqrt(2 / np.pi) * hs_exact(t) * np.sin(t))


def test_t_terms_sum_to_g13():
    t = np.linspace(0, 16, 65)
    terms = t_terms(t)
    assert sorted(terms) == [f"T{k}" for k in range(1, 8)]
    assert np.allclose(sum(terms.values()), g13_sine(t), rtol=0, atol=1e-14)
    with pytest.raises(ValueError):
        t_terms([-1.0])


def test_lag_integral_against_nested_quadrature():
    p = pipeline(8.0)
    for t in (2.0, 5.0):
        ref = oracle.lag_integral_reference(t, phi_exact)
        assert abs(p.at("G", t) - ref) < 1e-6


def test_lag_integral_polynomial_integrands():
    # with h = 1 the order swaps to 4 int_0^t phi(x) (sqrt t - sqrt x) dx;
    # phi = (4/3) x^{3/2} + x^2 gives 16 t^3/45 + 4 t^{7/2}/21
    errs = []
    for dx in (0.02, 0.01):
        u = np.arange(0, int(round(4 / dx)) + 1) * dx
        G = lag_integral(np.ones_like(u), 4 / 3 * u**1.5 + u**2, dx)
        exact = 16 * u**3 / 45 + 4 * u**3.5 / 21
        errs.append(np.max(np.abs(G - exact)))
    assert errs[1] < 1e-6 * (16 * 64 / 45)
    assert errs[0] / errs[1] > 6  # at least third order


def test_composite_weights_reproduce_cumulative():
    for n in (3, 4, 7, 20):
        x = np.linspace(0, 1, n + 1)
        f = np.exp(x)
        assert abs(composite_weights(n) @ f * x[1] - cumulative4(f, x[1])[-1]) < 1e-14


@settings(max_examples=30)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.integers(3, 60))
def test_cumulative4_exact_for_cubics(c, n):
    x = np.linspace(0, 2, n + 1)
    p = np.polynomial.Polynomial(c)
    exact = p.integ()(x) - p.integ()(0)
    assert np.max(np.abs(cumulative4(p(x), x[1]) - exact)) <= 1e-11 * (1 + np.abs(c).sum())


def test_pipeline_is_cached_and_covers_range():
    a = pipeline(5.0)
    b = pipeline(7.9)
    assert a is b
    assert a.grid.T == 8.0
    assert np.allclose(a.at("h", [1.0, 6.5]), h_exact(np.array([1.0, 6.5])), atol=1e-12)

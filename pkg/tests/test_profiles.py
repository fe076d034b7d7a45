import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlel.asymptotics import extra_condition_residual, singular_relation_residual
from nlel.exceptions import InvalidParameter, NoConvergence, ResonantDecay
from nlel.profiles import (
    ExpPolyProfile,
    ExpPolyTerm,
    KernelSpec,
    convolve_halfline,
    differentiate,
    evaluate,
    linear_combine,
    quadrature_convolution_oracle,
)
from nlel.verify import random_cases

E = ExpPolyProfile


def close(p, q, tol=1e-14):
    return (p - q).max_abs_coeff() <= tol * max(1.0, p.max_abs_coeff(), q.max_abs_coeff())


# -- evaluate ---------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(E.constant(1.0), 5.0) == 1.0
    assert evaluate(E.exponential(1.0, 2.0), 0.0) == 1.0
    assert evaluate(E.term([1, 1], 1.0), 1.0) == pytest.approx(0.7357588823428847, rel=1e-15)


def test_evaluate_vectorized_matches_scalar():
    p = E.term([1, 2j, -0.5], 0.3 + 2j) + E.exponential(1j, 4.0)
    xs = np.linspace(0, 3, 7)
    np.testing.assert_allclose(p(xs), [p(float(x)) for x in xs], rtol=1e-14)


def test_evaluate_rejects_negative_depth():
    with pytest.raises(InvalidParameter):
        evaluate(E.constant(1.0), -1.0)


def test_term_rejects_growing_rate():
    with pytest.raises(InvalidParameter):
        ExpPolyTerm((1.0,), -0.1)


# -- differentiate ------------------------------------------------------------


def test_differentiate_examples():
    lam = 0.7 + 0.2j
    assert close(differentiate(E.exponential(1.0, lam)), E.exponential(-lam, lam))
    assert close(differentiate(E.term([0, 1], 1.0)), E.term([1, -1], 1.0))


def test_second_derivative_of_decaying_mode():
    k0, g, U = 1.3, 0.8, -2.1
    u = E.exponential(U, k0 * g)
    assert close(u.derivative(2), u.scaled((k0 * g) ** 2))


def test_derivative_against_finite_differences():
    p = E.term([1, -2, 0.5j], 0.4 - 1j) + E.exponential(2.0, 3.0)
    h = 1e-5
    for x in (0.3, 1.0, 2.5):
        fd = (p(x + h) - p(x - h)) / (2 * h)
        assert abs(p.derivative()(x) - fd) < 1e-8


# -- linear_combine -------------------------------------------------------------


def test_linear_combine_cancellation_and_merge():
    p = E.term([1, 2, 3], 0.5j + 1)
    assert linear_combine([(1, p), (-1, p)]).is_zero()
    assert close(linear_combine([(2, E.exponential(1, 1)), (3, E.exponential(1, 1))]), E.exponential(5, 1))


def test_near_duplicate_rates_merge():
    p = E.exponential(1, 1.0) + E.exponential(1, 1.0 + 1e-14)
    assert len(p.terms) == 1
    q = E.exponential(1, 1.0) + E.exponential(1, 1.0 + 1e-6)
    assert len(q.terms) == 2


def test_trailing_coefficients_trimmed():
    p = E.term([1, 0, 0], 1.0)
    assert p.terms[0].degree == 0


# -- convolution --------------------------------------------------------------


def test_convolve_constant():
    a = 0.1
    s = convolve_halfline(E.constant(1.0), KernelSpec(a))
    expected = E.constant(1.0) + E.exponential(-0.5, 1 / a)
    assert close(s, expected)
    assert s(0.0) == pytest.approx(0.5, rel=1e-15)


def test_convolve_zero_length_is_identity():
    p = E.term([1, 2], 1.0)
    assert convolve_halfline(p, 0.0) is p


def test_convolve_resonant_rejected():
    with pytest.raises(ResonantDecay):
        convolve_halfline(E.exponential(1.0, 10.0), KernelSpec(0.1))


def test_kernel_invariants():
    with pytest.raises(InvalidParameter):
        KernelSpec(0.0)
    k = KernelSpec(0.2)
    from scipy import integrate

    mass = integrate.quad(lambda x: k.weight(x), -np.inf, np.inf)[0]
    assert mass == pytest.approx(1.0, rel=1e-10)


def test_convolution_nascent_delta():
    p = E.term([1, 0.5], 0.8 + 0.3j)
    xs = np.array([0.5, 1.0, 2.0])
    errs = [np.max(np.abs(convolve_halfline(p, a)(xs) - p(xs))) for a in (1e-2, 1e-3, 1e-4)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_oracle_examples():
    k = KernelSpec(0.1)
    assert abs(quadrature_convolution_oracle(E.constant(1.0), k, 0.0, 1e-10) - 0.5) <= 1e-10
    assert quadrature_convolution_oracle(lambda y: 0.0, k, 0.7, 1e-10) == 0


def test_oracle_rejects_unreachable_tolerance():
    p = E.term([1, 2 - 1j, 0.5], 0.7 + 1.3j)
    with pytest.raises(NoConvergence):
        quadrature_convolution_oracle(p, KernelSpec(0.1), 0.3, 1e-18)


def test_oracle_vs_closed_form_on_random_profiles():
    for p, a, xs in random_cases(seed=7, n=10):
        s = convolve_halfline(p, a)
        for x in xs[:4]:
            q = quadrature_convolution_oracle(p, KernelSpec(a), float(x), 1e-10)
            assert abs(s(float(x)) - q) <= 1e-8


# -- structural identities (hypothesis) ------------------------------------------

complexes = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def profile_and_length(draw):
    a = draw(st.floats(0.01, 0.5))
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        rate = complex(draw(st.floats(0.1, 5.0)), draw(st.floats(-3.0, 3.0)))
        if abs(a * rate - 1) < 0.05:
            rate += 0.2
        coeffs = draw(st.lists(complexes, min_size=1, max_size=3))
        terms.append(ExpPolyTerm(tuple(coeffs), rate))
    return E(tuple(terms)), a


@settings(max_examples=60, deadline=None)
@given(profile_and_length())
def test_kernel_ode_identity(case):
    p, a = case
    s = convolve_halfline(p, a)
    r = singular_relation_residual(s, p, a)
    scale = max(1.0, s.max_abs_coeff(), p.max_abs_coeff())
    xs = np.linspace(0, 3.0, 25)
    assert np.max(np.abs(r(xs))) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(profile_and_length())
def test_boundary_identity(case):
    p, a = case
    s = convolve_halfline(p, a)
    scale = max(1.0, s.max_abs_coeff(), p.max_abs_coeff())
    assert abs(extra_condition_residual(s, a)) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(profile_and_length(), profile_and_length(), complexes, complexes)
def test_derivative_commutes_with_linear_combine(c1, c2, w1, w2):
    p, q = c1[0], c2[0]
    lhs = differentiate(linear_combine([(w1, p), (w2, q)]))
    rhs = linear_combine([(w1, differentiate(p)), (w2, differentiate(q))])
    xs = np.linspace(0, 2, 9)
    scale = max(1.0, lhs.max_abs_coeff(), rhs.max_abs_coeff())
    assert np.max(np.abs(lhs(xs) - rhs(xs))) <= 1e-13 * scale


@settings(max_examples=40, deadline=None)
@given(profile_and_length())
def test_convolution_is_linear(case):
    p, a = case
    q = E.term([1, -1j], 0.9)
    lhs = convolve_halfline(linear_combine([(2.0, p), (-1j, q)]), a)
    rhs = linear_combine([(2.0, convolve_halfline(p, a)), (-1j, convolve_halfline(q, a))])
    assert close(lhs, rhs, 1e-13)


# -- serialization ------------------------------------------------------------------


def test_json_schema_and_round_trip():
    p = E.term([1, 2j], 0.5 + 0.1j) + E.exponential(-0.5, 10.0)
    data = json.loads(p.to_json())
    assert set(data) == {"terms"}
    assert data["terms"][0]["lambda"] == [0.5, 0.1]
    assert data["terms"][0]["coeffs"] == [[1.0, 0.0], [0.0, 2.0]]
    assert E.from_json(p.to_json()) == p


def test_stretched():
    p = E.term([1, 2], 3.0)
    q = p.stretched(0.5)
    for x in (0.0, 0.7, 2.0):
        assert q(x) == pytest.approx(p(0.5 * x), rel=1e-15)

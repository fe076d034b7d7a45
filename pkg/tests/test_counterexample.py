import math

import pytest
from hypothesis import given, settings, strategies as st

from nlel import counterexample as ce
from nlel.asymptotics import coupled_stress_eqs_residual, extra_condition_residual
from nlel.core import HarmonicLoad, MaterialParams
from nlel.exceptions import DegenerateDenominator, SupersonicLoad
from nlel.profiles import KernelSpec, quadrature_convolution_oracle

M = MaterialParams(1.0, 1.0, 0.01)
LOAD = HarmonicLoad(1.0, 1.0, 0.5)
GAMMA = 0.8660362293049649  # sqrt(0.75 / 0.999975)
AMPLITUDE = 100.57234305226616  # F(1+a k0 g)(g - a k0) / (a g (1 - a k0 g)) at the defaults


def test_gamma_examples():
    assert ce.gamma(HarmonicLoad(1, 1, 0.0), M) == 1.0
    assert ce.gamma(LOAD, MaterialParams(1, 1, 0.0)) == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert ce.gamma(LOAD, M) == pytest.approx(GAMMA, rel=1e-15)


def test_gamma_rejects_supersonic():
    with pytest.raises(SupersonicLoad):
        ce.gamma(HarmonicLoad(1, 1, 1.0), M)
    with pytest.raises(SupersonicLoad):
        ce.gamma(HarmonicLoad(1, 1, 1.5), M)


def test_gamma_rejects_degenerate_denominator():
    # a k0 c0 >= c2 while c0 < c2
    with pytest.raises(DegenerateDenominator):
        ce.gamma(HarmonicLoad(1, 200.0, 0.5), M)


def test_surface_displacement():
    sol = ce.solve_differential_model(LOAD, M)
    expected = -2 * (1 + 0.01 * GAMMA) / GAMMA
    assert sol.amplitude == pytest.approx(expected, rel=1e-14)
    assert sol.u(0.0) == pytest.approx(expected, rel=1e-14)
    assert sol.decay_rate == pytest.approx(GAMMA, rel=1e-15)


def test_surface_condition_through_quadrature():
    # the kernel-weighted integral of du/dx2 over the half-line equals F / mu
    sol = ce.solve_differential_model(LOAD, M)
    q = quadrature_convolution_oracle(sol.u.derivative(), KernelSpec(M.a), 0.0, 1e-10)
    assert abs(q * M.mu - LOAD.F) <= 1e-10
    assert sol.s23(0.0) == pytest.approx(LOAD.F, rel=1e-13)


def test_zero_load():
    sol = ce.solve_differential_model(HarmonicLoad(0, 1.0, 0.5), M)
    for p in (sol.u, sol.sigma13, sol.sigma23, sol.s13, sol.s23):
        assert p.is_zero()
    assert ce.integral_eom_residual(sol).is_zero()
    rep = ce.report(HarmonicLoad(0, 1.0, 0.5), M)
    assert rep["reproduces"] and not rep["residual_nonzero"]


def test_local_case_uses_classical_amplitude():
    local = ce.solve_differential_model(LOAD, MaterialParams(1, 1, 0.0))
    g0 = math.sqrt(0.75)
    assert local.amplitude == pytest.approx(-1 / g0, rel=1e-15)
    assert local.s13 == local.sigma13
    assert ce.differential_eom_residual(local).max_abs_coeff() <= 1e-15


def test_small_length_limit_of_surface_displacement():
    g0 = math.sqrt(0.75)
    values = [ce.solve_differential_model(LOAD, MaterialParams(1, 1, a)).amplitude for a in (1e-3, 1e-6, 1e-9)]
    errs = [abs(v + 2 / g0) for v in values]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


def test_differential_residual_vanishes_and_detects_perturbation():
    sol = ce.solve_differential_model(LOAD, M)
    assert ce.differential_eom_residual(sol).max_abs_coeff() <= 1e-12 * ce.differential_residual_scale(sol)
    bad = ce.solve_differential_model(LOAD, M, gamma_override=1.01 * sol.gamma)
    assert ce.differential_eom_residual(bad).max_abs_coeff() > 1e-3


def test_integral_residual_is_single_layer():
    sol = ce.solve_differential_model(LOAD, M)
    R = ce.integral_eom_residual(sol)
    assert len(R.terms) == 1
    (term,) = R.terms
    assert term.degree == 0
    assert term.rate == pytest.approx(1 / M.a, rel=1e-14)
    assert abs(term.coeffs[0] - AMPLITUDE) <= 1e-10 * AMPLITUDE
    assert ce.residual_amplitude(LOAD, M) == pytest.approx(AMPLITUDE, rel=1e-14)


def test_integral_residual_against_quadrature():
    # s23' = (sigma23' * K) + K(x) sigma23(0) on the half-line
    sol = ce.solve_differential_model(LOAD, M)
    k = KernelSpec(M.a)
    for x in (0.005, 0.01, 0.02):
        s13 = quadrature_convolution_oracle(sol.sigma13, k, x, 1e-10)
        ds23 = quadrature_convolution_oracle(sol.sigma23.derivative(), k, x, 1e-10) + k.weight(x) * sol.sigma23(0.0)
        R = 1j * LOAD.k0 * s13 + ds23 + M.rho * (LOAD.k0 * LOAD.c0) ** 2 * sol.u(x)
        assert abs(R * math.exp(x / M.a) - AMPLITUDE) <= 1e-7 * AMPLITUDE


def test_special_loading_removes_residual():
    c0 = ce.special_loading_speed(1.0, M)
    load = HarmonicLoad(1.0, 1.0, c0)
    assert ce.gamma(load, M) == pytest.approx(M.a, rel=1e-12)
    assert ce.is_special_loading(load, M)
    sol = ce.solve_differential_model(load, M)
    R = ce.integral_eom_residual(sol)
    assert R.max_abs_coeff() <= 1e-10 * ce.residual_scale(sol)


def test_nonlocal_stress_routes_agree():
    sol = ce.solve_differential_model(LOAD, M)
    c13, c23 = ce.closed_form_nonlocal_stresses(LOAD, M)
    assert ce._relative_gap(sol.s13, c13) <= 1e-12
    assert ce._relative_gap(sol.s23, c23) <= 1e-12
    for s in (sol.s13, sol.s23):
        assert abs(extra_condition_residual(s, M.a)) <= 1e-12 * s.max_abs_coeff()


def test_coupled_equations_leave_only_layers():
    sol = ce.solve_differential_model(LOAD, M)
    for r in coupled_stress_eqs_residual(sol.s13, sol.s23, LOAD, M):
        assert not r.is_zero()
        assert all(abs(t.rate - 1 / M.a) <= 1e-10 / M.a for t in r.terms)


def test_coupled_equations_trivial_cases():
    zero = ce.solve_differential_model(HarmonicLoad(0, 1, 0.5), M)
    assert all(r.is_zero() for r in coupled_stress_eqs_residual(zero.s13, zero.s23, zero.load, M))
    local_m = MaterialParams(1, 1, 0.0)
    local = ce.solve_differential_model(LOAD, local_m)
    r1, r2 = coupled_stress_eqs_residual(local.s13, local.s23, LOAD, local_m)
    assert r1.is_zero() and r2.is_zero()


def test_report_defaults():
    rep = ce.report(LOAD, M)
    assert rep["reproduces"] and rep["residual_nonzero"] and not rep["special_loading"]
    assert all(c["pass"] for c in rep["checks"].values())
    assert rep["residual_decay_rate"] == pytest.approx(100.0, rel=1e-14)


def test_phase_factor():
    assert ce.phase_factor(LOAD, 0.0, 0.0) == 1
    assert abs(ce.phase_factor(LOAD, 1.0, 2.0)) == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(1e-3, 0.2),
    k0=st.floats(0.2, 3.0),
    ratio=st.floats(0.0, 0.95),
    F=st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False),
)
def test_residual_amplitude_property(a, k0, ratio, F):
    m = MaterialParams(1.0, 1.0, a)
    load = HarmonicLoad(F, k0, ratio)
    sol = ce.solve_differential_model(load, m)
    assert ce.differential_eom_residual(sol).max_abs_coeff() <= 1e-11 * ce.differential_residual_scale(sol)
    R = ce.integral_eom_residual(sol)
    expected = ce.residual_amplitude(load, m)
    got = R.coeffs_at(1 / a)[0] if not R.is_zero() else 0
    assert abs(got - expected) <= 1e-9 * ce.residual_scale(sol)
    assert all(abs(t.rate - 1 / a) <= 1e-9 / a for t in R.terms)

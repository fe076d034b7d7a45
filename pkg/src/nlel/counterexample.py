"""Travelling-load counter-example to integral/differential equivalence.

The half-space ``x2 >= 0`` is loaded by ``F exp(i k0 (x1 - c0 t))``.  The
differential (Eringen) model gives a single decaying exponential for the
displacement.  Convolving its local stresses with the exponential kernel and
substituting into the equation of motion written in nonlocal stresses leaves
a residual confined to a boundary layer of width ``a``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .asymptotics import extra_condition_residual
from .core import HarmonicLoad, MaterialParams
from .exceptions import ConsistencyError, DegenerateDenominator, SupersonicLoad
from .profiles import ExpPolyProfile, convolve_halfline, linear_combine

DEGENERATE_TOL = 1e-10
ANALYTIC_RTOL = 1e-12


@dataclass(frozen=True)
class ModeSolution:
    """Harmonic solution with the travelling factor separated out.

    Attributes
    ----------
    gamma : float
        Transverse decay, ``u ~ exp(-k0 gamma x2)``.
    amplitude : complex
        Displacement at the surface.
    u, sigma13, sigma23 : ExpPolyProfile
        Displacement and local stresses.
    s13, s23 : ExpPolyProfile
        Nonlocal stresses obtained by kernel convolution of the local ones.
    """

    gamma: float
    amplitude: complex
    u: ExpPolyProfile
    sigma13: ExpPolyProfile
    sigma23: ExpPolyProfile
    s13: ExpPolyProfile
    s23: ExpPolyProfile
    load: HarmonicLoad
    material: MaterialParams

    @property
    def decay_rate(self) -> float:
        return self.load.k0 * self.gamma


def gamma(load: HarmonicLoad, m: MaterialParams) -> float:
    """Decay factor ``sqrt((c2^2 - c0^2) / (c2^2 - a^2 k0^2 c0^2))``."""
    c2 = m.c2
    if load.c0 >= c2:
        raise SupersonicLoad(f"load speed c0={load.c0!r} is not below the shear speed c2={c2!r}")
    den = c2**2 - (m.a * load.k0 * load.c0) ** 2
    if den <= 0:
        raise DegenerateDenominator("a k0 c0 >= c2: the differential model has no decaying mode")
    return math.sqrt((c2**2 - load.c0**2) / den)


def special_loading_speed(k0: float, m: MaterialParams) -> float:
    """Load speed for which ``gamma = a k0`` and the residual vanishes."""
    return m.c2 / math.sqrt(1.0 + (m.a * k0) ** 2)


def closed_form_nonlocal_stresses(load: HarmonicLoad, m: MaterialParams) -> tuple[ExpPolyProfile, ExpPolyProfile]:
    """Nonlocal stresses ``(s13, s23)`` written out by hand for ``a > 0``."""
    g = gamma(load, m)
    a, k0, F = m.a, load.k0, load.F
    ag = a * k0 * g
    _check_denominator(ag)
    layer = ExpPolyProfile.exponential(1.0 + ag, 1.0 / a)
    bulk = ExpPolyProfile.exponential(-2.0, k0 * g)
    bracket = layer + bulk
    s13 = bracket.scaled(1j * F / (g * (1.0 - ag)))
    s23 = bracket.scaled(-F / (1.0 - ag))
    return s13, s23


def _check_denominator(ag: float) -> None:
    if abs(1.0 - ag) < DEGENERATE_TOL:
        raise DegenerateDenominator(f"1 - a k0 gamma = {1.0 - ag!r} is numerically zero")


def _relative_gap(p: ExpPolyProfile, q: ExpPolyProfile) -> float:
    scale = max(p.max_abs_coeff(), q.max_abs_coeff())
    if scale == 0.0:
        return 0.0
    d = linear_combine([(1.0, p), (-1.0, q)])
    return d.max_abs_coeff() / scale


def solve_differential_model(
    load: HarmonicLoad, m: MaterialParams, *, gamma_override: float | None = None
) -> ModeSolution:
    """Solve the differential model under the travelling load.

    ``gamma_override`` replaces the decay factor (fault injection for
    verification runs); the result is then not a solution.

    For ``a > 0`` the convolved nonlocal stresses are cross-checked against
    :func:`closed_form_nonlocal_stresses`.  For ``a = 0`` the kernel is the
    identity and the classical antiplane solution is returned.
    """
    g = gamma(load, m) if gamma_override is None else float(gamma_override)
    a, k0, F, mu = m.a, load.k0, load.F, m.mu
    if a == 0.0:
        U = -F / (k0 * mu * g)
    else:
        _check_denominator(a * k0 * g)
        U = -2.0 * F * (1.0 + a * k0 * g) / (k0 * mu * g)

    u = ExpPolyProfile.exponential(U, k0 * g)
    sigma13 = u.scaled(1j * k0 * mu)
    sigma23 = u.derivative().scaled(mu)
    s13 = convolve_halfline(sigma13, a)
    s23 = convolve_halfline(sigma23, a)

    if a > 0 and gamma_override is None:
        c13, c23 = closed_form_nonlocal_stresses(load, m)
        gap = max(_relative_gap(s13, c13), _relative_gap(s23, c23))
        if gap > ANALYTIC_RTOL:
            raise ConsistencyError(f"closed-form and convolved nonlocal stresses differ by {gap:.3g}")

    return ModeSolution(g, complex(U), u, sigma13, sigma23, s13, s23, load, m)


def differential_eom_residual(sol: ModeSolution) -> ExpPolyProfile:
    """``(c2^2 - a^2 k0^2 c0^2) u'' - k0^2 (c2^2 - c0^2) u``."""
    m, load = sol.material, sol.load
    c2sq = m.c2**2
    return linear_combine(
        [
            (c2sq - (m.a * load.k0 * load.c0) ** 2, sol.u.derivative(2)),
            (-(load.k0**2) * (c2sq - load.c0**2), sol.u),
        ]
    )


def differential_residual_scale(sol: ModeSolution) -> float:
    scale = sol.material.c2**2 * sol.load.k0**2 * abs(sol.amplitude)
    return scale if scale > 0 else 1.0


def integral_eom_residual(sol: ModeSolution, *, rtol: float = ANALYTIC_RTOL) -> ExpPolyProfile:
    """Equation of motion in nonlocal stresses, ``i k0 s13 + s23' + rho k0^2 c0^2 u``.

    Terms below ``rtol`` times the largest contributing coefficient are
    treated as rounding and dropped.
    """
    m, load = sol.material, sol.load
    pieces = [
        (1j * load.k0, sol.s13),
        (1.0, sol.s23.derivative()),
        (m.rho * (load.k0 * load.c0) ** 2, sol.u),
    ]
    scale = max(abs(w) * p.max_abs_coeff() for w, p in pieces)
    return linear_combine(pieces).pruned(scale, rtol)


def residual_amplitude(load: HarmonicLoad, m: MaterialParams) -> complex:
    """Boundary-layer amplitude ``F (1 + a k0 g)(g - a k0) / (a g (1 - a k0 g))``."""
    g = gamma(load, m)
    a, k0, F = m.a, load.k0, load.F
    return F * (1.0 + a * k0 * g) * (g - a * k0) / (a * g * (1.0 - a * k0 * g))


def residual_scale(sol: ModeSolution) -> float:
    """Size of the individual contributions to the boundary-layer residual."""
    m, load = sol.material, sol.load
    if m.a == 0.0:
        return abs(load.F) * load.k0 / sol.gamma
    ag = m.a * load.k0 * sol.gamma
    return abs(load.F) * abs((1.0 + ag) / (1.0 - ag)) * max(1.0 / m.a, load.k0 / sol.gamma)


def is_special_loading(load: HarmonicLoad, m: MaterialParams, rtol: float = 1e-8) -> bool:
    a = m.a
    if a == 0.0:
        return False
    return abs(gamma(load, m) - a * load.k0) <= rtol * max(1.0, a * load.k0)


def report(load: HarmonicLoad, m: MaterialParams, *, gamma_override: float | None = None) -> dict:
    """JSON-ready summary of the counter-example with invariant checks."""
    sol = solve_differential_model(load, m, gamma_override=gamma_override)
    a = m.a
    checks = {}

    d_res = differential_eom_residual(sol)
    d_err = d_res.max_abs_coeff() / differential_residual_scale(sol)
    checks["differential_eom_residual"] = (d_err, d_err <= ANALYTIC_RTOL)

    s23_0 = sol.s23(0.0)
    bc_err = abs(s23_0 - load.F) / max(abs(load.F), 1e-300) if load.F != 0 else abs(s23_0)
    checks["surface_condition"] = (bc_err, bc_err <= ANALYTIC_RTOL)

    stress_scale = max(sol.s13.max_abs_coeff(), sol.s23.max_abs_coeff(), 1e-300)
    ex = max(abs(extra_condition_residual(sol.s13, a)), abs(extra_condition_residual(sol.s23, a))) / stress_scale
    checks["extra_conditions"] = (ex, ex <= ANALYTIC_RTOL)

    R = integral_eom_residual(sol)
    scale = residual_scale(sol) if load.F != 0 else 1.0
    special = is_special_loading(load, m)
    amp = 0j
    decay = None
    if not R.is_zero():
        if len(R.terms) == 1 and R.terms[0].degree == 0:
            amp = R.terms[0].coeffs[0]
            decay = R.terms[0].rate.real
    single_layer = R.is_zero() or (decay is not None and a > 0 and abs(decay - 1.0 / a) <= 1e-12 / a)
    checks["residual_is_boundary_layer"] = (0.0 if single_layer else 1.0, single_layer)

    if a > 0 and load.F != 0 and gamma_override is None:
        expected = residual_amplitude(load, m)
        amp_err = abs(amp - expected) / max(abs(expected), 1e-300 * scale) if not special else abs(amp) / scale
        checks["residual_amplitude"] = (amp_err, amp_err <= 1e-10)

    residual_zero = abs(amp) <= 1e-10 * scale
    reproduces = (not residual_zero) or special or load.F == 0 or a == 0.0

    return {
        "inputs": {
            "mu": m.mu,
            "rho": m.rho,
            "a": a,
            "F": [load.F.real, load.F.imag],
            "k0": load.k0,
            "c0": load.c0,
        },
        "gamma": sol.gamma,
        "u0": [sol.amplitude.real, sol.amplitude.imag],
        "residual_amplitude": [complex(amp).real, complex(amp).imag],
        "residual_relative": abs(amp) / scale,
        "residual_decay_rate": decay,
        "special_loading": special,
        "residual_nonzero": not residual_zero,
        "reproduces": reproduces,
        "checks": {name: {"error": float(err), "pass": bool(ok)} for name, (err, ok) in checks.items()},
    }


def phase_factor(load: HarmonicLoad, x1: float, t: float) -> complex:
    """The separated travelling factor ``exp(i k0 (x1 - c0 t))``."""
    return cmath.exp(1j * load.k0 * (x1 - load.c0 * t))

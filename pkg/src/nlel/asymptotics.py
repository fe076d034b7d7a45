"""Boundary-layer asymptotics of the singularly perturbed nonlocal model.

Everything here is dimensionless: depth ``zeta_p = x2 / l`` (slow) and
``zeta_q = x2 / a = zeta_p / eta`` (fast), stresses scaled by ``mu``.  The
load is a single harmonic ``f* exp(i kappa (xi1 - C tau))`` so that
``d/dxi1 -> i kappa`` and ``d^2/dtau^2 -> -kappa^2 C^2``.  With the default
``l = 1/k0`` one has ``kappa = 1``.

Nonlocal stresses split into slow parts ``p`` (functions of ``zeta_p``) and
layer parts ``q = Q exp(-zeta_q)``; ``s13 = p13 + q13`` and
``s23 = p23 + eta q23``.  Orders 0, 1 and 2 are solved in sequence, each
order needing surface traces of the previous ones.  The extra surface
condition is imposed for ``j = 1`` only; its ``j = 2`` counterpart is then
violated at O(1), which is the ill-posedness witness.

Composite profiles returned by :func:`solve_hierarchy` are functions of
``zeta_p``; the layer term ``exp(-zeta_q)`` appears with decay rate
``1/eta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .core import HarmonicLoad, MaterialParams
from .exceptions import DegenerateDenominator, InvalidParameter, InvalidSpeed, ValidityWarning
from .profiles import ExpPolyProfile, linear_combine

ETA_VALIDITY = 0.2


def singular_relation_residual(s: ExpPolyProfile, sigma: ExpPolyProfile, a: float) -> ExpPolyProfile:
    """``a^2 s'' - s + sigma``; zero when ``s`` solves the singular relation."""
    return linear_combine([(a * a, s.derivative(2)), (-1.0, s), (1.0, sigma)])


def extra_condition_residual(s: ExpPolyProfile, a: float) -> complex:
    """``s(0) - a s'(0)``.

    Every half-line convolution satisfies this exactly; a pure layer
    ``exp(-x/a)`` gives 2.
    """
    return s(0.0) - a * s.derivative()(0.0)


def coupled_stress_eqs_residual(
    s13: ExpPolyProfile,
    s23: ExpPolyProfile,
    load: HarmonicLoad,
    m: MaterialParams,
    *,
    rtol: float = 1e-12,
) -> tuple[ExpPolyProfile, ExpPolyProfile]:
    """Residuals of the two second-order equations in nonlocal stresses.

    Only a verification functional; there is no solver for this system.
    Terms below ``rtol`` of the largest contribution are dropped.
    """
    k0, a = load.k0, m.a
    w = (k0 * load.c0 / m.c2) ** 2
    ik = 1j * k0
    eq1 = [
        (-(k0**2), s13),
        (ik, s23.derivative()),
        (w, s13),
        (-w * a * a, s13.derivative(2)),
    ]
    eq2 = [
        (1.0, s23.derivative(2)),
        (ik, s13.derivative()),
        (w, s23),
        (-w * a * a, s23.derivative(2)),
    ]
    out = []
    for pieces in (eq1, eq2):
        scale = max(abs(c) * p.max_abs_coeff() for c, p in pieces)
        out.append(linear_combine(pieces).pruned(scale, rtol))
    return out[0], out[1]


@dataclass(frozen=True)
class SlowField:
    """Order-``k`` slow displacement and local stresses in ``zeta_p``.

    The slow nonlocal parts coincide with the local stresses at orders 0 and
    1; at order 2 they pick up ``sigma^(0)''``.
    """

    order: int
    u: ExpPolyProfile
    sigma13: ExpPolyProfile
    sigma23: ExpPolyProfile


@dataclass(frozen=True)
class LayerField:
    """Order-``k`` boundary-layer amplitudes, ``q_j3 = Q_j exp(-zeta_q)``."""

    order: int
    Q1: complex
    Q2: complex

    def q13(self) -> ExpPolyProfile:
        """Layer profile as a function of ``zeta_q``."""
        return ExpPolyProfile.exponential(self.Q1, 1.0)

    def q23(self) -> ExpPolyProfile:
        return ExpPolyProfile.exponential(self.Q2, 1.0)


@dataclass(frozen=True)
class AsymptoticSolution:
    f_star: complex
    eta: float
    C: float
    kappa: float
    slow: tuple[SlowField, SlowField, SlowField]
    layers: tuple[LayerField, LayerField, LayerField]
    composite_s13: ExpPolyProfile
    composite_s23: ExpPolyProfile
    secular: complex = 0j
    warnings: tuple[str, ...] = field(default=())

    @property
    def gamma0(self) -> float:
        return math.sqrt(1.0 - self.C**2)

    def _total(self, name: str) -> ExpPolyProfile:
        return linear_combine([(self.eta**k, getattr(f, name)) for k, f in enumerate(self.slow)])

    @property
    def u_total(self) -> ExpPolyProfile:
        return self._total("u")

    @property
    def sigma13_total(self) -> ExpPolyProfile:
        return self._total("sigma13")

    @property
    def sigma23_total(self) -> ExpPolyProfile:
        return self._total("sigma23")

    def displacement_amplitudes(self) -> tuple[complex, complex, complex]:
        return tuple(complex(f.u(0.0)) for f in self.slow)

    def to_physical(self, profile: ExpPolyProfile, l: float) -> ExpPolyProfile:
        """Re-express a ``zeta_p`` profile as a function of ``x2 = l zeta_p``."""
        return profile.stretched(1.0 / l)


def _check_speed(C: float) -> None:
    if not (0.0 <= C < 1.0):
        raise InvalidSpeed(f"dimensionless speed must lie in [0, 1), got {C!r}")


def _slow_from_u(order: int, u: ExpPolyProfile, kappa: float) -> SlowField:
    return SlowField(order, u, u.scaled(1j * kappa), u.derivative())


def solve_hierarchy(f_star: complex, eta: float, C: float, kappa: float = 1.0) -> AsymptoticSolution:
    """Three-term boundary-layer expansion for the harmonic surface load.

    Orders 0 and 1 solve the classical antiplane equation with surface
    tractions ``f*`` and ``(i kappa / 2) sigma13^(0)(0)``.  Order 2 carries the
    extra inertia term ``-d^4 u^(0) / dzeta^2 dtau^2`` whose forcing is
    resonant with the homogeneous solution, so its particular part is
    ``B zeta exp(-kappa gamma0 zeta)``.

    Raises
    ------
    InvalidSpeed
        If ``C`` is outside ``[0, 1)``.
    InvalidParameter
        If ``eta <= 0``.  ``eta > 0.2`` only emits a :class:`ValidityWarning`.
    """
    _check_speed(C)
    if not eta > 0:
        raise InvalidParameter(f"eta must be positive, got {eta!r}")
    notes = []
    if eta > ETA_VALIDITY:
        msg = f"eta={eta!r} exceeds the nominal validity range (0, {ETA_VALIDITY}]"
        warnings.warn(msg, ValidityWarning, stacklevel=2)
        notes.append("eta_out_of_range")

    f_star = complex(f_star)
    ik = 1j * kappa
    w = (kappa * C) ** 2
    m = kappa * math.sqrt(1.0 - C * C)

    def d(p, n=1):
        return p.derivative(n)

    # order 0
    u0 = ExpPolyProfile.exponential(-f_star / m, m)
    o0 = _slow_from_u(0, u0, kappa)
    Q1_0 = -0.5 * o0.sigma13(0.0)
    l0 = LayerField(0, Q1_0, ik * Q1_0)

    # order 1
    t1 = 0.5 * ik * o0.sigma13(0.0)
    u1 = ExpPolyProfile.exponential(-t1 / m, m)
    o1 = _slow_from_u(1, u1, kappa)
    Q1_1 = 0.5 * (d(o0.sigma13)(0.0) - o1.sigma13(0.0))
    l1 = LayerField(1, Q1_1, ik * Q1_1)

    # order 2: u2'' - m^2 u2 = kappa^2 C^2 u0''
    t2 = -d(o0.sigma23, 2)(0.0) - 0.5 * ik * d(o0.sigma13)(0.0) + 0.5 * ik * o1.sigma13(0.0)
    forcing = w * d(u0, 2).coeffs_at(m)[0]
    B = -forcing / (2.0 * m)
    U2 = (B - t2) / m
    u2 = ExpPolyProfile.term([U2, B], m)
    o2 = _slow_from_u(2, u2, kappa)
    Q1_2 = 0.5 * (d(o1.sigma13)(0.0) - o2.sigma13(0.0) - d(o0.sigma13, 2)(0.0))
    l2 = LayerField(2, Q1_2, ik * Q1_2)

    slow = (o0, o1, o2)
    layers = (l0, l1, l2)
    layer = ExpPolyProfile.exponential(1.0, 1.0 / eta)
    e, e2 = eta, eta * eta

    s13 = linear_combine(
        [
            (1.0, o0.sigma13),
            (e, o1.sigma13),
            (e2, o2.sigma13),
            (e2, d(o0.sigma13, 2)),
            (Q1_0 + e * Q1_1 + e2 * Q1_2, layer),
        ]
    )
    s23 = linear_combine(
        [
            (1.0, o0.sigma23),
            (e, o1.sigma23),
            (e2, o2.sigma23),
            (e2, d(o0.sigma23, 2)),
            (e * l0.Q2 + e2 * l1.Q2, layer),
        ]
    )
    return AsymptoticSolution(f_star, eta, C, kappa, slow, layers, s13, s23, complex(B), tuple(notes))


def composite_s23(sol: AsymptoticSolution, *, truncate: bool = True) -> ExpPolyProfile:
    """Nonlocal shear stress written through the total local stresses.

    ``sigma23* - (eta/2) i kappa sigma13*(0) e^{-zeta_q}
    + eta^2 (sigma23*'' + (1/2) i kappa sigma13*'(0) e^{-zeta_q})``.

    With ``truncate`` every product is expanded by order and cut at
    ``eta^2``, which reproduces the p/q assembly term for term.  Without it
    the totals are used as they stand; the two differ at O(eta^3).
    """
    eta, ik = sol.eta, 1j * sol.kappa
    o0, o1, o2 = sol.slow
    layer = ExpPolyProfile.exponential(1.0, 1.0 / eta)
    if truncate:
        sig13_0 = o0.sigma13(0.0) + eta * o1.sigma13(0.0)
        dsig13_0 = o0.sigma13.derivative()(0.0)
        dd23 = o0.sigma23.derivative(2)
    else:
        sig13_0 = sol.sigma13_total(0.0)
        dsig13_0 = sol.sigma13_total.derivative()(0.0)
        dd23 = sol.sigma23_total.derivative(2)
    amp = -0.5 * eta * ik * sig13_0 + eta * eta * 0.5 * ik * dsig13_0
    return linear_combine([(1.0, sol.sigma23_total), (eta * eta, dd23), (amp, layer)])


def order_eom_residual(sol: AsymptoticSolution, order: int) -> ExpPolyProfile:
    """Residual of the order-``k`` slow equation of motion."""
    f = sol.slow[order]
    w = (sol.kappa * sol.C) ** 2
    pieces = [(1j * sol.kappa, f.sigma13), (1.0, f.sigma23.derivative()), (w, f.u)]
    if order == 2:
        pieces.append((-w, sol.slow[0].u.derivative(2)))
    return linear_combine(pieces)


def layer_ode_residual(layer: LayerField) -> tuple[ExpPolyProfile, ExpPolyProfile]:
    """``q - q''`` in ``zeta_q`` for both layer stresses."""
    return tuple(q - q.derivative(2) for q in (layer.q13(), layer.q23()))


def layer_divergence_residual(layer: LayerField, kappa: float) -> ExpPolyProfile:
    """``i kappa q13 + dq23/dzeta_q``."""
    return linear_combine([(1j * kappa, layer.q13()), (1.0, layer.q23().derivative())])


def combined_eom_residual(sol: AsymptoticSolution) -> ExpPolyProfile:
    """Three-term equation ``i kappa sigma13* + sigma23*' = u*_tt - eta^2 u*_zztt``."""
    w = (sol.kappa * sol.C) ** 2
    u = sol.u_total
    return linear_combine(
        [
            (1j * sol.kappa, sol.sigma13_total),
            (1.0, sol.sigma23_total.derivative()),
            (w, u),
            (-w * sol.eta**2, u.derivative(2)),
        ]
    )


def _effective_bc_lhs(sig13: ExpPolyProfile, sig23: ExpPolyProfile, eta: float, kappa: float) -> complex:
    ik = 1j * kappa
    return (
        sig23(0.0)
        - 0.5 * eta * ik * sig13(0.0)
        + eta**2 * (0.5 * ik * sig13.derivative()(0.0) + sig23.derivative(2)(0.0))
    )


def _extra_bc_lhs(sig13: ExpPolyProfile, sig23: ExpPolyProfile, eta: float, kappa: float) -> complex:
    ik = 1j * kappa
    return (
        sig23(0.0)
        - eta * (sig23.derivative()(0.0) + ik * sig13(0.0))
        + eta**2 * (sig23.derivative(2)(0.0) + ik * sig13.derivative()(0.0))
    )


def combined_bc_residual(sol: AsymptoticSolution) -> complex:
    """Effective surface condition on the three-term local stresses, minus ``f*``."""
    return _effective_bc_lhs(sol.sigma13_total, sol.sigma23_total, sol.eta, sol.kappa) - sol.f_star


def sup_norm(p: ExpPolyProfile, upper: float, n: int = 401) -> float:
    """Maximum modulus of ``p`` on ``[0, upper]`` sampled at ``n`` points."""
    if p.is_zero():
        return 0.0
    return float(np.max(np.abs(p(np.linspace(0.0, upper, n)))))


@dataclass(frozen=True)
class EffectiveSolution:
    """Decaying solution ``U exp(-kappa gamma zeta)`` of the effective model."""

    f_star: complex
    eta: float
    C: float
    kappa: float
    gamma: float
    U: complex
    u: ExpPolyProfile
    sigma13: ExpPolyProfile
    sigma23: ExpPolyProfile


def effective_gamma(eta: float, C: float, kappa: float = 1.0, inertia: bool = True) -> float:
    _check_speed(C)
    if not inertia:
        return math.sqrt(1.0 - C * C)
    den = 1.0 - (eta * kappa * C) ** 2
    if den <= 0:
        raise InvalidSpeed("eta^2 kappa^2 C^2 must be below 1")
    return math.sqrt((1.0 - C * C) / den)


def effective_bc_symbol(
    C: float,
    eta: float,
    kappa: float = 1.0,
    *,
    bc_orders: tuple[int, ...] = (1, 2),
    inertia: bool = True,
) -> complex:
    """Effective boundary operator applied to ``exp(-kappa gamma zeta)`` at the surface.

    ``bc_orders`` selects which of the O(eta) and O(eta^2) surface corrections
    are kept; ``inertia`` toggles the O(eta^2) inertia term of the bulk
    equation (through ``gamma``).  A zero symbol with ``f* = 0`` means a
    nontrivial decaying (surface-wave) solution.
    """
    m = kappa * effective_gamma(eta, C, kappa, inertia)
    D = -m
    if 1 in bc_orders:
        D += 0.5 * eta * kappa**2
    if 2 in bc_orders:
        D += eta**2 * (0.5 * kappa**2 * m - m**3)
    return D


def effective_bvp_solve(
    f_star: complex,
    eta: float,
    C: float,
    kappa: float = 1.0,
    *,
    bc_orders: tuple[int, ...] = (1, 2),
    inertia: bool = True,
) -> EffectiveSolution:
    """Solve the effective boundary value problem in local stresses directly.

    ``eta = 0`` is the classical antiplane problem.  The bulk equation carries
    the Eringen inertia correction and the surface condition the layer-induced
    O(eta) and O(eta^2) terms; either can be switched off to measure its
    effect.
    """
    if eta < 0:
        raise InvalidParameter(f"eta must be non-negative, got {eta!r}")
    g = effective_gamma(eta, C, kappa, inertia)
    D = effective_bc_symbol(C, eta, kappa, bc_orders=bc_orders, inertia=inertia)
    if abs(D) < 1e-14:
        raise DegenerateDenominator("effective boundary symbol vanishes; load resonates with a surface wave")
    U = complex(f_star) / D
    u = ExpPolyProfile.exponential(U, kappa * g)
    return EffectiveSolution(complex(f_star), eta, C, kappa, g, U, u, u.scaled(1j * kappa), u.derivative())


def homogeneous_speed(K: float, eta: float = 0.05) -> float:
    """Speed ``C`` at which the O(eta) effective problem has a free surface wave.

    ``K = eta kappa`` is the dimensionless wavenumber ``a k``; the O(eta^2)
    terms are neglected.  Solved by bracketing on ``C`` in ``[0, 1]``.
    """
    if not 0 < K < 2:
        raise InvalidParameter(f"free surface wave needs 0 < K < 2, got {K!r}")
    kappa = K / eta

    def symbol(C):
        return effective_bc_symbol(C, eta, kappa, bc_orders=(1,), inertia=False).real

    return optimize.brentq(symbol, 0.0, math.nextafter(1.0, 0.0), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class ContradictionReport:
    """Surface conditions evaluated on an asymptotic solution.

    ``original_bc_lhs`` should equal ``f*`` while ``extra_condition_lhs``
    should vanish; they cannot both hold unless ``f* = 0``.
    """

    f_star: complex
    eta: float
    original_bc_lhs: complex
    extra_condition_lhs: complex
    j1_residual: complex
    j2_residual: complex

    @property
    def bc_residual(self) -> complex:
        return self.original_bc_lhs - self.f_star

    @property
    def discrepancy(self) -> float:
        """How far the two surface conditions are from holding simultaneously."""
        return abs(self.extra_condition_lhs)

    @property
    def ill_posed(self) -> bool:
        return self.f_star != 0 and abs(self.j2_residual) >= 0.5 * abs(self.f_star)

    def to_dict(self) -> dict:
        def c(z):
            return [complex(z).real, complex(z).imag]

        return {
            "f_star": c(self.f_star),
            "eta": self.eta,
            "original_bc_lhs": c(self.original_bc_lhs),
            "extra_condition_lhs": c(self.extra_condition_lhs),
            "bc_residual": c(self.bc_residual),
            "j1_residual": c(self.j1_residual),
            "j2_residual": c(self.j2_residual),
            "discrepancy": self.discrepancy,
            "ill_posed": self.ill_posed,
        }


def contradiction_report(sol: AsymptoticSolution) -> ContradictionReport:
    """Evaluate both surface conditions written in local stresses."""
    s13, s23 = sol.sigma13_total, sol.sigma23_total
    return ContradictionReport(
        f_star=sol.f_star,
        eta=sol.eta,
        original_bc_lhs=_effective_bc_lhs(s13, s23, sol.eta, sol.kappa),
        extra_condition_lhs=_extra_bc_lhs(s13, s23, sol.eta, sol.kappa),
        j1_residual=extra_condition_residual(sol.composite_s13, sol.eta),
        j2_residual=extra_condition_residual(sol.composite_s23, sol.eta),
    )


def fit_exponent(etas, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(etas)``."""
    etas = np.asarray(etas, dtype=float)
    values = np.abs(np.asarray(values, dtype=complex))
    if len(etas) < 2:
        raise InvalidParameter("an exponent fit needs at least two points")
    if np.any(values == 0):
        raise InvalidParameter("cannot fit an exponent through exact zeros")
    return float(np.polyfit(np.log(etas), np.log(values), 1)[0])


def scaling_study(f_star: complex, C: float, etas, kappa: float = 1.0) -> dict:
    """Residuals per ``eta`` and their fitted convergence exponents."""
    rows = []
    for eta in etas:
        sol = solve_hierarchy(f_star, eta, C, kappa)
        eff = effective_bvp_solve(f_star, eta, C, kappa)
        rep = contradiction_report(sol)
        upper = 10.0 / (kappa * sol.gamma0)
        U = sol.displacement_amplitudes()
        rows.append(
            {
                "eta": eta,
                "U": [[z.real, z.imag] for z in U],
                "secular": [sol.secular.real, sol.secular.imag],
                "Q1": [[l.Q1.real, l.Q1.imag] for l in sol.layers],
                "Q2": [[l.Q2.real, l.Q2.imag] for l in sol.layers],
                "combined_eom_residual": sup_norm(combined_eom_residual(sol), upper),
                "combined_bc_residual": abs(combined_bc_residual(sol)),
                "order_eom_residuals": [sup_norm(order_eom_residual(sol, k), upper) for k in range(3)],
                "effective_gap": abs(eff.u(0.0) - sol.u_total(0.0)),
                "contradiction": rep.to_dict(),
            }
        )
    exponents = {}
    fit_warnings = []
    keys = {
        "combined_eom_residual": lambda r: r["combined_eom_residual"],
        "combined_bc_residual": lambda r: r["combined_bc_residual"],
        "effective_gap": lambda r: r["effective_gap"],
        "j1_residual": lambda r: complex(*r["contradiction"]["j1_residual"]),
    }
    if len(rows) < 2:
        fit_warnings.append("fewer than two eta values: scaling fits skipped")
    else:
        for name, get in keys.items():
            vals = [get(r) for r in rows]
            if all(v == 0 for v in vals):
                exponents[name] = None
                continue
            try:
                exponents[name] = fit_exponent([r["eta"] for r in rows], vals)
            except InvalidParameter as exc:
                exponents[name] = None
                fit_warnings.append(f"{name}: {exc}")
    return {"f_star": [complex(f_star).real, complex(f_star).imag], "C": C, "kappa": kappa,
            "rows": rows, "exponents": exponents, "warnings": fit_warnings}

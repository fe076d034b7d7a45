"""Invariant suites run by ``nlel verify``.

Each suite returns a :class:`CheckResult` carrying the worst measured error
against its tolerance.  Suites never raise on numerical failure; exceptions
such as :class:`~nlel.exceptions.NoConvergence` are reported as failures.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import asymptotics as asy
from . import counterexample as ce
from .core import HarmonicLoad, MaterialParams
from .dispersion import KernelBranch, dispersion_point, dispersion_speed, sample_curve
from .exceptions import NlelError
from .profiles import (
    ExpPolyProfile,
    ExpPolyTerm,
    KernelSpec,
    convolve_halfline,
    quadrature_convolution_oracle,
)

DEFAULT_SEED = 20211014


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    value = os.environ.get("NLEL_SEED")
    if value is None or value == "":
        return default
    return int(value)


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "error": self.error,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class VerifySettings:
    material: MaterialParams = field(default_factory=lambda: MaterialParams(1.0, 1.0, 0.01))
    load: HarmonicLoad = field(default_factory=lambda: HarmonicLoad(1.0, 1.0, 0.5))
    etas: tuple[float, ...] = (0.08, 0.04, 0.02)
    tol_analytic: float = 1e-12
    tol_quadrature: float = 1e-8
    seed: int = DEFAULT_SEED
    fault: str | None = None


def random_profile(rng: np.random.Generator, a: float, max_terms: int = 3, max_degree: int = 2) -> ExpPolyProfile:
    """Random decaying profile with rates kept away from the kernel resonance ``1/a``."""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        while True:
            rate = complex(rng.uniform(0.1, 5.0), rng.uniform(-3.0, 3.0))
            if abs(a * rate - 1.0) > 0.05:
                break
        deg = int(rng.integers(0, max_degree + 1))
        coeffs = tuple(complex(*rng.normal(size=2)) for _ in range(deg + 1))
        terms.append(ExpPolyTerm(coeffs, rate))
    return ExpPolyProfile(tuple(terms))


def random_cases(seed: int, n: int = 50):
    """``n`` seeded (profile, kernel length, sample depths) triples."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n):
        a = float(rng.uniform(0.01, 0.5))
        p = random_profile(rng, a)
        xs = rng.uniform(0.0, 3.0, size=10)
        cases.append((p, a, xs))
    return cases


def _one_line(exc: Exception) -> str:
    return f"{type(exc).__name__}: " + " ".join(str(exc).split())


def _rel_scale(*profiles: ExpPolyProfile) -> float:
    return max([1.0] + [p.max_abs_coeff() for p in profiles])


def check_convolution_oracle(s: VerifySettings) -> CheckResult:
    worst = 0.0
    tol = s.tol_quadrature
    try:
        for p, a, xs in random_cases(s.seed):
            conv = convolve_halfline(p, a)
            kernel = KernelSpec(a)
            for x in xs:
                q = quadrature_convolution_oracle(p, kernel, float(x), tol * 1e-2)
                worst = max(worst, abs(conv(float(x)) - q))
    except NlelError as exc:
        return CheckResult("convolution_vs_quadrature", False, math.inf, tol, _one_line(exc))
    return CheckResult("convolution_vs_quadrature", worst <= tol, worst, tol)


def check_kernel_ode(s: VerifySettings) -> CheckResult:
    worst = 0.0
    for p, a, xs in random_cases(s.seed):
        conv = convolve_halfline(p, a)
        r = asy.singular_relation_residual(conv, p, a)
        grid = np.concatenate([xs, np.linspace(1e-9, 3.0, 31)])
        err = float(np.max(np.abs(r(grid)))) / _rel_scale(conv, p)
        worst = max(worst, err)
    return CheckResult("kernel_ode_identity", worst <= s.tol_analytic, worst, s.tol_analytic)


def check_boundary_identity(s: VerifySettings) -> CheckResult:
    worst = 0.0
    for p, a, _ in random_cases(s.seed):
        conv = convolve_halfline(p, a)
        err = abs(asy.extra_condition_residual(conv, a)) / _rel_scale(conv, p)
        worst = max(worst, err)
    return CheckResult("boundary_identity", worst <= s.tol_analytic, worst, s.tol_analytic)


def check_counterexample(s: VerifySettings) -> CheckResult:
    override = None
    if s.fault == "gamma":
        override = 1.01 * ce.gamma(s.load, s.material)
    rep = ce.report(s.load, s.material, gamma_override=override)
    failed = [name for name, c in rep["checks"].items() if not c["pass"]]
    worst = max(c["error"] for c in rep["checks"].values())
    if not rep["reproduces"]:
        failed.append("residual_vanishes_for_generic_load")
    return CheckResult(
        "counterexample_invariants",
        not failed,
        worst,
        s.tol_analytic,
        "failed: " + ", ".join(failed) if failed else "",
    )


def check_stress_routes(s: VerifySettings) -> CheckResult:
    rng = np.random.default_rng(s.seed + 1)
    worst = 0.0
    for _ in range(20):
        m = MaterialParams(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0)), float(rng.uniform(1e-3, 0.2)))
        load = HarmonicLoad(complex(*rng.normal(size=2)), float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.0, 0.95)) * m.c2)
        sol = ce.solve_differential_model(load, m)
        c13, c23 = ce.closed_form_nonlocal_stresses(load, m)
        worst = max(worst, ce._relative_gap(sol.s13, c13), ce._relative_gap(sol.s23, c23))
    return CheckResult("stress_routes_agree", worst <= s.tol_analytic, worst, s.tol_analytic)


def _hierarchy_speed(s: VerifySettings) -> tuple[complex, float]:
    return s.load.F / s.material.mu, s.load.speed_ratio(s.material)


def check_hierarchy_identities(s: VerifySettings) -> CheckResult:
    f_star, C = _hierarchy_speed(s)
    worst = 0.0
    scale = max(1.0, abs(f_star))
    for eta in s.etas:
        sol = asy.solve_hierarchy(f_star, eta, C)
        upper = 10.0 / sol.gamma0
        for k in range(3):
            worst = max(worst, asy.sup_norm(asy.order_eom_residual(sol, k), upper) / scale)
        for layer in sol.layers:
            r13, r23 = asy.layer_ode_residual(layer)
            worst = max(worst, r13.max_abs_coeff() / scale, r23.max_abs_coeff() / scale)
            worst = max(worst, asy.layer_divergence_residual(layer, sol.kappa).max_abs_coeff() / scale)
        worst = max(worst, abs(sol.composite_s23(0.0) - f_star) / scale)
        gap = (asy.composite_s23(sol) - sol.composite_s23).max_abs_coeff()
        worst = max(worst, gap / scale)
    return CheckResult("hierarchy_identities", worst <= s.tol_analytic, worst, s.tol_analytic)


def check_hierarchy_scaling(s: VerifySettings) -> CheckResult:
    f_star, C = _hierarchy_speed(s)
    if f_star == 0 or len(s.etas) < 2:
        return CheckResult("hierarchy_eta3_scaling", True, 0.0, 0.3, "skipped: no load or single eta")
    study = asy.scaling_study(f_star, C, s.etas)
    errs = []
    for name in ("combined_eom_residual", "combined_bc_residual"):
        e = study["exponents"].get(name)
        if e is not None:
            errs.append(abs(e - 3.0))
    worst = max(errs) if errs else math.inf
    return CheckResult("hierarchy_eta3_scaling", worst <= 0.3, worst, 0.3, f"exponents={study['exponents']}")


def check_ill_posedness(s: VerifySettings) -> CheckResult:
    f_star, C = _hierarchy_speed(s)
    if f_star == 0 or len(s.etas) < 2:
        return CheckResult("ill_posedness_witness", True, 0.0, 0.0, "skipped: no load or single eta")
    reps = [asy.contradiction_report(asy.solve_hierarchy(f_star, eta, C)) for eta in s.etas]
    j1 = asy.fit_exponent(s.etas, [r.j1_residual for r in reps])
    j2_ratio = min(abs(r.j2_residual) / abs(f_star) for r in reps)
    ok = j1 >= 2.7 and j2_ratio >= 0.5
    return CheckResult("ill_posedness_witness", ok, j2_ratio, 0.5, f"j1 exponent={j1:.4f}, min |j2|/|f*|={j2_ratio:.4f}")


def check_dispersion(s: VerifySettings) -> CheckResult:
    worst = 0.0
    monotone = True
    for branch in KernelBranch:
        pts = sample_curve(branch, 0.0, 0.95 * branch.K_max, 101)
        for p in pts:
            worst = max(worst, abs(p.gamma**2 + p.C**2 - 1.0), abs(p.C**2 + branch.coefficient * p.K**2 - 1.0))
        Cs = np.array([p.C for p in pts])
        monotone &= bool(np.all(np.diff(Cs) < 0))
    return CheckResult("dispersion_identities", worst <= 1e-14 and monotone, worst, 1e-14,
                       "" if monotone else "C(K) not decreasing")


def check_dispersion_cross(s: VerifySettings) -> CheckResult:
    worst = 0.0
    for K in np.linspace(0.1, 1.9, 10):
        worst = max(worst, abs(asy.homogeneous_speed(float(K)) - dispersion_speed(float(K))))
    return CheckResult("dispersion_matches_effective_bvp", worst <= 1e-10, worst, 1e-10)


def check_local_limit(s: VerifySettings) -> CheckResult:
    m = MaterialParams(s.material.mu, s.material.rho, 0.0)
    load = s.load
    sol = ce.solve_differential_model(load, m)
    C = load.speed_ratio(m)
    errs = [abs(sol.gamma - math.sqrt(1.0 - C * C))]
    errs.append((sol.s13 - sol.sigma13).max_abs_coeff() / _rel_scale(sol.sigma13))
    errs.append(abs(sol.sigma23(0.0) - load.F) / max(1.0, abs(load.F)))
    eff = asy.effective_bvp_solve(load.F / m.mu, 0.0, C)
    errs.append(abs(eff.sigma23(0.0) - load.F / m.mu) / max(1.0, abs(load.F / m.mu)))
    errs.append(abs(dispersion_point(0.0).C - 1.0))
    worst = max(errs)
    return CheckResult("local_limit", worst <= s.tol_analytic, worst, s.tol_analytic)


SUITES: tuple[Callable[[VerifySettings], CheckResult], ...] = (
    check_convolution_oracle,
    check_kernel_ode,
    check_boundary_identity,
    check_counterexample,
    check_stress_routes,
    check_hierarchy_identities,
    check_hierarchy_scaling,
    check_ill_posedness,
    check_dispersion,
    check_dispersion_cross,
    check_local_limit,
)


def run_all(settings: VerifySettings) -> list[CheckResult]:
    results = []
    for suite in SUITES:
        try:
            results.append(suite(settings))
        except NlelError as exc:
            name = suite.__name__.removeprefix("check_")
            results.append(CheckResult(name, False, math.inf, math.nan, _one_line(exc)))
    return results

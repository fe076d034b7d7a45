"""Exact algebra of exponential-polynomial depth profiles.

A profile is a finite sum ``sum_m P_m(x) exp(-rate_m x)`` on ``x >= 0`` with
complex polynomial coefficients ``P_m`` and complex decay rates
(``Re rate >= 0``).  The set is closed under linear combination,
differentiation and convolution with the half-line exponential kernel

    k(x, y) = exp(-|x - y| / a) / (2 a),    0 <= y < inf,

which is everything the antiplane analysis needs.  An adaptive-quadrature
oracle for the same convolution lives alongside for cross-checking.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .exceptions import InvalidParameter, NoConvergence, ResonantDecay

MERGE_RTOL = 1e-12
DROP_RTOL = 1e-15
RESONANCE_TOL = 1e-8
NEAR_PANELS = 6


def _trim(coeffs: Sequence[complex], threshold: float = 0.0) -> tuple[complex, ...]:
    out = list(coeffs)
    while len(out) > 1 and abs(out[-1]) <= threshold:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class ExpPolyTerm:
    """``P(x) exp(-rate x)`` with ``P`` given by ascending ``coeffs``."""

    coeffs: tuple[complex, ...]
    rate: complex

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs) or (0j,)
        rate = complex(self.rate)
        if not (math.isfinite(rate.real) and math.isfinite(rate.imag)):
            raise InvalidParameter(f"decay rate must be finite, got {rate!r}")
        if rate.real < 0:
            raise InvalidParameter(f"decay rate must have Re >= 0, got {rate!r}")
        object.__setattr__(self, "coeffs", _trim(coeffs))
        object.__setattr__(self, "rate", rate)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        poly = np.polynomial.polynomial.polyval(x, np.array(self.coeffs))
        return poly * np.exp(-self.rate * x)

    def derivative(self) -> "ExpPolyTerm":
        c = self.coeffs
        dp = [k * c[k] for k in range(1, len(c))] + [0j]
        return ExpPolyTerm(tuple(dp[k] - self.rate * c[k] for k in range(len(c))), self.rate)


def _same_rate(r1: complex, r2: complex) -> bool:
    return abs(r1 - r2) <= MERGE_RTOL * max(1.0, abs(r1))


def _canonical_terms(terms: Iterable[ExpPolyTerm], scale: float | None = None) -> tuple[ExpPolyTerm, ...]:
    groups: list[tuple[complex, list[complex]]] = []
    for term in sorted(terms, key=lambda t: (t.rate.real, t.rate.imag)):
        for rate, acc in groups:
            if _same_rate(rate, term.rate):
                if len(acc) < len(term.coeffs):
                    acc.extend([0j] * (len(term.coeffs) - len(acc)))
                for k, c in enumerate(term.coeffs):
                    acc[k] += c
                break
        else:
            groups.append((term.rate, list(term.coeffs)))

    biggest = max((abs(c) for _, acc in groups for c in acc), default=0.0)
    if scale is None:
        scale = biggest
    threshold = DROP_RTOL * max(scale, biggest)

    out = []
    for rate, acc in groups:
        if all(abs(c) <= threshold for c in acc):
            continue
        out.append(ExpPolyTerm(_trim(acc, threshold), rate))
    return tuple(out)


@dataclass(frozen=True)
class ExpPolyProfile:
    """Immutable canonical sum of :class:`ExpPolyTerm`.

    Terms with (numerically) equal rates are merged and negligible terms are
    dropped on construction, so two profiles describing the same function have
    the same term list up to rounding.
    """

    terms: tuple[ExpPolyTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _canonical_terms(self.terms))

    @classmethod
    def _from_terms(cls, terms, scale=None) -> "ExpPolyProfile":
        return cls(_canonical_terms(terms, scale))

    @classmethod
    def zero(cls) -> "ExpPolyProfile":
        return cls(())

    @classmethod
    def exponential(cls, amplitude: complex, rate: complex) -> "ExpPolyProfile":
        return cls((ExpPolyTerm((amplitude,), rate),))

    @classmethod
    def term(cls, coeffs: Sequence[complex], rate: complex) -> "ExpPolyProfile":
        return cls((ExpPolyTerm(tuple(coeffs), rate),))

    @classmethod
    def constant(cls, value: complex) -> "ExpPolyProfile":
        return cls.exponential(value, 0.0)

    # -- inspection ----------------------------------------------------------

    @property
    def rates(self) -> tuple[complex, ...]:
        return tuple(t.rate for t in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for t in self.terms for c in t.coeffs), default=0.0)

    def coeffs_at(self, rate: complex) -> tuple[complex, ...]:
        """Polynomial coefficients multiplying ``exp(-rate x)`` (zero if absent)."""
        for t in self.terms:
            if _same_rate(t.rate, rate):
                return t.coeffs
        return (0j,)

    def __call__(self, x):
        return evaluate(self, x)

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "ExpPolyProfile") -> "ExpPolyProfile":
        if not isinstance(other, ExpPolyProfile):
            return NotImplemented
        return linear_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "ExpPolyProfile") -> "ExpPolyProfile":
        if not isinstance(other, ExpPolyProfile):
            return NotImplemented
        return linear_combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "ExpPolyProfile":
        return self.scaled(-1.0)

    def __mul__(self, c) -> "ExpPolyProfile":
        if isinstance(c, ExpPolyProfile):
            return NotImplemented
        return self.scaled(c)

    __rmul__ = __mul__

    def scaled(self, c: complex) -> "ExpPolyProfile":
        c = complex(c)
        return ExpPolyProfile(tuple(ExpPolyTerm(tuple(c * k for k in t.coeffs), t.rate) for t in self.terms))

    def derivative(self, order: int = 1) -> "ExpPolyProfile":
        p = self
        for _ in range(order):
            p = differentiate(p)
        return p

    def stretched(self, factor: float) -> "ExpPolyProfile":
        """Profile ``x -> self(factor * x)``."""
        terms = []
        for t in self.terms:
            coeffs = tuple(c * factor**k for k, c in enumerate(t.coeffs))
            terms.append(ExpPolyTerm(coeffs, t.rate * factor))
        return ExpPolyProfile(tuple(terms))

    def pruned(self, scale: float, rtol: float) -> "ExpPolyProfile":
        """Drop terms whose coefficients are all below ``rtol * scale``."""
        keep = [t for t in self.terms if max(abs(c) for c in t.coeffs) > rtol * scale]
        return ExpPolyProfile(tuple(keep))

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "terms": [
                {
                    "lambda": [t.rate.real, t.rate.imag],
                    "coeffs": [[c.real, c.imag] for c in t.coeffs],
                }
                for t in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpPolyProfile":
        terms = []
        for entry in data["terms"]:
            re, im = entry["lambda"]
            coeffs = tuple(complex(cr, ci) for cr, ci in entry["coeffs"])
            terms.append(ExpPolyTerm(coeffs, complex(re, im)))
        return cls(tuple(terms))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ExpPolyProfile":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class KernelSpec:
    """Exponential kernel ``exp(-|x|/a) / (2a)`` (unit mass on the full line)."""

    a: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise InvalidParameter(f"kernel length must be positive, got {self.a!r}")

    @property
    def rate(self) -> float:
        return 1.0 / self.a

    def weight(self, r):
        return np.exp(-np.abs(r) / self.a) / (2.0 * self.a)


def evaluate(p: ExpPolyProfile, x2):
    """Value of ``p`` at depth(s) ``x2 >= 0``; scalar in, complex scalar out."""
    if isinstance(x2, (int, float)):
        x = float(x2)
        if x < 0:
            raise InvalidParameter("profiles are defined on x2 >= 0 only")
        total = 0j
        for t in p.terms:
            poly = 0j
            for c in reversed(t.coeffs):
                poly = poly * x + c
            total += poly * cmath.exp(-t.rate * x)
        return total
    x = np.asarray(x2, dtype=float)
    if np.any(x < 0):
        raise InvalidParameter("profiles are defined on x2 >= 0 only")
    total = np.zeros(x.shape, dtype=complex)
    for t in p.terms:
        total = total + t(x)
    if total.ndim == 0:
        return complex(total)
    return total


def differentiate(p: ExpPolyProfile) -> ExpPolyProfile:
    """Exact ``d/dx`` of ``p``."""
    return ExpPolyProfile._from_terms(
        (t.derivative() for t in p.terms),
        scale=p.max_abs_coeff() * max([1.0] + [abs(t.rate) for t in p.terms]),
    )


def linear_combine(pairs: Iterable[tuple[complex, ExpPolyProfile]]) -> ExpPolyProfile:
    """Exact weighted sum ``sum_i w_i p_i`` in canonical form.

    Cancellation is judged against the largest weighted input coefficient, so
    ``p - p`` is the zero profile rather than a cloud of rounding residue.
    """
    terms = []
    scale = 0.0
    for w, p in pairs:
        w = complex(w)
        for t in p.terms:
            scaled = tuple(w * c for c in t.coeffs)
            scale = max(scale, max(abs(c) for c in scaled))
            terms.append(ExpPolyTerm(scaled, t.rate))
    return ExpPolyProfile._from_terms(terms, scale=scale)


def _convolve_monomial(n: int, rate: complex, a: float) -> list[ExpPolyTerm]:
    # (1/2a) [ e^{-x/a} int_0^x e^{y/a} y^n e^{-rate y} dy + e^{x/a} int_x^inf e^{-y/a} y^n e^{-rate y} dy ]
    alpha = 1.0 / a - rate
    beta = 1.0 / a + rate
    if abs(1.0 - a * rate) < RESONANCE_TOL:
        raise ResonantDecay(f"decay rate {rate!r} coincides with kernel rate 1/a = {1.0 / a!r}")
    slow = [0j] * (n + 1)
    fact_n = math.factorial(n)
    for k in range(n + 1):
        j = n - k
        weight = fact_n / math.factorial(j)
        slow[j] += weight * ((-1) ** k / alpha ** (k + 1) + 1.0 / beta ** (k + 1))
    layer = -((-1) ** n) * fact_n / alpha ** (n + 1)
    inv2a = 1.0 / (2.0 * a)
    return [
        ExpPolyTerm(tuple(inv2a * c for c in slow), rate),
        ExpPolyTerm((inv2a * layer,), 1.0 / a),
    ]


def convolve_halfline(p: ExpPolyProfile, kernel: KernelSpec | float) -> ExpPolyProfile:
    """Closed form of ``int_0^inf exp(-|x2 - y|/a) p(y) dy / (2a)``.

    The result keeps every decay rate of ``p`` and gains the boundary-layer
    rate ``1/a``.  A kernel length of exactly ``0`` returns ``p`` unchanged
    (local limit).

    Raises
    ------
    ResonantDecay
        If some ``rate * a`` is within ``RESONANCE_TOL`` of 1.
    """
    a = kernel.a if isinstance(kernel, KernelSpec) else float(kernel)
    if a == 0.0:
        return p
    if not a > 0:
        raise InvalidParameter(f"kernel length must be non-negative, got {a!r}")
    terms = []
    for t in p.terms:
        for n, c in enumerate(t.coeffs):
            if c == 0:
                continue
            for piece in _convolve_monomial(n, t.rate, a):
                terms.append(ExpPolyTerm(tuple(c * k for k in piece.coeffs), piece.rate))
    scale = max([p.max_abs_coeff()] + [max(abs(c) for c in t.coeffs) for t in terms])
    return ExpPolyProfile._from_terms(terms, scale=scale)


def quadrature_convolution_oracle(
    field: Callable[[float], complex],
    kernel: KernelSpec,
    x2: float,
    tol: float = 1e-10,
    *,
    max_panels: int = 4000,
) -> complex:
    """Half-line kernel convolution of ``field`` at ``x2`` by adaptive quadrature.

    The domain is cut at ``y = x2`` (kernel kink) and into panels of width
    ``8a`` around it; whatever lies further left than ``NEAR_PANELS`` widths
    is one more panel.  Panels beyond ``x2`` are added until both the last
    panel and the integrand at its far end fall below ``tol / 100``.  Each
    panel is integrated by adaptive Gauss-Kronrod to ``tol * 1e-3``.

    Raises
    ------
    NoConvergence
        If a panel misses its tolerance or the panel budget is exhausted.
    """
    if not tol > 0:
        raise InvalidParameter(f"tol must be positive, got {tol!r}")
    if x2 < 0:
        raise InvalidParameter("x2 must be non-negative")
    a = kernel.a
    width = 8.0 * a
    panel_tol = tol * 1e-3

    def integrand(y):
        return kernel.weight(x2 - y) * complex(field(y))

    def panel(lo, hi):
        parts = []
        for part in (np.real, np.imag):
            res = integrate.quad(
                lambda y: part(integrand(y)), lo, hi, epsabs=panel_tol, epsrel=0.0, limit=200, full_output=1
            )
            if len(res) > 3 or res[1] > panel_tol:
                msg = res[3] if len(res) > 3 else f"error estimate {res[1]:.3g}"
                raise NoConvergence(f"quadrature on [{lo:.6g}, {hi:.6g}] missed tol {panel_tol:.3g}: {msg}")
            parts.append(res[0])
        return complex(parts[0], parts[1])

    total = 0j
    used = 0
    # near field in panels; beyond NEAR_PANELS widths the kernel is below e^-48
    edges = [x2]
    while edges[-1] > 0 and len(edges) <= NEAR_PANELS:
        edges.append(max(0.0, edges[-1] - width))
    if edges[-1] > 0:
        edges.append(0.0)
    for hi, lo in zip(edges[:-1], edges[1:]):
        total += panel(lo, hi)
        used += 1
        if used > max_panels:
            raise NoConvergence("panel budget exhausted on [0, x2]")

    lo = x2
    while True:
        hi = lo + width
        piece = panel(lo, hi)
        total += piece
        used += 1
        if abs(piece) < tol * 1e-2 and abs(integrand(hi)) * width < tol * 1e-2:
            break
        if used > max_panels:
            raise NoConvergence("panel budget exhausted before the integrand decayed")
        lo = hi
    return total

"""Physical parameters, scaling and the harmonic ansatz.

All harmonic fields carry the factor ``exp(i k0 (x1 - c0 t))`` implicitly;
``d/dx1`` acts as multiplication by ``i k0`` and ``d/dt`` as ``-i k0 c0``.
Complex scalars are plain Python ``complex`` values. Units are SI by
convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InvalidParameter


@dataclass(frozen=True)
class MaterialParams:
    """Isotropic nonlocal solid.

    Parameters
    ----------
    mu : float
        Shear modulus (Pa).
    rho : float
        Mass density (kg/m^3).
    a : float
        Internal length (m). ``a = 0`` is classical local elasticity.
    """

    mu: float
    rho: float
    a: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise InvalidParameter(f"mu must be positive and finite, got {self.mu!r}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise InvalidParameter(f"rho must be positive and finite, got {self.rho!r}")
        if not (self.a >= 0 and math.isfinite(self.a)):
            raise InvalidParameter(f"a must be non-negative and finite, got {self.a!r}")

    @property
    def c2(self) -> float:
        return derived_shear_speed(self)

    @property
    def is_local(self) -> bool:
        return self.a == 0.0


def derived_shear_speed(m: MaterialParams) -> float:
    """Bulk shear wave speed ``sqrt(mu / rho)``."""
    return math.sqrt(m.mu / m.rho)


@dataclass(frozen=True)
class HarmonicLoad:
    """Surface traction ``F exp(i k0 (x1 - c0 t))`` on ``x2 = 0``."""

    F: complex
    k0: float
    c0: float

    def __post_init__(self):
        object.__setattr__(self, "F", complex(self.F))
        if not (self.k0 > 0 and math.isfinite(self.k0)):
            raise InvalidParameter(f"k0 must be positive, got {self.k0!r}")
        if not (self.c0 >= 0 and math.isfinite(self.c0)):
            raise InvalidParameter(f"c0 must be non-negative, got {self.c0!r}")

    def speed_ratio(self, m: MaterialParams) -> float:
        return self.c0 / m.c2

    def is_subsonic(self, m: MaterialParams) -> bool:
        return self.c0 < m.c2

    def is_long_wave(self, m: MaterialParams) -> bool:
        """``k0 a < 1``; the nonlocal model is only meaningful for long waves."""
        return self.k0 * m.a < 1.0


@dataclass(frozen=True)
class Scaling:
    """Slow length ``l`` and the small parameter ``eta = a / l``.

    ``eta = 0`` is accepted and denotes the local limit.
    """

    l: float
    eta: float

    def __post_init__(self):
        if not (self.l > 0 and math.isfinite(self.l)):
            raise InvalidParameter(f"l must be positive, got {self.l!r}")
        if not (0.0 <= self.eta < 1.0):
            raise InvalidParameter(f"eta must lie in [0, 1), got {self.eta!r}")

    @classmethod
    def from_lengths(cls, a: float, l: float) -> "Scaling":
        if not l > 0:
            raise InvalidParameter(f"l must be positive, got {l!r}")
        return cls(l=l, eta=a / l)

    @property
    def a(self) -> float:
        return self.eta * self.l

    def slow(self, x2):
        """Slow depth ``zeta_p = x2 / l``."""
        return x2 / self.l

    def fast(self, x2):
        """Fast depth ``zeta_q = x2 / a``."""
        if self.eta == 0.0:
            raise InvalidParameter("fast variable undefined in the local limit")
        return x2 / self.a

    def xi1(self, x1):
        return x1 / self.l

    def tau(self, t, c2: float):
        return t * c2 / self.l


def nondimensionalize(
    m: MaterialParams, load: HarmonicLoad, l: float | None = None
) -> tuple[Scaling, complex]:
    """Return the scaling ``(l, eta = a/l)`` and the traction ``f* = F / mu``.

    ``l`` defaults to ``1 / k0``.
    """
    if l is None:
        l = 1.0 / load.k0
    if not l > 0:
        raise InvalidParameter(f"l must be positive, got {l!r}")
    return Scaling.from_lengths(m.a, l), load.F / m.mu


def redimensionalize(scaling: Scaling, f_star: complex, mu: float) -> tuple[float, complex]:
    """Inverse of :func:`nondimensionalize` on ``(a, F)``."""
    return scaling.eta * scaling.l, f_star * mu

"""Antiplane shear surface waves supported by the effective surface condition.

With O(eta^2) terms dropped, a free surface obeys
``du/dx2 - b a d^2u/dx1^2 = 0`` where ``b = 1/2`` for the exponential kernel
and ``b = 1/(2 sqrt(pi))`` for the Gaussian one.  A mode
``U exp(i k (x1 - c t) - k gamma x2)`` then travels at
``C = c / c2 = sqrt(1 - b^2 K^2)`` with ``K = a k``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .core import MaterialParams
from .exceptions import InvalidParameter, OutOfBranch


class KernelBranch(enum.Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"

    @property
    def bc_factor(self) -> float:
        """Multiplier of ``a d^2u/dx1^2`` in the surface condition."""
        if self is KernelBranch.EXPONENTIAL:
            return 0.5
        return 1.0 / (2.0 * math.sqrt(math.pi))

    @property
    def coefficient(self) -> float:
        """``1/4`` or ``1/(4 pi)``: the ``K^2`` coefficient of ``1 - C^2``."""
        if self is KernelBranch.EXPONENTIAL:
            return 0.25
        return 1.0 / (4.0 * math.pi)

    @property
    def K_max(self) -> float:
        return math.sqrt(1.0 / self.coefficient)

    @classmethod
    def parse(cls, value: "KernelBranch | str") -> "KernelBranch":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameter(f"unknown kernel branch {value!r}") from None


@dataclass(frozen=True)
class DispersionPoint:
    K: float
    C: float
    gamma: float
    branch: KernelBranch = KernelBranch.EXPONENTIAL


def dispersion_speed(K: float, branch: KernelBranch | str = KernelBranch.EXPONENTIAL) -> float:
    """Dimensionless surface-wave speed ``sqrt(1 - coefficient K^2)``."""
    branch = KernelBranch.parse(branch)
    if not K >= 0:
        raise InvalidParameter(f"K must be non-negative, got {K!r}")
    if K > branch.K_max:
        raise OutOfBranch(f"K={K!r} exceeds the {branch.value} branch edge {branch.K_max!r}")
    return math.sqrt(max(0.0, 1.0 - branch.coefficient * K * K))


def dispersion_point(K: float, branch: KernelBranch | str = KernelBranch.EXPONENTIAL) -> DispersionPoint:
    branch = KernelBranch.parse(branch)
    C = dispersion_speed(K, branch)
    # gamma = sqrt(1 - C^2) = sqrt(coefficient) K, without the cancellation
    return DispersionPoint(K, C, math.sqrt(branch.coefficient) * K, branch)


@dataclass(frozen=True)
class SurfaceMode:
    """Free surface wave ``U exp(i k (x1 - c t) - k gamma x2)`` with ``U = 1``."""

    k: float
    c: float
    C: float
    gamma: float
    U: complex
    branch: KernelBranch
    material: MaterialParams

    @property
    def decaying(self) -> bool:
        return self.gamma > 0

    def eom_residual(self) -> complex:
        """``u_11 + u_22 - u_tt / c2^2`` at the surface, divided by the mode factor."""
        k = self.k
        return (-(k**2) + (k * self.gamma) ** 2 + (k * self.C) ** 2) * self.U

    def bc_residual(self) -> complex:
        """``du/dx2 - b a d^2u/dx1^2`` at the surface."""
        k, a = self.k, self.material.a
        return (-k * self.gamma + self.branch.bc_factor * a * k * k) * self.U

    @property
    def natural_scale(self) -> float:
        return abs(self.U) * self.k


def surface_mode(
    k: float,
    m: MaterialParams,
    branch: KernelBranch | str = KernelBranch.EXPONENTIAL,
    *,
    speed: float | None = None,
) -> SurfaceMode:
    """Surface mode at wavenumber ``k``.

    ``speed`` overrides the dispersion root (dimensionless ``C``) so that
    detuned, non-solution modes can be inspected.  For ``a = 0`` the mode
    degenerates to ``C = 1``, ``gamma = 0``: the local theory has no decaying
    surface wave.
    """
    branch = KernelBranch.parse(branch)
    if not k > 0:
        raise InvalidParameter(f"k must be positive, got {k!r}")
    K = m.a * k
    if speed is None:
        point = dispersion_point(K, branch)
        C, g = point.C, point.gamma
    else:
        C = float(speed)
        if not 0 <= C <= 1:
            raise InvalidParameter(f"speed must lie in [0, 1], got {C!r}")
        g = math.sqrt(1.0 - C * C)
    return SurfaceMode(k, C * m.c2, C, g, 1.0 + 0j, branch, m)


def sample_curve(
    branch: KernelBranch | str = KernelBranch.EXPONENTIAL,
    K_min: float = 0.0,
    K_max: float | None = None,
    n: int = 101,
) -> list[DispersionPoint]:
    """``n`` uniformly spaced points of one branch on ``[K_min, K_max]``."""
    branch = KernelBranch.parse(branch)
    if K_max is None:
        K_max = branch.K_max
    if n < 2:
        raise InvalidParameter(f"need at least two samples, got n={n!r}")
    if not 0 <= K_min < K_max:
        raise InvalidParameter(f"need 0 <= K_min < K_max, got [{K_min!r}, {K_max!r}]")
    if K_max > branch.K_max:
        raise OutOfBranch(f"K_max={K_max!r} exceeds the {branch.value} branch edge {branch.K_max!r}")
    Ks = np.linspace(K_min, K_max, n)
    Ks[-1] = K_max
    return [dispersion_point(float(K), branch) for K in Ks]


CSV_HEADER = ("K", "C", "gamma", "branch")


def write_csv(points: Iterable[DispersionPoint], stream: IO[str]) -> None:
    """Write ``K,C,gamma,branch`` rows with 17 significant digits."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in points:
        writer.writerow([f"{p.K:.17g}", f"{p.C:.17g}", f"{p.gamma:.17g}", p.branch.value])


def read_csv(stream: IO[str]) -> list[DispersionPoint]:
    reader = csv.DictReader(stream)
    return [
        DispersionPoint(float(r["K"]), float(r["C"]), float(r["gamma"]), KernelBranch.parse(r["branch"]))
        for r in reader
    ]

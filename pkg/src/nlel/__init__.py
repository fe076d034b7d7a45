"""Integral versus differential nonlocal antiplane elasticity on a half-space.

Exact exponential-polynomial field algebra, the travelling-load
counter-example, three-term boundary-layer asymptotics with the effective
surface condition, and the resulting shear surface-wave dispersion.
"""

from .core import HarmonicLoad, MaterialParams, Scaling, derived_shear_speed, nondimensionalize
from .profiles import (
    ExpPolyProfile,
    ExpPolyTerm,
    KernelSpec,
    convolve_halfline,
    differentiate,
    evaluate,
    linear_combine,
    quadrature_convolution_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "ExpPolyProfile",
    "ExpPolyTerm",
    "HarmonicLoad",
    "KernelSpec",
    "MaterialParams",
    "Scaling",
    "convolve_halfline",
    "derived_shear_speed",
    "differentiate",
    "evaluate",
    "linear_combine",
    "nondimensionalize",
    "quadrature_convolution_oracle",
]

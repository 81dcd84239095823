"""Free-space electromagnetic kernel.

Scalar and dyadic Green's functions, the phase-stripped amplitude matrix of
the dyadic kernel evaluated at element-center separation, and the
first-order expansion of the point-pair distance about the center
separation.  Everything downstream (exact quadrature channel and both
closed forms) consumes these.

The channel prefactor used throughout the package is -i*eps*mu, kept as
stated by the source model even though it is dimensionally unusual; it is
a global scale and cancels in normalized MSE and in relative eigenmode
thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints

SPEED_OF_LIGHT = 299_792_458.0  # m/s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m (CODATA)
VACUUM_PERMEABILITY = 1.25663706212e-6  # H/m (CODATA)

#: Below this separation the 1/r kernels error out instead of returning
#: garbage.
SINGULARITY_RADIUS = 1e-12  # m


@dataclass(frozen=True)
class EmConstants:
    """Carrier frequency and the derived free-space constants."""

    frequency: float
    wavelength: float
    k0: float
    permittivity: float = VACUUM_PERMITTIVITY
    permeability: float = VACUUM_PERMEABILITY

    def __post_init__(self):
        if self.frequency <= 0 or self.wavelength <= 0:
            raise ValueError("frequency and wavelength must be positive")
        if self.permittivity <= 0 or self.permeability <= 0:
            raise ValueError("permittivity and permeability must be positive")

    @classmethod
    def from_frequency(cls, frequency: float) -> "EmConstants":
        wavelength = SPEED_OF_LIGHT / frequency
        return cls(frequency=frequency, wavelength=wavelength, k0=2 * math.pi / wavelength)

    @classmethod
    def from_wavelength(cls, wavelength: float) -> "EmConstants":
        return cls(
            frequency=SPEED_OF_LIGHT / wavelength,
            wavelength=wavelength,
            k0=2 * math.pi / wavelength,
        )

    @property
    def channel_prefactor(self) -> complex:
        return -1j * self.permittivity * self.permeability


def scalar_green(r_m, r_n, k0: float) -> complex:
    """Scalar free-space Green's function e^{i k0 r} / (4 pi r)."""
    d = np.asarray(r_m, dtype=float) - np.asarray(r_n, dtype=float)
    r = float(np.linalg.norm(d))
    if r < SINGULARITY_RADIUS:
        raise CoincidentPoints(f"separation {r:.3e} m below singularity guard")
    return complex(np.exp(1j * k0 * r) / (4 * math.pi * r))


def dyadic_green(r_m, r_n, k0: float) -> np.ndarray:
    """Dyadic free-space Green's function, explicit closed form.

    Returns the 3x3 complex matrix

        (1/(4 pi r)) * [ (1 + i/(k0 r) - 1/(k0 r)^2) I
                       + (3/(k0 r)^2 - 3i/(k0 r) - 1) rhat rhat^T ] e^{i k0 r}

    which equals (I + grad grad^T / k0^2) applied to the scalar kernel.
    Symmetric, and invariant under swapping the two points.
    """
    r_m = np.asarray(r_m, dtype=float)
    r_n = np.asarray(r_n, dtype=float)
    diff = (r_m - r_n).reshape(1, 1, 3)
    return _dyadic_green_pairwise(diff, k0)[0, 0]


def amplitude_matrix(r_bar_m, r_bar_n, k0: float) -> np.ndarray:
    """Dyadic kernel at the center separation without the e^{i k0 r} phase.

    dyadic_green(r_bar_m, r_bar_n) == amplitude_matrix(...) * e^{i k0 rbar}
    to machine precision.
    """
    r_bar_m = np.asarray(r_bar_m, dtype=float)
    r_bar_n = np.asarray(r_bar_n, dtype=float)
    r = float(np.linalg.norm(r_bar_m - r_bar_n))
    if r < SINGULARITY_RADIUS:
        raise CoincidentPoints(f"center separation {r:.3e} m below singularity guard")
    return dyadic_green(r_bar_m, r_bar_n, k0) * np.exp(-1j * k0 * r)


def first_order_distance(r_bar_mn, delta_m, delta_n) -> float:
    """First-order expansion of ||r_bar_mn + delta_m - delta_n||.

    Returns rbar + (r_bar_mn / rbar) . (delta_m - delta_n); the neglected
    term is O(||delta||^2 / rbar).
    """
    r_bar_mn = np.asarray(r_bar_mn, dtype=float)
    rbar = float(np.linalg.norm(r_bar_mn))
    if rbar < SINGULARITY_RADIUS:
        raise CoincidentPoints("zero center separation")
    delta = np.asarray(delta_m, dtype=float) - np.asarray(delta_n, dtype=float)
    return rbar + float(r_bar_mn @ delta) / rbar


def _dyadic_green_pairwise(diff: np.ndarray, k0: float) -> np.ndarray:
    """Vectorized dyadic kernel over an array of difference vectors.

    diff has shape (..., 3); returns shape (..., 3, 3).  Used by the
    quadrature oracle, where the kernel is evaluated on every (receive
    node, transmit node) pair at once.
    """
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r < SINGULARITY_RADIUS):
        raise CoincidentPoints("a point pair fell below the singularity guard")
    kr = k0 * r
    iso = 1.0 + 1j / kr - 1.0 / kr**2
    rad = 3.0 / kr**2 - 3j / kr - 1.0
    rhat = diff / r[..., None]
    outer = rhat[..., :, None] * rhat[..., None, :]
    eye = np.eye(3)
    scale = np.exp(1j * kr) / (4 * math.pi * r)
    return scale[..., None, None] * (iso[..., None, None] * eye + rad[..., None, None] * outer)

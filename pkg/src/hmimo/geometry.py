"""Surface placement geometry.

Turns surface placement parameters (center, orientation angle quadruple,
element grid) into per-element center coordinates and in-plane direction
frames.  Also exposes the coefficients that express the z-component of an
in-plane displacement through its x/y components, which the cotangent-form
sinc arguments rely on.

Conventions fixed here for the whole package:

* spherical-to-Cartesian: direction(theta, phi) =
  (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)), theta measured
  from the z-axis, phi in the xy-plane from the x-axis;
* element (i, j) on a count_h x count_v grid is centered at
  center + (i - (count_h-1)/2) * pitch_h * dir_h
         + (j - (count_v-1)/2) * pitch_v * dir_v;
* canonical element index n = i * count_v + j (j fastest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AzimuthDegenerate, DegenerateOrientation

ORTHOGONALITY_TOL = 1e-9
AZIMUTH_TOL = 1e-9


@dataclass(frozen=True)
class Angles:
    """Orientation angle quadruple of one antenna surface, in radians.

    polar_* is the angle between the z-axis and the horizontal/vertical
    in-plane direction; azimuth_* is the corresponding xy-plane angle.
    """

    polar_h: float
    polar_v: float
    azimuth_h: float
    azimuth_v: float

    def __post_init__(self):
        for name in ("polar_h", "polar_v", "azimuth_h", "azimuth_v"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("polar_h", "polar_v"):
            v = getattr(self, name)
            if not 0.0 < v < math.pi:
                raise ValueError(f"{name} must lie in (0, pi), got {v!r}")

    @classmethod
    def from_degrees(cls, polar_h, azimuth_h, polar_v, azimuth_v) -> "Angles":
        return cls(
            polar_h=math.radians(polar_h),
            polar_v=math.radians(polar_v),
            azimuth_h=math.radians(azimuth_h) % (2 * math.pi),
            azimuth_v=math.radians(azimuth_v) % (2 * math.pi),
        )


#: Paper-style default orientation: horizontal axis along x, vertical along y
#: (surface parallel to the xy-plane).
DEFAULT_ANGLES = Angles.from_degrees(90.0, 0.0, 90.0, 90.0)


@dataclass(frozen=True)
class SurfaceSpec:
    """One antenna surface: placement plus element grid.

    Elements are contiguous: element size equals pitch per axis, so the
    total aperture length is pitch * count on each axis.
    """

    center: np.ndarray
    angles: Angles
    count_h: int
    count_v: int
    pitch_h: float
    pitch_v: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.center.shape != (3,):
            raise ValueError("center must be a 3-vector")
        if self.count_h < 1 or self.count_v < 1:
            raise ValueError("element counts must be >= 1")
        if self.pitch_h <= 0 or self.pitch_v <= 0:
            raise ValueError("pitches must be positive")

    @property
    def num_elements(self) -> int:
        return self.count_h * self.count_v

    @property
    def aperture_h(self) -> float:
        return self.pitch_h * self.count_h

    @property
    def aperture_v(self) -> float:
        return self.pitch_v * self.count_v


@dataclass(frozen=True)
class ElementFrame:
    """Derived geometry of a single element: center and in-plane frame."""

    center: np.ndarray
    dir_h: np.ndarray
    dir_v: np.ndarray
    len_h: float
    len_v: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "dir_h", np.asarray(self.dir_h, dtype=float))
        object.__setattr__(self, "dir_v", np.asarray(self.dir_v, dtype=float))

    @property
    def area(self) -> float:
        return self.len_h * self.len_v


def direction_vectors(angles: Angles) -> tuple[np.ndarray, np.ndarray]:
    """In-plane horizontal/vertical unit vectors implied by the angles.

    Raises
    ------
    DegenerateOrientation
        If the two directions are not orthogonal within 1e-9 (the
        separable sinc factorization assumes a rectangular element).
    """
    dir_h = _spherical_unit(angles.polar_h, angles.azimuth_h)
    dir_v = _spherical_unit(angles.polar_v, angles.azimuth_v)
    dot = float(dir_h @ dir_v)
    if abs(dot) >= ORTHOGONALITY_TOL:
        raise DegenerateOrientation(
            f"surface directions not orthogonal: |dir_h . dir_v| = {abs(dot):.3e}"
        )
    return dir_h, dir_v


def _spherical_unit(polar: float, azimuth: float) -> np.ndarray:
    s = math.sin(polar)
    return np.array([s * math.cos(azimuth), s * math.sin(azimuth), math.cos(polar)])


def element_frames(spec: SurfaceSpec) -> list[ElementFrame]:
    """Per-element frames of a surface, in canonical index order.

    The grid is a centered lattice: element centers average exactly to
    spec.center.  Ordering is row-major with the vertical index fastest,
    n = i * count_v + j.
    """
    dir_h, dir_v = direction_vectors(spec.angles)
    off_h = (np.arange(spec.count_h) - (spec.count_h - 1) / 2.0) * spec.pitch_h
    off_v = (np.arange(spec.count_v) - (spec.count_v - 1) / 2.0) * spec.pitch_v
    frames = []
    for i in range(spec.count_h):
        for j in range(spec.count_v):
            center = spec.center + off_h[i] * dir_h + off_v[j] * dir_v
            frames.append(
                ElementFrame(
                    center=center,
                    dir_h=dir_h,
                    dir_v=dir_v,
                    len_h=spec.pitch_h,
                    len_v=spec.pitch_v,
                )
            )
    return frames


def delta_z_coefficients(angles: Angles) -> tuple[float, float]:
    """Coefficients (c_x, c_y) with dz = c_x*dx + c_y*dy for any in-plane
    displacement a*dir_h + b*dir_v with Cartesian components (dx, dy, dz).

    Only defined when the two azimuths are separated: the in-plane
    directions must project onto linearly independent xy directions.

    Raises
    ------
    AzimuthDegenerate
        If |sin(azimuth_h - azimuth_v)| <= 1e-9.
    """
    dphi = angles.azimuth_h - angles.azimuth_v
    s = math.sin(dphi)
    if abs(s) <= AZIMUTH_TOL:
        raise AzimuthDegenerate(
            f"|sin(azimuth_h - azimuth_v)| = {abs(s):.3e}; cotangent "
            "parameterization is singular"
        )
    cot_h = 1.0 / math.tan(angles.polar_h)
    cot_v = 1.0 / math.tan(angles.polar_v)
    c_x = (math.sin(angles.azimuth_h) * cot_v - math.sin(angles.azimuth_v) * cot_h) / s
    # Note the denominator sign relative to c_x: solving the 2x2 system for
    # (a, b) in terms of (dx, dy) puts sin(azimuth_v - azimuth_h) under the
    # y coefficient.
    c_y = -(math.cos(angles.azimuth_h) * cot_v - math.cos(angles.azimuth_v) * cot_h) / s
    return c_x, c_y

"""Shared helpers for the test suite."""

import math

import numpy as np

from hmimo.geometry import Angles, SurfaceSpec, element_frames

TWO_PI = 2.0 * math.pi


def random_orthonormal_angles(rng, paper_safe=False):
    """A random valid orientation angle quadruple.

    Draws a random horizontal unit vector, completes it with a random
    orthogonal vertical vector, and converts both back to (polar, azimuth)
    pairs.  Rejects draws whose polar angles hit the (0, pi) boundary and,
    when paper_safe is set, draws whose azimuth difference is too close to
    the cotangent parameterization's singularity.
    """
    while True:
        dir_h = rng.normal(size=3)
        dir_h /= np.linalg.norm(dir_h)
        t = rng.normal(size=3)
        dir_v = t - (t @ dir_h) * dir_h
        norm = np.linalg.norm(dir_v)
        if norm < 1e-6:
            continue
        dir_v /= norm
        if max(abs(dir_h[2]), abs(dir_v[2])) > 1.0 - 1e-9:
            continue
        azimuth_h = math.atan2(dir_h[1], dir_h[0]) % TWO_PI
        azimuth_v = math.atan2(dir_v[1], dir_v[0]) % TWO_PI
        if paper_safe and abs(math.sin(azimuth_h - azimuth_v)) < 1e-3:
            continue
        return Angles(
            polar_h=math.acos(dir_h[2]),
            polar_v=math.acos(dir_v[2]),
            azimuth_h=azimuth_h,
            azimuth_v=azimuth_v,
        )


def study_surfaces(
    wavelength,
    spacing_lam=0.05,
    distance_lam=1.0,
    tilt_deg=90.0,
    tx_count=(3, 3),
    rx_count=(2, 2),
):
    """Transmit/receive surface pair in the default study placement."""
    spacing = spacing_lam * wavelength
    tx = SurfaceSpec(
        center=np.zeros(3),
        angles=Angles.from_degrees(90.0, 0.0, 90.0, 90.0),
        count_h=tx_count[0],
        count_v=tx_count[1],
        pitch_h=spacing,
        pitch_v=spacing,
    )
    rx = SurfaceSpec(
        center=np.array([0.0, 0.0, distance_lam * wavelength]),
        angles=Angles.from_degrees(90.0, 0.0, tilt_deg, 90.0),
        count_h=rx_count[0],
        count_v=rx_count[1],
        pitch_h=spacing,
        pitch_v=spacing,
    )
    return tx, rx


def study_frames(wavelength, **kwargs):
    tx, rx = study_surfaces(wavelength, **kwargs)
    return element_frames(tx), element_frames(rx)

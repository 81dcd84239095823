"""Validation metrics and the numerical-study runners.

Normalized MSE between channel models, singular spectra with relative-
threshold mode counting, the three parameter sweeps (element spacing,
TE-RE distance, transmit element count) and the eigenvalue study.

The channel matrix is non-square, so "eigenvalues" are reported as
singular values throughout; the spectrum shape and the mode count (values
above a threshold relative to the largest) are what the study compares.

All runners are deterministic: a sweep point is fully reproducible from
its config snapshot, and results are ordered by sweep index regardless of
worker completion order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .assembly import SystemChannel, assemble
from .channel import Model, QuadratureSpec
from .em_core import EmConstants
from .errors import HmimoError, ZeroReference
from .geometry import Angles, SurfaceSpec, element_frames

#: Default relative threshold for mode counting: sigma >= sigma_max / 100.
DEFAULT_THRESHOLD_RATIO = 0.01

#: Default study orientation presets: receive vertical-axis polar angle.
DEFAULT_TILTS_DEG = (60.0, 75.0, 90.0)


@dataclass(frozen=True)
class StudyConfig:
    """Base parameters shared by the sweep and eigen runners.

    The transmit surface sits at the origin with its horizontal axis
    along x and vertical axis along y; the receive surface is centered at
    (0, 0, distance) with its vertical-axis polar angle tilted per point.
    Element size equals pitch (contiguous elements).
    """

    frequency: float = 30e9
    tx_count: tuple[int, int] = (9, 9)
    rx_count: tuple[int, int] = (3, 3)
    spacing: float | None = None
    distance: float | None = None
    tilts_deg: tuple[float, ...] = DEFAULT_TILTS_DEG
    quadrature: QuadratureSpec = QuadratureSpec()
    jobs: int = 1

    @property
    def constants(self) -> EmConstants:
        return EmConstants.from_frequency(self.frequency)


@dataclass
class SweepPoint:
    """One evaluated sweep point (one sweep value, one tilt)."""

    value: float
    tilt_deg: float
    distance: float
    mse_ca1: float | None
    mse_ca2: float | None
    oracle_nodes: int
    converged: bool
    error: str | None = None


@dataclass
class SweepResult:
    sweep_variable: str
    values: list
    points: list[SweepPoint]
    config_snapshot: dict = field(default_factory=dict)


@dataclass
class SpectrumResult:
    model: Model
    singular_values: np.ndarray
    eigenmode_count: int
    threshold_ratio: float
    config_id: str = ""


def normalized_mse(h_hat: SystemChannel, h: SystemChannel) -> float:
    """||H_hat - H||_F^2 / ||H||_F^2."""
    if h_hat.ordering is not h.ordering or h_hat.matrix.shape != h.matrix.shape:
        raise ValueError("channels must share dimensions and ordering")
    ref = float(np.linalg.norm(h.matrix)) ** 2
    if ref == 0.0:
        raise ZeroReference("reference channel has zero Frobenius norm")
    return float(np.linalg.norm(h_hat.matrix - h.matrix)) ** 2 / ref


def singular_spectrum(
    ch: SystemChannel, threshold_ratio: float = DEFAULT_THRESHOLD_RATIO
) -> SpectrumResult:
    """Descending singular values and the count above threshold*sigma_max."""
    if not 0.0 < threshold_ratio <= 1.0:
        raise ValueError("threshold_ratio must lie in (0, 1]")
    sigma = np.linalg.svd(ch.matrix, compute_uv=False)
    count = int(np.sum(sigma >= threshold_ratio * sigma[0]))
    return SpectrumResult(
        model=ch.model,
        singular_values=sigma,
        eigenmode_count=count,
        threshold_ratio=threshold_ratio,
    )


def surface_pair(
    cfg: StudyConfig, spacing: float, distance: float, tilt_deg: float,
    tx_count: tuple[int, int] | None = None,
) -> tuple[SurfaceSpec, SurfaceSpec]:
    """Transmit/receive surfaces for one study point."""
    tx_count = tx_count or cfg.tx_count
    tx = SurfaceSpec(
        center=np.zeros(3),
        angles=Angles.from_degrees(90.0, 0.0, 90.0, 90.0),
        count_h=tx_count[0],
        count_v=tx_count[1],
        pitch_h=spacing,
        pitch_v=spacing,
    )
    rx = SurfaceSpec(
        center=np.array([0.0, 0.0, distance]),
        angles=Angles.from_degrees(90.0, 0.0, tilt_deg, 90.0),
        count_h=cfg.rx_count[0],
        count_v=cfg.rx_count[1],
        pitch_h=spacing,
        pitch_v=spacing,
    )
    return tx, rx


def model_mses(
    cfg: StudyConfig, spacing: float, distance: float, tilt_deg: float,
    tx_count: tuple[int, int] | None = None,
) -> tuple[float, float]:
    """(CA-I, CA-II) normalized MSEs against the quadrature oracle."""
    tx_spec, rx_spec = surface_pair(cfg, spacing, distance, tilt_deg, tx_count)
    tx_frames = element_frames(tx_spec)
    rx_frames = element_frames(rx_spec)
    k = cfg.constants
    exact = assemble(tx_frames, rx_frames, k, Model.EXACT, cfg.quadrature)
    ca1 = assemble(tx_frames, rx_frames, k, Model.CA1)
    ca2 = assemble(tx_frames, rx_frames, k, Model.CA2)
    return normalized_mse(ca1, exact), normalized_mse(ca2, exact)


def _run_points(jobs: int, tasks: list) -> list[SweepPoint]:
    """Evaluate sweep-point closures, order-stable by task index."""
    if jobs <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]


def _mse_point(cfg, value, spacing, distance, tilt, tx_count=None) -> SweepPoint:
    try:
        mse1, mse2 = model_mses(cfg, spacing, distance, tilt, tx_count)
        return SweepPoint(
            value=value,
            tilt_deg=tilt,
            distance=distance,
            mse_ca1=mse1,
            mse_ca2=mse2,
            oracle_nodes=cfg.quadrature.nodes_per_axis,
            converged=True,
        )
    except HmimoError as exc:
        return SweepPoint(
            value=value,
            tilt_deg=tilt,
            distance=distance,
            mse_ca1=None,
            mse_ca2=None,
            oracle_nodes=cfg.quadrature.nodes_per_axis,
            converged=False,
            error=str(exc),
        )


def sweep_spacing(cfg: StudyConfig, spacings: list[float]) -> SweepResult:
    """Normalized MSEs versus element spacing at fixed TE-RE distance."""
    if any(s <= 0 for s in spacings):
        raise ValueError("spacings must be positive")
    distance = cfg.distance if cfg.distance is not None else cfg.constants.wavelength
    tasks = [
        (lambda s=s, t=t: _mse_point(cfg, s, s, distance, t))
        for s in spacings
        for t in cfg.tilts_deg
    ]
    points = _run_points(cfg.jobs, tasks)
    return SweepResult(
        sweep_variable="spacing",
        values=list(spacings),
        points=points,
        config_snapshot=_snapshot(cfg, distance=distance),
    )


def sweep_distance(cfg: StudyConfig, distances: list[float]) -> SweepResult:
    """Normalized MSEs versus TE-RE center distance at fixed spacing."""
    spacing = cfg.spacing if cfg.spacing is not None else 0.05 * cfg.constants.wavelength
    tasks = [
        (lambda d=d, t=t: _mse_point(cfg, d, spacing, d, t))
        for d in distances
        for t in cfg.tilts_deg
    ]
    points = _run_points(cfg.jobs, tasks)
    return SweepResult(
        sweep_variable="distance",
        values=list(distances),
        points=points,
        config_snapshot=_snapshot(cfg, spacing=spacing),
    )


def sweep_elements(
    cfg: StudyConfig,
    tx_counts: list[tuple[int, int]],
    distances: list[float] | None = None,
) -> SweepResult:
    """Normalized MSEs versus transmit element count.

    Each point is evaluated at every requested distance; the point value
    is the total transmit element count.
    """
    spacing = cfg.spacing if cfg.spacing is not None else 0.05 * cfg.constants.wavelength
    lam = cfg.constants.wavelength
    if distances is None:
        distances = (
            [cfg.distance] if cfg.distance is not None else [5 * lam, 50 * lam]
        )
    tasks = [
        (lambda c=c, d=d, t=t: _mse_point(cfg, c[0] * c[1], spacing, d, t, tx_count=c))
        for c in tx_counts
        for d in distances
        for t in cfg.tilts_deg
    ]
    points = _run_points(cfg.jobs, tasks)
    return SweepResult(
        sweep_variable="elements",
        values=[c[0] * c[1] for c in tx_counts],
        points=points,
        config_snapshot=_snapshot(cfg, spacing=spacing),
    )


def eigen_study(
    cfg: StudyConfig,
    cases: list[tuple[tuple[int, int], tuple[int, int], float]],
    threshold_ratio: float = DEFAULT_THRESHOLD_RATIO,
    models: tuple[Model, ...] = (Model.EXACT, Model.CA1, Model.CA2),
) -> list[SpectrumResult]:
    """Singular spectra per (tx_count, rx_count, distance) case and model."""
    spacing = cfg.spacing if cfg.spacing is not None else 0.05 * cfg.constants.wavelength
    tilt = cfg.tilts_deg[0] if len(cfg.tilts_deg) == 1 else 90.0
    k = cfg.constants
    results = []
    for tx_count, rx_count, distance in cases:
        case_cfg = replace(cfg, tx_count=tuple(tx_count), rx_count=tuple(rx_count))
        tx_spec, rx_spec = surface_pair(case_cfg, spacing, distance, tilt)
        tx_frames = element_frames(tx_spec)
        rx_frames = element_frames(rx_spec)
        config_id = (
            f"tx{tx_count[0]}x{tx_count[1]}_rx{rx_count[0]}x{rx_count[1]}"
            f"_d{distance / k.wavelength:g}lam"
        )
        for model in models:
            q = cfg.quadrature if model is Model.EXACT else None
            ch = assemble(tx_frames, rx_frames, k, model, q)
            spec = singular_spectrum(ch, threshold_ratio)
            spec.config_id = config_id
            results.append(spec)
    return results


def _snapshot(cfg: StudyConfig, **overrides) -> dict:
    snap = {
        "frequency_hz": cfg.frequency,
        "tx_count": list(cfg.tx_count),
        "rx_count": list(cfg.rx_count),
        "spacing_m": cfg.spacing,
        "distance_m": cfg.distance,
        "tilts_deg": list(cfg.tilts_deg),
        "quadrature": {
            "nodes_per_axis": cfg.quadrature.nodes_per_axis,
            "refinement_limit": cfg.quadrature.refinement_limit,
            "rel_tol": cfg.quadrature.rel_tol,
        },
    }
    for key, val in overrides.items():
        snap[f"{key}_m"] = val
    return snap

"""Experiment configuration parsing.

Configs are TOML files (JSON with the same schema is also accepted, so a
run can be replayed straight from its ``manifest.json``).  Angles are
given in degrees at this boundary; lengths may be absolute meters
(numbers) or wavelength multiples (strings with a ``lam`` suffix, e.g.
``"0.05lam"``).  The resolved config always carries meters.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import Model, QuadratureSpec
from .em_core import EmConstants
from .errors import ConfigError
from .geometry import Angles, SurfaceSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_FREQUENCY_HZ = 30e9


@dataclass
class ExperimentConfig:
    frequency: float
    transmit: SurfaceSpec
    receive: SurfaceSpec
    models: list[Model]
    quadrature: QuadratureSpec
    sweep: dict | None = None
    eigen: dict | None = None
    pair: dict = field(default_factory=dict)
    export: dict = field(default_factory=dict)
    jobs: int = 1
    #: resolved (all-meters) raw document, echoed into the manifest
    resolved: dict = field(default_factory=dict)

    @property
    def constants(self) -> EmConstants:
        return EmConstants.from_frequency(self.frequency)


def parse_length(value, wavelength: float) -> float:
    """A length in meters, or a ``lam``-suffixed wavelength multiple."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if text.endswith("lam"):
            try:
                return float(text[:-3]) * wavelength
            except ValueError:
                raise ConfigError(f"bad length literal {value!r}") from None
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"bad length literal {value!r}") from None
    raise ConfigError(f"bad length literal {value!r}")


def load_config(path) -> ExperimentConfig:
    """Read and resolve a TOML (or replayed JSON manifest) config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".json":
            doc = json.loads(path.read_text())
            if "config" in doc and isinstance(doc["config"], dict):
                doc = doc["config"]  # manifest replay
        else:
            doc = tomllib.loads(path.read_text())
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return resolve_config(doc)


def resolve_config(doc: dict) -> ExperimentConfig:
    try:
        return _resolve(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _resolve(doc: dict) -> ExperimentConfig:
    frequency = float(doc.get("frequency_hz", DEFAULT_FREQUENCY_HZ))
    if frequency <= 0:
        raise ConfigError("frequency_hz must be positive")
    wavelength = EmConstants.from_frequency(frequency).wavelength

    transmit, tx_doc = _surface(doc.get("transmit", {}), wavelength)
    receive, rx_doc = _surface(doc.get("receive", {}), wavelength, default_z=wavelength)

    model_names = doc.get("models", ["exact", "ca1", "ca2"])
    if not model_names:
        raise ConfigError("at least one model must be selected")
    try:
        models = [Model(name) for name in model_names]
    except ValueError:
        raise ConfigError(f"unknown model in {model_names!r}") from None

    qdoc = doc.get("quadrature", {})
    quadrature = QuadratureSpec(
        nodes_per_axis=int(qdoc.get("nodes_per_axis", 8)),
        refinement_limit=int(qdoc.get("refinement_limit", 3)),
        rel_tol=float(qdoc.get("rel_tol", 1e-9)),
    )

    sweep = _resolve_sweep(doc.get("sweep"), wavelength)
    eigen = _resolve_eigen(doc.get("eigen"), wavelength)

    resolved = {
        "frequency_hz": frequency,
        "transmit": tx_doc,
        "receive": rx_doc,
        "models": [m.value for m in models],
        "quadrature": {
            "nodes_per_axis": quadrature.nodes_per_axis,
            "refinement_limit": quadrature.refinement_limit,
            "rel_tol": quadrature.rel_tol,
        },
        "jobs": int(doc.get("jobs", 1)),
        "pair": dict(doc.get("pair", {})),
        "export": dict(doc.get("export", {})),
    }
    if sweep is not None:
        resolved["sweep"] = sweep
    if eigen is not None:
        resolved["eigen"] = eigen

    return ExperimentConfig(
        frequency=frequency,
        transmit=transmit,
        receive=receive,
        models=models,
        quadrature=quadrature,
        sweep=sweep,
        eigen=eigen,
        pair=resolved["pair"],
        export=resolved["export"],
        jobs=resolved["jobs"],
        resolved=resolved,
    )


def _surface(sdoc: dict, wavelength: float, default_z: float = 0.0):
    count = sdoc.get("count", [1, 1])
    if len(count) != 2:
        raise ConfigError("surface count must be [count_h, count_v]")
    pitch_h = parse_length(sdoc.get("pitch_h", sdoc.get("pitch", 0.05 * wavelength)), wavelength)
    pitch_v = parse_length(sdoc.get("pitch_v", sdoc.get("pitch", 0.05 * wavelength)), wavelength)
    center_raw = sdoc.get("center", [0.0, 0.0, default_z])
    center = [parse_length(c, wavelength) for c in center_raw]
    angles_deg = [float(a) for a in sdoc.get("angles_deg", [90.0, 0.0, 90.0, 90.0])]
    if len(angles_deg) != 4:
        raise ConfigError("angles_deg must be [polar_h, azimuth_h, polar_v, azimuth_v]")
    spec = SurfaceSpec(
        center=np.asarray(center),
        angles=Angles.from_degrees(*angles_deg),
        count_h=int(count[0]),
        count_v=int(count[1]),
        pitch_h=pitch_h,
        pitch_v=pitch_v,
    )
    resolved = {
        "count": [int(count[0]), int(count[1])],
        "pitch_h": pitch_h,
        "pitch_v": pitch_v,
        "center": center,
        "angles_deg": angles_deg,
    }
    return spec, resolved


def _resolve_sweep(sdoc: dict | None, wavelength: float) -> dict | None:
    if sdoc is None:
        return None
    kind = sdoc.get("kind")
    if kind not in ("spacing", "distance", "elements"):
        raise ConfigError(f"sweep kind must be spacing|distance|elements, got {kind!r}")
    raw_values = sdoc.get("values", [])
    if not raw_values:
        raise ConfigError("sweep values list must be non-empty")
    if kind == "elements":
        values = []
        for v in raw_values:
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                raise ConfigError("elements sweep values must be [count_h, count_v] pairs")
            values.append([int(v[0]), int(v[1])])
    else:
        values = [parse_length(v, wavelength) for v in raw_values]
        if any(v <= 0 for v in values):
            raise ConfigError("sweep values must be positive lengths")
    tilts = [float(t) for t in sdoc.get("tilts_deg", [60.0, 75.0, 90.0])]
    return {"kind": kind, "values": values, "tilts_deg": tilts}


def _resolve_eigen(edoc: dict | None, wavelength: float) -> dict | None:
    if edoc is None:
        return None
    ratio = float(edoc.get("threshold_ratio", 0.01))
    if not 0.0 < ratio <= 1.0:
        raise ConfigError("threshold_ratio must lie in (0, 1]")
    cases = []
    for case in edoc.get("cases", []):
        cases.append(
            {
                "tx": [int(case["tx"][0]), int(case["tx"][1])],
                "rx": [int(case["rx"][0]), int(case["rx"][1])],
                "distance": parse_length(case["distance"], wavelength),
            }
        )
    if not cases:
        raise ConfigError("eigen section needs at least one case")
    return {"threshold_ratio": ratio, "cases": cases}

"""Command-line front end.

Subcommands: ``pair`` (single element-pair channels), ``sweep`` (normalized
MSE parameter sweeps), ``eigen`` (singular spectra and mode counts),
``export`` (assembled system channel in binary/JSON form).  Each run
writes its results plus a ``manifest.json`` that echoes the fully resolved
configuration (all lengths in meters); re-running with ``--config
manifest.json`` replays the run byte-identically for the delimited
outputs.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    StudyConfig,
    eigen_study,
    sweep_distance,
    sweep_elements,
    sweep_spacing,
)
from .assembly import (
    Ordering,
    assemble,
    reorder,
    write_channel_binary,
    write_channel_json,
)
from .channel import (
    Model,
    ca1_pair_channel,
    ca2_pair_channel,
    exact_pair_channel,
    sinc_arguments_frame,
    sinc_arguments_paper,
)
from .config import ExperimentConfig, load_config
from .errors import ConfigError, HmimoError
from .geometry import element_frames
from .plots import plot_spectra, plot_sweep

SWEEP_CSV_HEADER = ["sweep_var", "value", "theta_v_deg", "mse_ca1", "mse_ca2", "oracle_nodes", "converged"]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        started = time.time()
        written = args.func(cfg, args, out_dir)
        _write_manifest(cfg, args, out_dir, written, time.time() - started)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (HmimoError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmimo",
        description="LOS channel matrices between two holographic MIMO surfaces",
    )
    parser.set_defaults(func=lambda *a: parser.error("choose a subcommand"))
    sub = parser.add_subparsers(dest="command")
    for name, func, doc in (
        ("pair", cmd_pair, "channel matrices for one element pair"),
        ("sweep", cmd_sweep, "normalized-MSE parameter sweep"),
        ("eigen", cmd_eigen, "singular spectra and eigenmode counts"),
        ("export", cmd_export, "write the assembled system channel"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="TOML config (or manifest.json replay)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=None, help="worker pool size")
        p.add_argument("--threshold", type=float, default=None, help="eigenmode threshold ratio")
        p.add_argument("--quad-nodes", type=int, default=None, help="oracle nodes per axis")
        p.set_defaults(func=func)
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.quad_nodes is not None:
        cfg.quadrature = replace(cfg.quadrature, nodes_per_axis=args.quad_nodes)
        cfg.resolved["quadrature"]["nodes_per_axis"] = args.quad_nodes
    if args.jobs is not None:
        cfg.jobs = args.jobs
        cfg.resolved["jobs"] = args.jobs
    if args.threshold is not None:
        if cfg.eigen is None:
            raise ConfigError("--threshold given but config has no [eigen] section")
        cfg.eigen["threshold_ratio"] = args.threshold
        cfg.resolved["eigen"]["threshold_ratio"] = args.threshold
    return cfg


def _study_config(cfg: ExperimentConfig, tilts=None) -> StudyConfig:
    distance = float(np.linalg.norm(cfg.receive.center - cfg.transmit.center))
    if tilts is None:
        tilts = (float(np.degrees(cfg.receive.angles.polar_v)),)
    return StudyConfig(
        frequency=cfg.frequency,
        tx_count=(cfg.transmit.count_h, cfg.transmit.count_v),
        rx_count=(cfg.receive.count_h, cfg.receive.count_v),
        spacing=cfg.transmit.pitch_h,
        distance=distance,
        tilts_deg=tuple(tilts),
        quadrature=cfg.quadrature,
        jobs=cfg.jobs,
    )


def cmd_pair(cfg: ExperimentConfig, args, out_dir: Path) -> list[str]:
    pair_cfg = cfg.pair
    tx_frames = element_frames(cfg.transmit)
    rx_frames = element_frames(cfg.receive)
    tx_index = int(pair_cfg.get("tx_index", 0))
    rx_index = int(pair_cfg.get("rx_index", 0))
    if not (0 <= tx_index < len(tx_frames) and 0 <= rx_index < len(rx_frames)):
        raise ConfigError("pair indices out of range")
    tx, rx = tx_frames[tx_index], rx_frames[rx_index]
    k = cfg.constants
    r_bar = rx.center - tx.center

    doc = {"tx_index": tx_index, "rx_index": rx_index, "models": {}}
    for model in cfg.models:
        if model is Model.EXACT:
            pair = exact_pair_channel(tx, rx, k, cfg.quadrature)
            entry = _matrix_doc(pair.matrix)
            entry["quad_trace"] = [
                {"nodes_per_axis": n, "rel_change": None if rel == float("inf") else rel}
                for n, rel in pair.quad_trace
            ]
        elif model is Model.CA1:
            entry = _matrix_doc(ca1_pair_channel(tx, rx, k).matrix)
        else:
            entry = _matrix_doc(ca2_pair_channel(tx, rx, k).matrix)
        doc["models"][model.value] = entry

    sinc_form = pair_cfg.get("sinc_form", "frame")
    if sinc_form not in ("frame", "paper", "both"):
        raise ConfigError(f"pair.sinc_form must be frame|paper|both, got {sinc_form!r}")
    sincs = {}
    if sinc_form in ("frame", "both"):
        sincs["frame"] = {
            "tx": list(sinc_arguments_frame(tx, r_bar, k.k0)),
            "rx": list(sinc_arguments_frame(rx, r_bar, k.k0)),
        }
    if sinc_form in ("paper", "both"):
        sincs["paper"] = {
            "tx": list(
                sinc_arguments_paper(cfg.transmit.angles, (tx.len_h, tx.len_v), r_bar, k.k0)
            ),
            "rx": list(
                sinc_arguments_paper(cfg.receive.angles, (rx.len_h, rx.len_v), r_bar, k.k0)
            ),
        }
    doc["sinc_arguments"] = sincs

    path = out_dir / "pair.json"
    path.write_text(json.dumps(doc, indent=2))
    return ["pair.json"]


def _matrix_doc(matrix: np.ndarray) -> dict:
    return {
        "re": matrix.real.tolist(),
        "im": matrix.imag.tolist(),
    }


def cmd_sweep(cfg: ExperimentConfig, args, out_dir: Path) -> list[str]:
    if cfg.sweep is None:
        raise ConfigError("sweep subcommand needs a [sweep] config section")
    kind = cfg.sweep["kind"]
    values = cfg.sweep["values"]
    study = _study_config(cfg, tilts=cfg.sweep["tilts_deg"])
    if kind == "spacing":
        result = sweep_spacing(study, values)
    elif kind == "distance":
        result = sweep_distance(study, values)
    else:
        result = sweep_elements(study, [tuple(v) for v in values])

    csv_path = out_dir / "sweep.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_HEADER)
        for point in result.points:
            writer.writerow(
                [
                    result.sweep_variable,
                    repr(float(point.value)),
                    repr(float(point.tilt_deg)),
                    "" if point.mse_ca1 is None else repr(point.mse_ca1),
                    "" if point.mse_ca2 is None else repr(point.mse_ca2),
                    point.oracle_nodes,
                    "true" if point.converged else "false",
                ]
            )
    plot_sweep(result, out_dir / "sweep.svg")
    return ["sweep.csv", "sweep.svg"]


def cmd_eigen(cfg: ExperimentConfig, args, out_dir: Path) -> list[str]:
    if cfg.eigen is None:
        raise ConfigError("eigen subcommand needs an [eigen] config section")
    study = _study_config(cfg)
    cases = [
        (tuple(case["tx"]), tuple(case["rx"]), case["distance"])
        for case in cfg.eigen["cases"]
    ]
    results = eigen_study(
        study,
        cases,
        threshold_ratio=cfg.eigen["threshold_ratio"],
        models=tuple(cfg.models),
    )

    with open(out_dir / "spectrum.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "config_id", "k", "sigma_k"])
        for res in results:
            for idx, sigma in enumerate(res.singular_values, start=1):
                writer.writerow([res.model.value, res.config_id, idx, repr(float(sigma))])
    with open(out_dir / "modes.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "config_id", "eigenmode_count"])
        for res in results:
            writer.writerow([res.model.value, res.config_id, res.eigenmode_count])
    plot_spectra(results, out_dir / "spectrum.svg")
    return ["spectrum.csv", "modes.csv", "spectrum.svg"]


def cmd_export(cfg: ExperimentConfig, args, out_dir: Path) -> list[str]:
    model = Model(cfg.export.get("model", cfg.models[0].value))
    ordering = Ordering(cfg.export.get("ordering", "element"))
    tx_frames = element_frames(cfg.transmit)
    rx_frames = element_frames(cfg.receive)
    q = cfg.quadrature if model is Model.EXACT else None
    ch = assemble(tx_frames, rx_frames, cfg.constants, model, q)
    if ordering is Ordering.COORDINATE_MAJOR:
        ch = reorder(ch)
    write_channel_binary(ch, out_dir / "channel.bin")
    write_channel_json(ch, out_dir / "channel.json")
    return ["channel.bin", "channel.json"]


def _write_manifest(cfg, args, out_dir: Path, written: list[str], elapsed: float) -> None:
    manifest = {
        "command": args.command,
        "package_version": __version__,
        "config": cfg.resolved,
        "outputs": written,
        "wall_clock_s": elapsed,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    sys.exit(main())

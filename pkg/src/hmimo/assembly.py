"""System-level channel assembly and serialization.

Builds the 3M x 3N block channel matrix from per-pair channels, converts
between the two block orderings (element-major: x,y,z interleaved per
element; coordinate-major: all x rows, then y, then z), applies currents,
and evaluates the multi-user downlink split into signal and interference.

Element-major storage is the ground truth; the coordinate-major layout is
a fixed permutation of it.

Serialization formats (consumed by the CLI ``export`` subcommand and by
downstream tools):

* binary: 64-byte ASCII header ``HMIMO1 <ordering> <3M> <3N> <frequency>``
  padded with spaces, followed by row-major little-endian float64
  (re, im) pairs;
* JSON: the same header fields plus the model name and nested row-major
  [re, im] entries.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .channel import (
    Model,
    PairChannel,
    QuadratureSpec,
    _refined_batch,
    ca1_pair_channel,
    ca2_pair_channel,
    exact_pair_channel,
)
from .em_core import EmConstants
from .errors import (
    DimensionMismatch,
    HmimoError,
    OrderingMismatch,
    QuadratureNotConverged,
)
from .geometry import ElementFrame

BINARY_MAGIC = "HMIMO1"
HEADER_SIZE = 64


class Ordering(enum.Enum):
    ELEMENT_MAJOR = "element"  # zeta: x,y,z interleaved per element
    COORDINATE_MAJOR = "coordinate"  # varsigma: all x, all y, all z


@dataclass
class SystemChannel:
    """Assembled 3M x 3N complex channel matrix."""

    matrix: np.ndarray
    ordering: Ordering
    m_elements: int
    n_elements: int
    model: Model | None
    frequency: float

    def __post_init__(self):
        expected = (3 * self.m_elements, 3 * self.n_elements)
        if self.matrix.shape != expected:
            raise DimensionMismatch(
                f"matrix shape {self.matrix.shape} does not match {expected}"
            )

    def block(self, m: int, n: int) -> np.ndarray:
        """3x3 block of receive element m, transmit element n (element-major)."""
        if self.ordering is not Ordering.ELEMENT_MAJOR:
            raise OrderingMismatch("blocks are defined on the element-major layout")
        return self.matrix[3 * m : 3 * m + 3, 3 * n : 3 * n + 3]


@dataclass
class CurrentVector:
    values: np.ndarray
    ordering: Ordering


@dataclass
class FieldVector:
    values: np.ndarray
    ordering: Ordering


def assemble(
    tx_frames: list[ElementFrame],
    rx_frames: list[ElementFrame],
    k: EmConstants,
    model: Model,
    q: QuadratureSpec | None = None,
) -> SystemChannel:
    """Element-major system channel from per-pair channels.

    Block (m, n) is the chosen per-pair model between rx_frames[m] and
    tx_frames[n]; block order follows the canonical element index.  The
    quadrature spec is required for (and only used by) the exact model.
    Pair-level failures are re-raised annotated with the (m, n) indices.
    """
    if not tx_frames or not rx_frames:
        raise DimensionMismatch("frame lists must be non-empty")
    if model is Model.EXACT and q is None:
        raise ValueError("the exact model requires a QuadratureSpec")
    m_count, n_count = len(rx_frames), len(tx_frames)
    matrix = np.zeros((3 * m_count, 3 * n_count), dtype=complex)
    if model is Model.EXACT and _uniform(tx_frames) and _uniform(rx_frames):
        # All pairs share the two in-plane frames: refine them as one
        # batch.  Per-pair arithmetic is unchanged (the kernel works on
        # center differences plus shared node offsets), so every block
        # still equals the standalone exact_pair_channel output.
        rx_centers = np.stack([f.center for f in rx_frames])
        tx_centers = np.stack([f.center for f in tx_frames])
        diffs = (rx_centers[:, None, :] - tx_centers[None, :, :]).reshape(-1, 3)
        # Lattice geometry repeats many center differences bitwise
        # (block-Toeplitz structure); compute each distinct one once.
        unique_diffs, inverse = np.unique(diffs, axis=0, return_inverse=True)
        try:
            unique_blocks, _ = _refined_batch(unique_diffs, tx_frames[0], rx_frames[0], k, q)
        except QuadratureNotConverged as exc:
            failed = getattr(exc, "failed_indices", [])
            hits = np.flatnonzero(np.isin(inverse.reshape(-1), failed))
            where = [divmod(int(b), n_count) for b in hits[:8]]
            raise QuadratureNotConverged(
                f"pairs (m, n) {where}{'...' if len(hits) > 8 else ''}: {exc}",
                previous=exc.previous,
                latest=exc.latest,
            ) from exc
        blocks = unique_blocks[inverse.reshape(-1)]
        matrix = blocks.reshape(m_count, n_count, 3, 3).transpose(0, 2, 1, 3).reshape(
            3 * m_count, 3 * n_count
        )
        matrix = np.ascontiguousarray(matrix)
        return SystemChannel(
            matrix=matrix,
            ordering=Ordering.ELEMENT_MAJOR,
            m_elements=m_count,
            n_elements=n_count,
            model=model,
            frequency=k.frequency,
        )
    for m, rx in enumerate(rx_frames):
        for n, tx in enumerate(tx_frames):
            try:
                pair = _pair_channel(tx, rx, k, model, q, rx_index=m, tx_index=n)
            except HmimoError as exc:
                raise type(exc)(f"pair (m={m}, n={n}): {exc}") from exc
            matrix[3 * m : 3 * m + 3, 3 * n : 3 * n + 3] = pair.matrix
    return SystemChannel(
        matrix=matrix,
        ordering=Ordering.ELEMENT_MAJOR,
        m_elements=m_count,
        n_elements=n_count,
        model=model,
        frequency=k.frequency,
    )


def _uniform(frames: list[ElementFrame]) -> bool:
    """True when every frame shares directions and element size."""
    first = frames[0]
    return all(
        np.array_equal(f.dir_h, first.dir_h)
        and np.array_equal(f.dir_v, first.dir_v)
        and f.len_h == first.len_h
        and f.len_v == first.len_v
        for f in frames
    )


def _pair_channel(tx, rx, k, model, q, rx_index=0, tx_index=0) -> PairChannel:
    if model is Model.EXACT:
        return exact_pair_channel(tx, rx, k, q, rx_index=rx_index, tx_index=tx_index)
    if model is Model.CA1:
        return ca1_pair_channel(tx, rx, k, rx_index=rx_index, tx_index=tx_index)
    if model is Model.CA2:
        return ca2_pair_channel(tx, rx, k, rx_index=rx_index, tx_index=tx_index)
    raise ValueError(f"unknown model {model!r}")


def reorder(ch: SystemChannel) -> SystemChannel:
    """Switch between element-major and coordinate-major block layouts.

    An involution: reorder(reorder(ch)) is bit-identical to ch.  Row
    (coordinate-major) u*M + m holds the same entries as row 3m + u
    (element-major); columns likewise with N.
    """
    m, n = ch.m_elements, ch.n_elements
    if ch.ordering is Ordering.ELEMENT_MAJOR:
        # axes (m, u, n, v) -> (u, m, v, n)
        matrix = ch.matrix.reshape(m, 3, n, 3).transpose(1, 0, 3, 2).reshape(3 * m, 3 * n)
        new_ordering = Ordering.COORDINATE_MAJOR
    else:
        # axes (u, m, v, n) -> (m, u, n, v)
        matrix = ch.matrix.reshape(3, m, 3, n).transpose(1, 0, 3, 2).reshape(3 * m, 3 * n)
        new_ordering = Ordering.ELEMENT_MAJOR
    return SystemChannel(
        matrix=np.ascontiguousarray(matrix),
        ordering=new_ordering,
        m_elements=m,
        n_elements=n,
        model=ch.model,
        frequency=ch.frequency,
    )


def permutation_vectors(m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps p_r, p_t with H_coord = H_elem[p_r][:, p_t].

    Row u*M + m of the coordinate-major layout is row 3m + u of the
    element-major layout; columns likewise with N.
    """
    p_r = (3 * np.arange(m)[None, :] + np.arange(3)[:, None]).reshape(-1)
    p_t = (3 * np.arange(n)[None, :] + np.arange(3)[:, None]).reshape(-1)
    return p_r, p_t


def apply_channel(ch: SystemChannel, j: CurrentVector) -> FieldVector:
    """Matrix-vector product e = H j in the channel's ordering."""
    if ch.ordering is not j.ordering:
        raise OrderingMismatch(
            f"channel ordered {ch.ordering.value}, currents {j.ordering.value}"
        )
    if j.values.shape != (3 * ch.n_elements,):
        raise DimensionMismatch(
            f"current length {j.values.shape} incompatible with {3 * ch.n_elements}"
        )
    return FieldVector(values=ch.matrix @ j.values, ordering=ch.ordering)


def multiuser_downlink(
    channels: list[SystemChannel], currents: list[CurrentVector]
) -> list[tuple[FieldVector, FieldVector]]:
    """Per-user (signal, interference) fields in a downlink with K users.

    User k receives signal H_k j_k and interference sum_{i != k} H_k j_i;
    the total field at user k is their sum.
    """
    if len(channels) != len(currents) or not channels:
        raise DimensionMismatch("need one channel and one current vector per user")
    n = channels[0].n_elements
    ordering = channels[0].ordering
    for ch in channels:
        if ch.n_elements != n or ch.ordering is not ordering:
            raise DimensionMismatch("channels must share transmit dimension and ordering")
    out = []
    for k, ch in enumerate(channels):
        signal = apply_channel(ch, currents[k])
        interference = np.zeros(3 * ch.m_elements, dtype=complex)
        for i, j in enumerate(currents):
            if i != k:
                interference = interference + apply_channel(ch, j).values
        out.append((signal, FieldVector(values=interference, ordering=ch.ordering)))
    return out


def write_channel_binary(ch: SystemChannel, path) -> None:
    header = f"{BINARY_MAGIC} {ch.ordering.value} {3 * ch.m_elements} {3 * ch.n_elements} {ch.frequency!r}"
    encoded = header.encode("ascii")
    if len(encoded) > HEADER_SIZE:
        raise ValueError("header does not fit in 64 bytes")
    payload = np.empty((ch.matrix.size, 2), dtype="<f8")
    flat = ch.matrix.reshape(-1)
    payload[:, 0] = flat.real
    payload[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(encoded.ljust(HEADER_SIZE, b" "))
        fh.write(payload.tobytes())


def read_channel_binary(path, model: Model | None = None) -> SystemChannel:
    with open(path, "rb") as fh:
        header = fh.read(HEADER_SIZE).decode("ascii").split()
        if header[0] != BINARY_MAGIC:
            raise ValueError(f"bad magic {header[0]!r}")
        ordering = Ordering(header[1])
        rows, cols = int(header[2]), int(header[3])
        frequency = float(header[4])
        payload = np.frombuffer(fh.read(), dtype="<f8").reshape(rows * cols, 2)
    matrix = (payload[:, 0] + 1j * payload[:, 1]).reshape(rows, cols)
    return SystemChannel(
        matrix=matrix,
        ordering=ordering,
        m_elements=rows // 3,
        n_elements=cols // 3,
        model=model,
        frequency=frequency,
    )


def write_channel_json(ch: SystemChannel, path) -> None:
    doc = {
        "magic": BINARY_MAGIC,
        "ordering": ch.ordering.value,
        "rows": 3 * ch.m_elements,
        "cols": 3 * ch.n_elements,
        "frequency_hz": ch.frequency,
        "model": ch.model.value if ch.model is not None else None,
        "entries": [[z.real, z.imag] for z in ch.matrix.reshape(-1)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def read_channel_json(path) -> SystemChannel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc["magic"] != BINARY_MAGIC:
        raise ValueError(f"bad magic {doc['magic']!r}")
    entries = np.asarray(doc["entries"], dtype=float)
    matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(doc["rows"], doc["cols"])
    return SystemChannel(
        matrix=matrix,
        ordering=Ordering(doc["ordering"]),
        m_elements=doc["rows"] // 3,
        n_elements=doc["cols"] // 3,
        model=Model(doc["model"]) if doc["model"] else None,
        frequency=doc["frequency_hz"],
    )

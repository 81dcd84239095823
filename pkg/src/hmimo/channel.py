"""Per-element-pair channel models.

Three models of the 3x3 channel between one transmit and one receive
element:

* ``exact_pair_channel`` -- the double surface integral of the dyadic
  kernel, evaluated by tensor Gauss-Legendre quadrature with node-doubling
  refinement.  This is the oracle everything else is validated against.
* ``ca1_pair_channel`` -- closed form: amplitude matrix at center
  separation, center phase, and four sinc factors (two per surface).
* ``ca2_pair_channel`` -- CA-I with all four sinc factors replaced by 1.

Two formulations of the sinc arguments are provided for cross-validation:
the coordinate-free form (projection of the unit separation onto the
element's in-plane directions; valid for every orientation) and the
cotangent form that routes through the in-plane dz = c_x dx + c_y dy
substitution and is only defined away from the azimuth degeneracy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .em_core import EmConstants, SINGULARITY_RADIUS, _dyadic_green_pairwise, amplitude_matrix
from .errors import CoincidentPoints, QuadratureNotConverged
from .geometry import Angles, ElementFrame, delta_z_coefficients, direction_vectors

# Keep the per-call working set of the pairwise kernel bounded
# (difference vectors held in memory at once).
_MAX_PAIR_BLOCK = 500_000


class Model(enum.Enum):
    """Provenance of a channel matrix."""

    EXACT = "exact"
    CA1 = "ca1"
    CA2 = "ca2"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre settings for the exact-channel oracle."""

    nodes_per_axis: int = 8
    refinement_limit: int = 3
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ValueError("nodes_per_axis must be >= 2")
        if self.refinement_limit < 1:
            raise ValueError("refinement_limit must be >= 1")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")


@dataclass
class PairChannel:
    """3x3 channel matrix for one (receive, transmit) element pair."""

    matrix: np.ndarray
    model: Model
    rx_index: int = 0
    tx_index: int = 0
    #: for the exact model: (nodes_per_axis, relative change) per refinement
    quad_trace: list = field(default_factory=list)


def sinc(x: float) -> float:
    """sin(x)/x with sinc(0) = 1; Taylor fallback near 0 avoids cancellation."""
    if abs(x) < 1e-6:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def sinc_arguments_frame(frame: ElementFrame, r_bar_mn, k0: float) -> tuple[float, float]:
    """Coordinate-free sinc arguments of one element.

    (k0 len_h / 2) * (uhat . dir_h) and (k0 len_v / 2) * (uhat . dir_v)
    with uhat the unit center-separation vector.  Defined for all
    orientations.
    """
    r_bar_mn = np.asarray(r_bar_mn, dtype=float)
    rbar = float(np.linalg.norm(r_bar_mn))
    if rbar < SINGULARITY_RADIUS:
        raise CoincidentPoints("zero center separation")
    uhat = r_bar_mn / rbar
    return (
        0.5 * k0 * frame.len_h * float(uhat @ frame.dir_h),
        0.5 * k0 * frame.len_v * float(uhat @ frame.dir_v),
    )


def sinc_arguments_paper(
    angles: Angles, lengths: tuple[float, float], r_bar_mn, k0: float
) -> tuple[float, float]:
    """Sinc arguments via the cotangent-form dz substitution.

    Expresses the plane-wave phase over the element through the Cartesian
    x/y displacement components using dz = c_x dx + c_y dy, then reads off
    the two separable sinc arguments.  Carrying the in-plane directions'
    xy-projections through the substitution keeps this exactly equal to
    the coordinate-free form; with the horizontal axis along x and the
    vertical axis projecting onto y (the default presets) it reduces to
    the familiar (k0 l/2)(xbar + zbar c_x)/rbar, (k0 l/2)(ybar + zbar c_y)/rbar.

    Raises
    ------
    AzimuthDegenerate
        When sin(azimuth_h - azimuth_v) vanishes; the coordinate-free form
        is the production path and has no such restriction.
    """
    c_x, c_y = delta_z_coefficients(angles)
    dir_h, dir_v = direction_vectors(angles)
    r_bar_mn = np.asarray(r_bar_mn, dtype=float)
    rbar = float(np.linalg.norm(r_bar_mn))
    if rbar < SINGULARITY_RADIUS:
        raise CoincidentPoints("zero center separation")
    xbar, ybar, zbar = r_bar_mn
    # Phase gradient in the (dx, dy) parameterization of the element plane.
    wx = (xbar + zbar * c_x) / rbar
    wy = (ybar + zbar * c_y) / rbar
    len_h, len_v = lengths
    arg_h = 0.5 * k0 * len_h * (wx * dir_h[0] + wy * dir_h[1])
    arg_v = 0.5 * k0 * len_v * (wx * dir_v[0] + wy * dir_v[1])
    return arg_h, arg_v


@lru_cache(maxsize=64)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _surface_offsets(frame: ElementFrame, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor quadrature offsets (n^2, 3) from the element center, and
    weights (n^2,), on one element."""
    xi, w = _gauss_legendre(n)
    a = 0.5 * frame.len_h * xi
    b = 0.5 * frame.len_v * xi
    wa = 0.5 * frame.len_h * w
    wb = 0.5 * frame.len_v * w
    offsets = (
        a[:, None, None] * frame.dir_h[None, None, :]
        + b[None, :, None] * frame.dir_v[None, None, :]
    ).reshape(-1, 3)
    weights = (wa[:, None] * wb[None, :]).reshape(-1)
    return offsets, weights


def _batch_estimates(
    center_diffs: np.ndarray,
    tx: ElementFrame,
    rx: ElementFrame,
    k: EmConstants,
    nodes_per_axis: int,
) -> np.ndarray:
    """Fixed-order Gauss-Legendre estimates for a batch of element pairs.

    center_diffs has shape (B, 3), one rx-center minus tx-center per pair;
    every pair shares the tx/rx in-plane frames and element sizes.  The
    point-pair geometry is encoded as center difference plus a shared grid
    of relative node offsets, so the per-pair arithmetic is identical no
    matter how pairs are batched.
    """
    tx_off, tx_w = _surface_offsets(tx, nodes_per_axis)
    rx_off, rx_w = _surface_offsets(rx, nodes_per_axis)
    rel = (rx_off[:, None, :] - tx_off[None, :, :]).reshape(-1, 3)
    weights = (rx_w[:, None] * tx_w[None, :]).reshape(-1)
    n_pairs = center_diffs.shape[0]
    n_nodes = rel.shape[0]
    out = np.empty((n_pairs, 3, 3), dtype=complex)
    chunk = max(1, _MAX_PAIR_BLOCK // n_nodes)
    for start in range(0, n_pairs, chunk):
        sl = slice(start, min(start + chunk, n_pairs))
        diff = center_diffs[sl, None, :] + rel[None, :, :]
        g = _dyadic_green_pairwise(diff, k.k0)
        out[sl] = np.einsum("q,bquv->buv", weights, g)
    return k.channel_prefactor * out


def _refined_batch(
    center_diffs: np.ndarray,
    tx: ElementFrame,
    rx: ElementFrame,
    k: EmConstants,
    q: QuadratureSpec,
) -> tuple[np.ndarray, list[list[tuple[int, float]]]]:
    """Node-doubling refinement of a batch of pair estimates.

    Every pair is refined until two successive estimates agree to
    q.rel_tol in relative Frobenius norm; converged pairs drop out of
    subsequent doublings.  Returns the converged (finer) estimates and a
    per-pair trace of (nodes_per_axis, relative change).

    Raises
    ------
    QuadratureNotConverged
        If any pair is still changing after q.refinement_limit doublings.
    """
    n_pairs = center_diffs.shape[0]
    nodes = q.nodes_per_axis
    previous = _batch_estimates(center_diffs, tx, rx, k, nodes)
    traces: list[list[tuple[int, float]]] = [[(nodes, math.inf)] for _ in range(n_pairs)]
    final = np.empty_like(previous)
    active = np.arange(n_pairs)
    for _ in range(q.refinement_limit):
        nodes *= 2
        latest = _batch_estimates(center_diffs[active], tx, rx, k, nodes)
        rel = np.linalg.norm(latest - previous, axis=(1, 2)) / np.linalg.norm(
            latest, axis=(1, 2)
        )
        for idx, r in zip(active, rel):
            traces[idx].append((nodes, float(r)))
        converged = rel < q.rel_tol
        final[active[converged]] = latest[converged]
        active = active[~converged]
        previous = latest[~converged]
        if active.size == 0:
            return final, traces
    worst = int(active[0])
    exc = QuadratureNotConverged(
        f"quadrature at {nodes} nodes/axis still changing by "
        f"{traces[worst][-1][1]:.3e} for {active.size} pair(s) "
        f"(tolerance {q.rel_tol:.1e})",
        previous=None,
        latest=previous[0],
    )
    exc.failed_indices = active.tolist()
    raise exc


def exact_pair_channel(
    tx: ElementFrame,
    rx: ElementFrame,
    k: EmConstants,
    q: QuadratureSpec = QuadratureSpec(),
    rx_index: int = 0,
    tx_index: int = 0,
) -> PairChannel:
    """Exact channel: double surface integral of the dyadic kernel.

    Gauss-Legendre node counts are doubled (up to q.refinement_limit
    times) until two successive estimates agree to q.rel_tol in relative
    Frobenius norm; the finer estimate is returned.

    Raises
    ------
    QuadratureNotConverged
        If the refinement limit is reached first; carries the last
        estimate.
    """
    center_diffs = (rx.center - tx.center)[None, :]
    matrices, traces = _refined_batch(center_diffs, tx, rx, k, q)
    return PairChannel(
        matrix=matrices[0],
        model=Model.EXACT,
        rx_index=rx_index,
        tx_index=tx_index,
        quad_trace=traces[0],
    )


def ca1_pair_channel(
    tx: ElementFrame,
    rx: ElementFrame,
    k: EmConstants,
    rx_index: int = 0,
    tx_index: int = 0,
) -> PairChannel:
    """Closed-form channel with the four sinc factors (CA-I)."""
    r_bar_mn = rx.center - tx.center
    rbar = float(np.linalg.norm(r_bar_mn))
    amp = amplitude_matrix(rx.center, tx.center, k.k0)
    ut_h, ut_v = sinc_arguments_frame(tx, r_bar_mn, k.k0)
    ur_h, ur_v = sinc_arguments_frame(rx, r_bar_mn, k.k0)
    factor = (
        k.channel_prefactor
        * tx.area
        * rx.area
        * np.exp(1j * k.k0 * rbar)
        * sinc(ut_h)
        * sinc(ut_v)
        * sinc(ur_h)
        * sinc(ur_v)
    )
    return PairChannel(matrix=factor * amp, model=Model.CA1, rx_index=rx_index, tx_index=tx_index)


def ca2_pair_channel(
    tx: ElementFrame,
    rx: ElementFrame,
    k: EmConstants,
    rx_index: int = 0,
    tx_index: int = 0,
) -> PairChannel:
    """Closed-form channel with the sinc product approximated to 1 (CA-II)."""
    r_bar_mn = rx.center - tx.center
    rbar = float(np.linalg.norm(r_bar_mn))
    amp = amplitude_matrix(rx.center, tx.center, k.k0)
    factor = k.channel_prefactor * tx.area * rx.area * np.exp(1j * k.k0 * rbar)
    return PairChannel(matrix=factor * amp, model=Model.CA2, rx_index=rx_index, tx_index=tx_index)


_PAIR_FUNCTIONS = {
    Model.CA1: ca1_pair_channel,
    Model.CA2: ca2_pair_channel,
}

"""Line-of-sight electromagnetic channel matrices between two arbitrarily
placed holographic MIMO antenna surfaces.

Exact quadrature-based per-pair channels, two closed-form approximations,
system-level assembly in both block orderings, and the validation metrics
(normalized MSE, singular spectra) of the accompanying numerical study.
"""

__version__ = "0.1.0"

from .analysis import (
    SpectrumResult,
    StudyConfig,
    SweepPoint,
    SweepResult,
    eigen_study,
    normalized_mse,
    singular_spectrum,
    sweep_distance,
    sweep_elements,
    sweep_spacing,
)
from .assembly import (
    CurrentVector,
    FieldVector,
    Ordering,
    SystemChannel,
    apply_channel,
    assemble,
    multiuser_downlink,
    read_channel_binary,
    read_channel_json,
    reorder,
    write_channel_binary,
    write_channel_json,
)
from .channel import (
    Model,
    PairChannel,
    QuadratureSpec,
    ca1_pair_channel,
    ca2_pair_channel,
    exact_pair_channel,
    sinc,
    sinc_arguments_frame,
    sinc_arguments_paper,
)
from .em_core import (
    EmConstants,
    amplitude_matrix,
    dyadic_green,
    first_order_distance,
    scalar_green,
)
from .errors import (
    AzimuthDegenerate,
    CoincidentPoints,
    ConfigError,
    DegenerateOrientation,
    DimensionMismatch,
    HmimoError,
    OrderingMismatch,
    QuadratureNotConverged,
    ZeroReference,
)
from .geometry import (
    Angles,
    DEFAULT_ANGLES,
    ElementFrame,
    SurfaceSpec,
    delta_z_coefficients,
    direction_vectors,
    element_frames,
)
